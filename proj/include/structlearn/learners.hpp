#pragma once

#include "structlearn/learners/dcd.hpp"
#include "structlearn/learners/demi_dcd.hpp"
#include "structlearn/learners/perceptron.hpp"

namespace structlearn {

template <class X, class Y, FeatureGenerator<X, Y> G, InferenceSolver<X, Y> S>
TrainResult<Y> train(Algorithm algo, const Dataset<X, Y>& data, const G& fg, const S& solver,
                     const LearnerConfig& cfg, const TrainHooks<Y>& hooks = {}) {
    switch (algo) {
    case Algorithm::perceptron: return train_perceptron(data, fg, solver, cfg, hooks);
    case Algorithm::dcd: return train_dcd(data, fg, solver, cfg, hooks);
    case Algorithm::demidcd: return train_demi_dcd(data, fg, solver, cfg, hooks);
    }
    throw ContractError("unknown algorithm");
}

}  // namespace structlearn
