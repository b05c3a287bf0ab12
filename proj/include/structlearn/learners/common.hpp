#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "structlearn/contracts.hpp"
#include "structlearn/dataset.hpp"
#include "structlearn/error.hpp"
#include "structlearn/learners/config.hpp"
#include "structlearn/learners/dual_state.hpp"
#include "structlearn/learners/objectives.hpp"
#include "structlearn/learners/report.hpp"

namespace structlearn {

// Observation points into training. Time spent inside hooks is not counted
// in the report's seconds column.
template <class Structure>
struct TrainHooks {
    // After every epoch / outer iteration, with the weights the model would
    // return at that point (averaged weights for the perceptron).
    std::function<void(const EpochRecord&, const WeightVector&)> on_epoch;
    // DCD family: after every coordinate step, from the learner thread.
    std::function<void(const DualState<Structure>&, const WeightVector&)> on_step;
    // Perceptron: after every example visit, with the current (raw) weights.
    std::function<void(const WeightVector&)> on_visit;
};

template <class Structure>
struct TrainResult {
    WeightVector weights;
    TrainReport report;
    // Final dual variables; empty for the perceptron.
    DualState<Structure> dual;
};

namespace detail {

template <class X, class Y>
void require_training_data(const Dataset<X, Y>& data) {
    if (data.empty()) throw ContractError("training requires a non-empty dataset");
}

inline std::vector<std::size_t> identity_order(std::size_t n) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    return order;
}

// Fills the bookkeeping part of an epoch record and runs the epoch hook with
// the clock paused.
template <class X, class Y, class G, class S>
void finish_epoch(EpochRecord& rec, const WeightVector& w, const Dataset<X, Y>& data, const G& fg,
                  const S& solver, const LearnerConfig& cfg, Stopwatch& clock, TrainReport& report,
                  const TrainHooks<Y>& hooks) {
    clock.pause();
    rec.seconds = clock.seconds();
    if (cfg.evaluate_epochs) {
        rec.primal = primal_objective(w, data, fg, solver, cfg.C);
        rec.train_accuracy = training_accuracy(w, data, solver);
    }
    report.epochs.push_back(rec);
    if (hooks.on_epoch) hooks.on_epoch(rec, w);
    clock.resume();
}

}  // namespace detail

}  // namespace structlearn
