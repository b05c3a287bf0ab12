#pragma once

#include <algorithm>
#include <random>

#include "structlearn/learners/common.hpp"

namespace structlearn {

namespace detail {

// averaged = (c * w - u) / c, where u accumulates (visit - 1) * update.
// This is the mean of the weight vectors recorded after each of the c visits.
inline WeightVector averaged_weights(const WeightVector& w, const WeightVector& u, std::uint64_t visits) {
    if (visits == 0) return w;
    const double c = static_cast<double>(visits);
    const std::size_t n = std::max(w.dimension(), u.dimension());
    std::vector<double> avg(n);
    for (std::size_t i = 0; i < n; ++i) avg[i] = (w[i] * c - u[i]) / c;
    return WeightVector(std::move(avg));
}

}  // namespace detail

// Averaged structured perceptron with the lazy (lagged accumulator) form of
// averaging: each update touches only the features in the update vector.
template <class X, class Y, FeatureGenerator<X, Y> G, InferenceSolver<X, Y> S>
TrainResult<Y> train_perceptron(const Dataset<X, Y>& data, const G& fg, const S& solver,
                                const LearnerConfig& cfg, const TrainHooks<Y>& hooks = {}) {
    cfg.validate(Algorithm::perceptron);
    detail::require_training_data(data);

    TrainResult<Y> result;
    result.report.config = cfg.describe(Algorithm::perceptron);

    WeightVector w;
    WeightVector lagged;
    std::uint64_t visits = 0;
    std::mt19937_64 rng(cfg.seed);
    auto order = detail::identity_order(data.size());
    Stopwatch clock;

    const int epochs = cfg.effective_epochs(Algorithm::perceptron);
    for (int epoch = 1; epoch <= epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        EpochRecord rec;
        rec.epoch = epoch;
        for (std::size_t i : order) {
            const auto& ex = data[i];
            ++visits;
            const Y pred = solver.best(w, ex.instance);
            if (!(pred == ex.gold)) {
                ++rec.mistakes;
                const auto update = difference(fg.features(ex.instance, ex.gold), fg.features(ex.instance, pred));
                w.axpy(cfg.eta, update);
                lagged.axpy(cfg.eta * static_cast<double>(visits - 1), update);
            }
            if (hooks.on_visit) {
                clock.pause();
                hooks.on_visit(w);
                clock.resume();
            }
        }
        detail::finish_epoch(rec, detail::averaged_weights(w, lagged, visits), data, fg, solver, cfg, clock,
                             result.report, hooks);
        result.report.converged = rec.mistakes == 0;
    }
    result.weights = detail::averaged_weights(w, lagged, visits);
    return result;
}

}  // namespace structlearn
