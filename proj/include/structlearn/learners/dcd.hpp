#pragma once

#include <algorithm>
#include <random>

#include "structlearn/learners/common.hpp"

namespace structlearn {

namespace detail {

// Working-set bookkeeping and coordinate sweeps shared by the sequential and
// parallel dual coordinate descent trainers. Owned by a single thread.
template <class X, class Y, class G>
class DualLearner {
public:
    DualLearner(const Dataset<X, Y>& data, const G& fg, const LearnerConfig& cfg, const TrainHooks<Y>& hooks)
        : data_(data), fg_(fg), cfg_(cfg), hooks_(hooks), state_(data.size()) {
        gold_features_.reserve(data.size());
        for (const auto& ex : data.examples) gold_features_.push_back(fg.features(ex.instance, ex.gold));
    }

    const SparseVector& gold_features(std::size_t i) const { return gold_features_[i]; }
    WeightVector& weights() noexcept { return w_; }
    const WeightVector& weights() const noexcept { return w_; }
    DualState<Y>& state() noexcept { return state_; }

    // Adds structure y as a constraint of example i if its violation exceeds
    // the current slack estimate by more than the tolerance and it is not
    // cached yet. On admission, sweeps example i's working set once.
    bool admit(std::size_t i, Y structure, double loss, const SparseVector& pred_features) {
        auto& ex = state_[i];
        if (structure == data_[i].gold || ex.contains(structure)) return false;
        auto diff = difference(gold_features_[i], pred_features);
        const double violation = loss - dot(w_, diff);
        if (violation - ex.alpha_sum / (2.0 * cfg_.C) <= cfg_.tolerance) return false;
        const double sq = diff.squared_norm();
        ex.entries.push_back({std::move(structure), std::move(diff), sq, loss, 0.0, 0});
        sweep_example(i);
        return true;
    }

    // Returns the largest projected gradient met in the sweep.
    double sweep_example(std::size_t i) {
        double worst = 0.0;
        auto& ex = state_[i];
        for (std::size_t k = 0; k < ex.entries.size(); ++k) {
            worst = std::max(worst, dcd_step(ex, k, w_, cfg_.C).violation);
            if (hooks_.on_step) hooks_.on_step(state_, w_);
        }
        return worst;
    }

    // One pass over every cached coordinate; returns the largest projected
    // gradient met.
    double sweep_all(const std::vector<std::size_t>& order) {
        double worst = 0.0;
        for (std::size_t i : order) worst = std::max(worst, sweep_example(i));
        prune_working_sets(state_, cfg_.prune_after);
        return worst;
    }

    // Sweeps until no cached coordinate has a projected gradient above the
    // tolerance. Returns true if that happened within the sweep cap.
    bool optimize_working_sets(const std::vector<std::size_t>& order) {
        for (int s = 0; s < cfg_.max_inner_sweeps; ++s) {
            if (sweep_all(order) <= cfg_.tolerance) return true;
        }
        return false;
    }

    double dual_objective() const { return structlearn::dual_objective(state_, w_, cfg_.C); }

private:
    const Dataset<X, Y>& data_;
    const G& fg_;
    const LearnerConfig& cfg_;
    const TrainHooks<Y>& hooks_;
    DualState<Y> state_;
    std::vector<SparseVector> gold_features_;
    WeightVector w_;
};

}  // namespace detail

// Dual coordinate descent for the L2-slack structured SVM
//   min 1/2 ||w||^2 + C sum_i xi_i^2
//   s.t. w.phi(x_i, y_i) - w.phi(x_i, y) >= loss(y_i, y) - xi_i.
// Each outer iteration runs loss-augmented inference on every example to
// grow the working sets, then sweeps the cached coordinates. Stops when an
// outer iteration adds no constraint and the sweeps have converged.
template <class X, class Y, FeatureGenerator<X, Y> G, InferenceSolver<X, Y> S>
TrainResult<Y> train_dcd(const Dataset<X, Y>& data, const G& fg, const S& solver, const LearnerConfig& cfg,
                         const TrainHooks<Y>& hooks = {}) {
    cfg.validate(Algorithm::dcd);
    detail::require_training_data(data);

    TrainResult<Y> result;
    result.report.config = cfg.describe(Algorithm::dcd);

    Stopwatch clock;
    detail::DualLearner<X, Y, G> learner(data, fg, cfg, hooks);
    std::mt19937_64 rng(cfg.seed);
    auto order = detail::identity_order(data.size());

    const int epochs = cfg.effective_epochs(Algorithm::dcd);
    for (int epoch = 1; epoch <= epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        std::size_t admitted = 0;
        for (std::size_t i : order) {
            const auto& ex = data[i];
            auto aug = solver.loss_augmented_best(learner.weights(), ex.instance, ex.gold);
            if (aug.structure == ex.gold) continue;
            const auto pred = fg.features(ex.instance, aug.structure);
            if (learner.admit(i, std::move(aug.structure), aug.loss, pred)) ++admitted;
        }
        const bool settled = learner.optimize_working_sets(order);

        EpochRecord rec;
        rec.epoch = epoch;
        rec.mistakes = admitted;
        rec.working_set_size = working_set_size(learner.state());
        rec.dual = learner.dual_objective();
        detail::finish_epoch(rec, learner.weights(), data, fg, solver, cfg, clock, result.report, hooks);

        if (admitted == 0 && settled) {
            result.report.converged = true;
            break;
        }
    }
    result.weights = learner.weights();
    result.dual = std::move(learner.state());
    return result;
}

}  // namespace structlearn
