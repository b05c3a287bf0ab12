#pragma once

#include <algorithm>
#include <cstddef>

#include "structlearn/contracts.hpp"
#include "structlearn/dataset.hpp"

namespace structlearn {

// Slack of one example under w, using fresh loss-augmented inference:
// max(0, l(y^, y_i) - w.phi(x_i, y_i) + w.phi(x_i, y^)).
template <class X, class Y, FeatureGenerator<X, Y> G, InferenceSolver<X, Y> S>
double example_slack(const WeightVector& w, const Example<X, Y>& ex, const G& fg, const S& solver) {
    const auto aug = solver.loss_augmented_best(w, ex.instance, ex.gold);
    const double margin = dot(w, fg.features(ex.instance, ex.gold)) - dot(w, fg.features(ex.instance, aug.structure));
    return std::max(0.0, aug.loss - margin);
}

// 1/2 ||w||^2 + C sum_i xi_i^2.
template <class X, class Y, FeatureGenerator<X, Y> G, InferenceSolver<X, Y> S>
double primal_objective(const WeightVector& w, const Dataset<X, Y>& data, const G& fg, const S& solver,
                        double C) {
    double slack = 0.0;
    for (const auto& ex : data.examples) {
        const double xi = example_slack(w, ex, fg, solver);
        slack += xi * xi;
    }
    return 0.5 * w.squared_norm() + C * slack;
}

// Per-part accuracy when the solver counts parts, exact-match otherwise.
template <class X, class Y, InferenceSolver<X, Y> S>
double training_accuracy(const WeightVector& w, const Dataset<X, Y>& data, const S& solver) {
    std::size_t correct = 0;
    std::size_t total = 0;
    for (const auto& ex : data.examples) {
        const Y pred = solver.best(w, ex.instance);
        if constexpr (PartCounting<S, Y>) {
            const auto [c, t] = solver.count_correct(pred, ex.gold);
            correct += c;
            total += t;
        } else {
            correct += pred == ex.gold ? 1 : 0;
            total += 1;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace structlearn
