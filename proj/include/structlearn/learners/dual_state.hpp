#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "structlearn/error.hpp"
#include "structlearn/sparse_vector.hpp"
#include "structlearn/weight_vector.hpp"

namespace structlearn {

// One cached constraint of example i: a competing structure y with
// d = phi(x_i, y_i) - phi(x_i, y), its loss and its dual variable.
template <class Structure>
struct WorkingEntry {
    Structure structure;
    SparseVector diff;
    double diff_squared_norm = 0.0;
    double loss = 0.0;
    double alpha = 0.0;
    int zero_sweeps = 0;
};

template <class Structure>
struct ExampleDual {
    std::vector<WorkingEntry<Structure>> entries;
    double alpha_sum = 0.0;

    bool contains(const Structure& y) const {
        return std::any_of(entries.begin(), entries.end(),
                           [&](const WorkingEntry<Structure>& e) { return e.structure == y; });
    }
};

template <class Structure>
using DualState = std::vector<ExampleDual<Structure>>;

// Ascent direction of the L2-slack dual along alpha_{i,k}:
//   l - w.d - alpha_sum_i / (2C)
template <class Structure>
double dual_gradient(const ExampleDual<Structure>& ex, const WorkingEntry<Structure>& e,
                     const WeightVector& w, double C) {
    return e.loss - dot(w, e.diff) - ex.alpha_sum / (2.0 * C);
}

struct StepResult {
    // Increase of the dual objective.
    double improvement = 0.0;
    // Projected gradient before the step: |g|, or max(g, 0) when alpha == 0.
    // Zero for every coordinate exactly at the optimum.
    double violation = 0.0;
};

// Closed-form maximization of the dual along one coordinate, clipped so that
// alpha stays non-negative. Updates alpha, alpha_sum and w in place.
template <class Structure>
StepResult dcd_step(ExampleDual<Structure>& ex, std::size_t k, WeightVector& w, double C) {
    auto& e = ex.entries.at(k);
    const double g = dual_gradient(ex, e, w, C);
    const double h = e.diff_squared_norm + 1.0 / (2.0 * C);
    if (!std::isfinite(g) || !std::isfinite(h)) throw ArithmeticError("non-finite dual coordinate step");
    const StepResult none{0.0, e.alpha > 0.0 ? std::abs(g) : std::max(g, 0.0)};
    const double delta = std::max(g / h, -e.alpha);
    if (delta == 0.0) return none;
    // alpha + (-alpha) is exactly +0, so clipped entries read back as zero.
    e.alpha += delta;
    ex.alpha_sum += delta;
    w.axpy(delta, e.diff);
    return {delta * g - 0.5 * h * delta * delta, none.violation};
}

// D(alpha) = sum alpha*l - 1/2 ||w||^2 - 1/(4C) sum_i alpha_sum_i^2, with w
// the weight vector reconstructed from alpha.
template <class Structure>
double dual_objective(const DualState<Structure>& state, const WeightVector& w, double C) {
    double linear = 0.0;
    double slack = 0.0;
    for (const auto& ex : state) {
        for (const auto& e : ex.entries) linear += e.alpha * e.loss;
        slack += ex.alpha_sum * ex.alpha_sum;
    }
    return linear - 0.5 * w.squared_norm() - slack / (4.0 * C);
}

// sum_{i,k} alpha_{i,k} d_{i,k}; should equal the learner's weight vector.
template <class Structure>
WeightVector reconstruct_weights(const DualState<Structure>& state) {
    WeightVector w;
    for (const auto& ex : state)
        for (const auto& e : ex.entries) w.axpy(e.alpha, e.diff);
    return w;
}

template <class Structure>
std::size_t working_set_size(const DualState<Structure>& state) {
    std::size_t n = 0;
    for (const auto& ex : state) n += ex.entries.size();
    return n;
}

// Bumps the zero-alpha streak of every entry and evicts those that reached
// the limit. Evicted entries carry alpha == 0, so w is unchanged.
template <class Structure>
void prune_working_sets(DualState<Structure>& state, int limit) {
    for (auto& ex : state) {
        for (auto& e : ex.entries) e.zero_sweeps = e.alpha == 0.0 ? e.zero_sweeps + 1 : 0;
        std::erase_if(ex.entries, [limit](const WorkingEntry<Structure>& e) { return e.zero_sweeps >= limit; });
    }
}

}  // namespace structlearn
