#pragma once

#include <concepts>

#include "structlearn/sparse_vector.hpp"
#include "structlearn/weight_vector.hpp"

namespace structlearn {

// Result of loss-augmented inference: the maximizer of score + loss, together
// with its loss against the gold structure.
template <class Structure>
struct Augmented {
    Structure structure;
    double loss;
};

// Joint feature map phi(x, y). Must be deterministic and safe to call from
// several threads at once.
template <class G, class Instance, class Structure>
concept FeatureGenerator = requires(const G& g, const Instance& x, const Structure& y) {
    { g.features(x, y) } -> std::same_as<SparseVector>;
};

// Inference over the implicit feasible set of an instance.
//   best(w, x)                  argmax_y  w . phi(x, y)
//   loss_augmented_best(w,x,g)  argmax_y  w . phi(x, y) + loss(y, g)
//   loss(y, g)                  non-negative, zero on y == g
// Ties must be broken by a fixed, documented rule. Implementations must be
// safe for concurrent read-only use.
template <class S, class Instance, class Structure>
concept InferenceSolver = std::equality_comparable<Structure> &&
    requires(const S& s, const WeightVector& w, const Instance& x, const Structure& y) {
        { s.best(w, x) } -> std::same_as<Structure>;
        { s.loss_augmented_best(w, x, y) } -> std::same_as<Augmented<Structure>>;
        { s.loss(y, y) } -> std::convertible_to<double>;
    };

// Optional: per-part correctness counts (correct, total) used for training
// accuracy. Solvers without it are scored by exact match.
template <class S, class Structure>
concept PartCounting = requires(const S& s, const Structure& y) {
    { s.count_correct(y, y) } -> std::convertible_to<std::pair<std::size_t, std::size_t>>;
};

}  // namespace structlearn
