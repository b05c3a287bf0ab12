#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "structlearn/sparse_vector.hpp"

namespace structlearn {

// Dense weights. Reads past the stored dimension are zero. While unfrozen,
// axpy grows the vector to cover new indices; once frozen any growth is a
// contract error.
class WeightVector {
public:
    WeightVector() = default;
    explicit WeightVector(std::size_t dimension) : weights_(dimension, 0.0) {}
    explicit WeightVector(std::vector<double> weights);

    std::size_t dimension() const noexcept { return weights_.size(); }
    std::span<const double> values() const noexcept { return weights_; }

    double operator[](std::size_t i) const noexcept {
        return i < weights_.size() ? weights_[i] : 0.0;
    }

    // w[i] += scale * v for every (i, v) in f.
    void axpy(double scale, const SparseVector& f);

    // Pads with zeros up to the given dimension. Never shrinks.
    void resize(std::size_t dimension);

    void set(std::size_t i, double v);

    void freeze() noexcept { frozen_ = true; }
    bool frozen() const noexcept { return frozen_; }

    double squared_norm() const noexcept;

    friend bool operator==(const WeightVector& a, const WeightVector& b) {
        return a.weights_ == b.weights_;
    }

private:
    std::vector<double> weights_;
    bool frozen_ = false;
};

// sum of w[i] * v over f. Throws ArithmeticError on a non-finite result.
double dot(const WeightVector& w, const SparseVector& f);

}  // namespace structlearn
