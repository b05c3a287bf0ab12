#include "structlearn/weight_vector.hpp"

#include <cmath>

#include "structlearn/error.hpp"

namespace structlearn {

WeightVector::WeightVector(std::vector<double> weights) : weights_(std::move(weights)) {
    for (double v : weights_)
        if (!std::isfinite(v)) throw ContractError("weight vector holds a non-finite value");
}

void WeightVector::axpy(double scale, const SparseVector& f) {
    if (!std::isfinite(scale)) throw ArithmeticError("axpy scale is not finite");
    if (scale == 0.0 || f.empty()) return;
    const std::size_t need = f.extent();
    if (need > weights_.size()) {
        if (frozen_) throw ContractError("axpy would grow a frozen weight vector");
        weights_.resize(need, 0.0);
    }
    for (const auto& e : f) weights_[e.index] += scale * e.value;
    for (const auto& e : f)
        if (!std::isfinite(weights_[e.index])) throw ArithmeticError("axpy produced a non-finite weight");
}

void WeightVector::resize(std::size_t dimension) {
    if (dimension <= weights_.size()) return;
    if (frozen_) throw ContractError("cannot grow a frozen weight vector");
    weights_.resize(dimension, 0.0);
}

void WeightVector::set(std::size_t i, double v) {
    if (!std::isfinite(v)) throw ContractError("weight value is not finite");
    if (i >= weights_.size()) resize(i + 1);
    weights_[i] = v;
}

double WeightVector::squared_norm() const noexcept {
    double s = 0.0;
    for (double v : weights_) s += v * v;
    return s;
}

double dot(const WeightVector& w, const SparseVector& f) {
    double s = 0.0;
    const auto values = w.values();
    for (const auto& e : f) {
        if (e.index < values.size()) s += values[e.index] * e.value;
    }
    if (!std::isfinite(s)) throw ArithmeticError("dot product is not finite");
    return s;
}

}  // namespace structlearn
