#include "structlearn/sparse_vector.hpp"

#include <algorithm>
#include <cmath>

#include "structlearn/error.hpp"

namespace structlearn {

namespace {

void require_finite(double v) {
    if (!std::isfinite(v)) throw ContractError("sparse vector value is not finite");
}

}  // namespace

SparseVector SparseVector::from_pairs(std::vector<FeatureEntry> entries) {
    for (const auto& e : entries) require_finite(e.value);
    std::stable_sort(entries.begin(), entries.end(),
                     [](const FeatureEntry& a, const FeatureEntry& b) { return a.index < b.index; });
    std::vector<FeatureEntry> merged;
    merged.reserve(entries.size());
    for (const auto& e : entries) {
        if (!merged.empty() && merged.back().index == e.index) {
            merged.back().value += e.value;
        } else {
            merged.push_back(e);
        }
    }
    std::erase_if(merged, [](const FeatureEntry& e) { return e.value == 0.0; });
    for (const auto& e : merged) require_finite(e.value);
    return SparseVector(std::move(merged));
}

SparseVector SparseVector::from_sorted(std::vector<FeatureEntry> entries) {
    for (std::size_t k = 0; k < entries.size(); ++k) {
        require_finite(entries[k].value);
        if (entries[k].value == 0.0) throw ContractError("sparse vector holds an explicit zero");
        if (k > 0 && entries[k - 1].index >= entries[k].index)
            throw ContractError("sparse vector indices are not strictly increasing");
    }
    return SparseVector(std::move(entries));
}

double SparseVector::squared_norm() const noexcept {
    double s = 0.0;
    for (const auto& e : entries_) s += e.value * e.value;
    return s;
}

SparseVector linear_combination(double a, const SparseVector& x, double b, const SparseVector& y) {
    std::vector<FeatureEntry> out;
    out.reserve(x.size() + y.size());
    auto xi = x.begin();
    auto yi = y.begin();
    auto push = [&out](std::size_t index, double v) {
        if (v != 0.0) out.push_back({index, v});
    };
    while (xi != x.end() && yi != y.end()) {
        if (xi->index < yi->index) {
            push(xi->index, a * xi->value);
            ++xi;
        } else if (yi->index < xi->index) {
            push(yi->index, b * yi->value);
            ++yi;
        } else {
            push(xi->index, a * xi->value + b * yi->value);
            ++xi;
            ++yi;
        }
    }
    for (; xi != x.end(); ++xi) push(xi->index, a * xi->value);
    for (; yi != y.end(); ++yi) push(yi->index, b * yi->value);
    return SparseVector::from_sorted(std::move(out));
}

double sparse_dot(const SparseVector& x, const SparseVector& y) noexcept {
    double s = 0.0;
    auto xi = x.begin();
    auto yi = y.begin();
    while (xi != x.end() && yi != y.end()) {
        if (xi->index < yi->index) {
            ++xi;
        } else if (yi->index < xi->index) {
            ++yi;
        } else {
            s += xi->value * yi->value;
            ++xi;
            ++yi;
        }
    }
    return s;
}

double diff_squared_norm(const SparseVector& gold, const SparseVector& pred) noexcept {
    double s = 0.0;
    auto gi = gold.begin();
    auto pi = pred.begin();
    while (gi != gold.end() && pi != pred.end()) {
        double d;
        if (gi->index < pi->index) {
            d = gi->value;
            ++gi;
        } else if (pi->index < gi->index) {
            d = -pi->value;
            ++pi;
        } else {
            d = gi->value - pi->value;
            ++gi;
            ++pi;
        }
        s += d * d;
    }
    for (; gi != gold.end(); ++gi) s += gi->value * gi->value;
    for (; pi != pred.end(); ++pi) s += pi->value * pi->value;
    return s;
}

}  // namespace structlearn
