#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace structlearn {

struct FeatureEntry {
    std::size_t index;
    double value;

    friend bool operator==(const FeatureEntry&, const FeatureEntry&) = default;
};

// Immutable sparse vector with strictly increasing indices and finite,
// non-zero values.
class SparseVector {
public:
    SparseVector() = default;

    // Sorts, sums duplicate indices and drops zeros. Throws ContractError on
    // non-finite values.
    static SparseVector from_pairs(std::vector<FeatureEntry> entries);

    // Takes entries that are already canonical; validated, never re-sorted.
    static SparseVector from_sorted(std::vector<FeatureEntry> entries);

    std::span<const FeatureEntry> entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }

    // One past the largest index, 0 when empty.
    std::size_t extent() const noexcept {
        return entries_.empty() ? 0 : entries_.back().index + 1;
    }

    double squared_norm() const noexcept;

    friend bool operator==(const SparseVector&, const SparseVector&) = default;

private:
    explicit SparseVector(std::vector<FeatureEntry> entries) : entries_(std::move(entries)) {}

    std::vector<FeatureEntry> entries_;
};

// a*x + b*y by merged traversal.
SparseVector linear_combination(double a, const SparseVector& x, double b, const SparseVector& y);

inline SparseVector difference(const SparseVector& x, const SparseVector& y) {
    return linear_combination(1.0, x, -1.0, y);
}

// Inner product of two sparse vectors.
double sparse_dot(const SparseVector& x, const SparseVector& y) noexcept;

// ||gold - pred||^2 without materializing the difference.
double diff_squared_norm(const SparseVector& gold, const SparseVector& pred) noexcept;

}  // namespace structlearn
