#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "structlearn/contracts.hpp"
#include "structlearn/dataset.hpp"
#include "structlearn/lexicon.hpp"

// Cost-sensitive multiclass classification over class-conjoined features.
namespace structlearn::multiclass {

// Class-independent features; indices are raw feature ids below the block
// size B.
struct Instance {
    SparseVector raw;
    friend bool operator==(const Instance&, const Instance&) = default;
};

struct ClassLabel {
    std::size_t index = 0;
    friend auto operator<=>(const ClassLabel&, const ClassLabel&) = default;
};

using MulticlassDataset = Dataset<Instance, ClassLabel>;

// cost(gold, predicted) >= 0 with a zero diagonal.
class CostMatrix {
public:
    static CostMatrix zero_one(std::size_t classes);
    // Throws DataError when not square, not finite, negative or with a
    // nonzero diagonal.
    static CostMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t classes() const noexcept { return k_; }
    double operator()(std::size_t gold, std::size_t predicted) const { return costs_.at(gold * k_ + predicted); }
    double max_cost(std::size_t gold) const;

private:
    std::size_t k_ = 0;
    std::vector<double> costs_;
};

// Raw index j of class y maps to y * B + j.
SparseVector conjoined_features(const SparseVector& raw, ClassLabel y, std::size_t classes, std::size_t block_size);

// With bias enabled, raw feature B-1 is always on.
class FeatureGenerator {
public:
    FeatureGenerator(std::size_t classes, std::size_t block_size, bool bias = true);

    SparseVector features(const Instance& x, ClassLabel y) const;
    // Score of class k; raw features past the block are ignored.
    double class_score(const WeightVector& w, const Instance& x, std::size_t k) const;

    std::size_t classes() const noexcept { return k_; }
    std::size_t block_size() const noexcept { return b_; }
    bool bias() const noexcept { return bias_; }

private:
    std::size_t k_;
    std::size_t b_;
    bool bias_;
};

// argmax over classes, ties toward the lowest class index.
class ArgmaxSolver {
public:
    ArgmaxSolver(FeatureGenerator generator, CostMatrix costs);

    ClassLabel best(const WeightVector& w, const Instance& x) const;
    // argmax_k score(k) + cost(gold, k).
    Augmented<ClassLabel> loss_augmented_best(const WeightVector& w, const Instance& x, ClassLabel gold) const;
    double loss(ClassLabel y, ClassLabel gold) const { return costs_(gold.index, y.index); }

    const FeatureGenerator& generator() const noexcept { return gen_; }
    const CostMatrix& costs() const noexcept { return costs_; }

private:
    FeatureGenerator gen_;
    CostMatrix costs_;
};

static_assert(structlearn::FeatureGenerator<FeatureGenerator, Instance, ClassLabel>);
static_assert(InferenceSolver<ArgmaxSolver, Instance, ClassLabel>);

enum class ReadMode { train, predict };

// Lines "label idx:val idx:val ..." with strictly increasing integer
// indices; '#' starts a trailing comment. feature_text keeps everything after
// the label so predictions can be written back in the same format.
struct SvmlightCorpus {
    MulticlassDataset data{TaskKind::multiclass, {}};
    std::vector<std::string> feature_text;
};

// In train mode the label lexicon is filled in sorted label order (numeric
// when every label is a number) and raw feature names are interned in sorted
// index order; the cost-matrix rows follow that label order. In predict mode
// both lexicons must be frozen, unknown labels are an error and unknown
// features are dropped. Without bias, an instance with no features is a
// parse error.
SvmlightCorpus read_svmlight(std::istream& in, Lexicon& labels, Lexicon& raw_features, ReadMode mode,
                             bool bias = true);
SvmlightCorpus read_svmlight(const std::filesystem::path& path, Lexicon& labels, Lexicon& raw_features,
                             ReadMode mode, bool bias = true);

// K x K whitespace-separated matrix.
CostMatrix read_cost_matrix(std::istream& in, std::size_t classes);
// Reads "<data>.costs" next to the data file, or 0/1 costs when absent.
CostMatrix load_sidecar_costs(const std::filesystem::path& data_path, std::size_t classes);
std::filesystem::path sidecar_cost_path(const std::filesystem::path& data_path);

void write_svmlight(std::ostream& out, const SvmlightCorpus& corpus, const std::vector<ClassLabel>& predicted,
                    const Lexicon& labels);

inline const std::string kBiasFeature = "<bias>";

}  // namespace structlearn::multiclass
