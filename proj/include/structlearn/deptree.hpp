#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "structlearn/contracts.hpp"
#include "structlearn/dataset.hpp"
#include "structlearn/lexicon.hpp"

// Arc-factored dependency parsing with Chu-Liu-Edmonds decoding.
namespace structlearn::deptree {

// Words 1..n; node 0 is the artificial root. pos is either empty or one tag
// per word.
struct Sentence {
    std::vector<std::string> words;
    std::vector<std::string> pos;

    std::size_t size() const noexcept { return words.size(); }
    bool has_pos() const noexcept { return !pos.empty(); }
    friend bool operator==(const Sentence&, const Sentence&) = default;
};

// heads[m - 1] is the head of word m, in 0..n.
struct DependencyTree {
    std::vector<int> heads;

    std::size_t size() const noexcept { return heads.size(); }
    int head(std::size_t m) const { return heads.at(m - 1); }
    friend bool operator==(const DependencyTree&, const DependencyTree&) = default;
};

using ParseDataset = Dataset<Sentence, DependencyTree>;

// Single head per word, no self loops, every word reaches the root.
bool is_valid_tree(const DependencyTree& tree);

// score(h, m) for h in 0..n, m in 1..n. Entries with h == m or m == 0 are
// never read.
class ArcScoreMatrix {
public:
    explicit ArcScoreMatrix(std::size_t words) : n_(words), scores_((words + 1) * (words + 1), 0.0) {}

    std::size_t words() const noexcept { return n_; }
    double& operator()(std::size_t h, std::size_t m) { return scores_[h * (n_ + 1) + m]; }
    double operator()(std::size_t h, std::size_t m) const { return scores_[h * (n_ + 1) + m]; }

    double tree_score(const DependencyTree& tree) const;

private:
    std::size_t n_;
    std::vector<double> scores_;
};

// Maximum spanning arborescence rooted at node 0 by recursive cycle
// contraction. The root may take several children. Among equal-scoring
// incoming arcs the one with the smaller head index wins at every selection.
DependencyTree chu_liu_edmonds(const ArcScoreMatrix& scores);

// Number of words whose head differs from the gold head.
std::size_t attachment_loss(const DependencyTree& y, const DependencyTree& gold);

// Correct heads over all words of an aligned corpus.
double uas(const std::vector<DependencyTree>& predicted, const std::vector<DependencyTree>& gold);

// Minimum distance of the bins used by edge features: 1,2,3,4,5,6-10,11+.
std::string distance_bin(std::size_t distance);

// Edge templates over (head, modifier): word pair, single words, POS pair,
// mixed word/POS, each conjoined with attachment direction; POS pair and
// direction alone also conjoined with the distance bin. POS templates are
// skipped for sentences without tags.
class FeatureGenerator {
public:
    explicit FeatureGenerator(std::shared_ptr<Lexicon> features);

    SparseVector edge_features(const Sentence& x, std::size_t head, std::size_t modifier) const;
    // Sum of edge features over the arcs of the tree.
    SparseVector features(const Sentence& x, const DependencyTree& y) const;

    double arc_score(const WeightVector& w, const Sentence& x, std::size_t head, std::size_t modifier) const;

    const std::shared_ptr<Lexicon>& feature_lexicon() const noexcept { return features_; }

private:
    std::vector<std::string> edge_keys(const Sentence& x, std::size_t head, std::size_t modifier) const;

    std::shared_ptr<Lexicon> features_;
};

class ParseSolver {
public:
    explicit ParseSolver(FeatureGenerator generator) : gen_(std::move(generator)) {}

    ArcScoreMatrix arc_scores(const WeightVector& w, const Sentence& x) const;

    DependencyTree best(const WeightVector& w, const Sentence& x) const;
    // Adds 1 to every arc whose head is not the gold head of its modifier.
    Augmented<DependencyTree> loss_augmented_best(const WeightVector& w, const Sentence& x,
                                                  const DependencyTree& gold) const;
    double loss(const DependencyTree& y, const DependencyTree& gold) const {
        return static_cast<double>(attachment_loss(y, gold));
    }
    std::pair<std::size_t, std::size_t> count_correct(const DependencyTree& y, const DependencyTree& gold) const {
        return {y.size() - attachment_loss(y, gold), y.size()};
    }

    const FeatureGenerator& generator() const noexcept { return gen_; }

private:
    FeatureGenerator gen_;
};

static_assert(structlearn::FeatureGenerator<FeatureGenerator, Sentence, DependencyTree>);
static_assert(InferenceSolver<ParseSolver, Sentence, DependencyTree>);

// A CoNLL-X file: parsed sentences plus the raw columns of every token row,
// kept so predictions can be written back with only the head column changed.
struct ConllCorpus {
    ParseDataset data{TaskKind::deptree, {}};
    std::vector<std::vector<std::vector<std::string>>> rows;
};

// Columns 1 (id), 2 (form), 5 (pos) and 7 (head) of tab-separated CoNLL-X
// lines; blank lines end sentences and '#' lines are comments. allow_empty
// controls whether a file without sentences is accepted.
ConllCorpus read_conll(std::istream& in, bool allow_empty = false);
ConllCorpus read_conll(const std::filesystem::path& path, bool allow_empty = false);

void write_conll(std::ostream& out, const ConllCorpus& corpus, const std::vector<DependencyTree>& predicted);

}  // namespace structlearn::deptree
