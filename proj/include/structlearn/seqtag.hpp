#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "structlearn/contracts.hpp"
#include "structlearn/dataset.hpp"
#include "structlearn/lexicon.hpp"

// Linear-chain sequence tagging: first-order emission and transition
// features, Viterbi decoding and Hamming loss.
namespace structlearn::seqtag {

struct TokenSequence {
    std::vector<std::string> tokens;

    std::size_t size() const noexcept { return tokens.size(); }
    friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

// Tag indices into the tag lexicon, one per token.
struct TagSequence {
    std::vector<std::size_t> tags;

    std::size_t size() const noexcept { return tags.size(); }
    friend bool operator==(const TagSequence&, const TagSequence&) = default;
};

using SequenceDataset = Dataset<TokenSequence, TagSequence>;

struct Templates {
    // Adds prefix and suffix (length 1..3) attributes to every token.
    bool affixes = false;
};

// Feature templates:
//   emission    attribute(token_t) x tag_t, attribute = the word itself
//               (plus affixes if enabled)
//   transition  tag_{t-1} x tag_t
//   start       BEGIN x tag_0
// There is no end-of-sequence transition.
//
// Feature strings are interned into the feature lexicon while it is
// unfrozen; against a frozen lexicon unseen features are dropped.
class FeatureGenerator {
public:
    FeatureGenerator(std::shared_ptr<Lexicon> features, std::shared_ptr<const Lexicon> tags, Templates templates = {});

    SparseVector features(const TokenSequence& x, const TagSequence& y) const;

    // Score contribution of the emission features at position pos for tag.
    double emission_score(const WeightVector& w, const TokenSequence& x, std::size_t pos, std::size_t tag) const;
    // Emission scores at position pos for every tag.
    std::vector<double> emission_scores(const WeightVector& w, const TokenSequence& x, std::size_t pos) const;
    // prev == nullopt is the BEGIN boundary.
    double transition_score(const WeightVector& w, std::optional<std::size_t> prev, std::size_t tag) const;

    std::size_t num_tags() const { return tags_->size(); }
    const Templates& templates() const noexcept { return templates_; }
    const std::shared_ptr<Lexicon>& feature_lexicon() const noexcept { return features_; }
    const std::shared_ptr<const Lexicon>& tag_lexicon() const noexcept { return tags_; }

private:
    std::vector<std::string> attributes(const std::string& token) const;
    void check(const TokenSequence& x, const TagSequence& y) const;
    double lookup(const WeightVector& w, const std::string& key) const;

    std::shared_ptr<Lexicon> features_;
    std::shared_ptr<const Lexicon> tags_;
    Templates templates_;
};

// Score tables of one chain: start[k], transition[j * T + k] and
// emission[t * T + k].
struct ChainScores {
    std::size_t length = 0;
    std::size_t num_tags = 0;
    std::vector<double> start;
    std::vector<double> transition;
    std::vector<double> emission;

    double& emit(std::size_t t, std::size_t k) { return emission[t * num_tags + k]; }
    double& trans(std::size_t j, std::size_t k) { return transition[j * num_tags + k]; }
};

// Highest-scoring path in O(L * T^2). Ties go to the lower tag index at each
// backpointer and at the final position.
TagSequence viterbi(const ChainScores& scores);

std::size_t hamming_loss(const TagSequence& y, const TagSequence& gold);

class ViterbiSolver {
public:
    explicit ViterbiSolver(FeatureGenerator generator) : gen_(std::move(generator)) {}

    ChainScores chain_scores(const WeightVector& w, const TokenSequence& x) const;

    TagSequence best(const WeightVector& w, const TokenSequence& x) const;
    // Adds 1 to every emission score whose tag differs from the gold tag.
    Augmented<TagSequence> loss_augmented_best(const WeightVector& w, const TokenSequence& x,
                                               const TagSequence& gold) const;
    double loss(const TagSequence& y, const TagSequence& gold) const {
        return static_cast<double>(hamming_loss(y, gold));
    }
    std::pair<std::size_t, std::size_t> count_correct(const TagSequence& y, const TagSequence& gold) const {
        return {y.size() - hamming_loss(y, gold), y.size()};
    }

    const FeatureGenerator& generator() const noexcept { return gen_; }

private:
    FeatureGenerator gen_;
};

static_assert(structlearn::FeatureGenerator<FeatureGenerator, TokenSequence, TagSequence>);
static_assert(InferenceSolver<ViterbiSolver, TokenSequence, TagSequence>);

enum class ReadMode { train, predict };

// token<TAB>tag per line, blank line between sequences, LF or CRLF. In train
// mode new tags are added to the lexicon and an empty file is an error; in
// predict mode unknown tags are a parse error and an empty file yields an
// empty dataset.
SequenceDataset read_column_data(std::istream& in, Lexicon& tags, ReadMode mode);
SequenceDataset read_column_data(const std::filesystem::path& path, Lexicon& tags, ReadMode mode);

void write_column_data(std::ostream& out, const std::vector<TokenSequence>& sentences,
                       const std::vector<TagSequence>& tags, const Lexicon& tag_lexicon);

// Fraction of tokens tagged correctly.
double token_accuracy(const std::vector<TagSequence>& predicted, const std::vector<TagSequence>& gold);

}  // namespace structlearn::seqtag
