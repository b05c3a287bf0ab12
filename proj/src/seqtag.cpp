#include "structlearn/seqtag.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "structlearn/error.hpp"
#include "text_util.hpp"

namespace structlearn::seqtag {

namespace {

constexpr char kSep = '\x1f';

std::string emission_key(const std::string& attribute, std::size_t tag) {
    std::string key;
    key.reserve(attribute.size() + 8);
    key += attribute;
    key += kSep;
    key += std::to_string(tag);
    return key;
}

std::string transition_key(std::optional<std::size_t> prev, std::size_t tag) {
    std::string key = "T";
    key += kSep;
    key += prev ? std::to_string(*prev) : std::string("BEGIN");
    key += kSep;
    key += std::to_string(tag);
    return key;
}

}  // namespace

FeatureGenerator::FeatureGenerator(std::shared_ptr<Lexicon> features, std::shared_ptr<const Lexicon> tags,
                                   Templates templates)
    : features_(std::move(features)), tags_(std::move(tags)), templates_(templates) {
    if (!features_ || !tags_) throw ContractError("sequence feature generator needs both lexicons");
}

std::vector<std::string> FeatureGenerator::attributes(const std::string& token) const {
    std::vector<std::string> out;
    out.push_back(std::string("W") + kSep + token);
    if (templates_.affixes) {
        for (std::size_t n = 1; n <= 3 && n <= token.size(); ++n) {
            out.push_back("P" + std::to_string(n) + kSep + token.substr(0, n));
            out.push_back("S" + std::to_string(n) + kSep + token.substr(token.size() - n));
        }
    }
    return out;
}

void FeatureGenerator::check(const TokenSequence& x, const TagSequence& y) const {
    if (x.size() == 0) throw ContractError("token sequence is empty");
    if (x.size() != y.size()) throw ContractError("tag sequence length does not match token sequence");
    const std::size_t t = num_tags();
    for (std::size_t tag : y.tags)
        if (tag >= t) throw ContractError("tag index outside the tag lexicon");
}

SparseVector FeatureGenerator::features(const TokenSequence& x, const TagSequence& y) const {
    check(x, y);
    std::vector<FeatureEntry> entries;
    const bool frozen = features_->frozen();
    auto add = [&](const std::string& key) {
        if (frozen) {
            if (auto id = features_->find(key)) entries.push_back({*id, 1.0});
        } else {
            entries.push_back({features_->intern(key), 1.0});
        }
    };
    for (std::size_t t = 0; t < x.size(); ++t) {
        for (const auto& a : attributes(x.tokens[t])) add(emission_key(a, y.tags[t]));
        add(transition_key(t == 0 ? std::nullopt : std::optional(y.tags[t - 1]), y.tags[t]));
    }
    return SparseVector::from_pairs(std::move(entries));
}

double FeatureGenerator::lookup(const WeightVector& w, const std::string& key) const {
    const auto id = features_->find(key);
    return id ? w[*id] : 0.0;
}

double FeatureGenerator::emission_score(const WeightVector& w, const TokenSequence& x, std::size_t pos,
                                        std::size_t tag) const {
    double s = 0.0;
    for (const auto& a : attributes(x.tokens.at(pos))) s += lookup(w, emission_key(a, tag));
    return s;
}

std::vector<double> FeatureGenerator::emission_scores(const WeightVector& w, const TokenSequence& x,
                                                     std::size_t pos) const {
    std::vector<double> out(num_tags(), 0.0);
    for (const auto& a : attributes(x.tokens.at(pos)))
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += lookup(w, emission_key(a, k));
    return out;
}

double FeatureGenerator::transition_score(const WeightVector& w, std::optional<std::size_t> prev,
                                          std::size_t tag) const {
    return lookup(w, transition_key(prev, tag));
}

TagSequence viterbi(const ChainScores& s) {
    const std::size_t L = s.length;
    const std::size_t T = s.num_tags;
    if (L == 0) throw ContractError("viterbi on an empty sequence");
    if (T == 0) throw ContractError("viterbi with an empty tag set");
    if (s.start.size() != T || s.transition.size() != T * T || s.emission.size() != L * T)
        throw ContractError("chain score tables have inconsistent sizes");

    std::vector<double> best(L * T);
    std::vector<std::size_t> back(L * T, 0);
    for (std::size_t k = 0; k < T; ++k) best[k] = s.start[k] + s.emission[k];
    for (std::size_t t = 1; t < L; ++t) {
        for (std::size_t k = 0; k < T; ++k) {
            std::size_t arg = 0;
            double top = best[(t - 1) * T] + s.transition[k];
            for (std::size_t j = 1; j < T; ++j) {
                const double v = best[(t - 1) * T + j] + s.transition[j * T + k];
                if (v > top) {
                    top = v;
                    arg = j;
                }
            }
            best[t * T + k] = top + s.emission[t * T + k];
            back[t * T + k] = arg;
        }
    }
    TagSequence out;
    out.tags.resize(L);
    std::size_t arg = 0;
    for (std::size_t k = 1; k < T; ++k)
        if (best[(L - 1) * T + k] > best[(L - 1) * T + arg]) arg = k;
    for (std::size_t t = L; t-- > 0;) {
        out.tags[t] = arg;
        arg = back[t * T + arg];
    }
    return out;
}

std::size_t hamming_loss(const TagSequence& y, const TagSequence& gold) {
    if (y.size() != gold.size()) throw ContractError("hamming loss on sequences of different length");
    std::size_t n = 0;
    for (std::size_t t = 0; t < y.size(); ++t) n += y.tags[t] != gold.tags[t];
    return n;
}

ChainScores ViterbiSolver::chain_scores(const WeightVector& w, const TokenSequence& x) const {
    if (x.size() == 0) throw ContractError("token sequence is empty");
    ChainScores s;
    s.length = x.size();
    s.num_tags = gen_.num_tags();
    const std::size_t T = s.num_tags;
    if (T == 0) throw ContractError("tag lexicon is empty");
    s.start.resize(T);
    s.transition.resize(T * T);
    s.emission.resize(s.length * T);
    for (std::size_t k = 0; k < T; ++k) {
        s.start[k] = gen_.transition_score(w, std::nullopt, k);
        for (std::size_t j = 0; j < T; ++j) s.trans(j, k) = gen_.transition_score(w, j, k);
    }
    for (std::size_t t = 0; t < s.length; ++t) {
        const auto e = gen_.emission_scores(w, x, t);
        std::copy(e.begin(), e.end(), s.emission.begin() + static_cast<std::ptrdiff_t>(t * T));
    }
    return s;
}

TagSequence ViterbiSolver::best(const WeightVector& w, const TokenSequence& x) const {
    return viterbi(chain_scores(w, x));
}

Augmented<TagSequence> ViterbiSolver::loss_augmented_best(const WeightVector& w, const TokenSequence& x,
                                                          const TagSequence& gold) const {
    if (gold.size() != x.size()) throw ContractError("gold tag sequence length does not match");
    auto s = chain_scores(w, x);
    for (std::size_t t = 0; t < s.length; ++t)
        for (std::size_t k = 0; k < s.num_tags; ++k)
            if (k != gold.tags[t]) s.emit(t, k) += 1.0;
    auto y = viterbi(s);
    const double loss = static_cast<double>(hamming_loss(y, gold));
    return {std::move(y), loss};
}

SequenceDataset read_column_data(std::istream& in, Lexicon& tags, ReadMode mode) {
    SequenceDataset data{TaskKind::sequence, {}};
    Example<TokenSequence, TagSequence> current;
    auto flush = [&] {
        if (current.instance.size() > 0) data.examples.push_back(std::move(current));
        current = {};
    };
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = text::strip_cr(raw);
        if (line.empty()) {
            flush();
            continue;
        }
        const auto fields = text::split(line, '\t');
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
            throw ParseError::at_line("expected token<TAB>tag, got " + std::to_string(fields.size()) + " field(s)",
                                      line_no);
        std::size_t tag;
        if (mode == ReadMode::train) {
            tag = tags.intern(fields[1]);
        } else {
            auto id = tags.find(fields[1]);
            if (!id) throw ParseError::at_line("unknown tag '" + std::string(fields[1]) + "'", line_no);
            tag = *id;
        }
        current.instance.tokens.emplace_back(fields[0]);
        current.gold.tags.push_back(tag);
    }
    flush();
    if (mode == ReadMode::train && data.empty()) throw DataError("empty dataset: no sequences found");
    return data;
}

SequenceDataset read_column_data(const std::filesystem::path& path, Lexicon& tags, ReadMode mode) {
    auto in = text::open_input(path.string());
    return read_column_data(in, tags, mode);
}

void write_column_data(std::ostream& out, const std::vector<TokenSequence>& sentences,
                       const std::vector<TagSequence>& tags, const Lexicon& tag_lexicon) {
    if (sentences.size() != tags.size()) throw ContractError("sentence and tag lists differ in length");
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (sentences[i].size() != tags[i].size()) throw ContractError("sentence and tags differ in length");
        for (std::size_t t = 0; t < sentences[i].size(); ++t)
            out << sentences[i].tokens[t] << '\t' << tag_lexicon.name(tags[i].tags[t]) << '\n';
        out << '\n';
    }
}

double token_accuracy(const std::vector<TagSequence>& predicted, const std::vector<TagSequence>& gold) {
    if (predicted.size() != gold.size()) throw ContractError("prediction and gold corpora are misaligned");
    std::size_t correct = 0;
    std::size_t total = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (predicted[i].size() != gold[i].size()) throw ContractError("prediction and gold corpora are misaligned");
        total += gold[i].size();
        correct += gold[i].size() - hamming_loss(predicted[i], gold[i]);
    }
    if (total == 0) throw ContractError("accuracy of an empty corpus");
    return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace structlearn::seqtag
