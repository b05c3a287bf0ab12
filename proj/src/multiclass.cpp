#include "structlearn/multiclass.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>

#include "structlearn/error.hpp"
#include "text_util.hpp"

namespace structlearn::multiclass {

CostMatrix CostMatrix::zero_one(std::size_t classes) {
    CostMatrix m;
    m.k_ = classes;
    m.costs_.assign(classes * classes, 1.0);
    for (std::size_t k = 0; k < classes; ++k) m.costs_[k * classes + k] = 0.0;
    return m;
}

CostMatrix CostMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    CostMatrix m;
    m.k_ = rows.size();
    for (std::size_t g = 0; g < rows.size(); ++g) {
        if (rows[g].size() != m.k_) throw DataError("cost matrix is not square");
        for (std::size_t p = 0; p < rows[g].size(); ++p) {
            const double c = rows[g][p];
            if (!std::isfinite(c) || c < 0.0) throw DataError("cost matrix entries must be finite and non-negative");
            if (g == p && c != 0.0)
                throw DataError("cost matrix diagonal entry " + std::to_string(g) + " is not zero");
            m.costs_.push_back(c);
        }
    }
    return m;
}

double CostMatrix::max_cost(std::size_t gold) const {
    double top = 0.0;
    for (std::size_t p = 0; p < k_; ++p) top = std::max(top, (*this)(gold, p));
    return top;
}

SparseVector conjoined_features(const SparseVector& raw, ClassLabel y, std::size_t classes, std::size_t block_size) {
    if (y.index >= classes) throw ContractError("class index outside the label set");
    if (block_size != 0 && classes > std::numeric_limits<std::size_t>::max() / block_size)
        throw ContractError("conjoined feature index overflows");
    std::vector<FeatureEntry> out;
    out.reserve(raw.size());
    for (const auto& e : raw) {
        if (e.index >= block_size) throw ContractError("raw feature index exceeds the block size");
        out.push_back({y.index * block_size + e.index, e.value});
    }
    return SparseVector::from_sorted(std::move(out));
}

FeatureGenerator::FeatureGenerator(std::size_t classes, std::size_t block_size, bool bias)
    : k_(classes), b_(block_size), bias_(bias) {
    if (classes == 0) throw ContractError("multiclass task needs at least one class");
    if (bias && block_size == 0) throw ContractError("bias feature needs a non-empty block");
}

SparseVector FeatureGenerator::features(const Instance& x, ClassLabel y) const {
    const std::size_t limit = bias_ ? b_ - 1 : b_;
    std::vector<FeatureEntry> raw;
    raw.reserve(x.raw.size() + 1);
    for (const auto& e : x.raw)
        if (e.index < limit) raw.push_back(e);
    if (bias_) raw.push_back({b_ - 1, 1.0});
    return conjoined_features(SparseVector::from_sorted(std::move(raw)), y, k_, b_);
}

double FeatureGenerator::class_score(const WeightVector& w, const Instance& x, std::size_t k) const {
    const std::size_t limit = bias_ ? b_ - 1 : b_;
    const std::size_t offset = k * b_;
    double s = 0.0;
    for (const auto& e : x.raw)
        if (e.index < limit) s += w[offset + e.index] * e.value;
    if (bias_) s += w[offset + b_ - 1];
    if (!std::isfinite(s)) throw ArithmeticError("class score is not finite");
    return s;
}

ArgmaxSolver::ArgmaxSolver(FeatureGenerator generator, CostMatrix costs)
    : gen_(std::move(generator)), costs_(std::move(costs)) {
    if (costs_.classes() != gen_.classes()) throw ContractError("cost matrix size does not match the class count");
}

ClassLabel ArgmaxSolver::best(const WeightVector& w, const Instance& x) const {
    std::size_t arg = 0;
    double top = gen_.class_score(w, x, 0);
    for (std::size_t k = 1; k < gen_.classes(); ++k) {
        const double s = gen_.class_score(w, x, k);
        if (s > top) {
            top = s;
            arg = k;
        }
    }
    return {arg};
}

Augmented<ClassLabel> ArgmaxSolver::loss_augmented_best(const WeightVector& w, const Instance& x,
                                                        ClassLabel gold) const {
    if (gold.index >= gen_.classes()) throw ContractError("gold class outside the label set");
    std::size_t arg = 0;
    double top = gen_.class_score(w, x, 0) + costs_(gold.index, 0);
    for (std::size_t k = 1; k < gen_.classes(); ++k) {
        const double s = gen_.class_score(w, x, k) + costs_(gold.index, k);
        if (s > top) {
            top = s;
            arg = k;
        }
    }
    return {ClassLabel{arg}, costs_(gold.index, arg)};
}

namespace {

struct RawLine {
    std::string label;
    std::vector<std::pair<std::string, double>> features;
    std::string feature_text;
    std::size_t line_no;
};

// Numeric order when every name parses as a number, otherwise lexicographic.
void sort_names(std::vector<std::string>& names) {
    const bool numeric = std::all_of(names.begin(), names.end(),
                                     [](const std::string& s) { return text::parse_number<double>(s).has_value(); });
    if (numeric) {
        std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
            return *text::parse_number<double>(a) < *text::parse_number<double>(b);
        });
    } else {
        std::sort(names.begin(), names.end());
    }
}

RawLine parse_line(std::string_view line, std::size_t line_no) {
    const auto full = line;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto fields = text::split_whitespace(line);
    RawLine out;
    out.line_no = line_no;
    out.label = std::string(fields.at(0));
    // Everything after the label, trailing comment included, is echoed back
    // verbatim by write_svmlight.
    out.feature_text = std::string(full.substr(line.find(fields[0]) + fields[0].size()));
    long long previous = -1;
    for (std::size_t f = 1; f < fields.size(); ++f) {
        const auto colon = fields[f].find(':');
        if (colon == std::string_view::npos)
            throw ParseError::at_line("expected idx:val, got '" + std::string(fields[f]) + "'", line_no);
        const auto name = fields[f].substr(0, colon);
        const auto index = text::parse_number<long long>(name);
        if (!index || *index < 0)
            throw ParseError::at_line("feature index '" + std::string(name) + "' is not a non-negative integer",
                                      line_no);
        if (*index <= previous)
            throw ParseError::at_line("feature indices must be strictly increasing (unsorted or duplicate index " +
                                          std::string(name) + ")",
                                      line_no);
        previous = *index;
        const auto value = text::parse_number<double>(fields[f].substr(colon + 1));
        if (!value || !std::isfinite(*value))
            throw ParseError::at_line("feature value '" + std::string(fields[f].substr(colon + 1)) +
                                          "' is not a finite number",
                                      line_no);
        out.features.emplace_back(std::string(name), *value);
    }
    return out;
}

}  // namespace

SvmlightCorpus read_svmlight(std::istream& in, Lexicon& labels, Lexicon& raw_features, ReadMode mode, bool bias) {
    std::vector<RawLine> lines;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = text::strip_cr(raw);
        if (text::is_blank(line) || line.find_first_not_of(" \t") == line.find('#')) continue;
        lines.push_back(parse_line(line, line_no));
    }

    if (mode == ReadMode::train) {
        if (lines.empty()) throw DataError("empty dataset: no examples found");
        std::set<std::string> label_set;
        std::set<std::string> feature_set;
        for (const auto& l : lines) {
            label_set.insert(l.label);
            for (const auto& f : l.features) feature_set.insert(f.first);
        }
        std::vector<std::string> label_names(label_set.begin(), label_set.end());
        std::vector<std::string> feature_names(feature_set.begin(), feature_set.end());
        sort_names(label_names);
        sort_names(feature_names);
        for (const auto& n : label_names) labels.intern(n);
        for (const auto& n : feature_names) raw_features.intern(n);
        if (bias) raw_features.intern(kBiasFeature);
        labels.freeze();
        raw_features.freeze();
    } else if (!labels.frozen() || !raw_features.frozen()) {
        throw ContractError("prediction-mode reading needs frozen lexicons");
    }

    SvmlightCorpus corpus;
    for (auto& l : lines) {
        const auto label = labels.find(l.label);
        if (!label) throw ParseError::at_line("unknown label '" + l.label + "'", l.line_no);
        std::vector<FeatureEntry> entries;
        for (const auto& [name, value] : l.features)
            if (auto id = raw_features.find(name)) entries.push_back({*id, value});
        if (mode == ReadMode::train && !bias && entries.empty())
            throw ParseError::at_line("instance has no features and the bias feature is disabled", l.line_no);
        corpus.data.examples.push_back({Instance{SparseVector::from_pairs(std::move(entries))}, ClassLabel{*label}});
        corpus.feature_text.push_back(std::move(l.feature_text));
    }
    return corpus;
}

SvmlightCorpus read_svmlight(const std::filesystem::path& path, Lexicon& labels, Lexicon& raw_features,
                             ReadMode mode, bool bias) {
    auto in = text::open_input(path.string());
    return read_svmlight(in, labels, raw_features, mode, bias);
}

CostMatrix read_cost_matrix(std::istream& in, std::size_t classes) {
    std::vector<std::vector<double>> rows;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = text::strip_cr(raw);
        if (text::is_blank(line)) continue;
        std::vector<double> row;
        for (auto field : text::split_whitespace(line)) {
            const auto v = text::parse_number<double>(field);
            if (!v) throw ParseError::at_line("cost '" + std::string(field) + "' is not a number", line_no);
            row.push_back(*v);
        }
        if (row.size() != classes)
            throw ParseError::at_line("expected " + std::to_string(classes) + " costs per row", line_no);
        rows.push_back(std::move(row));
    }
    if (rows.size() != classes)
        throw DataError("cost matrix has " + std::to_string(rows.size()) + " rows, expected " +
                        std::to_string(classes));
    return CostMatrix::from_rows(rows);
}

std::filesystem::path sidecar_cost_path(const std::filesystem::path& data_path) {
    auto p = data_path;
    p += ".costs";
    return p;
}

CostMatrix load_sidecar_costs(const std::filesystem::path& data_path, std::size_t classes) {
    const auto path = sidecar_cost_path(data_path);
    if (!std::filesystem::exists(path)) return CostMatrix::zero_one(classes);
    auto in = text::open_input(path.string());
    return read_cost_matrix(in, classes);
}

void write_svmlight(std::ostream& out, const SvmlightCorpus& corpus, const std::vector<ClassLabel>& predicted,
                    const Lexicon& labels) {
    if (predicted.size() != corpus.feature_text.size()) throw ContractError("prediction count does not match corpus");
    for (std::size_t i = 0; i < predicted.size(); ++i)
        out << labels.name(predicted[i].index) << corpus.feature_text[i] << '\n';
}

}  // namespace structlearn::multiclass
