#include "structlearn/deptree.hpp"

#include <istream>
#include <ostream>
#include <tuple>

#include "structlearn/error.hpp"
#include "text_util.hpp"

namespace structlearn::deptree {

namespace {

constexpr char kSep = '\x1f';
const std::string kRoot = "<ROOT>";

template <class... Parts>
std::string join(const Parts&... parts) {
    std::string out;
    ((out += parts, out += kSep), ...);
    out.pop_back();
    return out;
}

}  // namespace

bool is_valid_tree(const DependencyTree& tree) {
    const auto n = static_cast<int>(tree.size());
    for (int m = 1; m <= n; ++m) {
        const int h = tree.heads[m - 1];
        if (h < 0 || h > n || h == m) return false;
    }
    // Following heads from any word must reach the root within n steps.
    for (int m = 1; m <= n; ++m) {
        int v = m;
        for (int steps = 0; v != 0; ++steps) {
            if (steps > n) return false;
            v = tree.heads[v - 1];
        }
    }
    return true;
}

double ArcScoreMatrix::tree_score(const DependencyTree& tree) const {
    if (tree.size() != n_) throw ContractError("tree size does not match the score matrix");
    double s = 0.0;
    for (std::size_t m = 1; m <= n_; ++m) s += (*this)(static_cast<std::size_t>(tree.head(m)), m);
    return s;
}

namespace {

struct Arc {
    std::size_t from;
    std::size_t to;
    double score;
    std::size_t head;      // head index in the original sentence
    std::size_t modifier;  // modifier index in the original sentence
};

// True if a should be preferred over b as an incoming arc: higher score, then
// smaller original head, then smaller original modifier.
bool prefer(const Arc& a, const Arc& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.head, a.modifier) < std::tie(b.head, b.modifier);
}

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// For every node but the root (node 0), the index into arcs of its incoming
// arc in the maximum arborescence.
std::vector<std::size_t> solve(std::size_t nodes, const std::vector<Arc>& arcs) {
    std::vector<std::size_t> best(nodes, kNone);
    for (std::size_t a = 0; a < arcs.size(); ++a) {
        const auto& arc = arcs[a];
        if (arc.to == 0 || arc.from == arc.to) continue;
        if (best[arc.to] == kNone || prefer(arc, arcs[best[arc.to]])) best[arc.to] = a;
    }
    for (std::size_t v = 1; v < nodes; ++v)
        if (best[v] == kNone) throw ContractError("node without incoming arcs");

    // Find the first cycle among the chosen arcs, scanning start nodes in order.
    std::vector<int> mark(nodes, 0);  // 0 unvisited, 1 on current path, 2 done
    std::vector<bool> in_cycle(nodes, false);
    bool found = false;
    mark[0] = 2;
    for (std::size_t start = 1; start < nodes && !found; ++start) {
        std::vector<std::size_t> path;
        std::size_t v = start;
        while (mark[v] == 0) {
            mark[v] = 1;
            path.push_back(v);
            v = arcs[best[v]].from;
        }
        if (mark[v] == 1) {
            found = true;
            for (std::size_t u = v;;) {
                in_cycle[u] = true;
                u = arcs[best[u]].from;
                if (u == v) break;
            }
        }
        for (std::size_t u : path) mark[u] = 2;
    }
    if (!found) return best;

    // Contract the cycle into one node, the last id of the smaller graph.
    std::vector<std::size_t> remap(nodes);
    std::size_t next = 0;
    for (std::size_t v = 0; v < nodes; ++v)
        if (!in_cycle[v]) remap[v] = next++;
    const std::size_t cycle_node = next;
    for (std::size_t v = 0; v < nodes; ++v)
        if (in_cycle[v]) remap[v] = cycle_node;

    std::vector<Arc> contracted;
    std::vector<std::size_t> source;
    for (std::size_t a = 0; a < arcs.size(); ++a) {
        const auto& arc = arcs[a];
        if (arc.to == 0 || arc.from == arc.to) continue;
        const bool u_in = in_cycle[arc.from];
        const bool v_in = in_cycle[arc.to];
        if (u_in && v_in) continue;
        Arc c = arc;
        c.from = remap[arc.from];
        c.to = remap[arc.to];
        if (v_in) c.score = arc.score - arcs[best[arc.to]].score;
        contracted.push_back(c);
        source.push_back(a);
    }

    const auto sub = solve(cycle_node + 1, contracted);

    std::vector<std::size_t> chosen(nodes, kNone);
    for (std::size_t nv = 1; nv <= cycle_node; ++nv) {
        const std::size_t a = source[sub[nv]];
        chosen[arcs[a].to] = a;
        if (nv == cycle_node) {
            for (std::size_t v = 0; v < nodes; ++v)
                if (in_cycle[v] && v != arcs[a].to) chosen[v] = best[v];
        }
    }
    return chosen;
}

}  // namespace

DependencyTree chu_liu_edmonds(const ArcScoreMatrix& scores) {
    const std::size_t n = scores.words();
    if (n == 0) throw ContractError("cannot parse an empty sentence");
    std::vector<Arc> arcs;
    arcs.reserve(n * n);
    for (std::size_t m = 1; m <= n; ++m)
        for (std::size_t h = 0; h <= n; ++h)
            if (h != m) arcs.push_back({h, m, scores(h, m), h, m});
    const auto chosen = solve(n + 1, arcs);
    DependencyTree tree;
    tree.heads.resize(n);
    for (std::size_t m = 1; m <= n; ++m) tree.heads[m - 1] = static_cast<int>(arcs[chosen[m]].head);
    return tree;
}

std::size_t attachment_loss(const DependencyTree& y, const DependencyTree& gold) {
    if (y.size() != gold.size()) throw ContractError("attachment loss on trees of different size");
    std::size_t n = 0;
    for (std::size_t k = 0; k < y.size(); ++k) n += y.heads[k] != gold.heads[k];
    return n;
}

double uas(const std::vector<DependencyTree>& predicted, const std::vector<DependencyTree>& gold) {
    if (predicted.size() != gold.size()) throw ContractError("prediction and gold corpora are misaligned");
    std::size_t correct = 0;
    std::size_t total = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (predicted[i].size() != gold[i].size()) throw ContractError("prediction and gold corpora are misaligned");
        total += gold[i].size();
        correct += gold[i].size() - attachment_loss(predicted[i], gold[i]);
    }
    if (total == 0) throw ContractError("attachment score of an empty corpus");
    return static_cast<double>(correct) / static_cast<double>(total);
}

std::string distance_bin(std::size_t distance) {
    if (distance == 0) throw ContractError("arc distance must be positive");
    if (distance <= 5) return std::to_string(distance);
    if (distance <= 10) return "6-10";
    return "11+";
}

FeatureGenerator::FeatureGenerator(std::shared_ptr<Lexicon> features) : features_(std::move(features)) {
    if (!features_) throw ContractError("parse feature generator needs a lexicon");
}

std::vector<std::string> FeatureGenerator::edge_keys(const Sentence& x, std::size_t head,
                                                     std::size_t modifier) const {
    const std::size_t n = x.size();
    if (head > n || modifier == 0 || modifier > n || head == modifier)
        throw ContractError("invalid arc " + std::to_string(head) + " -> " + std::to_string(modifier));
    if (x.has_pos() && x.pos.size() != n) throw ContractError("POS tag count does not match word count");

    const std::string& hw = head == 0 ? kRoot : x.words[head - 1];
    const std::string& mw = x.words[modifier - 1];
    const std::string dir = head < modifier ? "R" : "L";
    const std::string dist = distance_bin(head < modifier ? modifier - head : head - modifier);

    std::vector<std::string> keys{
        join("HW,MW", hw, mw, dir),
        join("HW", hw, dir),
        join("MW", mw, dir),
        join("DIST", dir, dist),
    };
    if (x.has_pos()) {
        const std::string& hp = head == 0 ? kRoot : x.pos[head - 1];
        const std::string& mp = x.pos[modifier - 1];
        keys.push_back(join("HP,MP", hp, mp, dir));
        keys.push_back(join("HP,MP,DIST", hp, mp, dir, dist));
        keys.push_back(join("HW,MP", hw, mp, dir));
        keys.push_back(join("HP,MW", hp, mw, dir));
        keys.push_back(join("HP", hp, dir));
        keys.push_back(join("MP", mp, dir));
    }
    return keys;
}

SparseVector FeatureGenerator::edge_features(const Sentence& x, std::size_t head, std::size_t modifier) const {
    std::vector<FeatureEntry> entries;
    const bool frozen = features_->frozen();
    for (const auto& key : edge_keys(x, head, modifier)) {
        if (frozen) {
            if (auto id = features_->find(key)) entries.push_back({*id, 1.0});
        } else {
            entries.push_back({features_->intern(key), 1.0});
        }
    }
    return SparseVector::from_pairs(std::move(entries));
}

SparseVector FeatureGenerator::features(const Sentence& x, const DependencyTree& y) const {
    if (y.size() != x.size()) throw ContractError("tree size does not match sentence length");
    if (!is_valid_tree(y)) throw ContractError("structure is not a valid dependency tree");
    std::vector<FeatureEntry> entries;
    for (std::size_t m = 1; m <= x.size(); ++m) {
        const auto arc = edge_features(x, static_cast<std::size_t>(y.head(m)), m);
        entries.insert(entries.end(), arc.begin(), arc.end());
    }
    return SparseVector::from_pairs(std::move(entries));
}

double FeatureGenerator::arc_score(const WeightVector& w, const Sentence& x, std::size_t head,
                                   std::size_t modifier) const {
    double s = 0.0;
    for (const auto& key : edge_keys(x, head, modifier))
        if (auto id = features_->find(key)) s += w[*id];
    return s;
}

ArcScoreMatrix ParseSolver::arc_scores(const WeightVector& w, const Sentence& x) const {
    ArcScoreMatrix s(x.size());
    for (std::size_t m = 1; m <= x.size(); ++m)
        for (std::size_t h = 0; h <= x.size(); ++h)
            if (h != m) s(h, m) = gen_.arc_score(w, x, h, m);
    return s;
}

DependencyTree ParseSolver::best(const WeightVector& w, const Sentence& x) const {
    return chu_liu_edmonds(arc_scores(w, x));
}

Augmented<DependencyTree> ParseSolver::loss_augmented_best(const WeightVector& w, const Sentence& x,
                                                           const DependencyTree& gold) const {
    if (gold.size() != x.size()) throw ContractError("gold tree size does not match sentence length");
    auto s = arc_scores(w, x);
    for (std::size_t m = 1; m <= x.size(); ++m)
        for (std::size_t h = 0; h <= x.size(); ++h)
            if (h != m && static_cast<int>(h) != gold.head(m)) s(h, m) += 1.0;
    auto tree = chu_liu_edmonds(s);
    const double loss = static_cast<double>(attachment_loss(tree, gold));
    return {std::move(tree), loss};
}

ConllCorpus read_conll(std::istream& in, bool allow_empty) {
    ConllCorpus corpus;
    Sentence sentence;
    DependencyTree tree;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> lines;
    bool any_pos = false;

    auto flush = [&] {
        if (rows.empty()) return;
        const auto n = static_cast<int>(rows.size());
        for (std::size_t k = 0; k < tree.heads.size(); ++k) {
            const int h = tree.heads[k];
            if (h < 0 || h > n)
                throw ParseError::at_line("head " + std::to_string(h) + " out of range for a " + std::to_string(n) +
                                              "-word sentence",
                                          lines[k]);
            if (h == static_cast<int>(k) + 1) throw ParseError::at_line("word is its own head", lines[k]);
        }
        if (!is_valid_tree(tree)) throw ParseError::at_line("heads do not form a tree", lines.front());
        if (!any_pos) sentence.pos.clear();
        corpus.data.examples.push_back({std::move(sentence), std::move(tree)});
        corpus.rows.push_back(std::move(rows));
        sentence = {};
        tree = {};
        rows.clear();
        lines.clear();
        any_pos = false;
    };

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = text::strip_cr(raw);
        if (text::is_blank(line)) {
            flush();
            continue;
        }
        if (line.front() == '#') continue;
        auto fields = text::split(line, '\t');
        if (fields.size() == 1) fields = text::split_whitespace(line);
        if (fields.size() < 7)
            throw ParseError::at_line("expected at least 7 columns, got " + std::to_string(fields.size()), line_no);
        const auto id = text::parse_number<int>(fields[0]);
        if (!id || *id != static_cast<int>(rows.size()) + 1)
            throw ParseError::at_line("token id '" + std::string(fields[0]) + "' is not the next word index",
                                      line_no);
        const auto head = text::parse_number<int>(fields[6]);
        if (!head) throw ParseError::at_line("head '" + std::string(fields[6]) + "' is not an integer", line_no);
        sentence.words.emplace_back(fields[1]);
        sentence.pos.emplace_back(fields[4]);
        any_pos = any_pos || fields[4] != "_";
        tree.heads.push_back(*head);
        rows.emplace_back(fields.begin(), fields.end());
        lines.push_back(line_no);
    }
    flush();
    if (!allow_empty && corpus.data.empty()) throw DataError("empty dataset: no sentences found");
    return corpus;
}

ConllCorpus read_conll(const std::filesystem::path& path, bool allow_empty) {
    auto in = text::open_input(path.string());
    return read_conll(in, allow_empty);
}

void write_conll(std::ostream& out, const ConllCorpus& corpus, const std::vector<DependencyTree>& predicted) {
    if (predicted.size() != corpus.rows.size()) throw ContractError("prediction count does not match corpus");
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const auto& rows = corpus.rows[i];
        if (predicted[i].size() != rows.size()) throw ContractError("tree size does not match sentence");
        for (std::size_t k = 0; k < rows.size(); ++k) {
            for (std::size_t c = 0; c < rows[k].size(); ++c) {
                if (c > 0) out << '\t';
                out << (c == 6 ? std::to_string(predicted[i].heads[k]) : rows[k][c]);
            }
            out << '\n';
        }
        out << '\n';
    }
}

}  // namespace structlearn::deptree
