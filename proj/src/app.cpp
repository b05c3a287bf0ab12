#include "structlearn/app.hpp"

#include "structlearn/error.hpp"

namespace structlearn::app {

namespace {

template <class X, class Y, class G, class S>
TrainResult<Y> run_training(Algorithm algo, const Dataset<X, Y>& data, const G& fg, const S& solver,
                            const LearnerConfig& cfg, const CheckpointFn& checkpoint) {
    TrainHooks<Y> hooks;
    hooks.on_epoch = checkpoint;
    return train(algo, data, fg, solver, cfg, hooks);
}

void expect_task(const ModelArtifact& model, TaskKind task) {
    if (model.task != task)
        throw ModelMismatch("model was trained for task '" + std::string(to_string(model.task)) + "', not '" +
                            std::string(to_string(task)) + "'");
}

std::shared_ptr<Lexicon> frozen_copy(const Lexicon& lex) {
    auto out = std::make_shared<Lexicon>(lex);
    out->freeze();
    return out;
}

// Pads to the lexicon size and freezes both.
WeightVector finalize(WeightVector w, Lexicon& features) {
    features.freeze();
    w.resize(features.size());
    w.freeze();
    return w;
}

constexpr char kSep = '\x1f';

}  // namespace

// ---------------------------------------------------------------- sequence

SequenceTagger::SequenceTagger(seqtag::Templates templates)
    : features_(std::make_shared<Lexicon>()), tags_(std::make_shared<Lexicon>()), templates_(templates) {}

SequenceTagger SequenceTagger::from_artifact(const ModelArtifact& model) {
    expect_task(model, TaskKind::sequence);
    SequenceTagger t;
    t.features_ = frozen_copy(model.feature_lexicon);
    t.tags_ = frozen_copy(model.label_lexicon);
    t.meta_ = model.trainer_meta;
    if (auto it = model.trainer_meta.find("templates"); it != model.trainer_meta.end())
        t.templates_.affixes = it->second == "affixes";
    t.weights_ = model.weights;
    t.weights_.freeze();
    return t;
}

ModelArtifact SequenceTagger::to_artifact() const {
    ModelArtifact m;
    m.task = TaskKind::sequence;
    m.weights = weights_;
    m.weights.resize(features_->size());
    m.feature_lexicon = *features_;
    m.label_lexicon = *tags_;
    m.trainer_meta = meta_;
    m.trainer_meta["templates"] = templates_.affixes ? "affixes" : "basic";
    return m;
}

seqtag::SequenceDataset SequenceTagger::read(const std::filesystem::path& path, seqtag::ReadMode mode) {
    return seqtag::read_column_data(path, *tags_, mode);
}

seqtag::TagSequence SequenceTagger::intern_tags(const std::vector<std::string>& tags) {
    seqtag::TagSequence out;
    for (const auto& t : tags) out.tags.push_back(tags_->intern(t));
    return out;
}

TrainReport SequenceTagger::train(const seqtag::SequenceDataset& data, Algorithm algo, const LearnerConfig& cfg,
                                  const CheckpointFn& checkpoint) {
    if (features_->frozen()) throw ContractError("tagger is already trained");
    if (tags_->size() == 0) throw DataError("no tags known; read training data first");
    tags_->freeze();
    const auto fg = generator();
    const auto s = solver();
    auto result = run_training(algo, data, fg, s, cfg, checkpoint);
    weights_ = finalize(std::move(result.weights), *features_);
    meta_ = result.report.config;
    return result.report;
}

seqtag::TagSequence SequenceTagger::predict(const seqtag::TokenSequence& x) const { return solver().best(weights_, x); }

double SequenceTagger::metric(const seqtag::SequenceDataset& gold, const WeightVector& w) const {
    const auto s = solver();
    std::vector<seqtag::TagSequence> pred;
    std::vector<seqtag::TagSequence> ref;
    for (const auto& ex : gold.examples) {
        pred.push_back(s.best(w, ex.instance));
        ref.push_back(ex.gold);
    }
    return seqtag::token_accuracy(pred, ref);
}

// ---------------------------------------------------------------- deptree

DependencyParser::DependencyParser() : features_(std::make_shared<Lexicon>()) {}

DependencyParser DependencyParser::from_artifact(const ModelArtifact& model) {
    expect_task(model, TaskKind::deptree);
    DependencyParser p;
    p.features_ = frozen_copy(model.feature_lexicon);
    p.meta_ = model.trainer_meta;
    p.weights_ = model.weights;
    p.weights_.freeze();
    return p;
}

ModelArtifact DependencyParser::to_artifact() const {
    ModelArtifact m;
    m.task = TaskKind::deptree;
    m.weights = weights_;
    m.weights.resize(features_->size());
    m.feature_lexicon = *features_;
    m.trainer_meta = meta_;
    return m;
}

TrainReport DependencyParser::train(const deptree::ParseDataset& data, Algorithm algo, const LearnerConfig& cfg,
                                    const CheckpointFn& checkpoint) {
    if (features_->frozen()) throw ContractError("parser is already trained");
    const auto fg = generator();
    const auto s = solver();
    auto result = run_training(algo, data, fg, s, cfg, checkpoint);
    weights_ = finalize(std::move(result.weights), *features_);
    meta_ = result.report.config;
    return result.report;
}

deptree::DependencyTree DependencyParser::predict(const deptree::Sentence& x) const {
    return solver().best(weights_, x);
}

double DependencyParser::metric(const deptree::ParseDataset& gold, const WeightVector& w) const {
    const auto s = solver();
    std::vector<deptree::DependencyTree> pred;
    std::vector<deptree::DependencyTree> ref;
    for (const auto& ex : gold.examples) {
        pred.push_back(s.best(w, ex.instance));
        ref.push_back(ex.gold);
    }
    return deptree::uas(pred, ref);
}

// ---------------------------------------------------------------- multiclass

MulticlassClassifier::MulticlassClassifier(bool bias) : bias_(bias) {}

MulticlassClassifier MulticlassClassifier::from_artifact(const ModelArtifact& model) {
    expect_task(model, TaskKind::multiclass);
    MulticlassClassifier c;
    c.labels_ = model.label_lexicon;
    c.labels_.freeze();
    const std::size_t k = c.labels_.size();
    const std::size_t total = model.feature_lexicon.size();
    if (k == 0 || total % k != 0) throw DataError("multiclass model has an inconsistent feature layout");
    const std::size_t b = total / k;
    const std::string prefix = c.labels_.name(0) + kSep;
    for (std::size_t j = 0; j < b; ++j) {
        const auto& name = model.feature_lexicon.name(j);
        if (name.compare(0, prefix.size(), prefix) != 0) throw DataError("multiclass feature name lacks class prefix");
        c.raw_.intern(name.substr(prefix.size()));
    }
    c.raw_.freeze();
    c.meta_ = model.trainer_meta;
    auto it = model.trainer_meta.find("bias");
    c.bias_ = it == model.trainer_meta.end() || it->second == "1";
    c.weights_ = model.weights;
    c.weights_.freeze();
    return c;
}

ModelArtifact MulticlassClassifier::to_artifact() const {
    ModelArtifact m;
    m.task = TaskKind::multiclass;
    std::vector<std::string> names;
    for (std::size_t k = 0; k < labels_.size(); ++k)
        for (std::size_t j = 0; j < raw_.size(); ++j) names.push_back(labels_.name(k) + kSep + raw_.name(j));
    m.feature_lexicon = Lexicon(names);
    m.feature_lexicon.freeze();
    m.label_lexicon = labels_;
    m.weights = weights_;
    m.weights.resize(names.size());
    m.trainer_meta = meta_;
    m.trainer_meta["bias"] = bias_ ? "1" : "0";
    return m;
}

multiclass::SvmlightCorpus MulticlassClassifier::read(const std::filesystem::path& path, multiclass::ReadMode mode) {
    return multiclass::read_svmlight(path, labels_, raw_, mode, bias_);
}

multiclass::SvmlightCorpus MulticlassClassifier::read(std::istream& in, multiclass::ReadMode mode) {
    return multiclass::read_svmlight(in, labels_, raw_, mode, bias_);
}

multiclass::FeatureGenerator MulticlassClassifier::generator() const {
    return multiclass::FeatureGenerator(labels_.size(), raw_.size(), bias_);
}

multiclass::ArgmaxSolver MulticlassClassifier::solver(multiclass::CostMatrix costs) const {
    return multiclass::ArgmaxSolver(generator(), std::move(costs));
}

TrainReport MulticlassClassifier::train(const multiclass::MulticlassDataset& data, Algorithm algo,
                                        const LearnerConfig& cfg, std::optional<multiclass::CostMatrix> costs,
                                        const CheckpointFn& checkpoint) {
    if (weights_.frozen()) throw ContractError("classifier is already trained");
    if (labels_.size() == 0) throw DataError("no labels known; read training data first");
    labels_.freeze();
    raw_.freeze();
    const auto fg = generator();
    const auto s = solver(costs ? *costs : multiclass::CostMatrix::zero_one(labels_.size()));
    auto result = run_training(algo, data, fg, s, cfg, checkpoint);
    weights_ = std::move(result.weights);
    weights_.resize(labels_.size() * raw_.size());
    weights_.freeze();
    meta_ = result.report.config;
    return result.report;
}

multiclass::ClassLabel MulticlassClassifier::predict(const multiclass::Instance& x) const {
    return solver(multiclass::CostMatrix::zero_one(labels_.size())).best(weights_, x);
}

double MulticlassClassifier::metric(const multiclass::MulticlassDataset& gold, const WeightVector& w) const {
    if (gold.empty()) throw ContractError("accuracy of an empty corpus");
    const auto s = solver(multiclass::CostMatrix::zero_one(labels_.size()));
    std::size_t correct = 0;
    for (const auto& ex : gold.examples) correct += s.best(w, ex.instance) == ex.gold;
    return static_cast<double>(correct) / static_cast<double>(gold.size());
}

}  // namespace structlearn::app
