#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "structlearn/deptree.hpp"
#include "structlearn/learners.hpp"
#include "structlearn/model.hpp"
#include "structlearn/multiclass.hpp"
#include "structlearn/seqtag.hpp"

// Ready-to-run predictors for the three bundled tasks: lexicon handling,
// training, prediction and conversion to and from ModelArtifact.
namespace structlearn::app {

using CheckpointFn = std::function<void(const EpochRecord&, const WeightVector&)>;

// Thrown when a model file belongs to a different task.
class ModelMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SequenceTagger {
public:
    explicit SequenceTagger(seqtag::Templates templates = {});
    static SequenceTagger from_artifact(const ModelArtifact& model);
    ModelArtifact to_artifact() const;

    seqtag::SequenceDataset read(const std::filesystem::path& path, seqtag::ReadMode mode);
    // Interns tags of a gold sequence given by name (training mode only).
    seqtag::TagSequence intern_tags(const std::vector<std::string>& tags);

    TrainReport train(const seqtag::SequenceDataset& data, Algorithm algo, const LearnerConfig& cfg,
                      const CheckpointFn& checkpoint = {});

    seqtag::TagSequence predict(const seqtag::TokenSequence& x) const;
    // Token accuracy of the given weights on a gold dataset.
    double metric(const seqtag::SequenceDataset& gold, const WeightVector& w) const;

    seqtag::FeatureGenerator generator() const { return {features_, tags_, templates_}; }
    seqtag::ViterbiSolver solver() const { return seqtag::ViterbiSolver(generator()); }
    const Lexicon& tags() const noexcept { return *tags_; }
    const Lexicon& features() const noexcept { return *features_; }
    const WeightVector& weights() const noexcept { return weights_; }

private:
    std::shared_ptr<Lexicon> features_;
    std::shared_ptr<Lexicon> tags_;
    seqtag::Templates templates_;
    WeightVector weights_;
    std::map<std::string, std::string> meta_;
};

class DependencyParser {
public:
    DependencyParser();
    static DependencyParser from_artifact(const ModelArtifact& model);
    ModelArtifact to_artifact() const;

    TrainReport train(const deptree::ParseDataset& data, Algorithm algo, const LearnerConfig& cfg,
                      const CheckpointFn& checkpoint = {});

    deptree::DependencyTree predict(const deptree::Sentence& x) const;
    // UAS of the given weights on a gold dataset.
    double metric(const deptree::ParseDataset& gold, const WeightVector& w) const;

    deptree::FeatureGenerator generator() const { return deptree::FeatureGenerator(features_); }
    deptree::ParseSolver solver() const { return deptree::ParseSolver(generator()); }
    const Lexicon& features() const noexcept { return *features_; }
    const WeightVector& weights() const noexcept { return weights_; }

private:
    std::shared_ptr<Lexicon> features_;
    WeightVector weights_;
    std::map<std::string, std::string> meta_;
};

class MulticlassClassifier {
public:
    explicit MulticlassClassifier(bool bias = true);
    static MulticlassClassifier from_artifact(const ModelArtifact& model);
    ModelArtifact to_artifact() const;

    // Train mode fills and freezes the label and raw-feature lexicons.
    multiclass::SvmlightCorpus read(const std::filesystem::path& path, multiclass::ReadMode mode);
    multiclass::SvmlightCorpus read(std::istream& in, multiclass::ReadMode mode);

    // Uses 0/1 costs unless a matrix is supplied.
    TrainReport train(const multiclass::MulticlassDataset& data, Algorithm algo, const LearnerConfig& cfg,
                      std::optional<multiclass::CostMatrix> costs = std::nullopt,
                      const CheckpointFn& checkpoint = {});

    multiclass::ClassLabel predict(const multiclass::Instance& x) const;
    // 0/1 accuracy of the given weights on a gold dataset.
    double metric(const multiclass::MulticlassDataset& gold, const WeightVector& w) const;

    multiclass::FeatureGenerator generator() const;
    multiclass::ArgmaxSolver solver(multiclass::CostMatrix costs) const;
    const Lexicon& labels() const noexcept { return labels_; }
    const Lexicon& raw_features() const noexcept { return raw_; }
    const WeightVector& weights() const noexcept { return weights_; }
    bool bias() const noexcept { return bias_; }

private:
    Lexicon labels_;
    Lexicon raw_;
    bool bias_;
    WeightVector weights_;
    std::map<std::string, std::string> meta_;
};

}  // namespace structlearn::app
