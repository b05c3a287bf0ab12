#include "structlearn/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "structlearn/app.hpp"
#include "structlearn/error.hpp"

namespace structlearn::cli {

namespace {

struct Options {
    std::string command;
    std::string task;
    std::string algo = "dcd";
    std::string train;
    std::string test;
    std::string model;
    std::string output;
    std::string report;
    LearnerConfig learner;
    bool affixes = false;
    bool no_bias = false;
};

// Raised for flag combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Training-phase failures map to their own exit code.
struct TrainingFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class Fn>
auto guard_training(Fn&& fn) {
    try {
        return fn();
    } catch (const DataError&) {
        throw;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw TrainingFailure(e.what());
    }
}

std::string format_metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// Writes to the --output file, or to `fallback` when none was given.
class OutputSink {
public:
    OutputSink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) throw DataError("cannot open " + path + " for writing");
            stream_ = &file_;
        }
    }
    std::ostream& get() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

void write_report(const TrainReport& report, const std::string& path) {
    if (path.empty()) return;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path + " for writing");
    report.write_csv(out);
}

ModelArtifact load_checked(const Options& o, TaskKind task) {
    auto model = load_model(o.model);
    if (model.task != task)
        throw app::ModelMismatch("model " + o.model + " was trained for task '" + std::string(to_string(model.task)) +
                                 "', not '" + std::string(to_string(task)) + "'");
    return model;
}

// ------------------------------------------------------------------ train

int run_train(const Options& o, TaskKind task, Algorithm algo, std::ostream& out) {
    ModelArtifact artifact;
    TrainReport report;
    switch (task) {
    case TaskKind::sequence: {
        app::SequenceTagger tagger(seqtag::Templates{o.affixes});
        const auto data = tagger.read(o.train, seqtag::ReadMode::train);
        report = guard_training([&] { return tagger.train(data, algo, o.learner); });
        artifact = tagger.to_artifact();
        break;
    }
    case TaskKind::deptree: {
        app::DependencyParser parser;
        const auto corpus = deptree::read_conll(o.train);
        report = guard_training([&] { return parser.train(corpus.data, algo, o.learner); });
        artifact = parser.to_artifact();
        break;
    }
    case TaskKind::multiclass: {
        app::MulticlassClassifier clf(!o.no_bias);
        const auto corpus = clf.read(o.train, multiclass::ReadMode::train);
        auto costs = multiclass::load_sidecar_costs(o.train, clf.labels().size());
        report = guard_training([&] { return clf.train(corpus.data, algo, o.learner, costs); });
        artifact = clf.to_artifact();
        break;
    }
    }
    save_model(artifact, o.model);
    write_report(report, o.report);
    const auto& last = report.epochs.back();
    out << "trained " << to_string(task) << " model with " << to_string(algo) << ": " << report.epochs.size()
        << " epoch(s), primal " << last.primal << ", train accuracy " << format_metric(last.train_accuracy) << '\n';
    return exit_code::success;
}

// ---------------------------------------------------------------- predict

int run_predict(const Options& o, TaskKind task, std::ostream& out) {
    const auto model = load_checked(o, task);
    OutputSink sink(o.output, out);
    switch (task) {
    case TaskKind::sequence: {
        auto tagger = app::SequenceTagger::from_artifact(model);
        const auto data = tagger.read(o.test, seqtag::ReadMode::predict);
        std::vector<seqtag::TokenSequence> xs;
        std::vector<seqtag::TagSequence> ys;
        for (const auto& ex : data.examples) {
            xs.push_back(ex.instance);
            ys.push_back(tagger.predict(ex.instance));
        }
        seqtag::write_column_data(sink.get(), xs, ys, tagger.tags());
        break;
    }
    case TaskKind::deptree: {
        const auto parser = app::DependencyParser::from_artifact(model);
        const auto corpus = deptree::read_conll(o.test, /*allow_empty=*/true);
        std::vector<deptree::DependencyTree> trees;
        for (const auto& ex : corpus.data.examples) trees.push_back(parser.predict(ex.instance));
        deptree::write_conll(sink.get(), corpus, trees);
        break;
    }
    case TaskKind::multiclass: {
        auto clf = app::MulticlassClassifier::from_artifact(model);
        const auto corpus = clf.read(o.test, multiclass::ReadMode::predict);
        std::vector<multiclass::ClassLabel> labels;
        for (const auto& ex : corpus.data.examples) labels.push_back(clf.predict(ex.instance));
        multiclass::write_svmlight(sink.get(), corpus, labels, clf.labels());
        break;
    }
    }
    return exit_code::success;
}

// --------------------------------------------------------------- evaluate

struct Misaligned : DataError {
    using DataError::DataError;
};

int run_evaluate(const Options& o, TaskKind task, std::ostream& out) {
    switch (task) {
    case TaskKind::sequence: {
        Lexicon tags;
        const auto gold = seqtag::read_column_data(o.test, tags, seqtag::ReadMode::train);
        const auto pred = seqtag::read_column_data(o.output, tags, seqtag::ReadMode::train);
        if (gold.size() != pred.size()) throw Misaligned("gold and prediction files hold different sequence counts");
        std::vector<seqtag::TagSequence> g, p;
        for (std::size_t i = 0; i < gold.size(); ++i) {
            if (gold[i].instance != pred[i].instance)
                throw Misaligned("sequence " + std::to_string(i + 1) + " differs between gold and prediction files");
            g.push_back(gold[i].gold);
            p.push_back(pred[i].gold);
        }
        out << "accuracy\t" << format_metric(seqtag::token_accuracy(p, g)) << '\n';
        break;
    }
    case TaskKind::deptree: {
        const auto gold = deptree::read_conll(o.test);
        const auto pred = deptree::read_conll(o.output);
        if (gold.data.size() != pred.data.size())
            throw Misaligned("gold and prediction files hold different sentence counts");
        std::vector<deptree::DependencyTree> g, p;
        for (std::size_t i = 0; i < gold.data.size(); ++i) {
            if (gold.data[i].instance.words != pred.data[i].instance.words)
                throw Misaligned("sentence " + std::to_string(i + 1) + " differs between gold and prediction files");
            g.push_back(gold.data[i].gold);
            p.push_back(pred.data[i].gold);
        }
        out << "uas\t" << format_metric(deptree::uas(p, g)) << '\n';
        break;
    }
    case TaskKind::multiclass: {
        // Label order for the cost matrix: the model's, or the sorted union of
        // labels seen in both files.
        Lexicon labels;
        if (!o.model.empty()) {
            labels = load_checked(o, task).label_lexicon;
        } else {
            Lexicon tmp_raw;
            std::ifstream g(o.test, std::ios::binary), p(o.output, std::ios::binary);
            if (!g) throw DataError("cannot open " + o.test);
            if (!p) throw DataError("cannot open " + o.output);
            std::stringstream both;
            both << g.rdbuf() << '\n' << p.rdbuf();
            multiclass::read_svmlight(both, labels, tmp_raw, multiclass::ReadMode::train, true);
        }
        labels.freeze();
        Lexicon raw;
        raw.freeze();
        const auto gold = multiclass::read_svmlight(o.test, labels, raw, multiclass::ReadMode::predict);
        const auto pred = multiclass::read_svmlight(o.output, labels, raw, multiclass::ReadMode::predict);
        if (gold.data.size() != pred.data.size())
            throw Misaligned("gold and prediction files hold different example counts");
        if (gold.data.empty()) throw DataError("empty dataset: no examples found");
        const auto costs = multiclass::load_sidecar_costs(o.test, labels.size());
        std::size_t correct = 0;
        double cost = 0.0;
        for (std::size_t i = 0; i < gold.data.size(); ++i) {
            const auto gl = gold.data[i].gold.index;
            const auto pl = pred.data[i].gold.index;
            correct += gl == pl;
            cost += costs(gl, pl);
        }
        const double n = static_cast<double>(gold.data.size());
        out << "average_cost\t" << format_metric(cost / n) << '\n';
        out << "accuracy\t" << format_metric(static_cast<double>(correct) / n) << '\n';
        break;
    }
    }
    return exit_code::success;
}

// -------------------------------------------------------------- benchmark

struct CurvePoint {
    double seconds;
    double metric;
};

void write_curve(std::ostream& out, const std::vector<CurvePoint>& curve) {
    out << "seconds,test_metric\n";
    for (const auto& p : curve) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", p.seconds, p.metric);
        out << buf;
    }
}

int run_benchmark(const Options& o, TaskKind task, Algorithm algo, std::ostream& out) {
    std::vector<CurvePoint> curve;
    TrainReport report;
    switch (task) {
    case TaskKind::sequence: {
        app::SequenceTagger tagger(seqtag::Templates{o.affixes});
        const auto data = tagger.read(o.train, seqtag::ReadMode::train);
        auto tags = tagger.tags();  // predict mode needs a frozen tag set
        tags.freeze();
        const auto test = seqtag::read_column_data(o.test, tags, seqtag::ReadMode::predict);
        if (test.empty()) throw DataError("empty test set");
        report = guard_training([&] {
            return tagger.train(data, algo, o.learner, [&](const EpochRecord& rec, const WeightVector& w) {
                curve.push_back({rec.seconds, tagger.metric(test, w)});
            });
        });
        break;
    }
    case TaskKind::deptree: {
        app::DependencyParser parser;
        const auto train = deptree::read_conll(o.train);
        const auto test = deptree::read_conll(o.test, /*allow_empty=*/true);
        if (test.data.empty()) throw DataError("empty test set");
        report = guard_training([&] {
            return parser.train(train.data, algo, o.learner, [&](const EpochRecord& rec, const WeightVector& w) {
                curve.push_back({rec.seconds, parser.metric(test.data, w)});
            });
        });
        break;
    }
    case TaskKind::multiclass: {
        app::MulticlassClassifier clf(!o.no_bias);
        const auto train = clf.read(o.train, multiclass::ReadMode::train);
        const auto test = clf.read(o.test, multiclass::ReadMode::predict);
        if (test.data.empty()) throw DataError("empty test set");
        auto costs = multiclass::load_sidecar_costs(o.train, clf.labels().size());
        report = guard_training([&] {
            return clf.train(train.data, algo, o.learner, costs, [&](const EpochRecord& rec, const WeightVector& w) {
                curve.push_back({rec.seconds, clf.metric(test.data, w)});
            });
        });
        break;
    }
    }
    OutputSink sink(o.output, out);
    write_curve(sink.get(), curve);
    write_report(report, o.report);
    return exit_code::success;
}

void add_task_flag(CLI::App* cmd, Options& o) {
    cmd->add_option("--task", o.task, "sequence | deptree | multiclass")
        ->required()
        ->check(CLI::IsMember({"sequence", "deptree", "multiclass"}));
}

void add_learner_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--algo", o.algo, "perceptron | dcd | demidcd")
        ->check(CLI::IsMember({"perceptron", "dcd", "demidcd"}))
        ->capture_default_str();
    cmd->add_option("--C", o.learner.C, "regularization trade-off")->capture_default_str();
    cmd->add_option("--eta", o.learner.eta, "perceptron learning rate")->capture_default_str();
    cmd->add_option("--epochs", o.learner.epochs, "passes / outer iterations (0 = algorithm default)")
        ->capture_default_str();
    cmd->add_option("--tolerance", o.learner.tolerance, "stopping tolerance")->capture_default_str();
    cmd->add_option("--threads", o.learner.threads, "threads (demidcd: 1 learner + N-1 workers)")
        ->capture_default_str();
    cmd->add_option("--seed", o.learner.seed, "shuffling seed")->capture_default_str();
    cmd->add_flag("--affixes", o.affixes, "sequence: add prefix/suffix emission templates");
    cmd->add_flag("--no-bias", o.no_bias, "multiclass: disable the always-on bias feature");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App cli{"Structured prediction: training, prediction, evaluation and benchmark curves"};
    cli.name("structlearn");
    cli.require_subcommand(1);

    auto* train = cli.add_subcommand("train", "train a model");
    add_task_flag(train, o);
    add_learner_flags(train, o);
    train->add_option("--train", o.train, "training data")->required();
    train->add_option("--model", o.model, "model file to write")->required();
    train->add_option("--report", o.report, "per-epoch training report (CSV)");
    train->add_option("--test", o.test, "unused by train");
    train->add_option("--output", o.output, "unused by train");

    auto* predict = cli.add_subcommand("predict", "tag / parse / classify a file");
    add_task_flag(predict, o);
    predict->add_option("--model", o.model, "model file")->required();
    predict->add_option("--test", o.test, "input data")->required();
    predict->add_option("--output", o.output, "predictions (default: stdout)");

    auto* evaluate = cli.add_subcommand("evaluate", "score predictions against gold data");
    add_task_flag(evaluate, o);
    evaluate->add_option("--test", o.test, "gold data")->required();
    evaluate->add_option("--output", o.output, "predictions to score")->required();
    evaluate->add_option("--model", o.model, "multiclass: model whose label order the cost matrix uses");

    auto* bench = cli.add_subcommand("benchmark", "emit a test-metric vs training-time curve");
    add_task_flag(bench, o);
    add_learner_flags(bench, o);
    bench->add_option("--train", o.train, "training data")->required();
    bench->add_option("--test", o.test, "evaluation data")->required();
    bench->add_option("--output", o.output, "curve CSV (default: stdout)");
    bench->add_option("--report", o.report, "per-epoch training report (CSV)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        cli.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << cli.help();
        return exit_code::success;
    } catch (const CLI::CallForAllHelp&) {
        out << cli.help("", CLI::AppFormatMode::All);
        return exit_code::success;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_code::usage;
    }

    try {
        const auto task = parse_task_kind(o.task);
        const auto algo = parse_algorithm(o.algo);
        if (train->parsed() || bench->parsed()) {
            try {
                o.learner.validate(algo);
            } catch (const ContractError& e) {
                throw UsageError(e.what());
            }
        }
        if (train->parsed()) return run_train(o, task, algo, out);
        if (predict->parsed()) return run_predict(o, task, out);
        if (evaluate->parsed()) return run_evaluate(o, task, out);
        return run_benchmark(o, task, algo, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_code::usage;
    } catch (const app::ModelMismatch& e) {
        err << "model mismatch: " << e.what() << '\n';
        return exit_code::model_mismatch;
    } catch (const TrainingFailure& e) {
        err << "training failed: " << e.what() << '\n';
        return exit_code::training_failure;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return exit_code::data_error;
    } catch (const VersionError& e) {
        err << "model error: " << e.what() << '\n';
        return exit_code::data_error;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return exit_code::data_error;
    } catch (const ContractError& e) {
        err << "data error: " << e.what() << '\n';
        return exit_code::data_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::training_failure;
    }
}

}  // namespace structlearn::cli
