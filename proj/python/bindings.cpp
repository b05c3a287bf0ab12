#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "structlearn/app.hpp"
#include "structlearn/cli.hpp"
#include "structlearn/error.hpp"
#include "structlearn/model.hpp"

namespace py = pybind11;
using namespace structlearn;

namespace {

LearnerConfig resolve(const std::optional<LearnerConfig>& cfg, Algorithm algo) {
    LearnerConfig out = cfg.value_or(LearnerConfig{});
    out.validate(algo);
    return out;
}

ModelArtifact load_for(const std::filesystem::path& path, TaskKind task) {
    auto model = load_model(path);
    if (model.task != task)
        throw app::ModelMismatch("model " + path.string() + " was trained for task '" +
                                 std::string(to_string(model.task)) + "', not '" + std::string(to_string(task)) + "'");
    return model;
}

std::vector<std::string> tag_names(const seqtag::TagSequence& y, const Lexicon& tags) {
    std::vector<std::string> out;
    out.reserve(y.size());
    for (auto t : y.tags) out.push_back(tags.name(t));
    return out;
}

deptree::Sentence make_sentence(std::vector<std::string> words, std::optional<std::vector<std::string>> pos) {
    deptree::Sentence s{std::move(words), pos.value_or(std::vector<std::string>{})};
    if (s.has_pos() && s.pos.size() != s.words.size())
        throw ContractError("pos must be empty or match the number of words");
    return s;
}

double tagger_accuracy(const app::SequenceTagger& tagger, const std::filesystem::path& path) {
    Lexicon tags(tagger.tags().names());
    const auto gold = seqtag::read_column_data(path, tags, seqtag::ReadMode::train);
    return tagger.metric(gold, tagger.weights());
}

// Multiclass instance from raw feature names; unknown names are dropped.
multiclass::Instance make_instance(const app::MulticlassClassifier& clf, const std::map<std::string, double>& feats) {
    std::vector<FeatureEntry> entries;
    for (const auto& [name, value] : feats)
        if (auto idx = clf.raw_features().find(name)) entries.push_back({*idx, value});
    return {SparseVector::from_pairs(std::move(entries))};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Structured output learners and ready-made task models.";

    auto base = py::register_exception<std::runtime_error>(m, "StructlearnError", PyExc_RuntimeError);
    py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<VersionError>(m, "VersionError", base.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());
    py::register_exception<ArithmeticError>(m, "NumericError", base.ptr());
    py::register_exception<app::ModelMismatch>(m, "ModelMismatch", base.ptr());

    py::enum_<Algorithm>(m, "Algorithm")
        .value("perceptron", Algorithm::perceptron)
        .value("dcd", Algorithm::dcd)
        .value("demidcd", Algorithm::demidcd);

    py::class_<LearnerConfig>(m, "LearnerConfig")
        .def(py::init([](double C, int epochs, double eta, double tolerance, int threads, std::uint64_t seed,
                         bool deterministic_schedule, bool evaluate_epochs) {
                 LearnerConfig c;
                 c.C = C;
                 c.epochs = epochs;
                 c.eta = eta;
                 c.tolerance = tolerance;
                 c.threads = threads;
                 c.seed = seed;
                 c.deterministic_schedule = deterministic_schedule;
                 c.evaluate_epochs = evaluate_epochs;
                 return c;
             }),
             py::kw_only(), py::arg("C") = 0.1, py::arg("epochs") = 0, py::arg("eta") = 1.0,
             py::arg("tolerance") = 0.1, py::arg("threads") = 1, py::arg("seed") = 0,
             py::arg("deterministic_schedule") = false, py::arg("evaluate_epochs") = true)
        .def_readwrite("C", &LearnerConfig::C)
        .def_readwrite("epochs", &LearnerConfig::epochs)
        .def_readwrite("eta", &LearnerConfig::eta)
        .def_readwrite("tolerance", &LearnerConfig::tolerance)
        .def_readwrite("threads", &LearnerConfig::threads)
        .def_readwrite("seed", &LearnerConfig::seed)
        .def_readwrite("max_inner_sweeps", &LearnerConfig::max_inner_sweeps)
        .def_readwrite("prune_after", &LearnerConfig::prune_after)
        .def_readwrite("deterministic_schedule", &LearnerConfig::deterministic_schedule)
        .def_readwrite("evaluate_epochs", &LearnerConfig::evaluate_epochs)
        .def("validate", &LearnerConfig::validate, py::arg("algo"))
        .def("describe", &LearnerConfig::describe, py::arg("algo"));

    py::class_<EpochRecord>(m, "EpochRecord")
        .def_readonly("epoch", &EpochRecord::epoch)
        .def_readonly("primal", &EpochRecord::primal)
        .def_readonly("dual", &EpochRecord::dual)
        .def_readonly("train_accuracy", &EpochRecord::train_accuracy)
        .def_readonly("seconds", &EpochRecord::seconds)
        .def_readonly("mistakes", &EpochRecord::mistakes)
        .def_readonly("working_set_size", &EpochRecord::working_set_size)
        .def("__repr__", [](const EpochRecord& r) {
            return "<EpochRecord epoch=" + std::to_string(r.epoch) + " primal=" + std::to_string(r.primal) + ">";
        });

    py::class_<TrainReport>(m, "TrainReport")
        .def_readonly("config", &TrainReport::config)
        .def_readonly("epochs", &TrainReport::epochs)
        .def_readonly("converged", &TrainReport::converged)
        .def("to_csv", [](const TrainReport& r) {
            std::ostringstream out;
            r.write_csv(out);
            return out.str();
        });

    // ---- decoding and losses on plain Python data

    m.def(
        "viterbi",
        [](const std::vector<double>& start, const std::vector<std::vector<double>>& transition,
           const std::vector<std::vector<double>>& emission) {
            const std::size_t T = start.size();
            seqtag::ChainScores s{emission.size(), T, start, std::vector<double>(T * T), std::vector<double>(emission.size() * T)};
            if (transition.size() != T) throw ContractError("transition must be num_tags x num_tags");
            for (std::size_t j = 0; j < T; ++j) {
                if (transition[j].size() != T) throw ContractError("transition must be num_tags x num_tags");
                for (std::size_t k = 0; k < T; ++k) s.trans(j, k) = transition[j][k];
            }
            for (std::size_t t = 0; t < emission.size(); ++t) {
                if (emission[t].size() != T) throw ContractError("emission rows must have num_tags entries");
                for (std::size_t k = 0; k < T; ++k) s.emit(t, k) = emission[t][k];
            }
            return seqtag::viterbi(s).tags;
        },
        py::arg("start"), py::arg("transition"), py::arg("emission"),
        "Best tag path for start[k], transition[j][k] and emission[t][k] scores.");

    m.def(
        "chu_liu_edmonds",
        [](const std::vector<std::vector<double>>& scores) {
            if (scores.empty()) throw ContractError("scores must be (n+1) x (n+1)");
            deptree::ArcScoreMatrix arcs(scores.size() - 1);
            for (std::size_t h = 0; h < scores.size(); ++h) {
                if (scores[h].size() != scores.size()) throw ContractError("scores must be (n+1) x (n+1)");
                for (std::size_t d = 0; d < scores.size(); ++d) arcs(h, d) = scores[h][d];
            }
            return deptree::chu_liu_edmonds(arcs).heads;
        },
        py::arg("scores"), "Heads of the maximum spanning tree rooted at node 0; scores[h][m].");

    m.def(
        "is_valid_tree", [](std::vector<int> heads) { return deptree::is_valid_tree({std::move(heads)}); },
        py::arg("heads"));
    m.def(
        "hamming_loss",
        [](std::vector<std::size_t> y, std::vector<std::size_t> gold) {
            return seqtag::hamming_loss({std::move(y)}, {std::move(gold)});
        },
        py::arg("predicted"), py::arg("gold"));
    m.def(
        "attachment_loss",
        [](std::vector<int> y, std::vector<int> gold) {
            return deptree::attachment_loss({std::move(y)}, {std::move(gold)});
        },
        py::arg("predicted"), py::arg("gold"));

    // ---- task models

    py::class_<app::SequenceTagger>(m, "SequenceTagger")
        .def(py::init([](bool affixes) { return app::SequenceTagger(seqtag::Templates{affixes}); }),
             py::arg("affixes") = false)
        .def(
            "fit",
            [](app::SequenceTagger& self, const std::vector<std::vector<std::string>>& sentences,
               const std::vector<std::vector<std::string>>& tags, Algorithm algo,
               const std::optional<LearnerConfig>& cfg) {
                if (sentences.size() != tags.size()) throw ContractError("sentences and tags differ in length");
                seqtag::SequenceDataset data{TaskKind::sequence, {}};
                for (std::size_t i = 0; i < sentences.size(); ++i)
                    data.examples.push_back({{sentences[i]}, self.intern_tags(tags[i])});
                const auto c = resolve(cfg, algo);
                py::gil_scoped_release nogil;
                return self.train(data, algo, c);
            },
            py::arg("sentences"), py::arg("tags"), py::arg("algo") = Algorithm::dcd, py::arg("config") = std::nullopt)
        .def(
            "fit_file",
            [](app::SequenceTagger& self, const std::filesystem::path& path, Algorithm algo,
               const std::optional<LearnerConfig>& cfg) {
                const auto data = self.read(path, seqtag::ReadMode::train);
                const auto c = resolve(cfg, algo);
                py::gil_scoped_release nogil;
                return self.train(data, algo, c);
            },
            py::arg("path"), py::arg("algo") = Algorithm::dcd, py::arg("config") = std::nullopt)
        .def(
            "predict",
            [](const app::SequenceTagger& self, std::vector<std::string> tokens) {
                return tag_names(self.predict({std::move(tokens)}), self.tags());
            },
            py::arg("tokens"))
        .def("accuracy", &tagger_accuracy, py::arg("path"), "Token accuracy on a gold column file.")
        .def_property_readonly("tags", [](const app::SequenceTagger& self) { return self.tags().names(); })
        .def_property_readonly("num_features", [](const app::SequenceTagger& self) { return self.features().size(); })
        .def("save", [](const app::SequenceTagger& self, const std::filesystem::path& path) {
            save_model(self.to_artifact(), path);
        })
        .def_static("load", [](const std::filesystem::path& path) {
            return app::SequenceTagger::from_artifact(load_for(path, TaskKind::sequence));
        });

    py::class_<app::DependencyParser>(m, "DependencyParser")
        .def(py::init<>())
        .def(
            "fit",
            [](app::DependencyParser& self, const std::vector<std::vector<std::string>>& sentences,
               const std::vector<std::vector<int>>& heads, const std::optional<std::vector<std::vector<std::string>>>& pos,
               Algorithm algo, const std::optional<LearnerConfig>& cfg) {
                if (sentences.size() != heads.size() || (pos && pos->size() != sentences.size()))
                    throw ContractError("sentences, heads and pos differ in length");
                deptree::ParseDataset data{TaskKind::deptree, {}};
                for (std::size_t i = 0; i < sentences.size(); ++i) {
                    auto s = make_sentence(sentences[i], pos ? std::optional((*pos)[i]) : std::nullopt);
                    data.examples.push_back({std::move(s), {heads[i]}});
                }
                const auto c = resolve(cfg, algo);
                py::gil_scoped_release nogil;
                return self.train(data, algo, c);
            },
            py::arg("sentences"), py::arg("heads"), py::arg("pos") = std::nullopt, py::arg("algo") = Algorithm::dcd,
            py::arg("config") = std::nullopt)
        .def(
            "fit_file",
            [](app::DependencyParser& self, const std::filesystem::path& path, Algorithm algo,
               const std::optional<LearnerConfig>& cfg) {
                const auto corpus = deptree::read_conll(path);
                const auto c = resolve(cfg, algo);
                py::gil_scoped_release nogil;
                return self.train(corpus.data, algo, c);
            },
            py::arg("path"), py::arg("algo") = Algorithm::dcd, py::arg("config") = std::nullopt)
        .def(
            "predict",
            [](const app::DependencyParser& self, std::vector<std::string> words,
               std::optional<std::vector<std::string>> pos) {
                return self.predict(make_sentence(std::move(words), std::move(pos))).heads;
            },
            py::arg("words"), py::arg("pos") = std::nullopt)
        .def(
            "uas",
            [](const app::DependencyParser& self, const std::filesystem::path& path) {
                return self.metric(deptree::read_conll(path).data, self.weights());
            },
            py::arg("path"), "Unlabeled attachment score on a gold CoNLL-X file.")
        .def_property_readonly("num_features", [](const app::DependencyParser& self) { return self.features().size(); })
        .def("save", [](const app::DependencyParser& self, const std::filesystem::path& path) {
            save_model(self.to_artifact(), path);
        })
        .def_static("load", [](const std::filesystem::path& path) {
            return app::DependencyParser::from_artifact(load_for(path, TaskKind::deptree));
        });

    py::class_<app::MulticlassClassifier>(m, "MulticlassClassifier")
        .def(py::init<bool>(), py::arg("bias") = true)
        .def(
            "fit_file",
            [](app::MulticlassClassifier& self, const std::filesystem::path& path, Algorithm algo,
               const std::optional<LearnerConfig>& cfg, const std::optional<std::vector<std::vector<double>>>& costs) {
                const auto corpus = self.read(path, multiclass::ReadMode::train);
                std::optional<multiclass::CostMatrix> matrix;
                if (costs) {
                    matrix = multiclass::CostMatrix::from_rows(*costs);
                    if (matrix->classes() != self.labels().size())
                        throw DataError("cost matrix size does not match the number of labels");
                }
                const auto c = resolve(cfg, algo);
                py::gil_scoped_release nogil;
                return self.train(corpus.data, algo, c, matrix);
            },
            py::arg("path"), py::arg("algo") = Algorithm::dcd, py::arg("config") = std::nullopt,
            py::arg("costs") = std::nullopt, "Trains on an svmlight file; costs[gold][predicted] defaults to 0/1.")
        .def(
            "predict",
            [](const app::MulticlassClassifier& self, const std::map<std::string, double>& features) {
                return self.labels().name(self.predict(make_instance(self, features)).index);
            },
            py::arg("features"), "Label for a {feature name: value} mapping; unknown names are ignored.")
        .def(
            "accuracy",
            [](app::MulticlassClassifier& self, const std::filesystem::path& path) {
                const auto corpus = self.read(path, multiclass::ReadMode::predict);
                return self.metric(corpus.data, self.weights());
            },
            py::arg("path"))
        .def_property_readonly("labels", [](const app::MulticlassClassifier& self) { return self.labels().names(); })
        .def_property_readonly("bias", &app::MulticlassClassifier::bias)
        .def("save", [](const app::MulticlassClassifier& self, const std::filesystem::path& path) {
            save_model(self.to_artifact(), path);
        })
        .def_static("load", [](const std::filesystem::path& path) {
            return app::MulticlassClassifier::from_artifact(load_for(path, TaskKind::multiclass));
        });

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "structlearn");
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release nogil;
                code = cli::run(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line tool in-process; returns (exit code, stdout, stderr).");
}
