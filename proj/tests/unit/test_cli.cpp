#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "structlearn/cli.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using structlearn::cli::run;

namespace {

class Workspace {
public:
    Workspace() : dir_(fs::temp_directory_path() / ("structlearn_cli_" + std::to_string(counter_++))) {
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    ~Workspace() { fs::remove_all(dir_); }

    std::string file(const std::string& name, const std::string& content) const {
        std::ofstream(dir_ / name, std::ios::binary) << content;
        return path(name);
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

private:
    static inline int counter_ = 0;
    fs::path dir_;
};

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    args.insert(args.begin(), "structlearn");
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string kToyTagging = "the\tDT\ndog\tNN\nbarks\tVB\n\na\tDT\ncat\tNN\nsleeps\tVB\n\n";

const std::string kToyTrees =
    "1\tthe\t_\tDT\tDT\t_\t2\tdet\t_\t_\n2\tdog\t_\tNN\tNN\t_\t3\tnsubj\t_\t_\n3\tbarks\t_\tVB\tVB\t_\t0\troot\t_\t_\n\n"
    "1\ta\t_\tDT\tDT\t_\t2\tdet\t_\t_\n2\tcat\t_\tNN\tNN\t_\t3\tnsubj\t_\t_\n3\tsleeps\t_\tVB\tVB\t_\t0\troot\t_\t_\n\n";

}  // namespace

TEST_CASE("train writes a model and a report") {
    Workspace ws;
    const auto data = ws.file("train.tsv", kToyTagging);
    const auto r = cli({"train", "--task", "sequence", "--algo", "perceptron", "--train", data, "--model",
                        ws.path("m.bin"), "--report", ws.path("r.csv"), "--epochs", "4"});
    CHECK(r.code == 0);
    CHECK(fs::exists(ws.path("m.bin")));
    const auto report = slurp(ws.path("r.csv"));
    CHECK(report.find("# algorithm=perceptron") != std::string::npos);
    CHECK(report.find("\n4,") != std::string::npos);
}

TEST_CASE("usage errors") {
    Workspace ws;
    const auto data = ws.file("train.tsv", kToyTagging);
    CHECK(cli({"train", "--task", "sequence", "--train", data}).code == 64);
    CHECK(cli({"train", "--task", "tagging", "--train", data, "--model", ws.path("m")}).code == 64);
    CHECK(cli({}).code == 64);
    CHECK(cli({"fly"}).code == 64);
    const auto r = cli({"train", "--task", "sequence", "--algo", "demidcd", "--threads", "1", "--train", data,
                        "--model", ws.path("m")});
    CHECK(r.code == 64);
    CHECK(r.err.find("threads") != std::string::npos);
    CHECK(cli({"train", "--task", "sequence", "--C", "-1", "--train", data, "--model", ws.path("m")}).code == 64);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("data errors exit with 2") {
    Workspace ws;
    const auto bad = ws.file("bad.tsv", "the\tDT\noops\n");
    const auto r = cli({"train", "--task", "sequence", "--train", bad, "--model", ws.path("m")});
    CHECK(r.code == 2);
    CHECK(r.err.find("line 2") != std::string::npos);
    CHECK(cli({"train", "--task", "sequence", "--train", ws.path("missing"), "--model", ws.path("m")}).code == 2);
    CHECK(cli({"train", "--task", "sequence", "--train", ws.file("e.tsv", ""), "--model", ws.path("m")}).code == 2);
    CHECK(cli({"predict", "--task", "sequence", "--model", ws.file("junk.bin", "not a model"), "--test", bad}).code ==
          2);
}

TEST_CASE("predict reproduces a memorized sentence and handles empty input") {
    Workspace ws;
    const auto data = ws.file("one.tsv", "time\tN\nflies\tV\nfast\tA\n\n");
    REQUIRE(cli({"train", "--task", "sequence", "--train", data, "--model", ws.path("m.bin"), "--C", "10"}).code == 0);
    const auto r = cli({"predict", "--task", "sequence", "--model", ws.path("m.bin"), "--test", data});
    CHECK(r.code == 0);
    CHECK(r.out == "time\tN\nflies\tV\nfast\tA\n\n");

    const auto empty = ws.file("empty.tsv", "");
    const auto e = cli({"predict", "--task", "sequence", "--model", ws.path("m.bin"), "--test", empty, "--output",
                        ws.path("out.tsv")});
    CHECK(e.code == 0);
    CHECK(slurp(ws.path("out.tsv")).empty());

    CHECK(cli({"predict", "--task", "deptree", "--model", ws.path("m.bin"), "--test", data}).code == 4);
    CHECK(cli({"predict", "--task", "sequence", "--model", ws.file("x.tsv", "w\tQ\n"), "--test", data}).code == 2);
    CHECK(cli({"predict", "--task", "sequence", "--model", ws.path("m.bin"), "--test", ws.file("u.tsv", "w\tQ\n")})
              .code == 2);
}

TEST_CASE("evaluate") {
    Workspace ws;
    const auto gold = ws.file("gold.tsv", "a\tX\nb\tY\n\nc\tX\nd\tY\n\n");
    CHECK(cli({"evaluate", "--task", "sequence", "--test", gold, "--output", gold}).out == "accuracy\t1.000000\n");
    const auto pred = ws.file("pred.tsv", "a\tX\nb\tY\n\nc\tX\nd\tX\n\n");
    CHECK(cli({"evaluate", "--task", "sequence", "--test", gold, "--output", pred}).out == "accuracy\t0.750000\n");
    const auto short_pred = ws.file("short.tsv", "a\tX\nb\tY\n\n");
    CHECK(cli({"evaluate", "--task", "sequence", "--test", gold, "--output", short_pred}).code == 2);

    const auto trees = ws.file("gold.conll", kToyTrees);
    CHECK(cli({"evaluate", "--task", "deptree", "--test", trees, "--output", trees}).out == "uas\t1.000000\n");

    const auto mc = ws.file("gold.svm", "a 1:1\nb 2:1\nc 3:1\n");
    const auto mp = ws.file("pred.svm", "a 1:1\nc 2:1\nc 3:1\n");
    ws.file("gold.svm.costs", "0 1 1\n1 0 4\n1 1 0\n");
    const auto r = cli({"evaluate", "--task", "multiclass", "--test", mc, "--output", mp});
    CHECK(r.code == 0);
    CHECK(r.out == "average_cost\t1.333333\naccuracy\t0.666667\n");

    REQUIRE(cli({"train", "--task", "multiclass", "--train", mc, "--model", ws.path("mc.bin")}).code == 0);
    const auto unknown = ws.file("unknown.svm", "a 1:1\nz 2:1\nc 3:1\n");
    CHECK(cli({"evaluate", "--task", "multiclass", "--test", mc, "--output", unknown, "--model", ws.path("mc.bin")})
              .code == 2);
}

TEST_CASE("parser and classifier end to end") {
    Workspace ws;
    const auto trees = ws.file("train.conll", kToyTrees);
    REQUIRE(cli({"train", "--task", "deptree", "--train", trees, "--model", ws.path("p.bin")}).code == 0);
    const auto parsed = cli({"predict", "--task", "deptree", "--model", ws.path("p.bin"), "--test", trees,
                             "--output", ws.path("parsed.conll")});
    CHECK(parsed.code == 0);
    CHECK(cli({"evaluate", "--task", "deptree", "--test", trees, "--output", ws.path("parsed.conll")}).out ==
          "uas\t1.000000\n");

    const auto points = synth::gaussian_classes(200, 3, 10, 1);
    const auto svm = ws.file("train.svm", points.svmlight_text());
    REQUIRE(cli({"train", "--task", "multiclass", "--algo", "perceptron", "--train", svm, "--model",
                 ws.path("c.bin")})
                .code == 0);
    REQUIRE(cli({"predict", "--task", "multiclass", "--model", ws.path("c.bin"), "--test", svm, "--output",
                 ws.path("c.out")})
                .code == 0);
    const auto eval = cli({"evaluate", "--task", "multiclass", "--test", svm, "--output", ws.path("c.out")});
    CHECK(eval.code == 0);
    const double acc = std::stod(eval.out.substr(eval.out.rfind('\t') + 1));
    CHECK(acc > 0.9);
}

TEST_CASE("single-threaded training is byte-for-byte deterministic") {
    Workspace ws;
    const auto data = ws.file("train.tsv", synth::TaggingGrammar().sample(600, 3).column_text());
    for (const char* algo : {"perceptron", "dcd"}) {
        for (const char* name : {"a.bin", "b.bin"})
            REQUIRE(cli({"train", "--task", "sequence", "--algo", algo, "--train", data, "--model", ws.path(name),
                         "--seed", "7", "--epochs", "5"})
                        .code == 0);
        CHECK(slurp(ws.path("a.bin")) == slurp(ws.path("b.bin")));
    }
}

TEST_CASE("benchmark") {
    Workspace ws;
    const synth::TaggingGrammar grammar;
    const auto train = ws.file("train.tsv", grammar.sample(800, 1).column_text());
    const auto test = ws.file("test.tsv", grammar.sample(300, 2).column_text());

    const auto p = cli({"benchmark", "--task", "sequence", "--algo", "perceptron", "--epochs", "5", "--train", train,
                        "--test", test});
    REQUIRE(p.code == 0);
    std::istringstream lines(p.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "seconds,test_metric");
    double prev = -1.0;
    int rows = 0;
    while (std::getline(lines, line)) {
        const double s = std::stod(line.substr(0, line.find(',')));
        CHECK(s >= prev);
        prev = s;
        ++rows;
    }
    CHECK(rows == 5);

    auto final_metric = [](const std::string& csv) {
        const auto last = csv.substr(csv.rfind(',', csv.size() - 2) + 1);
        return std::stod(last);
    };
    const auto d = cli({"benchmark", "--task", "sequence", "--algo", "dcd", "--train", train, "--test", test});
    const auto m = cli({"benchmark", "--task", "sequence", "--algo", "demidcd", "--threads", "2", "--train", train,
                        "--test", test, "--output", ws.path("curve.csv")});
    REQUIRE(d.code == 0);
    REQUIRE(m.code == 0);
    CHECK(final_metric(slurp(ws.path("curve.csv"))) == doctest::Approx(final_metric(d.out)).epsilon(0.01));

    CHECK(cli({"benchmark", "--task", "sequence", "--train", train, "--test", ws.file("e.tsv", "")}).code == 2);
}

TEST_CASE("numerical blow-up during training is a training failure") {
    Workspace ws;
    const auto data = ws.file("huge.svm", "a 1:1e200\nb 1:-1e200\n");
    const auto r = cli({"train", "--task", "multiclass", "--train", data, "--model", ws.path("m")});
    CHECK(r.code == 3);
}
