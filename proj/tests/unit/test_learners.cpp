#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "structlearn/learners.hpp"
#include "structlearn/multiclass.hpp"
#include "structlearn/seqtag.hpp"
#include "synthetic.hpp"

using namespace structlearn;
using multiclass::ClassLabel;
using multiclass::Instance;

namespace {

SparseVector sv(std::vector<FeatureEntry> e) { return SparseVector::from_pairs(std::move(e)); }

struct Toy {
    multiclass::MulticlassDataset data{TaskKind::multiclass, {}};
    multiclass::FeatureGenerator gen;
    multiclass::ArgmaxSolver solver;

    Toy(multiclass::MulticlassDataset d, std::size_t K, std::size_t B, bool bias = true)
        : data(std::move(d)), gen(K, B, bias), solver(gen, multiclass::CostMatrix::zero_one(K)) {}
};

// Random multiclass problem with a handful of examples; not necessarily separable.
Toy random_toy(std::uint64_t seed, std::size_t n = 6, std::size_t K = 3, std::size_t raw = 3) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    multiclass::MulticlassDataset d{TaskKind::multiclass, {}};
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<FeatureEntry> e;
        for (std::size_t j = 0; j < raw; ++j) e.push_back({j, g(rng)});
        d.examples.push_back({Instance{sv(e)}, ClassLabel{rng() % K}});
    }
    return Toy(std::move(d), K, raw + 1);
}

LearnerConfig tight(double C = 0.1) {
    LearnerConfig cfg;
    cfg.C = C;
    cfg.tolerance = 1e-9;
    cfg.max_inner_sweeps = 2000;
    cfg.epochs = 200;
    return cfg;
}

}  // namespace

TEST_CASE("config validation and defaults") {
    LearnerConfig cfg;
    CHECK(cfg.effective_epochs(Algorithm::perceptron) == 50);
    CHECK(cfg.effective_epochs(Algorithm::dcd) == 100);
    CHECK_NOTHROW(cfg.validate(Algorithm::dcd));
    CHECK_THROWS_AS(cfg.validate(Algorithm::demidcd), ContractError);
    cfg.threads = 16;
    CHECK_NOTHROW(cfg.validate(Algorithm::demidcd));
    for (auto mutate : std::vector<std::function<void(LearnerConfig&)>>{
             [](LearnerConfig& c) { c.C = 0; }, [](LearnerConfig& c) { c.eta = -1; },
             [](LearnerConfig& c) { c.tolerance = 0; }, [](LearnerConfig& c) { c.epochs = -3; },
             [](LearnerConfig& c) { c.threads = 0; }}) {
        LearnerConfig bad;
        mutate(bad);
        CHECK_THROWS_AS(bad.validate(Algorithm::dcd), ContractError);
    }
    const auto d = LearnerConfig{}.describe(Algorithm::dcd);
    CHECK(d.at("C") == "0.1");
    CHECK(d.at("epochs") == "100");
    CHECK(d.at("tolerance") == "0.1");
    CHECK(d.at("threads") == "1");
    CHECK(parse_algorithm("demidcd") == Algorithm::demidcd);
    CHECK_THROWS_AS(parse_algorithm("svm"), ContractError);
}

TEST_CASE("dcd step at the boundary and without clipping") {
    ExampleDual<int> ex;
    ex.entries.push_back({1, sv({{0, 1.0}}), 1.0, 1.0, 0.0, 0});
    SUBCASE("satisfied constraint with slack: no change") {
        WeightVector w(std::vector<double>{5.0});
        const auto step = dcd_step(ex, 0, w, 0.1);
        CHECK(step.improvement == 0.0);
        CHECK(step.violation == 0.0);
        CHECK(ex.entries[0].alpha == 0.0);
        CHECK(w[0] == 5.0);
    }
    SUBCASE("single unclipped step from zero") {
        const double C = 0.1, l = 2.0;
        ex.entries[0].loss = l;
        ex.entries[0].diff = sv({{0, 1.0}, {1, 2.0}});
        ex.entries[0].diff_squared_norm = 5.0;
        WeightVector w;
        dcd_step(ex, 0, w, C);
        DualState<int> state{ex};
        const double expected = 0.5 * l * l / (5.0 + 1.0 / (2.0 * C));
        CHECK(dual_objective(state, w, C) == doctest::Approx(expected).epsilon(1e-14));
        CHECK(ex.entries[0].alpha == doctest::Approx(l / 10.0));
    }
    SUBCASE("clipping keeps alpha at exactly zero") {
        ex.entries[0].alpha = 0.3;
        ex.alpha_sum = 0.3;
        WeightVector w(std::vector<double>{100.0});
        dcd_step(ex, 0, w, 0.1);
        CHECK(ex.entries[0].alpha == 0.0);
        CHECK_FALSE(std::signbit(ex.entries[0].alpha));
    }
}

TEST_CASE("empty dual objective is zero") {
    DualState<int> state(3);
    CHECK(dual_objective(state, WeightVector{}, 0.1) == 0.0);
}

TEST_CASE("random coordinate steps never decrease the dual") {
    std::mt19937_64 rng(123);
    std::normal_distribution<double> g;
    std::size_t steps = 0;
    for (int problem = 0; problem < 20; ++problem) {
        const double C = std::exp(g(rng));
        DualState<int> state(1 + rng() % 4);
        for (auto& ex : state) {
            const std::size_t k = 1 + rng() % 4;
            for (std::size_t j = 0; j < k; ++j) {
                std::vector<FeatureEntry> e;
                for (std::size_t f = 0; f < 5; ++f)
                    if (rng() % 2) e.push_back({f, g(rng)});
                auto d = sv(e);
                const double sq = d.squared_norm();
                ex.entries.push_back({static_cast<int>(j), std::move(d), sq, std::abs(g(rng)) + 0.1, 0.0, 0});
            }
        }
        WeightVector w;
        double prev = dual_objective(state, w, C);
        for (int s = 0; s < 100; ++s, ++steps) {
            auto& ex = state[rng() % state.size()];
            const double gain = dcd_step(ex, rng() % ex.entries.size(), w, C).improvement;
            CHECK(gain >= 0.0);
            const double now = dual_objective(state, w, C);
            CHECK(now >= prev - 1e-12 * (1.0 + std::abs(prev)));
            CHECK(now - prev == doctest::Approx(gain).epsilon(1e-6).scale(1.0));
            prev = now;
            double sum = 0.0;
            for (const auto& e : ex.entries) {
                CHECK(e.alpha >= 0.0);
                sum += e.alpha;
            }
            CHECK(std::abs(sum - ex.alpha_sum) <= 1e-9);
        }
        const auto r = reconstruct_weights(state);
        for (std::size_t i = 0; i < std::max(r.dimension(), w.dimension()); ++i)
            CHECK(std::abs(r[i] - w[i]) <= 1e-9 * (1.0 + std::abs(w[i])));
    }
    CHECK(steps >= 1000);
}

TEST_CASE("pruning evicts entries that stay at zero") {
    DualState<int> state(1);
    state[0].entries.push_back({1, sv({{0, 1.0}}), 1.0, 1.0, 0.0, 0});
    state[0].entries.push_back({2, sv({{0, 1.0}}), 1.0, 1.0, 0.5, 0});
    for (int s = 0; s < 4; ++s) prune_working_sets(state, 5);
    CHECK(state[0].entries.size() == 2);
    prune_working_sets(state, 5);
    REQUIRE(state[0].entries.size() == 1);
    CHECK(state[0].entries[0].structure == 2);
}

TEST_CASE("primal objective") {
    auto toy = random_toy(1);
    // With w = 0 every example's slack is the largest loss, here 1.
    CHECK(primal_objective(WeightVector{}, toy.data, toy.gen, toy.solver, 0.1) ==
          doctest::Approx(0.1 * static_cast<double>(toy.data.size())));
    Toy single(toy.data, 1, 4);
    for (auto& ex : single.data.examples) ex.gold = {0};
    CHECK(primal_objective(WeightVector{}, single.data, single.gen, single.solver, 0.1) == 0.0);
}

TEST_CASE("dcd with a single feasible structure learns nothing") {
    multiclass::MulticlassDataset d{TaskKind::multiclass, {{Instance{sv({{0, 1.0}})}, ClassLabel{0}}}};
    Toy toy(d, 1, 2);
    const auto r = train_dcd(toy.data, toy.gen, toy.solver, LearnerConfig{});
    CHECK(r.weights.squared_norm() == 0.0);
    CHECK(r.report.converged);
    CHECK(r.report.epochs.size() == 1);
}

TEST_CASE("dcd matches the two-example QP oracle") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double x1 = u(rng), x2 = u(rng);
        const double C = std::exp(u(rng));
        multiclass::MulticlassDataset d{TaskKind::multiclass,
                                        {{Instance{sv({{0, x1}})}, ClassLabel{0}}, {Instance{sv({{0, x2}})}, ClassLabel{1}}}};
        Toy toy(d, 2, 1, /*bias=*/false);
        const auto r = train_dcd(toy.data, toy.gen, toy.solver, tight(C));
        const double primal = primal_objective(r.weights, toy.data, toy.gen, toy.solver, C);
        // d_i = phi(gold) - phi(other) in the two class blocks.
        oracle::TwoExampleSvm qp{{x1, -x1}, {-x2, x2}, 1.0, 1.0, C};
        CHECK(std::abs(primal - qp.solve()) <= 1e-4);
    }
}

TEST_CASE("dcd invariants along a training run") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto toy = random_toy(seed, 8, 3, 4);
        LearnerConfig cfg;
        cfg.seed = seed;
        cfg.tolerance = 1e-4;
        double last_dual = 0.0;
        bool ok = true;
        TrainHooks<ClassLabel> hooks;
        hooks.on_step = [&](const DualState<ClassLabel>& state, const WeightVector& w) {
            const double d = dual_objective(state, w, cfg.C);
            ok = ok && d >= last_dual - 1e-12 * (1.0 + std::abs(d));
            last_dual = d;
            const auto r = reconstruct_weights(state);
            double inf = 0.0;
            for (std::size_t i = 0; i < w.dimension(); ++i) inf = std::max(inf, std::abs(w[i]));
            for (std::size_t i = 0; i < std::max(w.dimension(), r.dimension()); ++i)
                ok = ok && std::abs(w[i] - r[i]) <= 1e-6 * (1.0 + inf);
            for (const auto& ex : state)
                for (const auto& e : ex.entries) ok = ok && e.alpha >= 0.0;
        };
        const auto r = train_dcd(toy.data, toy.gen, toy.solver, cfg, hooks);
        CHECK(ok);
        for (const auto& e : r.report.epochs) {
            REQUIRE(e.dual.has_value());
            CHECK(*e.dual <= e.primal + 1e-12);
        }
        for (std::size_t k = 1; k < r.report.epochs.size(); ++k)
            CHECK(r.report.epochs[k].seconds >= r.report.epochs[k - 1].seconds);
    }
}

TEST_CASE("perceptron on a separable toy set") {
    multiclass::MulticlassDataset d{TaskKind::multiclass,
                                    {{Instance{sv({{0, 1.0}})}, ClassLabel{0}},
                                     {Instance{sv({{0, 2.0}})}, ClassLabel{0}},
                                     {Instance{sv({{1, 1.0}})}, ClassLabel{1}},
                                     {Instance{sv({{1, 3.0}})}, ClassLabel{1}}}};
    Toy toy(d, 2, 3);
    LearnerConfig cfg;
    cfg.epochs = 10;
    const auto r = train_perceptron(toy.data, toy.gen, toy.solver, cfg);
    CHECK(r.report.epochs.size() == 10);
    CHECK(r.report.epochs.back().train_accuracy == 1.0);
    CHECK_FALSE(r.report.epochs.back().dual.has_value());
}

TEST_CASE("perceptron makes no update when gold is the tie-break choice") {
    multiclass::MulticlassDataset d{TaskKind::multiclass,
                                    {{Instance{sv({{0, 1.0}})}, ClassLabel{0}}, {Instance{sv({{1, 1.0}})}, ClassLabel{0}}}};
    Toy toy(d, 3, 3);
    const auto r = train_perceptron(toy.data, toy.gen, toy.solver, LearnerConfig{});
    CHECK(r.weights.squared_norm() == 0.0);
    CHECK(r.report.converged);
}

TEST_CASE("a single perceptron mistake adds the feature difference") {
    multiclass::MulticlassDataset d{TaskKind::multiclass, {{Instance{sv({{0, 2.0}})}, ClassLabel{1}}}};
    Toy toy(d, 2, 2);
    LearnerConfig cfg;
    cfg.epochs = 1;
    const auto r = train_perceptron(toy.data, toy.gen, toy.solver, cfg);
    const auto expected = difference(toy.gen.features(d[0].instance, {1}), toy.gen.features(d[0].instance, {0}));
    WeightVector w;
    w.axpy(1.0, expected);
    CHECK(r.weights == w);
}

TEST_CASE("averaged weights equal the naive mean of all iterates") {
    auto corpus = synth::separable_tagging(10, 9);
    // Add noise so mistakes keep happening across epochs.
    corpus.tags[0][0] = "S9";
    auto lex = std::make_shared<Lexicon>();
    auto tags = std::make_shared<Lexicon>();
    std::istringstream in(corpus.column_text());
    const auto data = seqtag::read_column_data(in, *tags, seqtag::ReadMode::train);
    tags->freeze();
    seqtag::FeatureGenerator gen(lex, tags);
    seqtag::ViterbiSolver solver(gen);

    for (double eta : {1.0, 2.0}) {
        std::vector<WeightVector> iterates;
        TrainHooks<seqtag::TagSequence> hooks;
        hooks.on_visit = [&](const WeightVector& w) { iterates.push_back(w); };
        LearnerConfig cfg;
        cfg.epochs = 7;
        cfg.eta = eta;
        cfg.seed = 4;
        const auto r = train_perceptron(data, gen, solver, cfg, hooks);
        REQUIRE(iterates.size() == 70);
        std::vector<double> sum(lex->size(), 0.0);
        for (const auto& w : iterates)
            for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += w[i];
        bool exact = true;
        for (std::size_t i = 0; i < sum.size(); ++i) exact = exact && r.weights[i] == sum[i] / 70.0;
        CHECK(exact);
    }
}

TEST_CASE("perceptron mistakes respect the (R/gamma)^2 bound") {
    // Separable by u, which puts weight 1 on raw feature k for class k.
    const std::size_t K = 4;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    multiclass::MulticlassDataset d{TaskKind::multiclass, {}};
    for (int i = 0; i < 60; ++i) {
        const std::size_t y = rng() % K;
        std::vector<FeatureEntry> e{{y, 1.0 + u01(rng)}};
        for (std::size_t j = 0; j < K; ++j)
            if (j != y && rng() % 2) e.push_back({j, 0.5 * u01(rng)});
        d.examples.push_back({Instance{sv(e)}, ClassLabel{y}});
    }
    Toy toy(d, K, K + 1, /*bias=*/true);
    std::vector<double> ud(K * (K + 1), 0.0);
    for (std::size_t k = 0; k < K; ++k) ud[k * (K + 1) + k] = 1.0 / std::sqrt(static_cast<double>(K));
    const WeightVector uw(ud);
    double gamma = 1e300, R = 0.0;
    for (const auto& ex : d.examples)
        for (std::size_t k = 0; k < K; ++k) {
            if (k == ex.gold.index) continue;
            const auto diff = difference(toy.gen.features(ex.instance, ex.gold), toy.gen.features(ex.instance, {k}));
            gamma = std::min(gamma, dot(uw, diff));
            R = std::max(R, std::sqrt(diff.squared_norm()));
        }
    REQUIRE(gamma > 0.0);
    LearnerConfig cfg;
    cfg.epochs = 30;
    const auto r = train_perceptron(toy.data, toy.gen, toy.solver, cfg);
    std::size_t mistakes = 0;
    for (const auto& e : r.report.epochs) mistakes += e.mistakes;
    CHECK(static_cast<double>(mistakes) <= (R / gamma) * (R / gamma));
    CHECK(r.report.converged);
}

TEST_CASE("demi-dcd agrees with dcd on a tiny problem") {
    auto toy = random_toy(3, 10, 3, 3);
    LearnerConfig cfg;
    cfg.tolerance = 1e-3;
    const auto seq = train_dcd(toy.data, toy.gen, toy.solver, cfg);
    const double ref = seq.report.epochs.back().primal;
    for (int threads : {2, 3, 16}) {
        cfg.threads = threads;
        const auto par = train_demi_dcd(toy.data, toy.gen, toy.solver, cfg);
        CHECK(par.report.epochs.back().primal == doctest::Approx(ref).epsilon(1e-2));
        CHECK(par.report.config.at("threads") == std::to_string(threads));
        for (const auto& e : par.report.epochs) CHECK(*e.dual <= e.primal + 1e-12);
    }
}

TEST_CASE("demi-dcd deterministic schedule is reproducible") {
    auto toy = random_toy(5, 12, 4, 3);
    LearnerConfig cfg;
    cfg.threads = 2;
    cfg.seed = 9;
    cfg.deterministic_schedule = true;
    const auto a = train_demi_dcd(toy.data, toy.gen, toy.solver, cfg);
    const auto b = train_demi_dcd(toy.data, toy.gen, toy.solver, cfg);
    CHECK(a.weights == b.weights);
    CHECK(a.report.epochs.size() == b.report.epochs.size());
}

TEST_CASE("demi-dcd propagates worker failures") {
    struct Throwing {
        multiclass::ArgmaxSolver inner;
        ClassLabel best(const WeightVector& w, const Instance& x) const { return inner.best(w, x); }
        Augmented<ClassLabel> loss_augmented_best(const WeightVector&, const Instance&, ClassLabel) const {
            throw std::runtime_error("inference exploded");
        }
        double loss(ClassLabel y, ClassLabel g) const { return inner.loss(y, g); }
    };
    auto toy = random_toy(2);
    LearnerConfig cfg;
    cfg.threads = 3;
    CHECK_THROWS_WITH(train_demi_dcd(toy.data, toy.gen, Throwing{toy.solver}, cfg), "inference exploded");
}

TEST_CASE("training rejects empty data") {
    Toy toy(multiclass::MulticlassDataset{TaskKind::multiclass, {}}, 2, 2);
    CHECK_THROWS_AS(train_perceptron(toy.data, toy.gen, toy.solver, LearnerConfig{}), ContractError);
    CHECK_THROWS_AS(train_dcd(toy.data, toy.gen, toy.solver, LearnerConfig{}), ContractError);
}

TEST_CASE("report csv") {
    auto toy = random_toy(1);
    LearnerConfig cfg;
    cfg.epochs = 3;
    std::ostringstream p, d;
    train_perceptron(toy.data, toy.gen, toy.solver, cfg).report.write_csv(p);
    train_dcd(toy.data, toy.gen, toy.solver, cfg).report.write_csv(d);
    CHECK(p.str().find("# algorithm=perceptron\n") != std::string::npos);
    CHECK(p.str().find("epoch,primal,dual,train_accuracy,seconds\n") != std::string::npos);
    CHECK(p.str().find("\n1,") != std::string::npos);
    CHECK(p.str().find(",,") != std::string::npos);
    CHECK(d.str().find("# C=0.1\n") != std::string::npos);
}
