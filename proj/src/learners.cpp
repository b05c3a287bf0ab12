#include <charconv>
#include <cstdio>

#include "structlearn/error.hpp"
#include "structlearn/learners/config.hpp"
#include "structlearn/learners/report.hpp"

namespace structlearn {

std::string_view to_string(Algorithm algo) noexcept {
    switch (algo) {
    case Algorithm::perceptron: return "perceptron";
    case Algorithm::dcd: return "dcd";
    case Algorithm::demidcd: return "demidcd";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
    if (name == "perceptron") return Algorithm::perceptron;
    if (name == "dcd") return Algorithm::dcd;
    if (name == "demidcd") return Algorithm::demidcd;
    throw ContractError("unknown algorithm '" + std::string(name) + "'");
}

void LearnerConfig::validate(Algorithm algo) const {
    if (!(C > 0.0)) throw ContractError("C must be positive");
    if (epochs < 0) throw ContractError("epochs must be positive");
    if (!(eta > 0.0)) throw ContractError("eta must be positive");
    if (!(tolerance > 0.0)) throw ContractError("tolerance must be positive");
    if (threads < 1) throw ContractError("threads must be positive");
    if (algo == Algorithm::demidcd && threads < 2)
        throw ContractError("demidcd needs at least 2 threads (one learner, one or more inference workers)");
    if (max_inner_sweeps < 1) throw ContractError("max_inner_sweeps must be positive");
    if (prune_after < 1) throw ContractError("prune_after must be positive");
}

namespace {

// Shortest representation that parses back to the same double.
std::string format_real(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::map<std::string, std::string> LearnerConfig::describe(Algorithm algo) const {
    return {
        {"algorithm", std::string(to_string(algo))},
        {"C", format_real(C)},
        {"epochs", std::to_string(effective_epochs(algo))},
        {"eta", format_real(eta)},
        {"tolerance", format_real(tolerance)},
        {"threads", std::to_string(threads)},
        {"seed", std::to_string(seed)},
        {"max_inner_sweeps", std::to_string(max_inner_sweeps)},
        {"prune_after", std::to_string(prune_after)},
    };
}

void TrainReport::write_csv(std::ostream& out) const {
    for (const auto& [k, v] : config) out << "# " << k << '=' << v << '\n';
    out << "epoch,primal,dual,train_accuracy,seconds\n";
    for (const auto& e : epochs) {
        out << e.epoch << ',' << format_real(e.primal) << ',';
        if (e.dual) out << format_real(*e.dual);
        out << ',' << format_real(e.train_accuracy) << ',' << format_real(e.seconds) << '\n';
    }
}

}  // namespace structlearn
