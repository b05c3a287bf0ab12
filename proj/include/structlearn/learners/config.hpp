#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace structlearn {

enum class Algorithm { perceptron, dcd, demidcd };

std::string_view to_string(Algorithm algo) noexcept;
Algorithm parse_algorithm(std::string_view name);

struct LearnerConfig {
    double C = 0.1;
    // 0 selects the algorithm default (50 perceptron epochs, 100 outer DCD
    // iterations).
    int epochs = 0;
    double eta = 1.0;
    double tolerance = 0.1;
    int threads = 1;
    std::uint64_t seed = 0;

    // Cap on the dual sweeps run after each round of working-set growth.
    int max_inner_sweeps = 20;
    // Working-set entries whose dual value stays at zero for this many
    // consecutive sweeps are evicted.
    int prune_after = 5;
    // DEMI-DCD only: workers infer against the snapshot taken at the start of
    // a pass and the learner merges their output in example order.
    bool deterministic_schedule = false;
    // Compute primal objective and training accuracy after every epoch.
    bool evaluate_epochs = true;

    int effective_epochs(Algorithm algo) const noexcept {
        if (epochs > 0) return epochs;
        return algo == Algorithm::perceptron ? 50 : 100;
    }

    // Throws ContractError when a positivity constraint fails or the thread
    // count is too small for the algorithm.
    void validate(Algorithm algo) const;

    // Effective values as strings, for reports and model metadata.
    std::map<std::string, std::string> describe(Algorithm algo) const;
};

}  // namespace structlearn
