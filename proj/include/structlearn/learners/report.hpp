#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace structlearn {

struct EpochRecord {
    int epoch = 0;
    double primal = 0.0;
    std::optional<double> dual;
    double train_accuracy = 0.0;
    // Cumulative training time; excludes report evaluation and hook callbacks.
    double seconds = 0.0;
    std::size_t mistakes = 0;
    std::size_t working_set_size = 0;
};

struct TrainReport {
    std::map<std::string, std::string> config;
    std::vector<EpochRecord> epochs;
    bool converged = false;

    // "epoch,primal,dual,train_accuracy,seconds" with one row per epoch. The
    // effective configuration is echoed first as "# key=value" lines.
    void write_csv(std::ostream& out) const;
};

// Wall-clock timer that can be paused around bookkeeping.
class Stopwatch {
public:
    using clock = std::chrono::steady_clock;

    Stopwatch() : start_(clock::now()) {}

    void pause() {
        if (!paused_) {
            accumulated_ += clock::now() - start_;
            paused_ = true;
        }
    }
    void resume() {
        if (paused_) {
            start_ = clock::now();
            paused_ = false;
        }
    }
    double seconds() const {
        auto total = accumulated_;
        if (!paused_) total += clock::now() - start_;
        return std::chrono::duration<double>(total).count();
    }

private:
    clock::time_point start_;
    clock::duration accumulated_{0};
    bool paused_ = false;
};

}  // namespace structlearn
