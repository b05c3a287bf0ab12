#pragma once

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <thread>

#include "structlearn/learners/dcd.hpp"

namespace structlearn {

namespace detail {

// Shared state between the learner thread and the inference workers of one
// training run.
template <class Y>
class DemiChannel {
public:
    struct Item {
        std::size_t position;  // index into the pass order
        std::size_t example;
        Y structure;
        double loss;
        SparseVector features;
    };

    std::shared_ptr<const WeightVector> snapshot() const {
        std::lock_guard lock(snapshot_mutex_);
        return snapshot_;
    }

    void publish(const WeightVector& w) {
        auto copy = std::make_shared<const WeightVector>(w);
        std::lock_guard lock(snapshot_mutex_);
        snapshot_ = std::move(copy);
    }

    void push(Item item) {
        {
            std::lock_guard lock(mutex_);
            queue_.push_back(std::move(item));
        }
        learner_cv_.notify_one();
    }

    // Pops everything queued so far.
    std::deque<Item> drain() {
        std::lock_guard lock(mutex_);
        return std::exchange(queue_, {});
    }

    // Learner side: start a new pass over `order`.
    void begin_pass(std::vector<std::size_t> order) {
        {
            std::lock_guard lock(mutex_);
            order_ = std::move(order);
            finished_workers_ = 0;
            ++generation_;
        }
        worker_cv_.notify_all();
    }

    void shutdown() {
        {
            std::lock_guard lock(mutex_);
            stop_ = true;
        }
        worker_cv_.notify_all();
    }

    // Worker side: blocks until a pass newer than `seen` starts. Returns the
    // pass order, or nullopt on shutdown.
    std::optional<std::vector<std::size_t>> await_pass(std::uint64_t& seen) {
        std::unique_lock lock(mutex_);
        worker_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
        if (stop_) return std::nullopt;
        seen = generation_;
        return order_;
    }

    void worker_finished() {
        {
            std::lock_guard lock(mutex_);
            ++finished_workers_;
        }
        learner_cv_.notify_one();
    }

    void fail(std::exception_ptr error) {
        {
            std::lock_guard lock(mutex_);
            if (!error_) error_ = error;
            ++finished_workers_;
        }
        learner_cv_.notify_one();
    }

    // Learner side: waits until items are queued or every worker finished the
    // pass. Returns true once the pass is complete.
    bool wait_for_work(std::size_t workers, bool block) {
        std::unique_lock lock(mutex_);
        if (block)
            learner_cv_.wait(lock, [&] { return !queue_.empty() || finished_workers_ >= workers; });
        if (error_) std::rethrow_exception(error_);
        return finished_workers_ >= workers && queue_.empty();
    }

    // Learner side: waits until every worker finished the current pass.
    void wait_pass_complete(std::size_t workers) {
        std::unique_lock lock(mutex_);
        learner_cv_.wait(lock, [&] { return finished_workers_ >= workers; });
        if (error_) std::rethrow_exception(error_);
    }

private:
    mutable std::mutex snapshot_mutex_;
    std::shared_ptr<const WeightVector> snapshot_ = std::make_shared<const WeightVector>();

    mutable std::mutex mutex_;
    std::condition_variable learner_cv_;
    std::condition_variable worker_cv_;
    std::deque<Item> queue_;
    std::vector<std::size_t> order_;
    std::uint64_t generation_ = 0;
    std::size_t finished_workers_ = 0;
    bool stop_ = false;
    std::exception_ptr error_;
};

}  // namespace detail

// Parallel dual coordinate descent. threads-1 inference workers run
// loss-augmented inference against a possibly stale snapshot of w and queue
// the structures they find; the calling thread is the only writer of w and
// the working sets. Workers own the pass positions p with p % workers == k.
//
// Each outer iteration is one full pass of the workers over a shuffled
// example order. At the end of a pass all workers are idle; the learner then
// finishes its sweeps, records the epoch and evaluates the stopping rule on
// that quiesced state, exactly as train_dcd does.
template <class X, class Y, FeatureGenerator<X, Y> G, InferenceSolver<X, Y> S>
TrainResult<Y> train_demi_dcd(const Dataset<X, Y>& data, const G& fg, const S& solver, const LearnerConfig& cfg,
                              const TrainHooks<Y>& hooks = {}) {
    cfg.validate(Algorithm::demidcd);
    detail::require_training_data(data);

    TrainResult<Y> result;
    result.report.config = cfg.describe(Algorithm::demidcd);
    result.report.config["schedule"] = cfg.deterministic_schedule ? "deterministic" : "asynchronous";

    Stopwatch clock;
    detail::DualLearner<X, Y, G> learner(data, fg, cfg, hooks);
    detail::DemiChannel<Y> channel;
    const auto workers = static_cast<std::size_t>(cfg.threads - 1);

    auto worker_loop = [&](std::size_t k) {
        std::uint64_t seen = 0;
        while (auto order = channel.await_pass(seen)) {
            try {
                auto w = channel.snapshot();
                for (std::size_t p = k; p < order->size(); p += workers) {
                    if (!cfg.deterministic_schedule) w = channel.snapshot();
                    const std::size_t i = (*order)[p];
                    const auto& ex = data[i];
                    auto aug = solver.loss_augmented_best(*w, ex.instance, ex.gold);
                    if (aug.structure == ex.gold) continue;
                    auto feats = fg.features(ex.instance, aug.structure);
                    channel.push({p, i, std::move(aug.structure), aug.loss, std::move(feats)});
                }
                channel.worker_finished();
            } catch (...) {
                channel.fail(std::current_exception());
            }
        }
    };

    std::vector<std::jthread> pool;
    struct Joiner {
        detail::DemiChannel<Y>& channel;
        std::vector<std::jthread>& pool;
        ~Joiner() {
            channel.shutdown();
            pool.clear();
        }
    } joiner{channel, pool};
    for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(worker_loop, k);

    std::mt19937_64 rng(cfg.seed);
    auto order = detail::identity_order(data.size());

    const int epochs = cfg.effective_epochs(Algorithm::demidcd);
    for (int epoch = 1; epoch <= epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        channel.publish(learner.weights());
        channel.begin_pass(order);

        std::size_t admitted = 0;
        auto consume = [&](std::deque<typename detail::DemiChannel<Y>::Item> items) {
            if (cfg.deterministic_schedule)
                std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.position < b.position; });
            for (auto& item : items) {
                if (learner.admit(item.example, std::move(item.structure), item.loss, item.features)) ++admitted;
            }
            return !items.empty();
        };

        if (cfg.deterministic_schedule) {
            channel.wait_pass_complete(workers);
            consume(channel.drain());
        } else {
            bool idle_sweep_useful = true;
            for (;;) {
                const bool pass_done = channel.wait_for_work(workers, !idle_sweep_useful);
                const bool got = consume(channel.drain());
                if (pass_done && !got) break;
                if (got) {
                    idle_sweep_useful = true;
                } else {
                    // Nothing queued: keep optimizing the cached constraints.
                    idle_sweep_useful = learner.sweep_all(order) > cfg.tolerance;
                }
                channel.publish(learner.weights());
            }
        }
        // A late item may land between the last drain and the completion check.
        consume(channel.drain());

        const bool settled = learner.optimize_working_sets(order);

        EpochRecord rec;
        rec.epoch = epoch;
        rec.mistakes = admitted;
        rec.working_set_size = working_set_size(learner.state());
        rec.dual = learner.dual_objective();
        detail::finish_epoch(rec, learner.weights(), data, fg, solver, cfg, clock, result.report, hooks);

        if (admitted == 0 && settled) {
            result.report.converged = true;
            break;
        }
    }
    result.weights = learner.weights();
    result.dual = std::move(learner.state());
    return result;
}

}  // namespace structlearn
