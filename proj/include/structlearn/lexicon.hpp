#pragma once

#include <atomic>
#include <cstddef>
#include <deque>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace structlearn {

// Bijection between strings and the contiguous indices 0..size-1.
//
// An unfrozen lexicon may be grown by intern() while other threads call
// find(); both take an internal lock. Once frozen, the lexicon never grows
// and reads are lock-free.
class Lexicon {
public:
    Lexicon() = default;
    explicit Lexicon(const std::vector<std::string>& names);
    Lexicon(const Lexicon& other);
    Lexicon& operator=(const Lexicon& other);

    std::optional<std::size_t> find(std::string_view name) const;

    // Index of name, adding it if absent. Throws ContractError when frozen
    // and name is unknown.
    std::size_t intern(std::string_view name);

    const std::string& name(std::size_t index) const;
    std::size_t size() const;

    void freeze() noexcept;
    bool frozen() const noexcept { return frozen_; }

    std::vector<std::string> names() const;

    friend bool operator==(const Lexicon& a, const Lexicon& b);

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept {
            return std::hash<std::string_view>{}(s);
        }
    };

    std::optional<std::size_t> find_unlocked(std::string_view name) const;

    std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> index_;
    std::deque<std::string> names_;
    std::atomic<bool> frozen_ = false;
    mutable std::shared_mutex mutex_;
};

}  // namespace structlearn
