#include "structlearn/lexicon.hpp"

#include <mutex>

#include "structlearn/error.hpp"

namespace structlearn {

Lexicon::Lexicon(const std::vector<std::string>& names) {
    for (const auto& n : names) {
        if (index_.contains(n)) throw ContractError("duplicate lexicon entry: " + n);
        index_.emplace(n, names_.size());
        names_.push_back(n);
    }
}

Lexicon::Lexicon(const Lexicon& other) {
    std::shared_lock lock(other.mutex_);
    index_ = other.index_;
    names_ = other.names_;
    frozen_ = other.frozen_.load();
}

Lexicon& Lexicon::operator=(const Lexicon& other) {
    if (this == &other) return *this;
    Lexicon copy(other);
    std::unique_lock lock(mutex_);
    index_ = std::move(copy.index_);
    names_ = std::move(copy.names_);
    frozen_ = copy.frozen_.load();
    return *this;
}

std::optional<std::size_t> Lexicon::find_unlocked(std::string_view name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> Lexicon::find(std::string_view name) const {
    if (frozen_) return find_unlocked(name);
    std::shared_lock lock(mutex_);
    return find_unlocked(name);
}

std::size_t Lexicon::intern(std::string_view name) {
    if (frozen_) {
        if (auto hit = find_unlocked(name)) return *hit;
        throw ContractError("cannot add '" + std::string(name) + "' to a frozen lexicon");
    }
    {
        std::shared_lock lock(mutex_);
        if (auto hit = find_unlocked(name)) return *hit;
    }
    std::unique_lock lock(mutex_);
    if (auto hit = find_unlocked(name)) return *hit;
    const std::size_t id = names_.size();
    names_.emplace_back(name);
    index_.emplace(names_.back(), id);
    return id;
}

const std::string& Lexicon::name(std::size_t index) const {
    std::shared_lock lock(mutex_, std::defer_lock);
    if (!frozen_) lock.lock();
    if (index >= names_.size()) throw ContractError("lexicon index out of range");
    return names_[index];
}

std::size_t Lexicon::size() const {
    if (frozen_) return names_.size();
    std::shared_lock lock(mutex_);
    return names_.size();
}

void Lexicon::freeze() noexcept {
    std::unique_lock lock(mutex_);
    frozen_ = true;
}

std::vector<std::string> Lexicon::names() const {
    std::shared_lock lock(mutex_);
    return {names_.begin(), names_.end()};
}

bool operator==(const Lexicon& a, const Lexicon& b) {
    return a.names() == b.names() && a.frozen() == b.frozen();
}

}  // namespace structlearn
