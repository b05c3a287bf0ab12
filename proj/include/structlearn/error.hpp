#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace structlearn {

// Violated precondition or invariant of an interface (caller bug).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Non-finite value produced by scoring or an update.
class ArithmeticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input data. Carries a 1-based line number when known, or a byte
// offset for binary inputs.
class ParseError : public std::runtime_error {
public:
    enum class Location { none, line, byte };

    explicit ParseError(const std::string& msg)
        : std::runtime_error(msg) {}
    ParseError(const std::string& msg, Location kind, std::size_t where)
        : std::runtime_error(format(msg, kind, where)), kind_(kind), where_(where) {}

    static ParseError at_line(const std::string& msg, std::size_t line) {
        return {msg, Location::line, line};
    }
    static ParseError at_byte(const std::string& msg, std::size_t offset) {
        return {msg, Location::byte, offset};
    }

    Location location() const noexcept { return kind_; }
    std::size_t where() const noexcept { return where_; }

private:
    static std::string format(const std::string& msg, Location kind, std::size_t where) {
        switch (kind) {
        case Location::line: return "line " + std::to_string(where) + ": " + msg;
        case Location::byte: return "byte offset " + std::to_string(where) + ": " + msg;
        default: return msg;
        }
    }

    Location kind_ = Location::none;
    std::size_t where_ = 0;
};

// Model file written by an incompatible format revision.
class VersionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Data that parsed but is unusable (empty dataset, invalid cost matrix, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace structlearn
