#pragma once

#include <stdexcept>
#include <string>

namespace fixedform {

// Parameter or argument outside its mathematical domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Two curves tabulated on different grids were combined.
class GridError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An item id does not belong to the bank.
class MembershipError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file; the message names the offending line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Exhaustive enumeration refused because the subset count is too large.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Single-item swap requested on a test that already holds the whole bank.
class NoMoveError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace fixedform
