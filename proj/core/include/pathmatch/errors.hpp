#ifndef PATHMATCH_ERRORS_HPP
#define PATHMATCH_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pathmatch {

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg)
        : std::runtime_error("parse error: " + msg), line_(0) {}
    ParseError(const std::string& msg, std::size_t line)
        : std::runtime_error("parse error at line " + std::to_string(line) + ": " + msg),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error("config error: " + msg) {}
};

class SamplingError : public std::runtime_error {
public:
    explicit SamplingError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a balance constraint cannot be met; carries the spread that was
// actually achievable so callers can report it.
class ConstraintError : public std::runtime_error {
public:
    ConstraintError(const std::string& msg, double achievable)
        : std::runtime_error(msg), achievable_spread_(achievable) {}
    double achievable_spread() const { return achievable_spread_; }

private:
    double achievable_spread_;
};

} // namespace pathmatch

#endif
