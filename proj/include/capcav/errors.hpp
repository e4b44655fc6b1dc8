#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace capcav {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A physical computation could not produce a result (no mode, no stop band,
// fit failure, ...). The CLI maps these to exit code 2.
class PhysicsError : public Error {
public:
    using Error::Error;
};

class NoGuidedMode : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

// Two eigenvalue roots fell inside one scan step; the caller must refine
// the scan step.
class AmbiguousBracket : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

class NoStopband : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

class NoDefectPeak : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

class FitFailed : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

class NoConvergence : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

// Argument outside an operation's documented domain.
class DomainError : public PhysicsError {
public:
    using PhysicsError::PhysicsError;
};

// One config violation: file line (0 when synthetic) plus message.
struct ConfigViolation {
    int line = 0;
    std::string message;
};

// Config parsing/validation failure. Carries every violation found, not
// just the first. The CLI maps these to exit code 4.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<ConfigViolation> violations)
        : Error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<ConfigViolation>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<ConfigViolation>& v) {
        std::string out;
        for (const auto& item : v) {
            if (!out.empty()) out += "; ";
            if (item.line > 0) out += "line " + std::to_string(item.line) + ": ";
            out += item.message;
        }
        return out.empty() ? std::string("invalid config") : out;
    }

    std::vector<ConfigViolation> violations_;
};

// Filesystem / output-format failure. The CLI maps these to exit code 3.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace capcav
