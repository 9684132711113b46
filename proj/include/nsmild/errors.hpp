#pragma once

#include <stdexcept>
#include <string>

namespace nsmild {

/// A numerical procedure failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Picard iteration did not contract within the iteration budget.
class PicardError : public ConvergenceError {
public:
    PicardError(const std::string& what, double residual, double time)
        : ConvergenceError(what), residual_(residual), time_(time) {}
    double residual() const noexcept { return residual_; }
    double time() const noexcept { return time_; }

private:
    double residual_;
    double time_;
};

/// Auto-shrinking the restart window never brought kappa under target.
class SmoothingUnderflow : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
};

/// Invalid user configuration; `path` names the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace nsmild
