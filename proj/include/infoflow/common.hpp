#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace infoflow {

/// Index of an account in the AccountTable. Stable across every graph
/// derived from the same ingest.
using NodeId = std::uint32_t;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the path and the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::string path, std::size_t line, const std::string& what)
        : Error(path + ":" + std::to_string(line) + ": " + what),
          path_(std::move(path)), line_(line) {}

    const std::string& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

/// A null-model solver did not reach its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace infoflow
