#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hjb {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration passed to a library routine.
class InputError : public Error {
public:
    using Error::Error;
};

/// Mesh file could not be parsed, or the triangulation is invalid.
class MeshError : public Error {
public:
    using Error::Error;
};

class ParseError : public MeshError {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : MeshError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Artificial diffusion cannot make an off-diagonal entry non-positive,
/// because the stiffness entry for that edge is not negative.
class UnfixableRowError : public Error {
public:
    UnfixableRowError(std::size_t row, int column, double b_entry, double k_entry);

    std::size_t row() const noexcept { return row_; }
    int column() const noexcept { return column_; }

private:
    std::size_t row_;
    int column_;
};

class CflError : public Error {
public:
    CflError(int step, double h, double h_max);

    int step() const noexcept { return step_; }
    double step_size() const noexcept { return h_; }
    double max_step() const noexcept { return h_max_; }

private:
    int step_;
    double h_;
    double h_max_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace hjb
