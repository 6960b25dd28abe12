#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aoheom {

// Bad input values or inconsistent shapes. Maps to exit status 2 in the CLI.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Anything that went wrong inside a numerical routine. Maps to exit status 3.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class QuadratureFailure : public NumericalFailure {
public:
    QuadratureFailure(const std::string& what, double error_estimate)
        : NumericalFailure(what), error_estimate_(error_estimate) {}
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double error_estimate_;
};

// gamma coincides with one of the Pade frequencies nu_k = xi_k / beta.
class DegeneratePoleError : public NumericalFailure {
public:
    using NumericalFailure::NumericalFailure;
};

class DivergenceError : public NumericalFailure {
public:
    DivergenceError(const std::string& what, std::size_t step, std::size_t ado)
        : NumericalFailure(what), step_(step), ado_(ado) {}
    std::size_t step() const noexcept { return step_; }
    std::size_t ado() const noexcept { return ado_; }

private:
    std::size_t step_;
    std::size_t ado_;
};

class ConvergenceError : public NumericalFailure {
public:
    ConvergenceError(const std::string& what, double residual)
        : NumericalFailure(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class CapacityError : public InvalidArgument {
public:
    CapacityError(const std::string& what, std::size_t count)
        : InvalidArgument(what), count_(count) {}
    std::size_t count() const noexcept { return count_; }

private:
    std::size_t count_;
};

class ParseError : public InvalidArgument {
public:
    ParseError(const std::string& what, int line)
        : InvalidArgument(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace aoheom
