#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace parsplit {

/// A parameter or argument lies outside its mathematical domain.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to reach its tolerance or produced an
/// invalid intermediate (non-positive Gamma rate, underflowed normalizer).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, double estimate = 0.0,
                            double error_bound = 0.0)
        : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

/// No Beta distribution matches the requested (mean, variance).
class MomentInfeasibleError : public DomainError {
public:
    MomentInfeasibleError(const std::string& what, double mean, double variance)
        : DomainError(what), mean_(mean), variance_(variance) {}

    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return variance_; }

private:
    double mean_;
    double variance_;
};

/// A QoS budget admits no grid point.
class InfeasibleBudgetError : public std::runtime_error {
public:
    InfeasibleBudgetError(const std::string& what, double best_achievable)
        : std::runtime_error(what), best_achievable_(best_achievable) {}

    /// Smallest value of the constrained quantity over all points.
    double best_achievable() const noexcept { return best_achievable_; }

private:
    double best_achievable_;
};

/// Malformed or invalid external input (trace files, config files).
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(what), line_(line) {}

    /// 1-based line number, 0 when not tied to a line.
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace parsplit
