#pragma once

// Completion-time distribution of two parallel units. Unit i receives a
// share f of the workload and unit j the remaining 1 - f; each finishes
// after a Gaussian time N(share^alpha * mu, (share^beta * sigma)^2) and the
// task completes when both have finished.

#include "parsplit/quadrature.hpp"

namespace parsplit {

/// Processing characteristics of one unit at full workload.
struct UnitParams {
    double mu = 1.0;     // expected completion time
    double sigma = 1.0;  // standard deviation of completion time
    double alpha = 1.0;  // mean scaling exponent, in (0, 1]
    double beta = 1.0;   // deviation scaling exponent, in (0, 1]

    /// 1 / sigma^2.
    double precision() const { return 1.0 / (sigma * sigma); }
    void validate() const;

    /// Mean completion time at workload `share`; 0 for an idle unit.
    double scaled_mean(double share) const;
    /// Standard deviation at workload `share`; 0 for an idle unit.
    double scaled_sd(double share) const;

    friend bool operator==(const UnitParams&, const UnitParams&) = default;
};

struct SystemParams {
    UnitParams unit_i;
    UnitParams unit_j;

    void validate() const;
    /// Same system with the roles of the units exchanged.
    SystemParams swapped() const { return {unit_j, unit_i}; }
};

/// Fraction of the workload routed to unit i.
class SplitFraction {
public:
    explicit SplitFraction(double f);

    double value() const noexcept { return f_; }
    /// Share routed to unit j.
    double complement() const noexcept { return 1.0 - f_; }

private:
    double f_;
};

/// P(t <= eps) for one unit at workload `share` in [0, 1]. An idle unit
/// (share == 0) finishes at time 0 with certainty.
double component_cdf(double eps, double share, const UnitParams& u);

/// P(max(t_i, t_j) <= eps).
double task_cdf(double eps, SplitFraction f, const SystemParams& s);

struct CompletionMoments {
    double mean = 0.0;
    double variance = 0.0;
    double mean_error = 0.0;      // quadrature error bound on the mean
    double variance_error = 0.0;  // propagated error bound on the variance
};

/// Mean and variance of the task completion time from the survival
/// integrals over [0, U]:
///   E   = int (1 - P(t <= e)) de
///   Var = 2 int e (1 - P(t <= e)) de - E^2
/// U lies tail_sigmas scaled deviations beyond the larger scaled mean.
/// Both integrals are evaluated about the larger scaled mean to avoid
/// cancellation when the variance is small.
/// Throws NumericalError if the quadrature fails or the variance is below
/// minus its error bound.
CompletionMoments completion_moments(SplitFraction f, const SystemParams& s,
                                      const QuadratureConfig& quad = {});

double expected_completion(SplitFraction f, const SystemParams& s,
                           const QuadratureConfig& quad = {});
double completion_variance(SplitFraction f, const SystemParams& s,
                           const QuadratureConfig& quad = {});

/// Probability mass each unit's Gaussian places below zero. The survival
/// integrals ignore this mass, so a noticeable value flags a regime where
/// the Gaussian model is strained.
struct NegativeMass {
    double unit_i = 0.0;
    double unit_j = 0.0;
};
NegativeMass negative_mass(SplitFraction f, const SystemParams& s);

}  // namespace parsplit
