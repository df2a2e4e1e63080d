#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "parsplit/completion_model.hpp"

namespace parsplit {

/// Evenly spaced split fractions, endpoints included.
struct SweepGrid {
    double f_min = 0.01;
    double f_max = 0.99;
    std::size_t steps = 99;

    void validate() const;
    double at(std::size_t index) const;
};

struct FrontierPoint {
    double f = 0.0;
    double mu_f = 0.0;   // expected completion time at f
    double var_f = 0.0;  // completion-time variance at f
    bool on_frontier = false;

    friend bool operator==(const FrontierPoint&, const FrontierPoint&) = default;
};

/// Completion moments at every grid fraction, in grid order. Quadrature
/// failures are rethrown as NumericalError naming the offending f.
std::vector<FrontierPoint> sweep(const SystemParams& s, const SweepGrid& grid = {},
                                 const QuadratureConfig& quad = {});

/// Flags the Pareto-minimal points: a point is dominated when another
/// point is no worse in both mu_f and var_f and strictly better in one.
/// Identical points share their status. Input order is preserved.
std::vector<FrontierPoint> efficient_frontier(std::vector<FrontierPoint> points);

/// Smallest-variance point with mu_f <= mu_budget; ties go to smaller f.
/// Throws InfeasibleBudgetError carrying the minimum mu_f.
FrontierPoint min_variance_given_mu(std::span<const FrontierPoint> points, double mu_budget);

/// Smallest-mean point with var_f <= var_budget; ties go to smaller f.
/// Throws InfeasibleBudgetError carrying the minimum var_f.
FrontierPoint min_mu_given_variance(std::span<const FrontierPoint> points, double var_budget);

/// CSV with header `f,mu,var,on_frontier`, 17 significant digits.
void write_frontier_csv(std::ostream& out, std::span<const FrontierPoint> points);
/// JSON array of {"f", "mu", "var", "on_frontier"} records.
void write_frontier_json(std::ostream& out, std::span<const FrontierPoint> points);

}  // namespace parsplit
