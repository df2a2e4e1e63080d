#include "parsplit/frontier.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace parsplit {

void SweepGrid::validate() const {
    std::ostringstream msg;
    if (!(f_min >= 0.0 && f_min < f_max && f_max <= 1.0)) {
        msg << "sweep grid needs 0 <= f_min < f_max <= 1, got [" << f_min << ", " << f_max
            << "]";
    } else if (steps < 2) {
        msg << "sweep grid needs at least 2 steps, got " << steps;
    } else {
        return;
    }
    throw DomainError(msg.str());
}

double SweepGrid::at(std::size_t index) const {
    const double last = static_cast<double>(steps - 1);
    const double k = static_cast<double>(index);
    return (f_min * (last - k) + f_max * k) / last;
}

std::vector<FrontierPoint> sweep(const SystemParams& s, const SweepGrid& grid,
                                 const QuadratureConfig& quad) {
    grid.validate();
    std::vector<FrontierPoint> points;
    points.reserve(grid.steps);
    for (std::size_t i = 0; i < grid.steps; ++i) {
        const double f = grid.at(i);
        try {
            const auto m = completion_moments(SplitFraction(f), s, quad);
            points.push_back({f, m.mean, m.variance, false});
        } catch (const NumericalError& e) {
            std::ostringstream msg;
            msg << "sweep failed at f = " << std::setprecision(17) << f << ": " << e.what();
            throw NumericalError(msg.str(), e.estimate(), e.error_bound());
        }
    }
    return points;
}

std::vector<FrontierPoint> efficient_frontier(std::vector<FrontierPoint> points) {
    if (points.empty()) throw DomainError("efficient_frontier: empty point set");

    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].mu_f != points[b].mu_f) return points[a].mu_f < points[b].mu_f;
        return points[a].var_f < points[b].var_f;
    });

    // Walk groups of equal mu_f. Within a group only the minimum variance
    // can survive, and only if it beats every strictly-faster group.
    double best_var = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < order.size();) {
        std::size_t end = g;
        while (end < order.size() && points[order[end]].mu_f == points[order[g]].mu_f) ++end;
        const double group_min = points[order[g]].var_f;
        for (std::size_t k = g; k < end; ++k) {
            auto& p = points[order[k]];
            p.on_frontier = p.var_f == group_min && group_min < best_var;
        }
        best_var = std::min(best_var, group_min);
        g = end;
    }
    return points;
}

namespace {

template <class Budgeted, class Objective>
FrontierPoint select(std::span<const FrontierPoint> points, double budget, Budgeted budgeted,
                     Objective objective, const char* what) {
    const FrontierPoint* best = nullptr;
    double lowest_budgeted = std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
        lowest_budgeted = std::min(lowest_budgeted, budgeted(p));
        if (!(budgeted(p) <= budget)) continue;
        if (best == nullptr || objective(p) < objective(*best) ||
            (objective(p) == objective(*best) && p.f < best->f)) {
            best = &p;
        }
    }
    if (best == nullptr) {
        std::ostringstream msg;
        msg << what << " budget " << budget << " is infeasible; smallest achievable is "
            << lowest_budgeted;
        throw InfeasibleBudgetError(msg.str(), lowest_budgeted);
    }
    return *best;
}

}  // namespace

FrontierPoint min_variance_given_mu(std::span<const FrontierPoint> points, double mu_budget) {
    return select(
        points, mu_budget, [](const FrontierPoint& p) { return p.mu_f; },
        [](const FrontierPoint& p) { return p.var_f; }, "expected-time");
}

FrontierPoint min_mu_given_variance(std::span<const FrontierPoint> points, double var_budget) {
    return select(
        points, var_budget, [](const FrontierPoint& p) { return p.var_f; },
        [](const FrontierPoint& p) { return p.mu_f; }, "variance");
}

void write_frontier_csv(std::ostream& out, std::span<const FrontierPoint> points) {
    out << "f,mu,var,on_frontier\n";
    out << std::setprecision(17);
    for (const auto& p : points) {
        out << p.f << ',' << p.mu_f << ',' << p.var_f << ',' << (p.on_frontier ? 1 : 0) << '\n';
    }
}

void write_frontier_json(std::ostream& out, std::span<const FrontierPoint> points) {
    auto records = nlohmann::json::array();
    for (const auto& p : points) {
        records.push_back({{"f", p.f}, {"mu", p.mu_f}, {"var", p.var_f},
                           {"on_frontier", p.on_frontier}});
    }
    out << records.dump(2) << '\n';
}

}  // namespace parsplit
