#include "parsplit/completion_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace parsplit {

namespace {

void check_share(double share) {
    if (!(share >= 0.0 && share <= 1.0)) {
        std::ostringstream msg;
        msg << "workload share " << share << " outside [0, 1]";
        throw DomainError(msg.str());
    }
}

// P(t > eps) for one unit; computed directly from the upper tail so the
// survival integrand keeps its relative accuracy far out in the tail.
double component_survival(double eps, double share, const UnitParams& u) {
    if (share == 0.0) return eps >= 0.0 ? 0.0 : 1.0;
    const double z = (eps - u.scaled_mean(share)) / u.scaled_sd(share);
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

}  // namespace

void UnitParams::validate() const {
    std::ostringstream msg;
    if (!(std::isfinite(mu) && mu > 0.0)) {
        msg << "unit mu must be positive and finite, got " << mu;
    } else if (!(std::isfinite(sigma) && sigma > 0.0)) {
        msg << "unit sigma must be positive and finite, got " << sigma;
    } else if (!(alpha > 0.0 && alpha <= 1.0)) {
        msg << "unit alpha must lie in (0, 1], got " << alpha;
    } else if (!(beta > 0.0 && beta <= 1.0)) {
        msg << "unit beta must lie in (0, 1], got " << beta;
    } else {
        return;
    }
    throw DomainError(msg.str());
}

double UnitParams::scaled_mean(double share) const {
    check_share(share);
    return share == 0.0 ? 0.0 : std::pow(share, alpha) * mu;
}

double UnitParams::scaled_sd(double share) const {
    check_share(share);
    return share == 0.0 ? 0.0 : std::pow(share, beta) * sigma;
}

void SystemParams::validate() const {
    unit_i.validate();
    unit_j.validate();
}

SplitFraction::SplitFraction(double f) : f_(f) {
    if (!(f >= 0.0 && f <= 1.0)) {
        std::ostringstream msg;
        msg << "split fraction " << f << " outside [0, 1]";
        throw DomainError(msg.str());
    }
}

double component_cdf(double eps, double share, const UnitParams& u) {
    u.validate();
    check_share(share);
    if (!std::isfinite(eps)) throw DomainError("component_cdf: eps must be finite");
    if (share == 0.0) return eps >= 0.0 ? 1.0 : 0.0;
    const double z = (eps - u.scaled_mean(share)) / u.scaled_sd(share);
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double task_cdf(double eps, SplitFraction f, const SystemParams& s) {
    return component_cdf(eps, f.value(), s.unit_i) *
           component_cdf(eps, f.complement(), s.unit_j);
}

CompletionMoments completion_moments(SplitFraction f, const SystemParams& s,
                                      const QuadratureConfig& quad) {
    s.validate();
    quad.validate();

    struct Component {
        double share;
        const UnitParams* unit;
    };
    const Component parts[2] = {{f.value(), &s.unit_i}, {f.complement(), &s.unit_j}};

    double upper = 0.0;
    for (const auto& part : parts) {
        if (part.share == 0.0) continue;
        upper = std::max(upper, part.unit->scaled_mean(part.share) +
                                    quad.tail_sigmas * part.unit->scaled_sd(part.share));
    }

    // 1 - Pi*Pj written as Qi + Qj - Qi*Qj.
    auto survival = [&](double eps) {
        const double qi = component_survival(eps, parts[0].share, *parts[0].unit);
        const double qj = component_survival(eps, parts[1].share, *parts[1].unit);
        return qi + qj - qi * qj;
    };

    if (upper <= 0.0) return {};  // every unit finishes at or before zero
    const double tail = survival(upper);
    if (!(tail < 1e-12)) {
        std::ostringstream msg;
        msg << "survival at upper limit " << upper << " is " << tail
            << "; increase tail_sigmas";
        throw NumericalError(msg.str(), tail, tail);
    }

    // Both integrals are taken about a pivot c near the mean: below c the
    // integrand uses the CDF, above it the survival. This is the same pair
    // of integrals over [0, U] rearranged so that neither E^2 nor c^2 is
    // formed and cancelled, which keeps small variances accurate.
    double pivot = 0.0;
    for (const auto& part : parts) {
        if (part.share == 0.0) continue;
        pivot = std::max(pivot, part.unit->scaled_mean(part.share));
    }
    pivot = std::clamp(pivot, 0.0, upper);

    // Break the range near each unit's bulk so narrow steps are never
    // straddled by a single initial interval.
    std::vector<double> breaks{0.0, pivot, upper};
    for (const auto& part : parts) {
        if (part.share == 0.0) continue;
        const double m = part.unit->scaled_mean(part.share);
        const double sd = part.unit->scaled_sd(part.share);
        for (double k : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0}) {
            const double x = m + k * sd;
            if (x > 0.0 && x < upper) breaks.push_back(x);
        }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    auto cdf = [&](double eps) {
        double p = 1.0;
        for (const auto& part : parts) {
            if (part.share == 0.0) continue;
            const double z = (eps - part.unit->scaled_mean(part.share)) /
                             part.unit->scaled_sd(part.share);
            p *= 0.5 * std::erfc(-z / std::numbers::sqrt2);
        }
        return p;
    };
    auto integrand = [&](double eps) {
        if (eps < pivot) {
            const double p = cdf(eps);
            return std::array<double, 2>{-p, 2.0 * (pivot - eps) * p};
        }
        const double q = survival(eps);
        return std::array<double, 2>{q, 2.0 * (eps - pivot) * q};
    };
    const auto r = integrate_adaptive<2>(integrand, std::span<const double>(breaks),
                                         {quad.abs_tol, quad.abs_tol}, quad);

    // r.value[0] = E - c and r.value[1] = E[(T - c)^2].
    const double shift = r.value[0];
    CompletionMoments out;
    out.mean = pivot + shift;
    out.mean_error = r.error[0];
    out.variance = r.value[1] - shift * shift;
    out.variance_error = r.error[1] + 2.0 * std::abs(shift) * r.error[0] +
                         4.0 * std::numeric_limits<double>::epsilon() * r.value[1];
    if (out.variance < -(out.variance_error + quad.abs_tol)) {
        std::ostringstream msg;
        msg << "completion variance " << out.variance << " below minus its error bound "
            << out.variance_error << " at f = " << f.value();
        throw NumericalError(msg.str(), out.variance, out.variance_error);
    }
    return out;
}

double expected_completion(SplitFraction f, const SystemParams& s,
                           const QuadratureConfig& quad) {
    return completion_moments(f, s, quad).mean;
}

double completion_variance(SplitFraction f, const SystemParams& s,
                           const QuadratureConfig& quad) {
    return completion_moments(f, s, quad).variance;
}

NegativeMass negative_mass(SplitFraction f, const SystemParams& s) {
    s.validate();
    auto below_zero = [](double share, const UnitParams& u) {
        if (share == 0.0) return 0.0;
        const double z = -u.scaled_mean(share) / u.scaled_sd(share);
        return 0.5 * std::erfc(-z / std::numbers::sqrt2);
    };
    return {below_zero(f.value(), s.unit_i), below_zero(f.complement(), s.unit_j)};
}

}  // namespace parsplit
