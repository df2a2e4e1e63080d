#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature over vector-valued
// integrands. Several integrals sharing one integrand evaluation are
// refined together; an interval is split while any component is above
// its tolerance.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <vector>

#include "parsplit/errors.hpp"

namespace parsplit {

struct QuadratureConfig {
    /// Absolute tolerance on each integral. Posterior moment integrals
    /// apply it to the normalized density.
    double abs_tol = 1e-8;
    /// Maximum bisection depth below an initial interval.
    int max_levels = 30;
    /// Upper limit of completion-time integrals, in scaled standard
    /// deviations above the largest scaled mean.
    double tail_sigmas = 10.0;
    std::size_t max_intervals = 200000;

    void validate() const;
};

template <std::size_t K>
struct QuadratureResult {
    std::array<double, K> value{};
    std::array<double, K> error{};
    std::size_t evaluations = 0;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd Kronrod nodes 1, 3, 5 and the centre.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::size_t K>
struct Segment {
    double lo;
    double hi;
    int depth;
    std::array<double, K> value;
    std::array<double, K> error;
    double badness;  // max_k error_k / tol_k

    bool operator<(const Segment& other) const { return badness < other.badness; }
};

template <std::size_t K, class F>
Segment<K> gauss_kronrod_15(F& f, double lo, double hi, int depth,
                            const std::array<double, K>& tol) {
    const double centre = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    constexpr double eps = std::numeric_limits<double>::epsilon();

    std::array<std::array<double, K>, 15> fv;
    fv[7] = f(centre);
    for (std::size_t i = 0; i < 7; ++i) {
        fv[i] = f(centre - half * kKronrodNodes[i]);
        fv[14 - i] = f(centre + half * kKronrodNodes[i]);
    }

    Segment<K> seg{lo, hi, depth, {}, {}, 0.0};
    for (std::size_t k = 0; k < K; ++k) {
        double kronrod = kKronrodWeights[7] * fv[7][k];
        double gauss = kGaussWeights[3] * fv[7][k];
        double abs_sum = std::abs(kronrod);
        for (std::size_t i = 0; i < 7; ++i) {
            const double pair = fv[i][k] + fv[14 - i][k];
            kronrod += kKronrodWeights[i] * pair;
            abs_sum += kKronrodWeights[i] * (std::abs(fv[i][k]) + std::abs(fv[14 - i][k]));
            if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
        }
        const double mean = 0.5 * kronrod;
        double asc = kKronrodWeights[7] * std::abs(fv[7][k] - mean);
        for (std::size_t i = 0; i < 7; ++i) {
            asc += kKronrodWeights[i] *
                   (std::abs(fv[i][k] - mean) + std::abs(fv[14 - i][k] - mean));
        }
        const double result = kronrod * half;
        const double resabs = abs_sum * std::abs(half);
        const double resasc = asc * std::abs(half);
        double err = std::abs((kronrod - gauss) * half);
        if (resasc != 0.0 && err != 0.0) {
            err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
        }
        if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
            err = std::max(50.0 * eps * resabs, err);
        }
        seg.value[k] = result;
        seg.error[k] = err;
        seg.badness = std::max(seg.badness, tol[k] > 0.0 ? err / tol[k]
                                                         : std::numeric_limits<double>::infinity());
    }
    return seg;
}

}  // namespace detail

/// Integrates `f` over [breaks.front(), breaks.back()], starting from the
/// partition given by the sorted `breaks`. Converges when every
/// component's summed error estimate is at most its tolerance; throws
/// NumericalError carrying the achieved estimate and error bound of the
/// worst component otherwise.
template <std::size_t K, class F>
QuadratureResult<K> integrate_adaptive(F&& f, std::span<const double> breaks,
                                       const std::array<double, K>& tol,
                                       const QuadratureConfig& cfg) {
    if (breaks.size() < 2) throw DomainError("integrate_adaptive: need at least two breakpoints");

    std::priority_queue<detail::Segment<K>> active;
    std::vector<detail::Segment<K>> frozen;
    std::array<double, K> total_err{};
    QuadratureResult<K> out;

    auto push = [&](detail::Segment<K>&& seg) {
        out.evaluations += 15;
        for (std::size_t k = 0; k < K; ++k) total_err[k] += seg.error[k];
        if (seg.depth >= cfg.max_levels) {
            frozen.push_back(std::move(seg));
        } else {
            active.push(std::move(seg));
        }
    };
    auto converged = [&] {
        for (std::size_t k = 0; k < K; ++k) {
            if (total_err[k] > tol[k]) return false;
        }
        return true;
    };

    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i] <= breaks[i + 1])) {
            throw DomainError("integrate_adaptive: breakpoints must be sorted");
        }
        if (breaks[i] == breaks[i + 1]) continue;
        push(detail::gauss_kronrod_15<K>(f, breaks[i], breaks[i + 1], 0, tol));
    }

    while (!converged() && !active.empty() &&
           active.size() + frozen.size() < cfg.max_intervals) {
        detail::Segment<K> worst = active.top();
        active.pop();
        for (std::size_t k = 0; k < K; ++k) total_err[k] -= worst.error[k];
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (mid <= worst.lo || mid >= worst.hi) {
            // Interval cannot be bisected in floating point.
            for (std::size_t k = 0; k < K; ++k) total_err[k] += worst.error[k];
            frozen.push_back(std::move(worst));
            continue;
        }
        push(detail::gauss_kronrod_15<K>(f, worst.lo, mid, worst.depth + 1, tol));
        push(detail::gauss_kronrod_15<K>(f, mid, worst.hi, worst.depth + 1, tol));
    }

    // Re-sum from the segments to shed incremental drift.
    out.value.fill(0.0);
    out.error.fill(0.0);
    auto accumulate = [&](const detail::Segment<K>& seg) {
        for (std::size_t k = 0; k < K; ++k) {
            out.value[k] += seg.value[k];
            out.error[k] += seg.error[k];
        }
    };
    for (const auto& seg : frozen) accumulate(seg);
    while (!active.empty()) {
        accumulate(active.top());
        active.pop();
    }

    std::size_t worst_k = 0;
    double worst_ratio = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        if (!std::isfinite(out.value[k])) {
            throw NumericalError("quadrature produced a non-finite value", out.value[k],
                                 out.error[k]);
        }
        const double ratio = out.error[k] / tol[k];
        if (ratio > worst_ratio) {
            worst_ratio = ratio;
            worst_k = k;
        }
    }
    // Small slack absorbs the summation-order difference from re-summing.
    if (worst_ratio > 1.0 + 1e-9) {
        std::ostringstream msg;
        msg << "quadrature did not converge: estimate " << out.value[worst_k]
            << ", error bound " << out.error[worst_k] << " > tolerance " << tol[worst_k];
        throw NumericalError(msg.str(), out.value[worst_k], out.error[worst_k]);
    }
    return out;
}

/// Scalar convenience wrapper over a plain interval.
template <class F>
QuadratureResult<1> integrate_adaptive(F&& f, double lo, double hi, double tol,
                                       const QuadratureConfig& cfg) {
    const std::array<double, 2> breaks{lo, hi};
    auto wrapped = [&f](double x) { return std::array<double, 1>{f(x)}; };
    return integrate_adaptive<1>(wrapped, std::span<const double>(breaks),
                                 std::array<double, 1>{tol}, cfg);
}

}  // namespace parsplit
