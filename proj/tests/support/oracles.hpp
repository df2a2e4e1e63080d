#pragma once

// Reference computations for tests. Everything here is written against
// textbook formulas and plain Monte Carlo, never against the library's
// quadrature or update code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <parsplit/completion_model.hpp>
#include <parsplit/frontier.hpp>

namespace oracle {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Sample moments of max(t_i, t_j) and their standard errors.
struct MaxMoments {
    double mean = 0.0;
    double mean_se = 0.0;
    double variance = 0.0;
    double variance_se = 0.0;
};

/// Standard-normal pairs reused across split fractions (common random
/// numbers), so sweeps over f see one consistent sample.
struct NormalPairs {
    std::vector<double> zi;
    std::vector<double> zj;

    NormalPairs(std::size_t n, std::uint64_t seed) : zi(n), zj(n) {
        std::mt19937_64 gen(seed);
        std::normal_distribution<double> dist;
        for (std::size_t k = 0; k < n; ++k) {
            zi[k] = dist(gen);
            zj[k] = dist(gen);
        }
    }
};

/// Monte Carlo of max over the two units; an idle unit contributes 0.
inline MaxMoments mc_max_moments(double f, const parsplit::UnitParams& ui,
                                 const parsplit::UnitParams& uj, const NormalPairs& z) {
    auto scaled = [](double share, const parsplit::UnitParams& u, double zv) {
        if (share == 0.0) return 0.0;
        return std::pow(share, u.alpha) * u.mu + std::pow(share, u.beta) * u.sigma * zv;
    };
    const std::size_t n = z.zi.size();
    // Shifted accumulation keeps the fourth moment well conditioned.
    const double shift = std::max(scaled(f, ui, 0.0), scaled(1.0 - f, uj, 0.0));
    double s1 = 0.0;
    double s2 = 0.0;
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) {
        x[k] = std::max(scaled(f, ui, z.zi[k]), scaled(1.0 - f, uj, z.zj[k])) - shift;
        s1 += x[k];
    }
    const double mean = s1 / n;
    double m4 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double d = x[k] - mean;
        s2 += d * d;
        m4 += d * d * d * d;
    }
    const double var = s2 / (n - 1);
    m4 /= n;
    MaxMoments out;
    out.mean = mean + shift;
    out.mean_se = std::sqrt(var / n);
    out.variance = var;
    out.variance_se = std::sqrt(std::max(0.0, m4 - var * var) / n);
    return out;
}

/// Textbook conjugate update for x ~ N(mu, 1/lambda) with a
/// Normal-Gamma(mu0, kappa0, a0, rate b0) prior.
struct TextbookNormalGamma {
    double mu = 0.0;
    double kappa = 0.0;
    double shape = 0.0;
    double rate = 0.0;
};

inline TextbookNormalGamma textbook_update(double mu0, double kappa0, double a0, double b0,
                                           const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    TextbookNormalGamma out;
    out.kappa = kappa0 + n;
    out.mu = (kappa0 * mu0 + n * mean) / out.kappa;
    out.shape = a0 + n / 2.0;
    out.rate = b0 + 0.5 * ss + kappa0 * n * (mean - mu0) * (mean - mu0) / (2.0 * out.kappa);
    return out;
}

/// O(n^2) dominance check.
inline std::vector<bool> pareto_flags(const std::vector<parsplit::FrontierPoint>& pts) {
    std::vector<bool> flags(pts.size(), true);
    for (std::size_t a = 0; a < pts.size(); ++a) {
        for (std::size_t b = 0; b < pts.size(); ++b) {
            if (a == b) continue;
            const bool no_worse = pts[b].mu_f <= pts[a].mu_f && pts[b].var_f <= pts[a].var_f;
            const bool better = pts[b].mu_f < pts[a].mu_f || pts[b].var_f < pts[a].var_f;
            if (no_worse && better) {
                flags[a] = false;
                break;
            }
        }
    }
    return flags;
}

inline double beta_mean(double a, double b) { return a / (a + b); }
inline double beta_variance(double a, double b) {
    return a * b / ((a + b) * (a + b) * (a + b + 1.0));
}

}  // namespace oracle
