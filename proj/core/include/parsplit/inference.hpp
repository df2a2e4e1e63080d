#pragma once

// Conditional posteriors for one unit's completion-time model
// t ~ N(f^alpha * mu, f^(2 beta) / lambda): the Normal-Gamma update for
// (mu, lambda) given the exponents, and moment-matched Beta
// approximations for the exponent posteriors.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "parsplit/quadrature.hpp"

namespace parsplit {

/// Joint prior (or posterior) over mean and precision:
/// mu | lambda ~ N(mu0, 1 / (kappa0 lambda)), lambda ~ Gamma(nu0, rate = psi0).
struct NormalGammaParams {
    double mu0 = 0.0;
    double kappa0 = 1.0;
    double nu0 = 1.0;
    double psi0 = 1.0;

    void validate() const;
    friend bool operator==(const NormalGammaParams&, const NormalGammaParams&) = default;
};

struct BetaParams {
    double shape_a = 1.0;
    double shape_b = 1.0;

    void validate() const;
    double mean() const;
    double variance() const;
    /// Mode; defined only when both shapes exceed one.
    double mode() const;
    /// Unnormalized log density on (0, 1).
    double log_density(double x) const;

    friend bool operator==(const BetaParams&, const BetaParams&) = default;
};

/// One (workload share, completion time) measurement.
struct Observation {
    double f = 1.0;
    double t = 0.0;

    friend bool operator==(const Observation&, const Observation&) = default;
};

/// Ordered observations of one inference round. Every share lies in
/// (0, 1] and every time is finite; log-shares are cached.
class Batch {
public:
    Batch() = default;
    explicit Batch(std::vector<Observation> observations);

    std::size_t size() const noexcept { return obs_.size(); }
    bool empty() const noexcept { return obs_.empty(); }
    std::span<const Observation> observations() const noexcept { return obs_; }
    std::span<const double> log_shares() const noexcept { return log_f_; }
    double sum_log_shares() const noexcept { return sum_log_f_; }

private:
    std::vector<Observation> obs_;
    std::vector<double> log_f_;
    double sum_log_f_ = 0.0;
};

/// Posterior of (mu, lambda) given the batch and fixed exponents:
///   kappa_N = kappa0 + sum f^(2a - 2b)
///   mu_N    = (mu0 kappa0 + sum f^(a - 2b) t) / kappa_N
///   nu_N    = nu0 + N / 2
///   psi_N   = psi0 + (-mu_N^2 kappa_N + mu0^2 kappa0 + sum (t / f^b)^2) / 2
/// An empty batch returns the prior. Throws NumericalError if psi_N is
/// not positive after compensated summation.
NormalGammaParams normal_gamma_update(const NormalGammaParams& prior, const Batch& batch,
                                      double alpha, double beta);

enum class LikelihoodForm {
    full,        // keeps the 1 / prod f^beta normalizer
    simplified,  // drops it
};

/// Log of the unnormalized Gaussian likelihood
///   (N/2) ln lambda - [full] beta sum ln f - (lambda/2) sum ((t - f^a mu) / f^b)^2.
/// The 2 pi constant is omitted.
double log_likelihood(const Batch& batch, double mu, double lambda, double alpha, double beta,
                      LikelihoodForm form);

/// Unnormalized log posterior of alpha: simplified likelihood times the
/// Beta prior. alpha must lie in (0, 1).
double alpha_log_posterior_unnorm(double alpha, const Batch& batch, double mu, double lambda,
                                  double beta, const BetaParams& prior);

/// Unnormalized log posterior of beta: full likelihood times the Beta
/// prior. beta must lie in (0, 1).
double beta_log_posterior_unnorm(double beta, const Batch& batch, double mu, double lambda,
                                 double alpha, const BetaParams& prior);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Mean and variance of the density proportional to exp(log_density) on
/// (0, 1). The log density is shifted by its maximum over an interior
/// grid before exponentiation, and the substitution x = sin^2(pi u / 2)
/// absorbs integrable endpoint singularities. quad.abs_tol applies to the
/// normalized density. Throws NumericalError if the normalizer vanishes.
Moments posterior_moments(const std::function<double(double)>& log_density,
                          const QuadratureConfig& quad = {});

/// Method-of-moments Beta fit. Requires 0 < mean < 1 and
/// 0 < variance < mean (1 - mean); throws MomentInfeasibleError otherwise.
BetaParams beta_fit_from_moments(double mean, double variance);

struct BetaFit {
    BetaParams params;
    bool clamped = false;
};

/// As beta_fit_from_moments, but an infeasible variance is clamped to
/// 0.999 mean (1 - mean) and reported.
BetaFit beta_fit_clamped(double mean, double variance);

/// Weakly informative (mu, lambda) prior built from a first batch:
/// mu0 = mean(t) * mean(f)^(-alpha), kappa0 = nu0 = psi0 = 1.
NormalGammaParams default_normal_gamma_prior(const Batch& first, double alpha);

}  // namespace parsplit
