#include "parsplit/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "parsplit/errors.hpp"

namespace parsplit {

namespace {

// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

void check_exponent(double value, const char* name, bool closed_upper) {
    const bool ok = value > 0.0 && (closed_upper ? value <= 1.0 : value < 1.0);
    if (!ok) {
        std::ostringstream msg;
        msg << name << " = " << value << " outside (0, 1" << (closed_upper ? "]" : ")");
        throw DomainError(msg.str());
    }
}

// Weighted residual sum  sum ((t - f^a mu) / f^b)^2  in log-share form.
double scaled_sse(const Batch& batch, double mu, double alpha, double beta) {
    const auto obs = batch.observations();
    const auto log_f = batch.log_shares();
    double sse = 0.0;
    for (std::size_t n = 0; n < obs.size(); ++n) {
        const double r = (obs[n].t - std::exp(alpha * log_f[n]) * mu) * std::exp(-beta * log_f[n]);
        sse += r * r;
    }
    return sse;
}

}  // namespace

void NormalGammaParams::validate() const {
    std::ostringstream msg;
    if (!std::isfinite(mu0)) {
        msg << "normal-gamma mu0 must be finite, got " << mu0;
    } else if (!(kappa0 > 0.0 && std::isfinite(kappa0))) {
        msg << "normal-gamma kappa0 must be positive, got " << kappa0;
    } else if (!(nu0 > 0.0 && std::isfinite(nu0))) {
        msg << "normal-gamma nu0 must be positive, got " << nu0;
    } else if (!(psi0 > 0.0 && std::isfinite(psi0))) {
        msg << "normal-gamma psi0 must be positive, got " << psi0;
    } else {
        return;
    }
    throw DomainError(msg.str());
}

void BetaParams::validate() const {
    if (!(shape_a > 0.0 && std::isfinite(shape_a) && shape_b > 0.0 && std::isfinite(shape_b))) {
        std::ostringstream msg;
        msg << "beta shapes must be positive and finite, got (" << shape_a << ", " << shape_b
            << ")";
        throw DomainError(msg.str());
    }
}

double BetaParams::mean() const { return shape_a / (shape_a + shape_b); }

double BetaParams::variance() const {
    const double s = shape_a + shape_b;
    return shape_a * shape_b / (s * s * (s + 1.0));
}

double BetaParams::mode() const {
    if (!(shape_a > 1.0 && shape_b > 1.0)) {
        throw DomainError("beta mode requires both shapes above 1");
    }
    return (shape_a - 1.0) / (shape_a + shape_b - 2.0);
}

double BetaParams::log_density(double x) const {
    return (shape_a - 1.0) * std::log(x) + (shape_b - 1.0) * std::log1p(-x);
}

Batch::Batch(std::vector<Observation> observations) : obs_(std::move(observations)) {
    log_f_.reserve(obs_.size());
    for (std::size_t n = 0; n < obs_.size(); ++n) {
        const auto& o = obs_[n];
        if (!(o.f > 0.0 && o.f <= 1.0)) {
            std::ostringstream msg;
            msg << "observation " << n << ": share " << o.f << " outside (0, 1]";
            throw DomainError(msg.str());
        }
        if (!std::isfinite(o.t)) {
            std::ostringstream msg;
            msg << "observation " << n << ": completion time is not finite";
            throw DomainError(msg.str());
        }
        log_f_.push_back(std::log(o.f));
        sum_log_f_ += log_f_.back();
    }
}

NormalGammaParams normal_gamma_update(const NormalGammaParams& prior, const Batch& batch,
                                      double alpha, double beta) {
    prior.validate();
    check_exponent(alpha, "alpha", true);
    check_exponent(beta, "beta", true);
    if (batch.empty()) return prior;

    const auto obs = batch.observations();
    const auto log_f = batch.log_shares();
    CompensatedSum weight;       // sum f^(2a - 2b)
    CompensatedSum weighted_t;   // sum f^(a - 2b) t
    CompensatedSum scaled_t_sq;  // sum (t / f^b)^2
    for (std::size_t n = 0; n < obs.size(); ++n) {
        const double lf = log_f[n];
        weight.add(std::exp((2.0 * alpha - 2.0 * beta) * lf));
        weighted_t.add(std::exp((alpha - 2.0 * beta) * lf) * obs[n].t);
        const double scaled = obs[n].t * std::exp(-beta * lf);
        scaled_t_sq.add(scaled * scaled);
    }

    NormalGammaParams post;
    post.kappa0 = prior.kappa0 + weight.value();
    post.mu0 = (prior.mu0 * prior.kappa0 + weighted_t.value()) / post.kappa0;
    post.nu0 = prior.nu0 + 0.5 * static_cast<double>(batch.size());

    CompensatedSum bracket;
    bracket.add(-post.mu0 * post.mu0 * post.kappa0);
    bracket.add(prior.mu0 * prior.mu0 * prior.kappa0);
    bracket.add(scaled_t_sq.value());
    post.psi0 = prior.psi0 + 0.5 * bracket.value();

    if (!(post.psi0 > 0.0) || !std::isfinite(post.psi0)) {
        std::ostringstream msg;
        msg << "normal-gamma update produced invalid gamma rate " << post.psi0;
        throw NumericalError(msg.str(), post.psi0, 0.0);
    }
    return post;
}

double log_likelihood(const Batch& batch, double mu, double lambda, double alpha, double beta,
                      LikelihoodForm form) {
    if (!(lambda > 0.0)) {
        std::ostringstream msg;
        msg << "precision must be positive, got " << lambda;
        throw DomainError(msg.str());
    }
    const double n = static_cast<double>(batch.size());
    double ll = 0.5 * n * std::log(lambda) - 0.5 * lambda * scaled_sse(batch, mu, alpha, beta);
    if (form == LikelihoodForm::full) ll -= beta * batch.sum_log_shares();
    return ll;
}

double alpha_log_posterior_unnorm(double alpha, const Batch& batch, double mu, double lambda,
                                  double beta, const BetaParams& prior) {
    check_exponent(alpha, "alpha", false);
    prior.validate();
    return log_likelihood(batch, mu, lambda, alpha, beta, LikelihoodForm::simplified) +
           prior.log_density(alpha);
}

double beta_log_posterior_unnorm(double beta, const Batch& batch, double mu, double lambda,
                                 double alpha, const BetaParams& prior) {
    check_exponent(beta, "beta", false);
    prior.validate();
    return log_likelihood(batch, mu, lambda, alpha, beta, LikelihoodForm::full) +
           prior.log_density(beta);
}

Moments posterior_moments(const std::function<double(double)>& log_density,
                          const QuadratureConfig& quad) {
    quad.validate();
    constexpr std::size_t grid = 256;
    constexpr double half_pi = 0.5 * std::numbers::pi;
    const double top = std::nextafter(1.0, 0.0);

    auto to_x = [&](double u) {
        const double s = std::sin(half_pi * u);
        return std::min(s * s, top);
    };
    auto jacobian = [&](double u) { return half_pi * std::sin(std::numbers::pi * u); };

    // Locate the peak on an interior grid in u.
    double peak = -std::numeric_limits<double>::infinity();
    std::size_t peak_index = 0;
    std::vector<double> grid_ld(grid);
    for (std::size_t k = 0; k < grid; ++k) {
        const double u = (static_cast<double>(k) + 0.5) / grid;
        grid_ld[k] = log_density(to_x(u));
        if (std::isnan(grid_ld[k])) throw NumericalError("log density is NaN");
        if (grid_ld[k] == std::numeric_limits<double>::infinity()) {
            throw NumericalError("log density is infinite in the interior");
        }
        if (grid_ld[k] > peak) {
            peak = grid_ld[k];
            peak_index = k;
        }
    }
    if (peak == -std::numeric_limits<double>::infinity()) {
        throw NumericalError("log density is -inf on the whole grid");
    }
    const double peak_u = (static_cast<double>(peak_index) + 0.5) / grid;
    const double pivot = to_x(peak_u);

    double rough_z = 0.0;
    for (std::size_t k = 0; k < grid; ++k) {
        const double u = (static_cast<double>(k) + 0.5) / grid;
        rough_z += std::exp(grid_ld[k] - peak) * jacobian(u) / grid;
    }

    auto integrand = [&](double u) {
        const double x = to_x(u);
        if (!(x > 0.0)) return std::array<double, 3>{0.0, 0.0, 0.0};
        const double w = std::exp(log_density(x) - peak) * jacobian(u);
        const double d = x - pivot;
        return std::array<double, 3>{w, w * d, w * d * d};
    };

    std::vector<double> breaks;
    constexpr std::size_t segments = 32;
    for (std::size_t k = 0; k <= segments; ++k) breaks.push_back(static_cast<double>(k) / segments);
    for (double offset : {-1.0, 0.0, 1.0}) {
        const double u = peak_u + offset / grid;
        if (u > 0.0 && u < 1.0) breaks.push_back(u);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    const double tol = quad.abs_tol * rough_z;
    const auto r = integrate_adaptive<3>(integrand, std::span<const double>(breaks),
                                         {tol, tol, tol}, quad);
    const double z = r.value[0];
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw NumericalError("posterior normalizer underflowed", z, r.error[0]);
    }
    const double shift = r.value[1] / z;
    Moments m;
    m.mean = pivot + shift;
    m.variance = r.value[2] / z - shift * shift;
    if (!(m.variance > 0.0)) {
        std::ostringstream msg;
        msg << "posterior variance " << m.variance << " is not positive";
        throw NumericalError(msg.str(), m.variance, r.error[2] / z);
    }
    return m;
}

BetaParams beta_fit_from_moments(double mean, double variance) {
    if (!(mean > 0.0 && mean < 1.0)) {
        std::ostringstream msg;
        msg << "beta fit: mean " << mean << " outside (0, 1)";
        throw MomentInfeasibleError(msg.str(), mean, variance);
    }
    const double spread = mean * (1.0 - mean);
    if (!(variance > 0.0 && variance < spread)) {
        std::ostringstream msg;
        msg << "beta fit: variance " << variance << " outside (0, " << spread << ")";
        throw MomentInfeasibleError(msg.str(), mean, variance);
    }
    const double factor = spread / variance - 1.0;
    return {mean * factor, (1.0 - mean) * factor};
}

BetaFit beta_fit_clamped(double mean, double variance) {
    if (mean > 0.0 && mean < 1.0) {
        const double limit = 0.999 * mean * (1.0 - mean);
        if (variance >= limit) return {beta_fit_from_moments(mean, limit), true};
    }
    return {beta_fit_from_moments(mean, variance), false};
}

NormalGammaParams default_normal_gamma_prior(const Batch& first, double alpha) {
    if (first.empty()) throw DomainError("default prior needs a non-empty batch");
    check_exponent(alpha, "alpha", true);
    double mean_t = 0.0;
    double mean_f = 0.0;
    for (const auto& o : first.observations()) {
        mean_t += o.t;
        mean_f += o.f;
    }
    mean_t /= static_cast<double>(first.size());
    mean_f /= static_cast<double>(first.size());
    return {mean_t * std::pow(mean_f, -alpha), 1.0, 1.0, 1.0};
}

}  // namespace parsplit
