#pragma once

// Batched Gibbs sampler over (mu, lambda, alpha, beta) for one unit. Each
// round collects a batch, sweeps the conditionals a fixed number of times
// against the round's prior, then promotes the last posteriors to priors
// for the next round.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parsplit/completion_model.hpp"
#include "parsplit/inference.hpp"
#include "parsplit/random.hpp"

namespace parsplit {

struct GibbsConfig {
    std::size_t batch_size = 20;
    std::size_t inner_iterations = 10;
    std::size_t max_batches = 100;
    std::uint64_t rng_seed = 0;
    /// Clamp infeasible Beta moment fits instead of failing.
    bool clamp_moments = true;
    QuadratureConfig quad{};

    void validate() const;
};

struct GibbsPriors {
    /// Built from the first batch when absent; see default_normal_gamma_prior.
    std::optional<NormalGammaParams> normal_gamma;
    BetaParams alpha{2.0, 2.0};
    BetaParams beta{2.0, 2.0};
};

struct GibbsState {
    // Priors of the current round.
    NormalGammaParams ng;
    BetaParams alpha_prior;
    BetaParams beta_prior;
    // Posteriors from the most recent sweep.
    NormalGammaParams ng_post;
    BetaParams alpha_post;
    BetaParams beta_post;

    double mu_sample = 0.0;
    double lambda_sample = 1.0;
    double alpha_sample = 0.5;
    double beta_sample = 0.5;
    std::size_t batch_index = 0;

    double sigma() const;
    UnitParams estimate() const;
    void validate() const;

    friend bool operator==(const GibbsState&, const GibbsState&) = default;
};

struct GibbsEvent {
    std::size_t batch_index = 0;
    std::string message;
};

/// Starting state: exponents drawn from their priors, (mu, lambda) prior
/// taken from `priors` or derived from `first`.
GibbsState initial_state(const GibbsPriors& priors, const Batch& first, Rng& rng);

/// Beta fit of an exponent's posterior moments as the sweep performs it:
/// clamps and records an event when cfg.clamp_moments is set, otherwise
/// lets MomentInfeasibleError through.
BetaParams fit_exponent_posterior(const Moments& m, const GibbsConfig& cfg,
                                  std::size_t batch_index, const char* name,
                                  std::vector<GibbsEvent>* events);

/// One pass of the conditionals, in order: Normal-Gamma update at the
/// current exponents, lambda ~ Gamma(nu_N, rate psi_N),
/// mu ~ N(mu_N, 1 / (kappa_N lambda)), then alpha and beta each from the
/// Beta fitted to the moments of their conditional posterior.
GibbsState gibbs_sweep(const GibbsState& state, const Batch& batch, const GibbsConfig& cfg,
                       Rng& rng, std::vector<GibbsEvent>* events = nullptr);

/// Next round's state: posteriors become priors.
GibbsState promote(const GibbsState& state);

struct TracePoint {
    std::size_t batch_index = 0;
    std::size_t cumulative_observations = 0;
    double log_likelihood = 0.0;  // full form, current batch, current draws
    double mu = 0.0;
    double sigma = 0.0;
    double alpha = 0.0;
    double beta = 0.0;

    friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

/// Yields observations until exhausted.
using ObservationSource = std::function<std::optional<Observation>()>;

ObservationSource vector_source(std::vector<Observation> observations);

struct GibbsResult {
    std::vector<TracePoint> trace;
    /// Absent when no batch was processed.
    std::optional<GibbsState> final_state;
    GibbsPriors priors;
    std::vector<GibbsEvent> events;
    std::size_t clamp_count = 0;
    bool aborted = false;
    std::string abort_reason;
};

/// Runs rounds until max_batches or the source runs dry. A short final
/// batch is used when it holds at least two observations. A numerical
/// failure ends the run early with the trace so far and `aborted` set.
GibbsResult run(const ObservationSource& source, const GibbsConfig& cfg,
                const GibbsPriors& priors, Rng& rng);

/// CSV with header `batch,n_obs,loglik,mu,sigma,alpha,beta`.
void write_trace_csv(std::ostream& out, std::span<const TracePoint> trace);
/// One JSON object per line with the CSV's keys.
void write_trace_jsonl(std::ostream& out, std::span<const TracePoint> trace);
/// Parses write_trace_csv output; throws InputError naming the line.
std::vector<TracePoint> read_trace_csv(std::istream& in);

struct ConvergenceSummary {
    std::size_t window = 0;
    double leading_median = 0.0;
    double trailing_median = 0.0;
    bool improved() const { return trailing_median > leading_median; }
};

/// Medians of the log-likelihood over the first and last `window` points.
ConvergenceSummary summarize_convergence(std::span<const TracePoint> trace,
                                         std::size_t window = 10);

}  // namespace parsplit
