#include "parsplit/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "parsplit/errors.hpp"

namespace parsplit {

void GibbsConfig::validate() const {
    std::ostringstream msg;
    if (batch_size < 1) {
        msg << "gibbs batch_size must be at least 1";
    } else if (inner_iterations < 1) {
        msg << "gibbs inner_iterations must be at least 1";
    } else {
        quad.validate();
        return;
    }
    throw DomainError(msg.str());
}

double GibbsState::sigma() const { return std::sqrt(1.0 / lambda_sample); }

UnitParams GibbsState::estimate() const {
    return {mu_sample, sigma(), alpha_sample, beta_sample};
}

void GibbsState::validate() const {
    ng.validate();
    alpha_prior.validate();
    beta_prior.validate();
    if (!(lambda_sample > 0.0)) throw DomainError("gibbs state: lambda sample must be positive");
    if (!(alpha_sample > 0.0 && alpha_sample < 1.0) || !(beta_sample > 0.0 && beta_sample < 1.0)) {
        throw DomainError("gibbs state: exponent samples must lie in (0, 1)");
    }
}

GibbsState initial_state(const GibbsPriors& priors, const Batch& first, Rng& rng) {
    GibbsState s;
    s.alpha_prior = priors.alpha;
    s.beta_prior = priors.beta;
    s.alpha_sample = sample_beta(rng, priors.alpha);
    s.beta_sample = sample_beta(rng, priors.beta);
    s.ng = priors.normal_gamma ? *priors.normal_gamma
                               : default_normal_gamma_prior(first, s.alpha_sample);
    s.ng.validate();
    s.ng_post = s.ng;
    s.alpha_post = s.alpha_prior;
    s.beta_post = s.beta_prior;
    s.mu_sample = s.ng.mu0;
    s.lambda_sample = s.ng.nu0 / s.ng.psi0;
    return s;
}

BetaParams fit_exponent_posterior(const Moments& m, const GibbsConfig& cfg,
                                  std::size_t batch_index, const char* name,
                                  std::vector<GibbsEvent>* events) {
    if (!cfg.clamp_moments) return beta_fit_from_moments(m.mean, m.variance);
    const auto fit = beta_fit_clamped(m.mean, m.variance);
    if (fit.clamped && events != nullptr) {
        std::ostringstream msg;
        msg << "clamped " << name << " posterior variance " << m.variance << " (mean " << m.mean
            << ") to 0.999 m(1-m)";
        events->push_back({batch_index, msg.str()});
    }
    return fit.params;
}

GibbsState gibbs_sweep(const GibbsState& state, const Batch& batch, const GibbsConfig& cfg,
                       Rng& rng, std::vector<GibbsEvent>* events) {
    state.validate();
    if (batch.empty()) throw DomainError("gibbs sweep needs a non-empty batch");

    GibbsState next = state;
    next.ng_post = normal_gamma_update(state.ng, batch, state.alpha_sample, state.beta_sample);
    next.lambda_sample = sample_gamma(rng, next.ng_post.nu0, next.ng_post.psi0);
    next.mu_sample = sample_normal(rng, next.ng_post.mu0,
                                   1.0 / std::sqrt(next.ng_post.kappa0 * next.lambda_sample));

    const auto alpha_moments = posterior_moments(
        [&](double a) {
            return alpha_log_posterior_unnorm(a, batch, next.mu_sample, next.lambda_sample,
                                              next.beta_sample, state.alpha_prior);
        },
        cfg.quad);
    next.alpha_post = fit_exponent_posterior(alpha_moments, cfg, state.batch_index, "alpha", events);
    next.alpha_sample = sample_beta(rng, next.alpha_post);

    const auto beta_moments = posterior_moments(
        [&](double b) {
            return beta_log_posterior_unnorm(b, batch, next.mu_sample, next.lambda_sample,
                                             next.alpha_sample, state.beta_prior);
        },
        cfg.quad);
    next.beta_post = fit_exponent_posterior(beta_moments, cfg, state.batch_index, "beta", events);
    next.beta_sample = sample_beta(rng, next.beta_post);
    return next;
}

GibbsState promote(const GibbsState& state) {
    GibbsState next = state;
    next.ng = state.ng_post;
    next.alpha_prior = state.alpha_post;
    next.beta_prior = state.beta_post;
    next.batch_index = state.batch_index + 1;
    return next;
}

ObservationSource vector_source(std::vector<Observation> observations) {
    auto data = std::make_shared<std::vector<Observation>>(std::move(observations));
    auto pos = std::make_shared<std::size_t>(0);
    return [data, pos]() -> std::optional<Observation> {
        if (*pos >= data->size()) return std::nullopt;
        return (*data)[(*pos)++];
    };
}

GibbsResult run(const ObservationSource& source, const GibbsConfig& cfg,
                const GibbsPriors& priors, Rng& rng) {
    GibbsResult result;
    result.priors = priors;
    if (cfg.max_batches == 0) return result;
    cfg.validate();
    priors.alpha.validate();
    priors.beta.validate();
    if (priors.normal_gamma) priors.normal_gamma->validate();

    std::optional<GibbsState> state;
    std::size_t seen = 0;
    for (std::size_t round = 0; round < cfg.max_batches; ++round) {
        std::vector<Observation> obs;
        obs.reserve(cfg.batch_size);
        while (obs.size() < cfg.batch_size) {
            auto o = source();
            if (!o) break;
            obs.push_back(*o);
        }
        if (obs.empty()) break;
        const bool partial = obs.size() < cfg.batch_size;
        if (partial && obs.size() < 2) {
            result.events.push_back(
                {round, "discarded final partial batch of " + std::to_string(obs.size()) +
                            " observation"});
            break;
        }
        const Batch batch(std::move(obs));
        seen += batch.size();

        try {
            if (!state) {
                state = initial_state(priors, batch, rng);
            } else {
                state = promote(*state);
            }
            const std::size_t events_before = result.events.size();
            for (std::size_t it = 0; it < cfg.inner_iterations; ++it) {
                state = gibbs_sweep(*state, batch, cfg, rng, &result.events);
            }
            result.clamp_count += result.events.size() - events_before;
            TracePoint point;
            point.batch_index = state->batch_index;
            point.cumulative_observations = seen;
            point.log_likelihood =
                log_likelihood(batch, state->mu_sample, state->lambda_sample, state->alpha_sample,
                               state->beta_sample, LikelihoodForm::full);
            point.mu = state->mu_sample;
            point.sigma = state->sigma();
            point.alpha = state->alpha_sample;
            point.beta = state->beta_sample;
            result.trace.push_back(point);
        } catch (const std::exception& e) {
            // Numerical and moment-fit failures are unrecoverable for this
            // run; keep what was computed.
            if (dynamic_cast<const NumericalError*>(&e) == nullptr &&
                dynamic_cast<const MomentInfeasibleError*>(&e) == nullptr) {
                throw;
            }
            result.aborted = true;
            result.abort_reason = "batch " + std::to_string(round) + ": " + e.what();
            break;
        }
        if (partial) break;
    }
    if (state && !result.trace.empty()) result.final_state = state;
    return result;
}

void write_trace_csv(std::ostream& out, std::span<const TracePoint> trace) {
    out << "batch,n_obs,loglik,mu,sigma,alpha,beta\n";
    out << std::setprecision(17);
    for (const auto& p : trace) {
        out << p.batch_index << ',' << p.cumulative_observations << ',' << p.log_likelihood << ','
            << p.mu << ',' << p.sigma << ',' << p.alpha << ',' << p.beta << '\n';
    }
}

void write_trace_jsonl(std::ostream& out, std::span<const TracePoint> trace) {
    for (const auto& p : trace) {
        const nlohmann::json rec = {{"batch", p.batch_index},   {"n_obs", p.cumulative_observations},
                                    {"loglik", p.log_likelihood}, {"mu", p.mu},
                                    {"sigma", p.sigma},          {"alpha", p.alpha},
                                    {"beta", p.beta}};
        out << rec.dump() << '\n';
    }
}

std::vector<TracePoint> read_trace_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<TracePoint> trace;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != "batch,n_obs,loglik,mu,sigma,alpha,beta") {
                throw InputError("line 1: expected gibbs trace header", line_no);
            }
            header_seen = true;
            continue;
        }
        const auto fields = csv::split(line);
        if (fields.size() != 7) {
            throw InputError("line " + std::to_string(line_no) + ": expected 7 fields", line_no);
        }
        TracePoint p;
        p.batch_index = csv::parse<std::size_t>(fields[0], line_no, "batch");
        p.cumulative_observations = csv::parse<std::size_t>(fields[1], line_no, "n_obs");
        p.log_likelihood = csv::parse<double>(fields[2], line_no, "loglik");
        p.mu = csv::parse<double>(fields[3], line_no, "mu");
        p.sigma = csv::parse<double>(fields[4], line_no, "sigma");
        p.alpha = csv::parse<double>(fields[5], line_no, "alpha");
        p.beta = csv::parse<double>(fields[6], line_no, "beta");
        trace.push_back(p);
    }
    return trace;
}

ConvergenceSummary summarize_convergence(std::span<const TracePoint> trace, std::size_t window) {
    if (trace.empty()) throw DomainError("convergence summary needs a non-empty trace");
    if (window == 0) throw DomainError("convergence window must be positive");
    const std::size_t w = std::min(window, trace.size());
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    std::vector<double> lead;
    std::vector<double> trail;
    for (std::size_t i = 0; i < w; ++i) {
        lead.push_back(trace[i].log_likelihood);
        trail.push_back(trace[trace.size() - w + i].log_likelihood);
    }
    return {w, median(std::move(lead)), median(std::move(trail))};
}

}  // namespace parsplit
