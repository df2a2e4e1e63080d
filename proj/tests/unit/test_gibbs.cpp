#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>
#include <parsplit/gibbs.hpp>
#include <parsplit/simulator.hpp>

using namespace parsplit;

namespace {

const UnitParams kTruth{30.0, 2.0, 0.9, 0.8};

std::vector<Observation> truth_trace(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    return generate_trace(n, SplitPolicy::uniform(0.1, 0.9), kTruth, rng);
}

}  // namespace

TEST(GibbsConfigType, Validation) {
    GibbsConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.batch_size = 0;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg = {};
    cfg.inner_iterations = 0;
    EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(GibbsSweep, BitDeterministicForSeed) {
    const Batch batch(truth_trace(20, 1));
    GibbsConfig cfg;
    auto once = [&] {
        Rng rng(77);
        auto s = initial_state({}, batch, rng);
        for (int k = 0; k < 5; ++k) s = gibbs_sweep(s, batch, cfg, rng);
        return s;
    };
    EXPECT_EQ(once(), once());
}

TEST(GibbsSweep, SamplesStayInSupport) {
    const Batch batch(truth_trace(20, 2));
    GibbsConfig cfg;
    Rng rng(3);
    auto s = initial_state({}, batch, rng);
    for (int k = 0; k < 200; ++k) {
        s = gibbs_sweep(s, batch, cfg, rng);
        ASSERT_GT(s.lambda_sample, 0.0);
        ASSERT_GT(s.alpha_sample, 0.0);
        ASSERT_LT(s.alpha_sample, 1.0);
        ASSERT_GT(s.beta_sample, 0.0);
        ASSERT_LT(s.beta_sample, 1.0);
    }
}

TEST(GibbsSweep, UnitSharesConcentrateAtSampleMean) {
    // At f = 1 the exponents drop out and mu | data is the conjugate
    // Normal posterior around the sample mean.
    Rng gen(5);
    std::vector<Observation> obs;
    double sum = 0.0;
    for (int k = 0; k < 10000; ++k) {
        obs.push_back({1.0, sample_normal(gen, 12.0, 3.0)});
        sum += obs.back().t;
    }
    const double mean = sum / obs.size();
    const Batch batch(obs);
    GibbsConfig cfg;
    Rng rng(6);
    GibbsPriors priors;
    priors.normal_gamma = NormalGammaParams{0.0, 1e-3, 1.0, 1.0};
    auto s = initial_state(priors, batch, rng);
    for (int k = 0; k < 20; ++k) s = gibbs_sweep(s, batch, cfg, rng);
    const double posterior_sd = 3.0 / std::sqrt(10000.0);
    EXPECT_NEAR(s.mu_sample, mean, 4.0 * posterior_sd);
    EXPECT_NEAR(s.sigma(), 3.0, 0.1);
}

TEST(GibbsSweep, RejectsEmptyBatch) {
    const Batch batch(truth_trace(5, 9));
    Rng rng(1);
    const auto s = initial_state({}, batch, rng);
    EXPECT_THROW(gibbs_sweep(s, Batch{}, {}, rng), DomainError);
}

TEST(FitExponentPosterior, ClampsAndRecords) {
    GibbsConfig cfg;
    std::vector<GibbsEvent> events;
    const Moments infeasible{0.3, 0.3};
    const auto p = fit_exponent_posterior(infeasible, cfg, 4, "alpha", &events);
    EXPECT_NEAR(p.mean(), 0.3, 1e-12);
    EXPECT_NEAR(p.variance(), 0.999 * 0.3 * 0.7, 1e-12);
    ASSERT_EQ(events.size(), 1u);
    EXPECT_EQ(events[0].batch_index, 4u);
    EXPECT_NE(events[0].message.find("alpha"), std::string::npos);

    events.clear();
    fit_exponent_posterior({0.5, 0.05}, cfg, 0, "beta", &events);
    EXPECT_TRUE(events.empty());
}

TEST(FitExponentPosterior, StrictModeThrows) {
    GibbsConfig cfg;
    cfg.clamp_moments = false;
    EXPECT_THROW(fit_exponent_posterior({0.3, 0.3}, cfg, 0, "alpha", nullptr),
                 MomentInfeasibleError);
}

TEST(Promote, PosteriorBecomesPrior) {
    const Batch batch(truth_trace(20, 4));
    Rng rng(8);
    auto s = gibbs_sweep(initial_state({}, batch, rng), batch, {}, rng);
    const auto p = promote(s);
    EXPECT_EQ(p.ng, s.ng_post);
    EXPECT_EQ(p.alpha_prior, s.alpha_post);
    EXPECT_EQ(p.beta_prior, s.beta_post);
    EXPECT_EQ(p.batch_index, s.batch_index + 1);
    EXPECT_EQ(p.mu_sample, s.mu_sample);
}

TEST(GibbsRun, ZeroBatchesReturnsEmptyResult) {
    GibbsConfig cfg;
    cfg.max_batches = 0;
    Rng rng(1);
    const auto r = run(vector_source(truth_trace(40, 1)), cfg, {}, rng);
    EXPECT_TRUE(r.trace.empty());
    EXPECT_FALSE(r.final_state.has_value());
    EXPECT_FALSE(r.aborted);
}

TEST(GibbsRun, PartialBatchPolicy) {
    GibbsConfig cfg;
    cfg.batch_size = 10;
    cfg.inner_iterations = 2;
    {
        Rng rng(1);
        const auto r = run(vector_source(truth_trace(21, 1)), cfg, {}, rng);
        ASSERT_EQ(r.trace.size(), 2u);
        EXPECT_EQ(r.trace.back().cumulative_observations, 20u);
        ASSERT_FALSE(r.events.empty());
        EXPECT_NE(r.events.back().message.find("discarded"), std::string::npos);
    }
    {
        Rng rng(1);
        const auto r = run(vector_source(truth_trace(23, 1)), cfg, {}, rng);
        ASSERT_EQ(r.trace.size(), 3u);
        EXPECT_EQ(r.trace.back().cumulative_observations, 23u);
    }
}

TEST(GibbsRun, StopsAtMaxBatches) {
    GibbsConfig cfg;
    cfg.max_batches = 3;
    cfg.inner_iterations = 2;
    Rng rng(1);
    const auto r = run(vector_source(truth_trace(200, 1)), cfg, {}, rng);
    ASSERT_EQ(r.trace.size(), 3u);
    for (std::size_t k = 0; k < r.trace.size(); ++k) {
        EXPECT_EQ(r.trace[k].batch_index, k);
        EXPECT_EQ(r.trace[k].cumulative_observations, 20 * (k + 1));
    }
}

TEST(GibbsRun, MatchesManualChaining) {
    const auto obs = truth_trace(60, 12);
    GibbsConfig cfg;
    cfg.inner_iterations = 3;
    Rng a(21);
    const auto r = run(vector_source(obs), cfg, {}, a);

    Rng b(21);
    std::optional<GibbsState> s;
    for (std::size_t k = 0; k < 3; ++k) {
        const Batch batch(std::vector<Observation>(obs.begin() + 20 * k, obs.begin() + 20 * (k + 1)));
        s = s ? promote(*s) : initial_state({}, batch, b);
        for (int it = 0; it < 3; ++it) s = gibbs_sweep(*s, batch, cfg, b);
        EXPECT_EQ(r.trace[k].mu, s->mu_sample);
        EXPECT_EQ(r.trace[k].log_likelihood,
                  log_likelihood(batch, s->mu_sample, s->lambda_sample, s->alpha_sample,
                                 s->beta_sample, LikelihoodForm::full));
    }
    EXPECT_EQ(*r.final_state, *s);
}

TEST(GibbsRun, RecoversMeanOnOneSeed) {
    GibbsConfig cfg;
    cfg.max_batches = 50;
    Rng rng(1);
    const auto r = run(vector_source(truth_trace(1000, 1)), cfg, {}, rng);
    ASSERT_TRUE(r.final_state.has_value());
    EXPECT_FALSE(r.aborted);
    EXPECT_NEAR(r.final_state->mu_sample, kTruth.mu, 0.1 * kTruth.mu);
}

TEST(GibbsRun, AbortKeepsTraceSoFar) {
    GibbsConfig cfg;
    cfg.batch_size = 2;
    cfg.inner_iterations = 1;
    std::vector<Observation> obs = {{0.5, 10.0}, {0.6, 11.0}, {1.0, 1e200}, {1.0, 1.0}};
    GibbsPriors priors;
    priors.normal_gamma = NormalGammaParams{10.0, 1.0, 1.0, 1.0};
    Rng rng(2);
    const auto r = run(vector_source(obs), cfg, priors, rng);
    EXPECT_TRUE(r.aborted);
    EXPECT_EQ(r.trace.size(), 1u);
    EXPECT_NE(r.abort_reason.find("batch 1"), std::string::npos);
}

TEST(TraceIo, CsvRoundTrip) {
    std::vector<TracePoint> trace = {{0, 20, -41.25, 29.5, 2.1, 0.91, 0.77},
                                     {1, 40, -39.0 / 7.0, 30.0 + 1e-13, 1.9, 0.89, 0.81}};
    std::stringstream ss;
    write_trace_csv(ss, trace);
    EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "batch,n_obs,loglik,mu,sigma,alpha,beta");
    EXPECT_EQ(read_trace_csv(ss), trace);
}

TEST(TraceIo, CsvErrorsNameTheLine) {
    std::istringstream in("batch,n_obs,loglik,mu,sigma,alpha,beta\n0,20,1,2,3,0.5,0.5\n1,40,x,2,3,0.5,0.5\n");
    try {
        read_trace_csv(in);
        FAIL();
    } catch (const InputError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    std::istringstream bad_header("f,t\n");
    EXPECT_THROW(read_trace_csv(bad_header), InputError);
}

TEST(TraceIo, JsonlKeys) {
    std::vector<TracePoint> trace = {{0, 20, -41.25, 29.5, 2.1, 0.91, 0.77}};
    std::stringstream ss;
    write_trace_jsonl(ss, trace);
    const auto rec = nlohmann::json::parse(ss.str());
    for (const char* key : {"batch", "n_obs", "loglik", "mu", "sigma", "alpha", "beta"}) {
        EXPECT_TRUE(rec.contains(key)) << key;
    }
    EXPECT_EQ(rec["n_obs"], 20);
    EXPECT_EQ(rec["loglik"], -41.25);
}

TEST(Convergence, MediansOfLeadingAndTrailingWindows) {
    std::vector<TracePoint> trace;
    for (int k = 0; k < 25; ++k) {
        TracePoint p;
        p.batch_index = k;
        p.cumulative_observations = 20 * (k + 1);
        p.log_likelihood = (k % 2 == 0) ? k : -k;
        trace.push_back(p);
    }
    const auto s = summarize_convergence(trace, 10);
    // Leading 0..9: {0,-1,2,-3,4,-5,6,-7,8,-9}; trailing 15..24.
    EXPECT_EQ(s.leading_median, 0.5 * (-1.0 + 0.0));
    EXPECT_EQ(s.trailing_median, 0.5 * (-15.0 + 16.0));
    EXPECT_TRUE(s.improved());

    const auto short_trace = summarize_convergence(std::span(trace).first(3), 10);
    EXPECT_EQ(short_trace.window, 3u);
    EXPECT_THROW(summarize_convergence({}, 10), DomainError);
}
