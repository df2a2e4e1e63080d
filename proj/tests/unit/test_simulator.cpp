#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <parsplit/simulator.hpp>

#include "support/oracles.hpp"

using namespace parsplit;

namespace {

const UnitParams kUnit{30.0, 2.0, 0.9, 0.8};

}  // namespace

TEST(SampleCompletion, DeterministicLimit) {
    Rng rng(1);
    EXPECT_NEAR(sample_completion(0.5, {30.0, 1e-12, 1.0, 0.5}, rng), 15.0, 1e-9);
}

TEST(SampleCompletion, ReproducibleSequence) {
    Rng a(42);
    Rng b(42);
    for (int k = 0; k < 100; ++k) EXPECT_EQ(sample_completion(0.3, kUnit, a), sample_completion(0.3, kUnit, b));
}

TEST(SampleCompletion, RejectsBadShare) {
    Rng rng(1);
    EXPECT_THROW(sample_completion(0.0, kUnit, rng), DomainError);
    EXPECT_THROW(sample_completion(1.01, kUnit, rng), DomainError);
}

TEST(SampleCompletion, MomentsMatchModel) {
    Rng rng(2024);
    const std::size_t n = 1'000'000;
    const double mean_model = std::pow(0.5, 0.9) * 30.0;
    const double sd_model = std::pow(0.5, 0.8) * 2.0;
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double d = sample_completion(0.5, kUnit, rng) - mean_model;
        s1 += d;
        s2 += d * d;
    }
    const double mean = s1 / n;
    const double var = (s2 - n * mean * mean) / (n - 1);
    EXPECT_NEAR(mean, 0.0, 3.0 * std::sqrt(var / n));
    EXPECT_NEAR(std::sqrt(var) / sd_model, 1.0, 0.01);
    EXPECT_NEAR(mean_model, 16.08, 0.005);
    EXPECT_NEAR(sd_model, 1.149, 0.0005);
}

TEST(SampleCompletion, KolmogorovSmirnov) {
    Rng rng(7);
    const std::size_t n = 10'000;
    const double share = 0.35;
    std::vector<double> x(n);
    for (auto& v : x) v = sample_completion(share, kUnit, rng);
    std::sort(x.begin(), x.end());
    const double m = kUnit.scaled_mean(share);
    const double s = kUnit.scaled_sd(share);
    double d = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double cdf = oracle::normal_cdf((x[k] - m) / s);
        d = std::max({d, (k + 1.0) / n - cdf, cdf - static_cast<double>(k) / n});
    }
    EXPECT_LT(d, 1.9495 / std::sqrt(static_cast<double>(n)));
}

TEST(SplitPolicyType, Validation) {
    EXPECT_THROW(SplitPolicy::fixed(0.0).validate(), DomainError);
    EXPECT_THROW(SplitPolicy::uniform(0.5, 0.4).validate(), DomainError);
    EXPECT_THROW(SplitPolicy::uniform(0.0, 0.4).validate(), DomainError);
    EXPECT_THROW(SplitPolicy::cyclic({}).validate(), DomainError);
    EXPECT_THROW(SplitPolicy::cyclic({0.5, 1.5}).validate(), DomainError);
    EXPECT_NO_THROW(SplitPolicy::fixed(1.0).validate());
}

TEST(GenerateTrace, SingleFixedRecord) {
    Rng rng(1);
    const auto t = generate_trace(1, SplitPolicy::fixed(0.5), kUnit, rng);
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t[0].f, 0.5);
}

TEST(GenerateTrace, CyclicShares) {
    Rng rng(1);
    const auto t = generate_trace(4, SplitPolicy::cyclic({0.2, 0.8}), kUnit, rng);
    ASSERT_EQ(t.size(), 4u);
    EXPECT_EQ(t[0].f, 0.2);
    EXPECT_EQ(t[1].f, 0.8);
    EXPECT_EQ(t[2].f, 0.2);
    EXPECT_EQ(t[3].f, 0.8);
}

TEST(GenerateTrace, UniformShareMean) {
    Rng rng(3);
    const std::size_t n = 10'000;
    const auto t = generate_trace(n, SplitPolicy::uniform(0.1, 0.9), kUnit, rng);
    double sum = 0.0;
    for (const auto& r : t) {
        ASSERT_GE(r.f, 0.1);
        ASSERT_LE(r.f, 0.9);
        sum += r.f;
    }
    const double se = 0.8 / std::sqrt(12.0 * n);
    EXPECT_NEAR(sum / n, 0.5, 3.0 * se);
}

TEST(GenerateTrace, DeterministicAndValidated) {
    Rng a(9);
    Rng b(9);
    EXPECT_EQ(generate_trace(50, SplitPolicy::uniform(0.1, 0.9), kUnit, a),
              generate_trace(50, SplitPolicy::uniform(0.1, 0.9), kUnit, b));
    EXPECT_THROW(generate_trace(0, SplitPolicy::fixed(0.5), kUnit, a), DomainError);
    // The complement of share 1 is an idle unit, which has no observation.
    EXPECT_THROW(generate_trace(1, SplitPolicy::fixed(1.0), kUnit, a, nullptr, true), DomainError);
}

TEST(GenerateTrace, ComplementStoresOwnShare) {
    Rng rng(1);
    const auto t = generate_trace(2, SplitPolicy::cyclic({0.25, 0.6}), kUnit, rng, nullptr, true);
    EXPECT_EQ(t[0].f, 0.75);
    EXPECT_EQ(t[1].f, 1.0 - 0.6);
}

TEST(GenerateTrace, CountsNegativeDrawsWithoutTruncating) {
    Rng rng(5);
    SimulationStats stats;
    const auto t = generate_trace(1000, SplitPolicy::fixed(1.0), {0.5, 1.0, 0.5, 0.5}, rng, &stats);
    const auto negatives = std::count_if(t.begin(), t.end(), [](const auto& r) { return r.t < 0.0; });
    EXPECT_GT(negatives, 0);
    EXPECT_EQ(stats.negative_draws, static_cast<std::size_t>(negatives));
}

TEST(TraceFile, RoundTripIsExact) {
    Rng rng(11);
    const auto records = generate_trace(100, SplitPolicy::uniform(0.01, 1.0), kUnit, rng);
    std::stringstream ss;
    save_trace(records, ss);
    EXPECT_EQ(load_trace(ss), records);

    const auto path = std::filesystem::temp_directory_path() / "parsplit_trace_roundtrip.csv";
    save_trace(records, path);
    EXPECT_EQ(load_trace(path), records);
    std::filesystem::remove(path);
}

TEST(TraceFile, BadShareNamesLine) {
    std::istringstream in("f,t\n0.5,10\n1.5,12\n");
    try {
        load_trace(in);
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

TEST(TraceFile, HeaderOnlyIsEmpty) {
    std::istringstream header_only("f,t\n");
    EXPECT_TRUE(load_trace(header_only).empty());
    std::istringstream nothing("");
    EXPECT_TRUE(load_trace(nothing).empty());
}

TEST(TraceFile, MalformedRows) {
    std::istringstream wrong_header("t,f\n0.5,1\n");
    EXPECT_THROW(load_trace(wrong_header), InputError);
    std::istringstream extra_field("f,t\n0.5,1,2\n");
    EXPECT_THROW(load_trace(extra_field), InputError);
    std::istringstream not_number("f,t\n0.5,abc\n");
    EXPECT_THROW(load_trace(not_number), InputError);
    std::istringstream infinite("f,t\n0.5,inf\n");
    EXPECT_THROW(load_trace(infinite), InputError);
    EXPECT_THROW(load_trace(std::filesystem::path("/nonexistent/trace.csv")), InputError);
}
