#pragma once

#include <cstdint>
#include <random>

#include "parsplit/inference.hpp"

namespace parsplit {

/// Every sampler takes its generator explicitly; runs own their engine.
using Rng = std::mt19937_64;

double sample_normal(Rng& rng, double mean, double sd);
/// Gamma draw with shape and RATE (mean shape / rate).
double sample_gamma(Rng& rng, double shape, double rate);
/// Beta draw strictly inside (0, 1).
double sample_beta(Rng& rng, const BetaParams& params);

}  // namespace parsplit
