#include "parsplit/random.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "parsplit/errors.hpp"

namespace parsplit {

double sample_normal(Rng& rng, double mean, double sd) {
    if (!(sd > 0.0) || !std::isfinite(sd) || !std::isfinite(mean)) {
        std::ostringstream msg;
        msg << "normal sampler needs finite mean and positive sd, got (" << mean << ", " << sd
            << ")";
        throw DomainError(msg.str());
    }
    // A fresh distribution per draw keeps all state in the engine.
    std::normal_distribution<double> dist(mean, sd);
    return dist(rng);
}

double sample_gamma(Rng& rng, double shape, double rate) {
    if (!(shape > 0.0 && rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
        std::ostringstream msg;
        msg << "gamma sampler needs positive shape and rate, got (" << shape << ", " << rate
            << ")";
        throw DomainError(msg.str());
    }
    std::gamma_distribution<double> dist(shape, 1.0 / rate);
    return dist(rng);
}

double sample_beta(Rng& rng, const BetaParams& params) {
    params.validate();
    constexpr int max_attempts = 64;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        const double x = sample_gamma(rng, params.shape_a, 1.0);
        const double y = sample_gamma(rng, params.shape_b, 1.0);
        const double sum = x + y;
        if (!(sum > 0.0)) continue;
        const double v = x / sum;
        if (v > 0.0 && v < 1.0) return v;
    }
    // Both shapes tiny: the mass sits on the endpoints.
    const double v = params.mean() < 0.5 ? std::numeric_limits<double>::min()
                                         : std::nextafter(1.0, 0.0);
    return v;
}

}  // namespace parsplit
