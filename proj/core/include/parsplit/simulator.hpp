#pragma once

// Synthetic measurement streams drawn from the per-unit Gaussian model,
// and the two-column CSV trace format shared with real measurements.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "parsplit/completion_model.hpp"
#include "parsplit/inference.hpp"
#include "parsplit/random.hpp"

namespace parsplit {

using TraceRecord = Observation;

/// How successive workload shares are chosen.
class SplitPolicy {
public:
    struct Fixed {
        double f;
    };
    struct Uniform {
        double lo;
        double hi;
    };
    struct Cyclic {
        std::vector<double> values;
    };

    static SplitPolicy fixed(double f) { return SplitPolicy(Fixed{f}); }
    static SplitPolicy uniform(double lo, double hi) { return SplitPolicy(Uniform{lo, hi}); }
    static SplitPolicy cyclic(std::vector<double> values) {
        return SplitPolicy(Cyclic{std::move(values)});
    }

    /// Throws DomainError unless every share the policy can produce lies
    /// in (0, 1].
    void validate() const;
    /// Share for the `index`-th record; only Uniform consumes randomness.
    double next(std::size_t index, Rng& rng) const;

    const std::variant<Fixed, Uniform, Cyclic>& kind() const noexcept { return kind_; }

private:
    explicit SplitPolicy(std::variant<Fixed, Uniform, Cyclic> kind) : kind_(std::move(kind)) {}
    std::variant<Fixed, Uniform, Cyclic> kind_;
};

/// One draw from N(share^alpha mu, (share^beta sigma)^2). Negative draws
/// are returned as is.
double sample_completion(double share, const UnitParams& u, Rng& rng);

struct SimulationStats {
    std::size_t negative_draws = 0;
};

/// `n` records with shares from `policy`. With `complement` set the unit
/// is the j side: it records and is timed at 1 - f.
std::vector<TraceRecord> generate_trace(std::size_t n, const SplitPolicy& policy,
                                        const UnitParams& u, Rng& rng,
                                        SimulationStats* stats = nullptr,
                                        bool complement = false);

/// CSV with header `f,t`; values at 17 significant digits.
void save_trace(std::span<const TraceRecord> records, std::ostream& out);
void save_trace(std::span<const TraceRecord> records, const std::filesystem::path& path);

/// Parses a trace; a header-only or empty file gives no records. Throws
/// InputError naming the offending line.
std::vector<TraceRecord> load_trace(std::istream& in);
std::vector<TraceRecord> load_trace(const std::filesystem::path& path);

}  // namespace parsplit
