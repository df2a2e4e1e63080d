#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include <parsplit/frontier.hpp>
#include <parsplit/gibbs.hpp>
#include <parsplit/simulator.hpp>

namespace parsplit::cli {

/// Process exit statuses.
enum ExitStatus : int {
    kSuccess = 0,
    kUsage = 1,
    kInputData = 2,
    kNumerical = 3,
};

/// Bad or missing configuration; maps to kUsage.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Unit { i, j };

struct RunConfig {
    std::uint64_t seed = 0;

    // frontier
    std::optional<SystemParams> system;
    SweepGrid grid{};
    QuadratureConfig quad{};
    std::optional<double> budget_mu;
    std::optional<double> budget_var;

    // simulate
    std::size_t simulate_n = 1000;
    Unit simulate_unit = Unit::i;
    std::optional<UnitParams> simulate_params;
    SplitPolicy policy = SplitPolicy::uniform(0.1, 0.9);

    // infer
    Unit infer_unit = Unit::i;
    GibbsConfig gibbs{};
    GibbsPriors priors_i{};
    GibbsPriors priors_j{};

    // convergence
    std::size_t convergence_window = 10;

    std::filesystem::path trace_path;
    std::filesystem::path out_dir = ".";

    const GibbsPriors& priors_for(Unit u) const { return u == Unit::i ? priors_i : priors_j; }
    void validate() const;
};

/// Reads a JSON config. Relative paths inside it resolve against the
/// config file's directory. Throws ConfigError.
RunConfig load_config(const std::filesystem::path& path);

/// Parses the four estimate keys (mu, sigma, alpha, beta) of an infer
/// estimates file.
UnitParams load_estimates(const std::filesystem::path& path);

}  // namespace parsplit::cli
