#include "cli/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace parsplit::cli {

namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
    return out;
}

nlohmann::json unit_json(const UnitParams& u) {
    return {{"mu", u.mu}, {"sigma", u.sigma}, {"alpha", u.alpha}, {"beta", u.beta}};
}

const char* unit_name(Unit u) { return u == Unit::i ? "i" : "j"; }

// Maps library exceptions onto exit statuses.
template <class Body>
int guarded(std::ostream& err, Body body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const InfeasibleBudgetError& e) {
        err << "infeasible: " << e.what() << '\n';
        return kInputData;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return kInputData;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const MomentInfeasibleError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const DomainError& e) {
        err << "invalid parameters: " << e.what() << '\n';
        return kUsage;
    } catch (const fs::filesystem_error& e) {
        err << "input error: " << e.what() << '\n';
        return kInputData;
    }
}

}  // namespace

int cmd_frontier(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        cfg.validate();
        if (!cfg.system) throw ConfigError("frontier needs system.unit_i and system.unit_j");
        const auto points = efficient_frontier(sweep(*cfg.system, cfg.grid, cfg.quad));

        {
            auto csv = open_output(cfg.out_dir / "frontier.csv");
            write_frontier_csv(csv, points);
        }
        {
            auto js = open_output(cfg.out_dir / "frontier.json");
            write_frontier_json(js, points);
        }

        const auto frontier_size =
            std::count_if(points.begin(), points.end(), [](const auto& p) { return p.on_frontier; });
        double worst_negative = 0.0;
        for (const auto& p : points) {
            const auto nm = negative_mass(SplitFraction(p.f), *cfg.system);
            worst_negative = std::max({worst_negative, nm.unit_i, nm.unit_j});
        }
        out << std::setprecision(10);
        out << "points " << points.size() << ", on frontier " << frontier_size << '\n';
        out << "max negative mass " << worst_negative << '\n';
        if (cfg.budget_mu) {
            const auto p = min_variance_given_mu(points, *cfg.budget_mu);
            out << "min variance with mu <= " << *cfg.budget_mu << ": f = " << p.f
                << ", mu = " << p.mu_f << ", var = " << p.var_f << '\n';
        }
        if (cfg.budget_var) {
            const auto p = min_mu_given_variance(points, *cfg.budget_var);
            out << "min mu with var <= " << *cfg.budget_var << ": f = " << p.f
                << ", mu = " << p.mu_f << ", var = " << p.var_f << '\n';
        }
        return kSuccess;
    });
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        cfg.validate();
        if (cfg.simulate_n == 0) throw ConfigError("simulate.n must be at least 1");
        UnitParams unit;
        if (cfg.simulate_params) {
            unit = *cfg.simulate_params;
        } else if (cfg.system) {
            unit = cfg.simulate_unit == Unit::i ? cfg.system->unit_i : cfg.system->unit_j;
        } else {
            throw ConfigError("simulate needs simulate.params or system");
        }
        Rng rng(cfg.seed);
        SimulationStats stats;
        const auto records = generate_trace(cfg.simulate_n, cfg.policy, unit, rng, &stats,
                                            cfg.simulate_unit == Unit::j);
        const fs::path path = cfg.trace_path.empty() ? cfg.out_dir / "trace.csv" : cfg.trace_path;
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        save_trace(records, path);
        out << "wrote " << records.size() << " records for unit " << unit_name(cfg.simulate_unit)
            << " to " << path.string() << "; negative draws " << stats.negative_draws << '\n';
        return kSuccess;
    });
}

int cmd_infer(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        cfg.validate();
        if (cfg.trace_path.empty()) throw ConfigError("infer needs --trace or paths.trace");
        const auto records = load_trace(cfg.trace_path);
        if (records.empty()) throw InputError("trace '" + cfg.trace_path.string() + "' is empty");

        GibbsConfig gcfg = cfg.gibbs;
        gcfg.rng_seed = cfg.seed;
        Rng rng(gcfg.rng_seed);
        const auto result = run(vector_source(records), gcfg, cfg.priors_for(cfg.infer_unit), rng);
        for (const auto& e : result.events) err << "batch " << e.batch_index << ": " << e.message << '\n';

        {
            auto csv = open_output(cfg.out_dir / "gibbs_trace.csv");
            write_trace_csv(csv, result.trace);
            auto jsonl = open_output(cfg.out_dir / "gibbs_trace.jsonl");
            write_trace_jsonl(jsonl, result.trace);
        }
        if (!result.final_state) {
            if (result.aborted) {
                err << "numerical failure: " << result.abort_reason << '\n';
                return kNumerical;
            }
            throw InputError("trace yielded no usable batch");
        }

        const auto& s = *result.final_state;
        nlohmann::json doc = unit_json(s.estimate());
        doc["unit"] = unit_name(cfg.infer_unit);
        doc["seed"] = cfg.seed;
        doc["batches"] = result.trace.size();
        doc["observations"] = result.trace.back().cumulative_observations;
        doc["clamp_count"] = result.clamp_count;
        doc["aborted"] = result.aborted;
        doc["posterior"] = {
            {"normal_gamma",
             {{"mu0", s.ng_post.mu0}, {"kappa0", s.ng_post.kappa0}, {"nu0", s.ng_post.nu0},
              {"psi0", s.ng_post.psi0}}},
            {"alpha", {{"a", s.alpha_post.shape_a}, {"b", s.alpha_post.shape_b}}},
            {"beta", {{"a", s.beta_post.shape_a}, {"b", s.beta_post.shape_b}}},
        };
        {
            auto js = open_output(cfg.out_dir / "estimates.json");
            js << doc.dump(2) << '\n';
        }
        out << std::setprecision(10) << "unit " << unit_name(cfg.infer_unit) << ": mu = " << s.mu_sample
            << ", sigma = " << s.sigma() << ", alpha = " << s.alpha_sample << ", beta = " << s.beta_sample
            << " after " << result.trace.size() << " batches\n";
        if (result.aborted) {
            err << "numerical failure: " << result.abort_reason << '\n';
            return kNumerical;
        }
        return kSuccess;
    });
}

int cmd_convergence(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (cfg.convergence_window == 0) throw ConfigError("convergence.window must be positive");
        if (cfg.trace_path.empty()) throw ConfigError("convergence needs --trace or paths.trace");
        std::ifstream in(cfg.trace_path);
        if (!in) throw InputError("cannot open gibbs trace '" + cfg.trace_path.string() + "'");
        const auto trace = read_trace_csv(in);
        if (trace.empty()) throw InputError("gibbs trace is empty");
        for (std::size_t k = 1; k < trace.size(); ++k) {
            if (trace[k].cumulative_observations <= trace[k - 1].cumulative_observations) {
                throw InputError("gibbs trace n_obs not strictly increasing at row " +
                                 std::to_string(k + 1));
            }
        }
        const auto summary = summarize_convergence(trace, cfg.convergence_window);
        {
            auto csv = open_output(cfg.out_dir / "convergence.csv");
            csv << "n_obs,loglik\n" << std::setprecision(17);
            for (const auto& p : trace) csv << p.cumulative_observations << ',' << p.log_likelihood << '\n';
        }
        {
            const nlohmann::json doc = {{"window", summary.window},
                                        {"leading_median", summary.leading_median},
                                        {"trailing_median", summary.trailing_median},
                                        {"improved", summary.improved()}};
            auto js = open_output(cfg.out_dir / "convergence.json");
            js << doc.dump(2) << '\n';
        }
        out << std::setprecision(10) << "window " << summary.window << ": leading median "
            << summary.leading_median << ", trailing median " << summary.trailing_median
            << (summary.improved() ? " (improved)" : " (not improved)") << '\n';
        return kSuccess;
    });
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayesian workload-split inference and mean-variance frontier"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string trace;
    std::optional<double> budget_mu;
    std::optional<double> budget_var;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration file");
        sub->add_option("--seed", seed, "random seed (overrides config)");
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--trace", trace, "trace file (overrides config)");
    };
    auto* frontier = app.add_subcommand("frontier", "sweep f and extract the efficient frontier");
    add_common(frontier);
    frontier->add_option("--budget-mu", budget_mu, "expected-time budget");
    frontier->add_option("--budget-var", budget_var, "variance budget");
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic trace for one unit");
    add_common(simulate);
    auto* infer = app.add_subcommand("infer", "Gibbs inference of one unit's parameters");
    add_common(infer);
    auto* convergence = app.add_subcommand("convergence", "log-likelihood series of a Gibbs trace");
    add_common(convergence);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
            return kSuccess;
        }
        err << e.what() << '\n' << app.help();
        return kUsage;
    }

    RunConfig cfg;
    if (!config_path.empty()) {
        try {
            cfg = load_config(config_path);
        } catch (const ConfigError& e) {
            err << "config error: " << e.what() << '\n';
            return kUsage;
        }
    }
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!trace.empty()) cfg.trace_path = trace;
    if (budget_mu) cfg.budget_mu = budget_mu;
    if (budget_var) cfg.budget_var = budget_var;

    if (frontier->parsed()) return cmd_frontier(cfg, out, err);
    if (simulate->parsed()) return cmd_simulate(cfg, out, err);
    if (infer->parsed()) return cmd_infer(cfg, out, err);
    return cmd_convergence(cfg, out, err);
}

}  // namespace parsplit::cli
