#include "cli/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

namespace parsplit::cli {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> names(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
        if (!names.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <class T>
void read(const json& obj, const char* key, T& target, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        target = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

UnitParams parse_unit(const json& obj, const std::string& where) {
    require_keys(obj, where, {"mu", "sigma", "alpha", "beta"});
    for (const char* key : {"mu", "sigma"}) {
        if (!obj.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
    }
    UnitParams u;
    read(obj, "mu", u.mu, where);
    read(obj, "sigma", u.sigma, where);
    read(obj, "alpha", u.alpha, where);
    read(obj, "beta", u.beta, where);
    return u;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

UnitParams parse_unit_or_file(const json& value, const std::string& where,
                              const std::filesystem::path& base) {
    if (value.is_string()) return load_estimates(resolve(base, value.get<std::string>()));
    return parse_unit(value, where);
}

BetaParams parse_beta(const json& obj, const std::string& where) {
    require_keys(obj, where, {"a", "b"});
    BetaParams p;
    read(obj, "a", p.shape_a, where);
    read(obj, "b", p.shape_b, where);
    return p;
}

GibbsPriors parse_priors(const json& obj, const std::string& where) {
    require_keys(obj, where, {"normal_gamma", "alpha", "beta"});
    GibbsPriors p;
    if (obj.contains("normal_gamma")) {
        const auto& ng = obj.at("normal_gamma");
        require_keys(ng, where + ".normal_gamma", {"mu0", "kappa0", "nu0", "psi0"});
        if (!ng.contains("mu0")) throw ConfigError(where + ".normal_gamma: missing 'mu0'");
        NormalGammaParams params;
        read(ng, "mu0", params.mu0, where);
        read(ng, "kappa0", params.kappa0, where);
        read(ng, "nu0", params.nu0, where);
        read(ng, "psi0", params.psi0, where);
        p.normal_gamma = params;
    }
    if (obj.contains("alpha")) p.alpha = parse_beta(obj.at("alpha"), where + ".alpha");
    if (obj.contains("beta")) p.beta = parse_beta(obj.at("beta"), where + ".beta");
    return p;
}

Unit parse_unit_name(const json& value, const std::string& where) {
    if (value == "i") return Unit::i;
    if (value == "j") return Unit::j;
    throw ConfigError(where + ": unit must be \"i\" or \"j\"");
}

SplitPolicy parse_policy(const json& obj, const std::string& where) {
    if (!obj.is_object() || !obj.contains("kind")) throw ConfigError(where + ": missing 'kind'");
    const std::string kind = obj.at("kind").get<std::string>();
    if (kind == "fixed") {
        require_keys(obj, where, {"kind", "f"});
        double f = 0.5;
        read(obj, "f", f, where);
        return SplitPolicy::fixed(f);
    }
    if (kind == "uniform") {
        require_keys(obj, where, {"kind", "lo", "hi"});
        double lo = 0.1;
        double hi = 0.9;
        read(obj, "lo", lo, where);
        read(obj, "hi", hi, where);
        return SplitPolicy::uniform(lo, hi);
    }
    if (kind == "cyclic") {
        require_keys(obj, where, {"kind", "values"});
        std::vector<double> values;
        read(obj, "values", values, where);
        return SplitPolicy::cyclic(std::move(values));
    }
    throw ConfigError(where + ": unknown policy kind '" + kind + "'");
}

}  // namespace

RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base);

UnitParams load_estimates(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open estimates file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("estimates file '" + path.string() + "': " + e.what());
    }
    const std::string where = path.string();
    UnitParams u;
    for (const char* key : {"mu", "sigma", "alpha", "beta"}) {
        if (!doc.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
    }
    read(doc, "mu", u.mu, where);
    read(doc, "sigma", u.sigma, where);
    read(doc, "alpha", u.alpha, where);
    read(doc, "beta", u.beta, where);
    return u;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path.string() + "': " + e.what());
    }
    try {
        return parse_config(doc, path.parent_path());
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path.string() + "': " + e.what());
    }
}

RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base) {
    require_keys(doc, "config",
                 {"seed", "system", "quadrature", "grid", "budgets", "gibbs", "priors", "simulate",
                  "infer", "convergence", "paths"});

    RunConfig cfg;
    read(doc, "seed", cfg.seed, "config");

    if (doc.contains("system")) {
        const auto& sys = doc.at("system");
        require_keys(sys, "system", {"unit_i", "unit_j"});
        if (!sys.contains("unit_i") || !sys.contains("unit_j")) {
            throw ConfigError("system: both unit_i and unit_j are required");
        }
        cfg.system = SystemParams{parse_unit_or_file(sys.at("unit_i"), "system.unit_i", base),
                                  parse_unit_or_file(sys.at("unit_j"), "system.unit_j", base)};
    }
    if (doc.contains("quadrature")) {
        const auto& q = doc.at("quadrature");
        require_keys(q, "quadrature", {"abs_tol", "max_levels", "tail_sigmas", "max_intervals"});
        read(q, "abs_tol", cfg.quad.abs_tol, "quadrature");
        read(q, "max_levels", cfg.quad.max_levels, "quadrature");
        read(q, "tail_sigmas", cfg.quad.tail_sigmas, "quadrature");
        read(q, "max_intervals", cfg.quad.max_intervals, "quadrature");
    }
    if (doc.contains("grid")) {
        const auto& g = doc.at("grid");
        require_keys(g, "grid", {"f_min", "f_max", "steps"});
        read(g, "f_min", cfg.grid.f_min, "grid");
        read(g, "f_max", cfg.grid.f_max, "grid");
        read(g, "steps", cfg.grid.steps, "grid");
    }
    if (doc.contains("budgets")) {
        const auto& b = doc.at("budgets");
        require_keys(b, "budgets", {"mu", "var"});
        if (b.contains("mu")) cfg.budget_mu = b.at("mu").get<double>();
        if (b.contains("var")) cfg.budget_var = b.at("var").get<double>();
    }
    if (doc.contains("gibbs")) {
        const auto& g = doc.at("gibbs");
        require_keys(g, "gibbs", {"batch_size", "inner_iterations", "max_batches", "clamp_moments"});
        read(g, "batch_size", cfg.gibbs.batch_size, "gibbs");
        read(g, "inner_iterations", cfg.gibbs.inner_iterations, "gibbs");
        read(g, "max_batches", cfg.gibbs.max_batches, "gibbs");
        read(g, "clamp_moments", cfg.gibbs.clamp_moments, "gibbs");
    }
    if (doc.contains("priors")) {
        const auto& p = doc.at("priors");
        require_keys(p, "priors", {"unit_i", "unit_j"});
        if (p.contains("unit_i")) cfg.priors_i = parse_priors(p.at("unit_i"), "priors.unit_i");
        if (p.contains("unit_j")) cfg.priors_j = parse_priors(p.at("unit_j"), "priors.unit_j");
    }
    if (doc.contains("simulate")) {
        const auto& s = doc.at("simulate");
        require_keys(s, "simulate", {"n", "unit", "params", "policy"});
        read(s, "n", cfg.simulate_n, "simulate");
        if (s.contains("unit")) cfg.simulate_unit = parse_unit_name(s.at("unit"), "simulate.unit");
        if (s.contains("params")) cfg.simulate_params = parse_unit(s.at("params"), "simulate.params");
        if (s.contains("policy")) cfg.policy = parse_policy(s.at("policy"), "simulate.policy");
    }
    if (doc.contains("infer")) {
        const auto& i = doc.at("infer");
        require_keys(i, "infer", {"unit"});
        if (i.contains("unit")) cfg.infer_unit = parse_unit_name(i.at("unit"), "infer.unit");
    }
    if (doc.contains("convergence")) {
        const auto& c = doc.at("convergence");
        require_keys(c, "convergence", {"window"});
        read(c, "window", cfg.convergence_window, "convergence");
    }
    if (doc.contains("paths")) {
        const auto& p = doc.at("paths");
        require_keys(p, "paths", {"trace", "out"});
        if (p.contains("trace")) cfg.trace_path = resolve(base, p.at("trace").get<std::string>());
        if (p.contains("out")) cfg.out_dir = resolve(base, p.at("out").get<std::string>());
    }
    return cfg;
}

void RunConfig::validate() const {
    try {
        if (system) system->validate();
        grid.validate();
        quad.validate();
        gibbs.validate();
        for (const auto* p : {&priors_i, &priors_j}) {
            if (p->normal_gamma) p->normal_gamma->validate();
            p->alpha.validate();
            p->beta.validate();
        }
        if (simulate_params) simulate_params->validate();
        policy.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (convergence_window == 0) throw ConfigError("convergence.window must be positive");
    if (!trace_path.empty() && !out_dir.empty() &&
        std::filesystem::weakly_canonical(trace_path) == std::filesystem::weakly_canonical(out_dir)) {
        throw ConfigError("trace path and output directory must differ");
    }
}

}  // namespace parsplit::cli
