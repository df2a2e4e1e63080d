#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace parsplit::cli {

// Each command writes its files under cfg.out_dir, reports on `out`,
// and returns an ExitStatus.

/// frontier.csv / frontier.json plus any requested QoS selections.
int cmd_frontier(const RunConfig& cfg, std::ostream& out, std::ostream& err);
/// One unit's synthetic trace to cfg.trace_path (default out/trace.csv).
int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
/// Gibbs inference on one unit's trace: estimates.json, gibbs_trace.csv,
/// gibbs_trace.jsonl.
int cmd_infer(const RunConfig& cfg, std::ostream& out, std::ostream& err);
/// convergence.csv (n_obs, loglik) and convergence.json from a Gibbs trace.
int cmd_convergence(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full command line: `<command> [--config F] [--seed N] [--out DIR]
/// [--trace F] [--budget-mu X] [--budget-var X]`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace parsplit::cli
