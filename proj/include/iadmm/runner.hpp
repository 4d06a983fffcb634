#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "iadmm/config.hpp"
#include "iadmm/duality.hpp"
#include "iadmm/trace.hpp"

namespace iadmm {

/// Process exit codes of the command-line runner.
enum ExitCode : int { kExitConverged = 0, kExitBudget = 1, kExitInput = 2, kExitSolver = 3 };

struct RunResult {
  SolveTrace trace;
  std::optional<DualityReport> report;  // two-function problems
  double consensus_residual = 0.0;      // consensus problems
  int exit_code = kExitConverged;
};

/// Runs the configured solver. Throws InputError / SubproblemFailure.
RunResult run(const RunConfig& config);

/// Human-readable summary of a finished run.
std::string summarize(const RunConfig& config, const RunResult& result);

/// Max deviation between the inertial ADMM and inertial Douglas-Rachford
/// sequences (y, v, w) for k >= 2, with w^0, w^1 built from the ADMM start.
struct CompareResult {
  long iterations = 0;
  double max_dev_y = 0.0;
  double max_dev_v = 0.0;
  double max_dev_w = 0.0;
  double max_dev() const;
};
CompareResult compare_admm_dr(const RunConfig& config);

struct SweepPoint {
  double alpha = 0.0;
  double lambda = 0.0;
  bool feasible = false;
  std::string status;  // converged, budget, infeasible, failed
  long iterations = 0;
  double gap = 0.0;
  double coupling = 0.0;
};

/// Parses "alpha=a1,a2,...;lambda=l1,l2,..." (lambda may be given as
/// "lambda_frac=" fractions of the maximal relaxation). Throws ParseError.
struct SweepGrid {
  std::vector<double> alphas;
  std::vector<double> lambdas;
  bool lambda_is_fraction = false;
};
SweepGrid parse_sweep(const std::string& spec);

/// Runs every grid point concurrently with the base configuration.
std::vector<SweepPoint> sweep(const RunConfig& config, const SweepGrid& grid);

/// Entry point of the command-line tool; returns the exit code.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace iadmm
