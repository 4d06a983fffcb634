#include "iadmm/runner.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "iadmm/admm.hpp"
#include "iadmm/consensus.hpp"
#include "iadmm/idr.hpp"

namespace iadmm {

namespace {

XUpdateStrategy make_strategy(const RunConfig& config) {
  const ProblemSpec& p = *config.problem;
  const double gamma = config.params.gamma;
  switch (config.strategy) {
    case StrategyChoice::ProxIdentity: return XUpdateStrategy::prox_identity(p, gamma);
    case StrategyChoice::QuadraticSolve: return XUpdateStrategy::quadratic_solve(p, gamma);
    case StrategyChoice::InnerIterative: return XUpdateStrategy::inner_iterative(p, gamma);
    case StrategyChoice::Auto: break;
  }
  return XUpdateStrategy::automatic(p, gamma);
}

std::pair<ResolventOp, ResolventOp> dr_operators(const ProblemSpec& p) {
  return {ResolventOp::composed_conjugate(p.f(), p.L()), ResolventOp::conjugate_subdifferential(p.g())};
}

BlockVectors negated(const BlockVectors& blocks) {
  BlockVectors out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) out.push_back(-b);
  return out;
}

double last_or_nan(const SolveTrace& t, double TraceRow::*field) {
  return t.rows.empty() ? std::nan("") : t.rows.back().*field;
}

}  // namespace

RunResult run(const RunConfig& config) {
  check_compatibility(config);
  RunResult result;
  const InertialParams& params = config.params;
  const StopRule& stop = config.stop;

  if (is_consensus(config.solver)) {
    const ConsensusProblem& cp = *config.consensus;
    const ConsensusInit init = ConsensusInit::zeros(cp.m(), cp.n());
    ConsensusState state;
    switch (config.solver) {
      case SolverKind::ConsensusSum1: result.trace = run_sum1(cp, params, init, stop, &state); break;
      case SolverKind::ConsensusSum2: result.trace = run_sum2(cp, params, init, stop, &state); break;
      default: result.trace = boyd_consensus(cp, params.gamma, init, stop, &state); break;
    }
    // Block optimality: -y_i in df_i(x), or y_i in df_i(x) when the blocks sit on the z side.
    const BlockVectors v = config.solver == SolverKind::ConsensusSum2 ? state.y : negated(state.y);
    result.consensus_residual = consensus_optimality_residual(result.trace.x, v, cp, kDefaultProbes, config.seed);
  } else {
    const ProblemSpec& p = *config.problem;
    const IadmmInit init = IadmmInit::zeros(p.L().rows());
    Vector x_final, dual_final;
    if (config.solver == SolverKind::Idr) {
      const auto [A, B] = dr_operators(p);
      const Vector w0 = init.y0 + params.gamma * init.z0;
      const Vector w1 = init.y1 + params.gamma * init.z1;
      result.trace = run_idr(A, B, params, w0, w1, stop);
      const SolveTrace& t = result.trace;
      x_final = A.inner_argmin(params.gamma, 2.0 * t.y - t.w);
      dual_final = t.y;
      result.trace.x = x_final;
    } else {
      const XUpdateStrategy strat = make_strategy(config);
      if (config.solver == SolverKind::ClassicalAdmm) {
        result.trace = classical_admm(p, params.gamma, params.lambda_schedule, init, strat, stop);
      } else {
        result.trace = run_iadmm(p, params, init, strat, stop);
      }
      x_final = result.trace.x;
      dual_final = result.trace.y;
    }
    result.report = duality_report(p, x_final, dual_final, config.seed);
  }
  result.exit_code = result.trace.status == RunStatus::Converged ? kExitConverged : kExitBudget;
  return result;
}

std::string summarize(const RunConfig& config, const RunResult& result) {
  const InertialParams& p = config.params;
  const SolveTrace& t = result.trace;
  std::ostringstream os;
  os << std::setprecision(10);
  os << "solver: " << to_string(config.solver) << '\n';
  os << "status: " << (t.status == RunStatus::Converged ? "converged" : "budget exhausted") << '\n';
  os << "iterations: " << t.iterations << '\n';
  os << "gamma: " << p.gamma << "  alpha: " << p.alpha_schedule.describe() << "  sigma: " << p.sigma
     << "  delta: " << p.delta << "  lambda: " << p.lambda_schedule.describe()
     << "  init_mode: " << to_string(p.init_mode) << '\n';
  const ValidationReport v = validate(p, std::max<long>(2, t.iterations + 1));
  os << "parameter check: " << (v.ok() ? "ok" : v.to_text()) << '\n';
  os << "final coupling: " << last_or_nan(t, &TraceRow::coupling) << '\n';
  os << "final zbar norm: " << last_or_nan(t, &TraceRow::zbar_norm) << '\n';
  os << "final dw norm: " << last_or_nan(t, &TraceRow::dw_norm) << '\n';
  os << "sum of squared dw: " << last_or_nan(t, &TraceRow::dw_sq_sum) << '\n';
  if (result.report) {
    os << result.report->to_text();
  } else {
    os << "consensus point: " << t.x.transpose() << '\n';
    os << "objective: " << config.consensus->objective(t.x) << '\n';
    os << "optimality residual: " << result.consensus_residual << '\n';
  }
  return os.str();
}

double CompareResult::max_dev() const { return std::max({max_dev_y, max_dev_v, max_dev_w}); }

CompareResult compare_admm_dr(const RunConfig& config) {
  if (!config.problem) throw InputError("compare mode needs a two-function problem");
  const ProblemSpec& p = *config.problem;
  const InertialParams& params = config.params;
  StopRule stop = config.stop;
  stop.tol = -1.0;  // fixed iteration count
  stop.keep_iterates = true;

  const IadmmInit init = IadmmInit::zeros(p.L().rows());
  const SolveTrace admm = run_iadmm(p, params, init, make_strategy(config), stop);
  const auto [A, B] = dr_operators(p);
  const SolveTrace dr = run_idr(A, B, params, init.y0 + params.gamma * init.z0,
                                init.y1 + params.gamma * init.z1, stop);

  CompareResult r;
  const std::size_t n = std::min(admm.rows.size(), dr.rows.size());
  for (std::size_t i = 0; i < n; ++i) {
    const TraceRow& a = admm.rows[i];
    const TraceRow& b = dr.rows[i];
    if (a.k < 2) continue;
    r.max_dev_y = std::max(r.max_dev_y, (a.y - b.y).norm());
    r.max_dev_v = std::max(r.max_dev_v, (a.v - b.v).norm());
    r.max_dev_w = std::max(r.max_dev_w, (a.w - b.w).norm());
    r.iterations = a.k;
  }
  return r;
}

namespace {

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    double v = 0.0;
    std::size_t used = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v)) {
      throw ParseError(0, key, "malformed number '" + item + "' in sweep");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ParseError(0, key, "empty sweep list");
  return out;
}

}  // namespace

SweepGrid parse_sweep(const std::string& spec) {
  SweepGrid grid;
  std::stringstream ss(spec);
  bool have_alpha = false, have_lambda = false;
  for (std::string part; std::getline(ss, part, ';');) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw ParseError(0, "sweep", "expected key=values, got '" + part + "'");
    const std::string key = part.substr(0, eq);
    const std::string values = part.substr(eq + 1);
    if (key == "alpha") {
      grid.alphas = parse_list(key, values);
      have_alpha = true;
    } else if (key == "lambda" || key == "lambda_frac") {
      if (have_lambda) throw ParseError(0, key, "lambda given twice");
      grid.lambdas = parse_list(key, values);
      grid.lambda_is_fraction = key == "lambda_frac";
      have_lambda = true;
    } else {
      throw ParseError(0, key, "unknown sweep key");
    }
  }
  if (!have_alpha) throw ParseError(0, "sweep", "missing alpha list");
  if (!have_lambda) {
    grid.lambdas = {0.9};
    grid.lambda_is_fraction = true;
  }
  return grid;
}

std::vector<SweepPoint> sweep(const RunConfig& config, const SweepGrid& grid) {
  std::vector<SweepPoint> points;
  std::vector<std::future<void>> jobs;
  for (double a : grid.alphas) {
    for (double l : grid.lambdas) points.push_back(SweepPoint{a, l});
  }
  for (auto& pt : points) {
    jobs.push_back(std::async(std::launch::async, [&config, &grid, &pt] {
      RunConfig local = config;
      local.stop.keep_iterates = false;
      InertialParams& p = local.params;
      try {
        const double lower = delta_lower_bound(pt.alpha, p.sigma);
        if (!(p.delta > lower)) p.delta = lower > 0.0 ? 1.5 * lower : 1.0;
        const double lam = grid.lambda_is_fraction ? pt.lambda * max_relaxation(pt.alpha, p.sigma, p.delta)
                                                   : pt.lambda;
        pt.lambda = lam;
        p.alpha = pt.alpha;
        p.alpha_schedule = Schedule::constant(pt.alpha);
        p.lambda_schedule = Schedule::constant(lam);
        p.lambda_lower = lam;
        if (!validate(p, local.stop.max_iters + 1).ok()) {
          pt.status = "infeasible";
          return;
        }
        pt.feasible = true;
        const RunResult r = run(local);
        pt.status = r.trace.status == RunStatus::Converged ? "converged" : "budget";
        pt.iterations = r.trace.iterations;
        if (!r.trace.rows.empty()) {
          pt.gap = r.trace.rows.back().gap;
          pt.coupling = r.trace.rows.back().coupling;
        }
      } catch (const std::exception&) {
        pt.status = pt.feasible ? "failed" : "infeasible";
      }
    }));
  }
  for (auto& j : jobs) j.get();
  return points;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_trace(const std::string& path, const SolveTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write trace file '" + path + "'");
  write_trace_csv(out, trace);
}

void write_summary_csv(const std::string& path, const RunConfig& config, const RunResult& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write summary file '" + path + "'");
  const SolveTrace& t = r.trace;
  out << "solver,status,iterations,coupling,zbar_norm,dw_norm";
  if (r.report) out << ',' << DualityReport::csv_header();
  else out << ",objective,optimality_residual";
  out << '\n';
  out << to_string(config.solver) << ',' << (t.status == RunStatus::Converged ? "converged" : "budget") << ','
      << t.iterations << ',' << format_real(last_or_nan(t, &TraceRow::coupling)) << ','
      << format_real(last_or_nan(t, &TraceRow::zbar_norm)) << ',' << format_real(last_or_nan(t, &TraceRow::dw_norm));
  if (r.report) out << ',' << r.report->to_csv_row();
  else out << ',' << format_real(config.consensus->objective(t.x)) << ',' << format_real(r.consensus_residual);
  out << '\n';
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inertial ADMM / Douglas-Rachford solver"};
  std::string config_path, output, solver, sweep_spec, summary_path;
  long max_iters = 0;
  double tol = -1.0;
  long seed = -1;
  bool compare = false;
  app.add_option("config", config_path, "problem configuration file")->required();
  app.add_option("-o,--output", output, "trace CSV path (overrides 'output')");
  app.add_option("--max-iters", max_iters, "iteration budget")->check(CLI::PositiveNumber);
  app.add_option("--tol", tol, "stopping tolerance")->check(CLI::NonNegativeNumber);
  app.add_option("--solver", solver, "iadmm|classical_admm|idr|consensus_sum1|consensus_sum2|boyd_consensus");
  app.add_option("--seed", seed, "seed for diagnostic probes")->check(CLI::NonNegativeNumber);
  app.add_option("--sweep", sweep_spec, "grid such as 'alpha=0,0.1;lambda_frac=0.5,0.9'");
  app.add_flag("--compare", compare, "compare inertial ADMM against inertial Douglas-Rachford");
  app.add_option("--summary", summary_path, "write a one-row summary CSV");

  std::vector<const char*> argv;
  argv.push_back("iadmm_cli");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    RunConfig config = parse_config(read_file(config_path));
    if (!output.empty()) config.output = output;
    if (max_iters > 0) config.stop.max_iters = max_iters;
    if (tol >= 0.0) config.stop.tol = tol;
    if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
    if (!solver.empty()) {
      const auto kind = parse_solver_kind(solver);
      if (!kind) throw ParseError(0, "solver", "unknown solver '" + solver + "'");
      config.solver = *kind;
    }
    check_compatibility(config);

    if (compare) {
      const CompareResult c = compare_admm_dr(config);
      out << std::setprecision(6) << "compared iterations 2.." << c.iterations << '\n'
          << "max deviation y: " << c.max_dev_y << '\n'
          << "max deviation v: " << c.max_dev_v << '\n'
          << "max deviation w: " << c.max_dev_w << '\n';
      return kExitConverged;
    }
    if (!sweep_spec.empty()) {
      const auto points = sweep(config, parse_sweep(sweep_spec));
      out << "alpha,lambda,status,iterations,gap,coupling\n";
      for (const auto& pt : points) {
        out << format_real(pt.alpha) << ',' << format_real(pt.lambda) << ',' << pt.status << ','
            << pt.iterations << ',' << format_real(pt.gap) << ',' << format_real(pt.coupling) << '\n';
      }
      return kExitConverged;
    }

    const RunResult r = run(config);
    if (!config.output.empty()) write_trace(config.output, r.trace);
    if (!summary_path.empty()) write_summary_csv(summary_path, config, r);
    out << summarize(config, r);
    return r.exit_code;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const SubproblemFailure& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace iadmm
