#include "iadmm/consensus.hpp"

#include <algorithm>
#include <cmath>

#include "iadmm/duality.hpp"
#include "iadmm/errors.hpp"

namespace iadmm {

ConsensusProblem::ConsensusProblem(std::vector<ConvexFn> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.size() < 2) throw InputError("consensus problem needs at least two blocks");
  for (const auto& f : blocks_) {
    if (f.dim() != blocks_.front().dim()) throw InputError("consensus blocks must share one dimension");
  }
}

double ConsensusProblem::objective(const Vector& x) const {
  double total = 0.0;
  for (const auto& f : blocks_) {
    total += f.eval(x);
    if (total == kInfinity) return kInfinity;
  }
  return total;
}

ConsensusInit ConsensusInit::zeros(std::size_t m, Eigen::Index n) {
  BlockVectors zero(m, Vector::Zero(n));
  return {zero, zero, zero, zero};
}

ConsensusState ConsensusInit::state() const {
  const std::size_t m = y1.size();
  if (y0.size() != m || z0.size() != m || z1.size() != m) throw InputError("consensus init: block counts differ");
  ConsensusState s;
  s.y = y1;
  s.y_prev = y0;
  s.z = z1;
  s.z_prev = z0;
  s.zbar.assign(m, Vector::Zero(y1.front().size()));
  return s;
}

Vector block_sum(const BlockVectors& blocks) {
  Vector total = Vector::Zero(blocks.front().size());
  for (const auto& b : blocks) total += b;
  return total;
}

Vector stack(const BlockVectors& blocks) {
  const auto n = blocks.front().size();
  Vector out(n * static_cast<Eigen::Index>(blocks.size()));
  for (std::size_t i = 0; i < blocks.size(); ++i) out.segment(static_cast<Eigen::Index>(i) * n, n) = blocks[i];
  return out;
}

BlockVectors unstack(const Vector& v, std::size_t m) {
  const auto n = v.size() / static_cast<Eigen::Index>(m);
  BlockVectors out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = v.segment(static_cast<Eigen::Index>(i) * n, n);
  return out;
}

namespace {

void check_dims(const ConsensusState& s, const ConsensusProblem& cp) {
  if (s.y.size() != cp.m() || s.z.size() != cp.m()) throw InputError("consensus state: block count mismatch");
  for (std::size_t i = 0; i < cp.m(); ++i) {
    require_dim(s.y[i], cp.n(), "consensus y block");
    require_dim(s.z[i], cp.n(), "consensus z block");
    require_dim(s.y_prev[i], cp.n(), "consensus y block");
    require_dim(s.z_prev[i], cp.n(), "consensus z block");
  }
}

// y_i^k - y_i^{k-1} + gamma (z_i^k - z_i^{k-1})
Vector momentum(const ConsensusState& s, std::size_t i, double gamma) {
  return s.y[i] - s.y_prev[i] + gamma * (s.z[i] - s.z_prev[i]);
}

void require_zero_sum(const BlockVectors& y, const char* what) {
  const Vector total = block_sum(y);
  double scale = 1.0;
  for (const auto& b : y) scale = std::max(scale, b.norm());
  if (total.norm() > 1e-12 * scale) throw InputError(std::string(what) + ": dual blocks must sum to zero");
}

}  // namespace

ConsensusState sum1_step(const ConsensusState& s, const ConsensusProblem& cp, const InertialParams& params) {
  check_dims(s, cp);
  const double gamma = params.gamma;
  const double a = params.alpha_at(s.k);
  const double a_next = params.alpha_at(s.k + 1);
  const double lam = params.lambda_at(s.k);
  const std::size_t m = cp.m();
  const double md = static_cast<double>(m);

  ConsensusState next;
  next.k = s.k + 1;
  next.x.resize(m);
  next.zbar.resize(m);
  next.z.resize(m);
  next.y.resize(m);
  next.v.resize(m);
  BlockVectors mom(m);
  // Block updates are independent; the u-aggregation below is the barrier.
  for (std::size_t i = 0; i < m; ++i) {
    mom[i] = momentum(s, i, gamma);
    const Vector c = s.y[i] - a * (s.y[i] - s.y_prev[i]) - gamma * a * (s.z[i] - s.z_prev[i]);
    next.x[i] = cp.block(i).prox(1.0 / gamma, s.z[i] - c / gamma);
    next.zbar[i] = a_next * lam * (next.x[i] - s.z[i]) + ((1.0 - lam) * a * a_next / gamma) * mom[i];
  }
  Vector sum_x = Vector::Zero(cp.n()), sum_z = Vector::Zero(cp.n()), sum_dz = Vector::Zero(cp.n());
  for (std::size_t i = 0; i < m; ++i) {
    sum_x += next.x[i];
    sum_z += s.z[i];
    sum_dz += s.z[i] - s.z_prev[i];
  }
  next.shared = (lam * (1.0 + a_next) / md) * sum_x + ((1.0 - a_next * lam - lam) / md) * sum_z +
                (a * (1.0 - lam) * (1.0 + a_next) / md) * sum_dz;
  for (std::size_t i = 0; i < m; ++i) {
    next.z[i] = next.shared - next.zbar[i];
    next.y[i] = s.y[i] + gamma * (lam * next.x[i] + (1.0 - lam) * s.z[i] - next.z[i]) + (1.0 - lam) * a * mom[i];
    next.v[i] = s.y[i] - gamma * s.z[i] + gamma * next.x[i] - a * mom[i];
  }
  next.z_prev = s.z;
  next.y_prev = s.y;
  return next;
}

ConsensusState sum2_step(const ConsensusState& s, const ConsensusProblem& cp, const InertialParams& params) {
  check_dims(s, cp);
  const double gamma = params.gamma;
  const double a = params.alpha_at(s.k);
  const double a_next = params.alpha_at(s.k + 1);
  const double lam = params.lambda_at(s.k);
  const std::size_t m = cp.m();
  const double md = static_cast<double>(m);

  BlockVectors mom(m);
  Vector sum_z = Vector::Zero(cp.n()), sum_y = Vector::Zero(cp.n()), sum_mom = Vector::Zero(cp.n());
  for (std::size_t i = 0; i < m; ++i) {
    mom[i] = momentum(s, i, gamma);
    sum_z += s.z[i];
    sum_y += s.y[i];
    sum_mom += mom[i];
  }
  ConsensusState next;
  next.k = s.k + 1;
  next.shared = sum_z / md - sum_y / (md * gamma) + (a / (md * gamma)) * sum_mom;
  next.zbar.resize(m);
  next.z.resize(m);
  next.y.resize(m);
  next.v.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Vector& x = next.shared;
    next.zbar[i] = a_next * lam * (x - s.z[i]) + ((1.0 - lam) * a * a_next / gamma) * mom[i];
    const Vector arg = next.zbar[i] + lam * x + (1.0 - lam) * s.z[i] + s.y[i] / gamma +
                       ((1.0 - lam) * a / gamma) * mom[i];
    next.z[i] = cp.block(i).prox(1.0 / gamma, arg) - next.zbar[i];
    next.y[i] = s.y[i] + gamma * (lam * x + (1.0 - lam) * s.z[i] - next.z[i]) + (1.0 - lam) * a * mom[i];
    next.v[i] = s.y[i] - gamma * s.z[i] + gamma * x - a * mom[i];
  }
  next.z_prev = s.z;
  next.y_prev = s.y;
  return next;
}

namespace {

double neg_conj_sum(const ConsensusProblem& cp, const BlockVectors& v) {
  double total = 0.0;
  for (std::size_t i = 0; i < cp.m(); ++i) {
    const double c = cp.block(i).conj_eval(-v[i]);
    if (c == kInfinity) return -kInfinity;
    total -= c;
  }
  return total;
}

double separable_value(const ConsensusProblem& cp, const BlockVectors& x) {
  double total = 0.0;
  for (std::size_t i = 0; i < cp.m(); ++i) {
    const double fi = cp.block(i).eval(x[i]);
    if (fi == kInfinity) return kInfinity;
    total += fi;
  }
  return total;
}

double stacked_norm(const BlockVectors& b) {
  double s = 0.0;
  for (const auto& v : b) s += v.squaredNorm();
  return std::sqrt(s);
}

BlockVectors combine(const BlockVectors& a, const BlockVectors& b, double scale) {
  BlockVectors out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + scale * b[i];
  return out;
}

BlockVectors difference(const BlockVectors& a, const BlockVectors& b) { return combine(a, b, -1.0); }

enum class Variant { Sum1, Sum2 };

SolveTrace run_product(Variant variant, const ConsensusProblem& cp, const InertialParams& params,
                       const ConsensusInit& init, const StopRule& stop, ConsensusState* final_state) {
  require_valid(params, stop.max_iters + 1);
  ConsensusState s = init.state();
  check_dims(s, cp);
  if (variant == Variant::Sum1) {
    require_zero_sum(init.y0, "consensus init y0");
    require_zero_sum(init.y1, "consensus init y1");
  }
  const double gamma = params.gamma;
  SolveTrace trace;
  double dw_sum = 0.0;
  for (long k = 1; k <= stop.max_iters; ++k) {
    ConsensusState next = variant == Variant::Sum1 ? sum1_step(s, cp, params) : sum2_step(s, cp, params);
    TraceRow row;
    row.k = k;
    double coupling = 0.0;
    if (variant == Variant::Sum1) {
      row.primal = separable_value(cp, next.x);
      row.dual = neg_conj_sum(cp, next.v);
      for (std::size_t i = 0; i < cp.m(); ++i) coupling = std::max(coupling, (next.x[i] - s.z[i]).norm());
    } else {
      row.primal = separable_value(cp, combine(s.z, s.zbar, 1.0));
      row.dual = neg_conj_sum(cp, s.y);
      for (std::size_t i = 0; i < cp.m(); ++i) coupling = std::max(coupling, (next.shared - s.z[i]).norm());
    }
    row.gap = duality_gap(row.primal, row.dual);
    row.coupling = coupling;
    row.zbar_norm = stacked_norm(s.zbar);
    const BlockVectors w = combine(s.y, s.z, gamma);
    const BlockVectors w_next = combine(next.y, next.z, gamma);
    row.dw_norm = stacked_norm(difference(w_next, w));
    dw_sum += row.dw_norm * row.dw_norm;
    row.dw_sq_sum = dw_sum;
    if (stop.keep_iterates) {
      row.x = variant == Variant::Sum1 ? stack(next.x) : next.shared;
      row.z = stack(next.z);
      row.zbar = stack(next.zbar);
      row.y = stack(s.y);
      row.v = stack(next.v);
      row.w = stack(w);
    }
    const bool done = s.k >= 2 && std::max({row.coupling, row.zbar_norm, row.dw_norm}) <= stop.tol;
    trace.rows.push_back(std::move(row));
    trace.iterations = k;
    s = std::move(next);
    if (done) {
      trace.status = RunStatus::Converged;
      break;
    }
  }
  trace.x = variant == Variant::Sum1 ? block_sum(s.x) / static_cast<double>(cp.m()) : s.shared;
  trace.z = stack(s.z);
  trace.y = stack(s.y);
  trace.v = stack(s.v);
  trace.w = stack(combine(s.y, s.z, gamma));
  if (final_state) *final_state = std::move(s);
  return trace;
}

}  // namespace

SolveTrace run_sum1(const ConsensusProblem& cp, const InertialParams& params, const ConsensusInit& init,
                    const StopRule& stop, ConsensusState* final_state) {
  return run_product(Variant::Sum1, cp, params, init, stop, final_state);
}

SolveTrace run_sum2(const ConsensusProblem& cp, const InertialParams& params, const ConsensusInit& init,
                    const StopRule& stop, ConsensusState* final_state) {
  return run_product(Variant::Sum2, cp, params, init, stop, final_state);
}

SolveTrace boyd_consensus(const ConsensusProblem& cp, double gamma, const ConsensusInit& init, const StopRule& stop,
                          ConsensusState* final_state) {
  if (!(gamma > 0.0)) throw InfeasibleParameters("γ must be positive");
  if (init.y1.size() != cp.m() || init.z1.size() != cp.m()) throw InputError("consensus init: block count mismatch");
  require_zero_sum(init.y1, "consensus init y1");
  const std::size_t m = cp.m();
  const double md = static_cast<double>(m);

  BlockVectors y = init.y1;
  Vector xbar = init.z1.front();
  BlockVectors x(m, Vector::Zero(cp.n()));
  BlockVectors last_v(m, Vector::Zero(cp.n()));
  SolveTrace trace;
  double dw_sum = 0.0;
  for (long k = 1; k <= stop.max_iters; ++k) {
    for (std::size_t i = 0; i < m; ++i) x[i] = cp.block(i).prox(1.0 / gamma, xbar - y[i] / gamma);
    Vector xbar_next = Vector::Zero(cp.n());
    for (const auto& xi : x) xbar_next += xi;
    xbar_next /= md;
    BlockVectors y_next(m), v(m);
    double coupling = 0.0, dw2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      y_next[i] = y[i] + gamma * (x[i] - xbar_next);
      v[i] = y[i] + gamma * (x[i] - xbar);
      coupling = std::max(coupling, (x[i] - xbar).norm());
      // w_i = y_i + gamma xbar
      dw2 += (y_next[i] + gamma * xbar_next - y[i] - gamma * xbar).squaredNorm();
    }
    TraceRow row;
    row.k = k;
    row.primal = separable_value(cp, x);
    row.dual = neg_conj_sum(cp, v);
    row.gap = duality_gap(row.primal, row.dual);
    row.coupling = coupling;
    row.zbar_norm = 0.0;
    row.dw_norm = std::sqrt(dw2);
    dw_sum += dw2;
    row.dw_sq_sum = dw_sum;
    if (stop.keep_iterates) {
      row.x = stack(x);
      row.z = xbar_next.replicate(static_cast<Eigen::Index>(m), 1);
      row.zbar = Vector::Zero(cp.n() * static_cast<Eigen::Index>(m));
      row.y = stack(y);
      row.v = stack(v);
      row.w = stack(y) + gamma * xbar.replicate(static_cast<Eigen::Index>(m), 1);
    }
    const bool done = k >= 2 && std::max(row.coupling, row.dw_norm) <= stop.tol;
    trace.rows.push_back(std::move(row));
    trace.iterations = k;
    y = std::move(y_next);
    xbar = std::move(xbar_next);
    last_v = std::move(v);
    if (done) {
      trace.status = RunStatus::Converged;
      break;
    }
  }
  trace.x = xbar;
  trace.z = xbar.replicate(static_cast<Eigen::Index>(m), 1);
  trace.y = stack(y);
  trace.v = stack(last_v);
  trace.w = trace.y + gamma * trace.z;
  if (final_state) {
    ConsensusState s;
    s.k = trace.iterations + 1;
    s.x = x;
    s.y = y;
    s.v = last_v;
    s.z.assign(m, xbar);
    s.shared = xbar;
    *final_state = std::move(s);
  }
  return trace;
}

double consensus_optimality_residual(const Vector& x, const BlockVectors& v, const ConsensusProblem& cp, int probes,
                                     std::uint64_t seed) {
  if (v.size() != cp.m()) throw InputError("consensus residual: block count mismatch");
  require_dim(x, cp.n(), "consensus residual x");
  double worst = 0.0;
  for (std::size_t i = 0; i < cp.m(); ++i) {
    require_dim(v[i], cp.n(), "consensus residual v");
    worst = std::max(worst, subgradient_violation(cp.block(i), x, v[i], probes, seed + i));
  }
  return worst + block_sum(v).norm();
}

}  // namespace iadmm
