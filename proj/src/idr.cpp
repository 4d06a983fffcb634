#include "iadmm/idr.hpp"

#include <cmath>
#include <string>

#include "iadmm/errors.hpp"

namespace iadmm {

ResolventOp ResolventOp::subdifferential(ConvexFn f) {
  ResolventOp op(Kind::Subdifferential, f.dim());
  op.fn_ = std::move(f);
  return op;
}

ResolventOp ResolventOp::conjugate_subdifferential(ConvexFn g) {
  ResolventOp op(Kind::ConjugateSubdifferential, g.dim());
  op.fn_ = std::move(g);
  return op;
}

ResolventOp ResolventOp::composed_conjugate(ConvexFn f, LinearMap L) {
  if (f.dim() != L.cols()) throw InputError("composed_conjugate: f and L dimensions disagree");
  if (f.as_quadratic() == nullptr && !L.is_identity_like()) {
    throw InputError("composed_conjugate: inner argmin has no closed form (needs quadratic f or identity L)");
  }
  if (L.injectivity_modulus() <= 0.0) throw HypothesisError("composed_conjugate: L must be injective");
  ResolventOp op(Kind::ComposedConjugate, L.rows());
  op.fn_ = std::move(f);
  op.op_ = std::move(L);
  return op;
}

ResolventOp ResolventOp::zero(Eigen::Index n) {
  if (n < 1) throw InputError("operator dimension must be >= 1");
  return ResolventOp(Kind::Zero, n);
}

ResolventOp ResolventOp::point_normal_cone(Vector a) {
  require_finite(a, "point_normal_cone");
  ResolventOp op(Kind::PointNormalCone, a.size());
  op.point_ = std::move(a);
  return op;
}

Vector ResolventOp::inner_argmin(double gamma, const Vector& u) const {
  if (kind_ != Kind::ComposedConjugate) throw std::logic_error("inner_argmin: not a composed operator");
  const ConvexFn& f = *fn_;
  const LinearMap& L = *op_;
  if (L.is_identity_like()) {
    const double c = L.scale();
    return f.prox(1.0 / (gamma * c * c), -u / (gamma * c));
  }
  // Stationarity: (Q + gamma L'L) x = -L'u - q.
  const QuadraticData& q = *f.as_quadratic();
  const Matrix M = L.as_dense();
  const Matrix H = q.Q + gamma * M.transpose() * M;
  Eigen::LLT<Matrix> llt(H);
  if (llt.info() != Eigen::Success) throw SubproblemFailure("composed_conjugate: inner system not positive definite", 0.0);
  return llt.solve(-M.transpose() * u - q.q);
}

Vector ResolventOp::resolve(double gamma, const Vector& x) const {
  require_dim(x, dim_, "ResolventOp::resolve");
  switch (kind_) {
    case Kind::Subdifferential:
      return fn_->prox(gamma, x);
    case Kind::ConjugateSubdifferential:
      return fn_->conj_prox(gamma, x);
    case Kind::ComposedConjugate:
      return x + gamma * op_->apply(inner_argmin(gamma, x));
    case Kind::Zero:
      return x;
    case Kind::PointNormalCone:
      return point_;
  }
  return {};
}

IdrState idr_step(const IdrState& s, const ResolventOp& A, const ResolventOp& B, double gamma, double alpha_k,
                  double lambda_k) {
  IdrState next;
  next.k = s.k + 1;
  const Vector u = s.w + alpha_k * (s.w - s.w_prev);
  try {
    next.y = B.resolve(gamma, u);
    next.v = A.resolve(gamma, 2.0 * next.y - u);
  } catch (const SubproblemFailure& e) {
    throw SubproblemFailure("iteration " + std::to_string(s.k) + ": " + e.what(), e.residual());
  }
  next.w_prev = s.w;
  next.w = u + lambda_k * (next.v - next.y);
  return next;
}

SolveTrace run_idr(const ResolventOp& A, const ResolventOp& B, const InertialParams& params, const Vector& w0,
                   const Vector& w1, const StopRule& stop) {
  if (A.dim() != B.dim()) throw InputError("run_idr: operator dimensions disagree");
  require_dim(w0, A.dim(), "run_idr: w0");
  require_dim(w1, A.dim(), "run_idr: w1");
  require_finite(w0, "run_idr: w0");
  require_finite(w1, "run_idr: w1");
  require_valid(params, stop.max_iters + 1);
  if (params.alpha_at(1) != 0.0 && w0 != w1) {
    throw InfeasibleParameters("run_idr: α_1 > 0 requires w0 = w1");
  }

  const double gamma = params.gamma;
  SolveTrace trace;
  IdrState s{1, w0, w1, Vector(), Vector()};
  double dw_sum = 0.0;
  for (long k = 1; k <= stop.max_iters; ++k) {
    IdrState next = idr_step(s, A, B, gamma, params.alpha_at(k), params.lambda_at(k));
    const double dw = (next.w - s.w).norm();
    const double shadow_gap = (next.v - next.y).norm();
    dw_sum += dw * dw;

    TraceRow row;
    row.k = k;
    row.primal = row.dual = row.gap = row.zbar_norm = std::nan("");
    row.coupling = shadow_gap;
    row.dw_norm = dw;
    row.dw_sq_sum = dw_sum;
    if (stop.keep_iterates) {
      row.y = next.y;
      row.v = next.v;
      row.w = s.w;
    }
    trace.rows.push_back(std::move(row));
    trace.iterations = k;
    s = std::move(next);
    if (shadow_gap + dw <= stop.tol) {
      trace.status = RunStatus::Converged;
      break;
    }
  }
  trace.y = s.y;
  trace.v = s.v;
  trace.w = s.w;
  return trace;
}

}  // namespace iadmm
