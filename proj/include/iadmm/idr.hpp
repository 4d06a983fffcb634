#pragma once

#include "iadmm/linalg.hpp"
#include "iadmm/params.hpp"
#include "iadmm/prox.hpp"
#include "iadmm/trace.hpp"

namespace iadmm {

/// A maximally monotone operator given through its resolvent J_{gamma A}.
class ResolventOp {
 public:
  enum class Kind { Subdifferential, ConjugateSubdifferential, ComposedConjugate, Zero, PointNormalCone };

  /// A = df, J = prox_{gamma f}.
  static ResolventOp subdifferential(ConvexFn f);
  /// A = dg*, J = prox_{gamma g*}.
  static ResolventOp conjugate_subdifferential(ConvexFn g);
  /// A = d(f* o (-L*)) on the range space of L. Only built when the inner
  /// argmin has a closed form: f quadratic, or L an (scaled) identity.
  static ResolventOp composed_conjugate(ConvexFn f, LinearMap L);
  static ResolventOp zero(Eigen::Index n);
  /// Normal cone of {a}: every point collapses to a.
  static ResolventOp point_normal_cone(Vector a);

  Kind kind() const { return kind_; }
  Eigen::Index dim() const { return dim_; }

  Vector resolve(double gamma, const Vector& x) const;

  /// For ComposedConjugate: the primal point
  ///   argmin_x f(x) + <u, Lx> + (gamma/2)||Lx||^2,
  /// with J_{gamma A}(u) = u + gamma L x.
  Vector inner_argmin(double gamma, const Vector& u) const;

 private:
  ResolventOp(Kind kind, Eigen::Index dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  Eigen::Index dim_;
  std::optional<ConvexFn> fn_;
  std::optional<LinearMap> op_;
  Vector point_;
};

struct IdrState {
  long k = 1;
  Vector w_prev;  // w^{k-1}
  Vector w;       // w^k
  Vector y;       // y^{k-1} (last shadow)
  Vector v;       // v^{k-1}
};

/// One inertial Douglas-Rachford step at index s.k:
///   u = w + alpha (w - w_prev), y = J_B(u), v = J_A(2y - u), w+ = u + lambda (v - y).
IdrState idr_step(const IdrState& s, const ResolventOp& A, const ResolventOp& B, double gamma, double alpha_k,
                  double lambda_k);

/// Iterates from (w0, w1) until ||v - y|| + ||w^{k+1} - w^k|| <= tol or the
/// iteration budget is spent. Rows carry y^k, v^k, w^k.
/// Rejects invalid parameters and the mixed start alpha_1 > 0 with w0 != w1.
SolveTrace run_idr(const ResolventOp& A, const ResolventOp& B, const InertialParams& params, const Vector& w0,
                   const Vector& w1, const StopRule& stop);

}  // namespace iadmm
