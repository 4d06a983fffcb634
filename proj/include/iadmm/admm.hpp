#pragma once

#include <optional>

#include "iadmm/linalg.hpp"
#include "iadmm/params.hpp"
#include "iadmm/prox.hpp"
#include "iadmm/trace.hpp"

namespace iadmm {

/// min_x f(x) + g(Lx) with L : R^n -> R^m injective.
class ProblemSpec {
 public:
  /// Throws HypothesisError when the injectivity modulus of L is below
  /// kModulusTolerance, InputError on dimension mismatch.
  ProblemSpec(ConvexFn f, ConvexFn g, LinearMap L);

  const ConvexFn& f() const { return f_; }
  const ConvexFn& g() const { return g_; }
  const LinearMap& L() const { return L_; }
  Eigen::Index n() const { return L_.cols(); }
  Eigen::Index m() const { return L_.rows(); }

 private:
  ConvexFn f_;
  ConvexFn g_;
  LinearMap L_;
};

/// How the x-subproblem  min_x f(x) + <c, Lx> + (gamma/2)||Lx - z||^2  is
/// solved. Bound to one gamma at construction.
class XUpdateStrategy {
 public:
  enum class Kind { ProxIdentity, QuadraticSolve, InnerIterative };

  /// Requires L to be an (optionally scaled) identity.
  static XUpdateStrategy prox_identity(const ProblemSpec& p, double gamma);
  /// Requires f quadratic; factors Q + gamma L'L once.
  static XUpdateStrategy quadratic_solve(const ProblemSpec& p, double gamma);
  /// Proximal gradient on the subproblem until
  /// ||x_{j+1} - x_j|| <= eps (1 + ||x_{j+1}||), warm-started at the previous x.
  static XUpdateStrategy inner_iterative(const ProblemSpec& p, double gamma, double eps = 1e-12,
                                         long budget = 10000);
  /// Exact strategy when one applies, inner_iterative otherwise.
  static XUpdateStrategy automatic(const ProblemSpec& p, double gamma);

  Kind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  bool exact() const { return kind_ != Kind::InnerIterative; }

  /// Throws SubproblemFailure (inner_iterative only) with the achieved residual.
  Vector solve(const ProblemSpec& p, const Vector& c, const Vector& z, const Vector& warm) const;

 private:
  XUpdateStrategy(Kind kind, double gamma) : kind_(kind), gamma_(gamma) {}

  Kind kind_;
  double gamma_;
  std::optional<Eigen::LLT<Matrix>> factor_;
  double step_ = 0.0;
  double eps_ = 0.0;
  long budget_ = 0;
};

/// Iterates of the inertial ADMM at index k (k >= 1).
struct IadmmState {
  long k = 1;
  Vector x;       // x^k (empty before the first step)
  Vector z;       // z^k
  Vector z_prev;  // z^{k-1}
  Vector zbar;    // zbar^k
  Vector y;       // y^k
  Vector y_prev;  // y^{k-1}
  Vector v;       // v^{k-1}, shadow from the last step

  /// w^k = y^k + gamma z^k
  Vector w(double gamma) const { return y + gamma * z; }
  Vector w_prev(double gamma) const { return y_prev + gamma * z_prev; }
};

struct IadmmInit {
  Vector y0, y1, z0, z1;
  static IadmmInit zeros(Eigen::Index m);
  IadmmState state() const;
};

/// y^k - y^{k-1} + gamma (z^k - z^{k-1}), i.e. w^k - w^{k-1}.
Vector inertial_momentum(const IadmmState& s, double gamma);

/// argmin_x f(x) + <c_k, Lx> + (gamma/2)||Lx - z^k||^2 with
/// c_k = y^k - alpha_k (y^k - y^{k-1}) - gamma alpha_k (z^k - z^{k-1}).
Vector x_update(const IadmmState& s, const ProblemSpec& p, double gamma, double alpha_k,
                const XUpdateStrategy& strat);

/// alpha_{k+1} lambda_k (Lx^{k+1} - z^k) + ((1-lambda_k) alpha_k alpha_{k+1} / gamma) (w^k - w^{k-1}).
Vector zbar_update(const IadmmState& s, double gamma, double alpha_k, double alpha_next, double lambda_k,
                   const Vector& Lx_next);

/// -zbar^{k+1} + prox_{g/gamma}(zbar^{k+1} + lambda_k Lx^{k+1} + (1-lambda_k) z^k + y^k/gamma
///                             + ((1-lambda_k) alpha_k / gamma)(w^k - w^{k-1})).
Vector z_update(const IadmmState& s, const ProblemSpec& p, double gamma, double alpha_k, double lambda_k,
                const Vector& Lx_next, const Vector& zbar_next);

/// y^k + gamma (lambda_k Lx^{k+1} + (1-lambda_k) z^k - z^{k+1}) + (1-lambda_k) alpha_k (w^k - w^{k-1}).
Vector y_update(const IadmmState& s, double gamma, double alpha_k, double lambda_k, const Vector& Lx_next,
                const Vector& z_next);

/// v^k = y^k - gamma z^k + gamma Lx^{k+1} - alpha_k (w^k - w^{k-1}).
Vector v_of(const IadmmState& s, double gamma, double alpha_k, const Vector& Lx_next);

/// One full iteration k -> k+1 (x, zbar, z, y in that order; v^k stored).
IadmmState step(const IadmmState& s, const ProblemSpec& p, const InertialParams& params,
                const XUpdateStrategy& strat);

/// Runs the inertial ADMM. Stops when
/// max(||Lx^{k+1} - z^k||, ||zbar^k||, ||w^{k+1} - w^k||) <= tol.
SolveTrace run_iadmm(const ProblemSpec& p, const InertialParams& params, const IadmmInit& init,
                     const XUpdateStrategy& strat, const StopRule& stop);

/// Standalone (relaxed) ADMM without inertia:
///   x = argmin f(x) + <y, Lx> + gamma/2 ||Lx - z||^2
///   z = prox_{g/gamma}(lambda Lx + (1-lambda) z + y/gamma)
///   y = y + gamma (lambda Lx + (1-lambda) z - z_new)
/// Uses y1, z1 from `init`.
SolveTrace classical_admm(const ProblemSpec& p, double gamma, const Schedule& lambda, const IadmmInit& init,
                          const XUpdateStrategy& strat, const StopRule& stop);

}  // namespace iadmm
