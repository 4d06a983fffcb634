#include "iadmm/admm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "iadmm/errors.hpp"

namespace iadmm {

ProblemSpec::ProblemSpec(ConvexFn f, ConvexFn g, LinearMap L) : f_(std::move(f)), g_(std::move(g)), L_(std::move(L)) {
  if (f_.dim() != L_.cols()) throw InputError("problem: dim f != columns of L");
  if (g_.dim() != L_.rows()) throw InputError("problem: dim g != rows of L");
  if (L_.injectivity_modulus() < kModulusTolerance) {
    std::ostringstream os;
    os << "hypothesis (H) fails: L must have full column rank (injectivity modulus θ = "
       << L_.injectivity_modulus() << ")";
    throw HypothesisError(os.str());
  }
}

XUpdateStrategy XUpdateStrategy::prox_identity(const ProblemSpec& p, double gamma) {
  if (!p.L().is_identity_like()) throw InputError("prox_identity x-update requires an identity operator");
  return XUpdateStrategy(Kind::ProxIdentity, gamma);
}

XUpdateStrategy XUpdateStrategy::quadratic_solve(const ProblemSpec& p, double gamma) {
  const QuadraticData* q = p.f().as_quadratic();
  if (q == nullptr) throw InputError("quadratic_solve x-update requires a quadratic f");
  XUpdateStrategy s(Kind::QuadraticSolve, gamma);
  const Matrix M = p.L().as_dense();
  s.factor_.emplace(q->Q + gamma * M.transpose() * M);
  if (s.factor_->info() != Eigen::Success) throw HypothesisError("x-subproblem matrix is not positive definite");
  return s;
}

XUpdateStrategy XUpdateStrategy::inner_iterative(const ProblemSpec& p, double gamma, double eps, long budget) {
  XUpdateStrategy s(Kind::InnerIterative, gamma);
  const Matrix M = p.L().as_dense();
  Eigen::JacobiSVD<Matrix> svd(M);
  const double smax = svd.singularValues()(0);
  s.step_ = 1.0 / (gamma * smax * smax);
  s.eps_ = eps;
  s.budget_ = budget;
  return s;
}

XUpdateStrategy XUpdateStrategy::automatic(const ProblemSpec& p, double gamma) {
  if (p.L().is_identity_like()) return prox_identity(p, gamma);
  if (p.f().as_quadratic() != nullptr) return quadratic_solve(p, gamma);
  return inner_iterative(p, gamma);
}

Vector XUpdateStrategy::solve(const ProblemSpec& p, const Vector& c, const Vector& z, const Vector& warm) const {
  const LinearMap& L = p.L();
  switch (kind_) {
    case Kind::ProxIdentity: {
      const double s = L.scale();
      return p.f().prox(1.0 / (gamma_ * s * s), z / s - c / (gamma_ * s));
    }
    case Kind::QuadraticSolve: {
      const QuadraticData& q = *p.f().as_quadratic();
      return factor_->solve(L.adjoint_apply(gamma_ * z - c) - q.q);
    }
    case Kind::InnerIterative: {
      Vector x = warm.size() == p.n() ? warm : Vector::Zero(p.n());
      double residual = kInfinity;
      for (long j = 0; j < budget_; ++j) {
        const Vector grad = L.adjoint_apply(c + gamma_ * (L.apply(x) - z));
        Vector next = p.f().prox(step_, x - step_ * grad);
        residual = (next - x).norm();
        const bool done = residual <= eps_ * (1.0 + next.norm());
        x = std::move(next);
        if (done) return x;
      }
      throw SubproblemFailure("x-subproblem: inner iteration budget exhausted", residual);
    }
  }
  return {};
}

IadmmInit IadmmInit::zeros(Eigen::Index m) {
  return {Vector::Zero(m), Vector::Zero(m), Vector::Zero(m), Vector::Zero(m)};
}

IadmmState IadmmInit::state() const {
  const auto m = y1.size();
  require_dim(y0, m, "init y0");
  require_dim(z0, m, "init z0");
  require_dim(z1, m, "init z1");
  IadmmState s;
  s.k = 1;
  s.y = y1;
  s.y_prev = y0;
  s.z = z1;
  s.z_prev = z0;
  s.zbar = Vector::Zero(m);
  return s;
}

Vector inertial_momentum(const IadmmState& s, double gamma) { return s.y - s.y_prev + gamma * (s.z - s.z_prev); }

Vector x_update(const IadmmState& s, const ProblemSpec& p, double gamma, double alpha_k,
                const XUpdateStrategy& strat) {
  if (strat.gamma() != gamma) throw InputError("x-update strategy was built for a different γ");
  const Vector c = s.y - alpha_k * (s.y - s.y_prev) - gamma * alpha_k * (s.z - s.z_prev);
  return strat.solve(p, c, s.z, s.x);
}

Vector zbar_update(const IadmmState& s, double gamma, double alpha_k, double alpha_next, double lambda_k,
                   const Vector& Lx_next) {
  return alpha_next * lambda_k * (Lx_next - s.z) +
         ((1.0 - lambda_k) * alpha_k * alpha_next / gamma) * inertial_momentum(s, gamma);
}

Vector z_update(const IadmmState& s, const ProblemSpec& p, double gamma, double alpha_k, double lambda_k,
                const Vector& Lx_next, const Vector& zbar_next) {
  const Vector arg = zbar_next + lambda_k * Lx_next + (1.0 - lambda_k) * s.z + s.y / gamma +
                     ((1.0 - lambda_k) * alpha_k / gamma) * inertial_momentum(s, gamma);
  return p.g().prox(1.0 / gamma, arg) - zbar_next;
}

Vector y_update(const IadmmState& s, double gamma, double alpha_k, double lambda_k, const Vector& Lx_next,
                const Vector& z_next) {
  return s.y + gamma * (lambda_k * Lx_next + (1.0 - lambda_k) * s.z - z_next) +
         (1.0 - lambda_k) * alpha_k * inertial_momentum(s, gamma);
}

Vector v_of(const IadmmState& s, double gamma, double alpha_k, const Vector& Lx_next) {
  return s.y - gamma * s.z + gamma * Lx_next - alpha_k * inertial_momentum(s, gamma);
}

IadmmState step(const IadmmState& s, const ProblemSpec& p, const InertialParams& params,
                const XUpdateStrategy& strat) {
  const double gamma = params.gamma;
  const double a = params.alpha_at(s.k);
  const double a_next = params.alpha_at(s.k + 1);
  const double lam = params.lambda_at(s.k);

  IadmmState next;
  next.k = s.k + 1;
  try {
    next.x = x_update(s, p, gamma, a, strat);
  } catch (const SubproblemFailure& e) {
    throw SubproblemFailure("iteration " + std::to_string(s.k) + ": " + e.what(), e.residual());
  }
  const Vector Lx = p.L().apply(next.x);
  next.zbar = zbar_update(s, gamma, a, a_next, lam, Lx);
  next.z = z_update(s, p, gamma, a, lam, Lx, next.zbar);
  next.y = y_update(s, gamma, a, lam, Lx, next.z);
  next.v = v_of(s, gamma, a, Lx);
  next.z_prev = s.z;
  next.y_prev = s.y;
  return next;
}

namespace {

double dual_objective(const ProblemSpec& p, const Vector& v, const Vector& y) {
  const double fc = p.f().conj_eval(-p.L().adjoint_apply(v));
  const double gc = p.g().conj_eval(y);
  if (fc == kInfinity || gc == kInfinity) return -kInfinity;
  return -fc - gc;
}

// Shared bookkeeping for the two ADMM runners.
class TraceBuilder {
 public:
  TraceBuilder(const ProblemSpec& p, double gamma, const StopRule& stop) : p_(p), gamma_(gamma), stop_(stop) {}

  // Records row k from the state before (s) and after (next) a step; returns
  // true when the stop rule fires.
  bool record(const IadmmState& s, const IadmmState& next, SolveTrace& trace) {
    const Vector Lx = p_.L().apply(next.x);
    const Vector w = s.w(gamma_);
    const Vector w_next = next.w(gamma_);
    TraceRow row;
    row.k = s.k;
    const double fx = p_.f().eval(next.x);
    const double gz = p_.g().eval(s.z + s.zbar);
    row.primal = (fx == kInfinity || gz == kInfinity) ? kInfinity : fx + gz;
    row.dual = dual_objective(p_, next.v, s.y);
    row.gap = duality_gap(row.primal, row.dual);
    row.coupling = (Lx - s.z).norm();
    row.zbar_norm = s.zbar.norm();
    row.dw_norm = (w_next - w).norm();
    dw_sum_ += row.dw_norm * row.dw_norm;
    row.dw_sq_sum = dw_sum_;
    if (stop_.keep_iterates) {
      row.x = next.x;
      row.z = next.z;
      row.zbar = next.zbar;
      row.y = s.y;
      row.v = next.v;
      row.w = w;
    }
    // x^{k+1} is tied to the Douglas-Rachford iterates only from k = 2 on.
    const bool done = s.k >= 2 && std::max({row.coupling, row.zbar_norm, row.dw_norm}) <= stop_.tol;
    trace.rows.push_back(std::move(row));
    trace.iterations = s.k;
    return done;
  }

  void finish(const IadmmState& s, SolveTrace& trace) const {
    trace.x = s.x;
    trace.z = s.z;
    trace.y = s.y;
    trace.v = s.v;
    trace.w = s.w(gamma_);
  }

 private:
  const ProblemSpec& p_;
  double gamma_;
  StopRule stop_;
  double dw_sum_ = 0.0;
};

}  // namespace

SolveTrace run_iadmm(const ProblemSpec& p, const InertialParams& params, const IadmmInit& init,
                     const XUpdateStrategy& strat, const StopRule& stop) {
  require_valid(params, stop.max_iters + 1);
  require_dim(init.y1, p.m(), "init y1");
  IadmmState s = init.state();
  SolveTrace trace;
  TraceBuilder builder(p, params.gamma, stop);
  for (long k = 1; k <= stop.max_iters; ++k) {
    IadmmState next = step(s, p, params, strat);
    const bool done = builder.record(s, next, trace);
    s = std::move(next);
    if (done) {
      trace.status = RunStatus::Converged;
      break;
    }
  }
  builder.finish(s, trace);
  return trace;
}

SolveTrace classical_admm(const ProblemSpec& p, double gamma, const Schedule& lambda, const IadmmInit& init,
                          const XUpdateStrategy& strat, const StopRule& stop) {
  if (!(gamma > 0.0)) throw InfeasibleParameters("γ must be positive");
  if (strat.gamma() != gamma) throw InputError("x-update strategy was built for a different γ");
  require_dim(init.y1, p.m(), "init y1");
  require_dim(init.z1, p.m(), "init z1");

  const LinearMap& L = p.L();
  IadmmState s;
  s.k = 1;
  s.y = s.y_prev = init.y1;
  s.z = s.z_prev = init.z1;
  s.zbar = Vector::Zero(p.m());
  SolveTrace trace;
  TraceBuilder builder(p, gamma, stop);
  for (long k = 1; k <= stop.max_iters; ++k) {
    const double lam = lambda(k);
    IadmmState next;
    next.k = k + 1;
    try {
      next.x = strat.solve(p, s.y, s.z, s.x);
    } catch (const SubproblemFailure& e) {
      throw SubproblemFailure("iteration " + std::to_string(k) + ": " + e.what(), e.residual());
    }
    const Vector Lx = L.apply(next.x);
    const Vector relaxed = lam * Lx + (1.0 - lam) * s.z;
    next.z = p.g().prox(1.0 / gamma, relaxed + s.y / gamma);
    next.y = s.y + gamma * (relaxed - next.z);
    next.zbar = Vector::Zero(p.m());
    next.v = s.y + gamma * (Lx - s.z);
    next.z_prev = s.z;
    next.y_prev = s.y;
    const bool done = builder.record(s, next, trace);
    s = std::move(next);
    if (done) {
      trace.status = RunStatus::Converged;
      break;
    }
  }
  builder.finish(s, trace);
  return trace;
}

}  // namespace iadmm
