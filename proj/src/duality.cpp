#include "iadmm/duality.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace iadmm {

double subgradient_violation(const ConvexFn& f, const Vector& x, const Vector& s, int probes, std::uint64_t seed) {
  require_dim(s, f.dim(), "subgradient_violation");
  const double fx = f.eval(x);
  if (fx == kInfinity) return kInfinity;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> exponent(-3.0, 1.0);
  double worst = 0.0;
  Vector y(x.size());
  for (int j = 0; j < probes; ++j) {
    const double radius = std::pow(10.0, exponent(rng)) * (1.0 + x.norm());
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = normal(rng);
    y = x + radius * y / std::max(y.norm(), 1e-300);
    if (j % 2 == 1) y = f.prox(1.0, y);
    const double fy = f.eval(y);
    if (fy == kInfinity) continue;
    worst = std::max(worst, fx + s.dot(y - x) - fy);
  }
  return worst;
}

double primal_value(const ProblemSpec& p, const Vector& x) {
  const double fx = p.f().eval(x);
  const double gx = p.g().eval(p.L().apply(x));
  if (fx == kInfinity || gx == kInfinity) return kInfinity;
  return fx + gx;
}

double dual_value(const ProblemSpec& p, const Vector& v) {
  const double fc = p.f().conj_eval(-p.L().adjoint_apply(v));
  const double gc = p.g().conj_eval(v);
  if (fc == kInfinity || gc == kInfinity) return -kInfinity;
  return -fc - gc;
}

double kkt_residual(const ProblemSpec& p, const Vector& x, const Vector& v, int probes, std::uint64_t seed) {
  const double rf = subgradient_violation(p.f(), x, -p.L().adjoint_apply(v), probes, seed);
  const double rg = subgradient_violation(p.g(), p.L().apply(x), v, probes, seed + 1);
  return rf + rg;
}

HypothesisMargins hypothesis_check(const LinearMap& L) {
  return {L.injectivity_modulus(), L.adjoint().injectivity_modulus()};
}

HypothesisMargins hypothesis_check(const ProblemSpec& p) { return hypothesis_check(p.L()); }

std::string DualityReport::to_text() const {
  std::ostringstream os;
  os << "primal value   " << format_real(primal_value) << "\n"
     << "dual value     " << format_real(dual_value) << "\n"
     << "duality gap    " << format_real(gap) << "\n"
     << "kkt residual   " << format_real(kkt_residual) << "\n"
     << "theta (H)      " << format_real(h_theta) << "\n"
     << "theta* (H*)    " << format_real(h_star_theta) << "\n";
  return os.str();
}

const char* DualityReport::csv_header() { return "primal_value,dual_value,gap,kkt_residual,h_theta,h_star_theta"; }

std::string DualityReport::to_csv_row() const {
  std::ostringstream os;
  os << format_real(primal_value) << ',' << format_real(dual_value) << ',' << format_real(gap) << ','
     << format_real(kkt_residual) << ',' << format_real(h_theta) << ',' << format_real(h_star_theta);
  return os.str();
}

DualityReport duality_report(const ProblemSpec& p, const Vector& x, const Vector& v, std::uint64_t seed) {
  DualityReport r;
  r.primal_value = primal_value(p, x);
  r.dual_value = dual_value(p, v);
  r.gap = duality_gap(r.primal_value, r.dual_value);
  r.kkt_residual = kkt_residual(p, x, v, kDefaultProbes, seed);
  const auto h = hypothesis_check(p);
  r.h_theta = h.theta;
  r.h_star_theta = h.theta_star;
  return r;
}

}  // namespace iadmm
