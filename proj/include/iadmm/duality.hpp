#pragma once

#include <cstdint>
#include <string>

#include "iadmm/admm.hpp"
#include "iadmm/prox.hpp"

namespace iadmm {

/// Default number of probe points for subgradient membership tests.
inline constexpr int kDefaultProbes = 50;

/// Largest violation of  f(y) >= f(x) + <s, y - x>  over `probes` random
/// points y near x (half of them pulled into dom f through prox). Returns
/// +inf when f(x) is infinite, 0 when no probe is violated. Deterministic for
/// a given seed.
double subgradient_violation(const ConvexFn& f, const Vector& x, const Vector& s, int probes = kDefaultProbes,
                             std::uint64_t seed = 0);

/// f(x) + g(Lx).
double primal_value(const ProblemSpec& p, const Vector& x);
/// -f*(-L*v) - g*(v); -inf when either conjugate is infinite.
double dual_value(const ProblemSpec& p, const Vector& v);
/// Probed violation of -L*v in df(x) plus that of v in dg(Lx).
double kkt_residual(const ProblemSpec& p, const Vector& x, const Vector& v, int probes = kDefaultProbes,
                    std::uint64_t seed = 0);

struct HypothesisMargins {
  double theta;       // injectivity modulus of L
  double theta_star;  // injectivity modulus of L*
};
HypothesisMargins hypothesis_check(const ProblemSpec& p);
HypothesisMargins hypothesis_check(const LinearMap& L);

struct DualityReport {
  double primal_value;
  double dual_value;
  double gap;
  double kkt_residual;
  double h_theta;
  double h_star_theta;

  std::string to_text() const;
  static const char* csv_header();
  std::string to_csv_row() const;
};

DualityReport duality_report(const ProblemSpec& p, const Vector& x, const Vector& v, std::uint64_t seed = 0);

}  // namespace iadmm
