#include "iadmm/params.hpp"

#include <cmath>
#include <sstream>

#include "iadmm/errors.hpp"

namespace iadmm {

Schedule Schedule::constant(double c) { return Schedule(c, c, 1, 0); }

Schedule Schedule::ramp(double from, double to, long start, long length) {
  if (length < 0) throw InputError("ramp length must be nonnegative");
  return Schedule(from, to, start, length);
}

double Schedule::operator()(long k) const {
  if (k <= start_) return from_;
  if (length_ == 0 || k >= start_ + length_) return to_;
  const double t = static_cast<double>(k - start_) / static_cast<double>(length_);
  return from_ + t * (to_ - from_);
}

std::string Schedule::describe() const {
  std::ostringstream os;
  if (from_ == to_) {
    os << "constant(" << to_ << ")";
  } else {
    os << "ramp(" << from_ << " -> " << to_ << ", k=" << start_ << ".." << start_ + length_ << ")";
  }
  return os.str();
}

std::string_view to_string(InitMode mode) {
  return mode == InitMode::Alpha2Zero ? "alpha2_zero" : "lambda1_alpha1_zero";
}

double delta_lower_bound(double alpha, double sigma) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InfeasibleParameters("α must lie in [0,1)");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InfeasibleParameters("σ must be positive");
  return (alpha * alpha * (1.0 + alpha) + alpha * sigma) / (1.0 - alpha * alpha);
}

double max_relaxation(double alpha, double sigma, double delta) {
  const double lower = delta_lower_bound(alpha, sigma);
  if (!(delta > lower) || !(delta > 0.0) || !std::isfinite(delta)) {
    std::ostringstream os;
    os << "δ = " << delta << " must exceed " << lower;
    throw InfeasibleParameters(os.str());
  }
  const double bracket = alpha * (1.0 + alpha) + alpha * delta + sigma;
  return 2.0 * (delta - alpha * bracket) / (delta * (1.0 + bracket));
}

double delta_roots_feasibility(double target, double alpha, double sigma) {
  const double c = alpha * (1.0 + alpha) + sigma;
  return target * (1.0 + c) + alpha * alpha + 2.0 * alpha * std::sqrt(target) * std::sqrt(c);
}

std::optional<std::pair<double, double>> delta_roots(double target, double alpha, double sigma) {
  if (!(target > 0.0 && target < 1.0)) throw InputError("target relaxation ratio must lie in (0,1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("α must lie in (0,1) for delta_roots");
  if (!(sigma > 0.0)) throw InputError("σ must be positive");
  if (!(delta_roots_feasibility(target, alpha, sigma) < 1.0)) return std::nullopt;

  // alpha*target*d^2 - B d + alpha c = 0 with B = 1 - alpha^2 - target(1 + c).
  const double c = alpha * (1.0 + alpha) + sigma;
  const double B = 1.0 - alpha * alpha - target * (1.0 + c);
  const double disc = B * B - 4.0 * target * alpha * alpha * c;
  if (disc < 0.0) throw std::logic_error("delta_roots: negative discriminant in the feasible region");
  // Larger root directly, smaller one through the product of roots to avoid
  // cancellation.
  const double big = (B + std::sqrt(disc)) / (2.0 * alpha * target);
  const double small = c / (target * big);
  return std::make_pair(big, small);
}

double InertialParams::alpha_at(long k) const {
  if (init_mode == InitMode::Lambda1Alpha1Zero && k == 1) return 0.0;
  return alpha_schedule(k);
}

double InertialParams::lambda_at(long k) const {
  if (init_mode == InitMode::Lambda1Alpha1Zero && k == 1) return 0.0;
  return lambda_schedule(k);
}

InertialParams InertialParams::preset(double alpha, double gamma) {
  InertialParams p;
  p.gamma = gamma;
  p.alpha = alpha;
  p.sigma = 0.01;
  const double lower = delta_lower_bound(alpha, p.sigma);
  p.delta = lower > 0.0 ? 1.5 * lower : 1.0;
  const double lam = 0.9 * max_relaxation(alpha, p.sigma, p.delta);
  p.lambda_lower = lam;
  p.alpha_schedule = Schedule::constant(alpha);
  p.lambda_schedule = Schedule::constant(lam);
  p.init_mode = InitMode::Lambda1Alpha1Zero;
  return p;
}

InertialParams InertialParams::relaxed(double lambda, double gamma) {
  InertialParams p;
  p.gamma = gamma;
  p.alpha = 0.0;
  p.sigma = 0.01;
  p.delta = 1.0;
  p.lambda_lower = lambda;
  p.alpha_schedule = Schedule::constant(0.0);
  p.lambda_schedule = Schedule::constant(lambda);
  p.init_mode = InitMode::Alpha2Zero;
  return p;
}

std::string ValidationReport::to_text() const {
  if (ok()) return "parameters valid\n";
  std::ostringstream os;
  for (const auto& v : violations) {
    os << "violation: " << v.condition;
    if (v.first_index > 0) os << " (first at k=" << v.first_index << ")";
    if (!v.detail.empty()) os << ": " << v.detail;
    os << "\n";
  }
  return os.str();
}

ValidationReport validate(const InertialParams& p, long horizon) {
  ValidationReport report;
  auto add = [&](std::string cond, long k, std::string detail) {
    report.violations.push_back({std::move(cond), k, std::move(detail)});
  };

  if (!(p.gamma > 0.0) || !std::isfinite(p.gamma)) add("γ > 0", 0, "");
  if (!(p.sigma > 0.0)) add("σ > 0", 0, "");
  if (!(p.lambda_lower > 0.0)) add("λ̲ > 0", 0, "");
  if (!(p.alpha >= 0.0 && p.alpha < 1.0)) {
    add("α must lie in [0,1)", 0, "");
    return report;
  }
  double lam_max = 0.0;
  if (p.sigma > 0.0) {
    const double lower = delta_lower_bound(p.alpha, p.sigma);
    if (!(p.delta > lower) || !(p.delta > 0.0)) {
      std::ostringstream os;
      os << "δ = " << p.delta << " <= " << lower;
      add("δ lower bound", 0, os.str());
    } else {
      lam_max = max_relaxation(p.alpha, p.sigma, p.delta);
    }
  }

  long first_decrease = 0, first_alpha_range = 0, first_lambda_range = 0;
  double prev = 0.0;
  for (long k = 1; k <= horizon; ++k) {
    const double a = p.alpha_at(k);
    if (k > 1 && a < prev && first_decrease == 0) first_decrease = k;
    prev = a;
    if (!(a >= 0.0 && a <= p.alpha) && first_alpha_range == 0) first_alpha_range = k;
    if (k >= 2 && lam_max > 0.0) {
      const double l = p.lambda_at(k);
      if (!(l >= p.lambda_lower && l <= lam_max) && first_lambda_range == 0) first_lambda_range = k;
    }
  }
  if (first_decrease) add("nondecreasing", first_decrease, "α_k must be nondecreasing");
  if (first_alpha_range) add("0 <= α_k <= α", first_alpha_range, "");
  if (first_lambda_range) {
    std::ostringstream os;
    os << "λ_k = " << p.lambda_at(first_lambda_range) << " outside [" << p.lambda_lower << ", " << lam_max << "]";
    add("λ̲ <= λ_k <= λ_max", first_lambda_range, os.str());
  }
  if (horizon >= 2 && p.alpha_at(2) != 0.0 && !(p.lambda_at(1) == 0.0 && p.alpha_at(1) == 0.0)) {
    add("init condition", 1, "either α_2 = 0 or λ_1 = α_1 = 0");
  }
  return report;
}

void require_valid(const InertialParams& p, long horizon) {
  const auto report = validate(p, horizon);
  if (!report.ok()) throw InfeasibleParameters(report.to_text());
}

}  // namespace iadmm
