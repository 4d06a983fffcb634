#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace iadmm {

/// Closed-form generator for a parameter sequence indexed by k >= 1.
class Schedule {
 public:
  /// value(k) = c for all k.
  static Schedule constant(double c);
  /// Linear ramp from `from` at k = start to `to` at k = start + length,
  /// constant outside.
  static Schedule ramp(double from, double to, long start, long length);

  double operator()(long k) const;
  double final_value() const { return to_; }
  std::string describe() const;

 private:
  Schedule(double from, double to, long start, long length) : from_(from), to_(to), start_(start), length_(length) {}
  double from_;
  double to_;
  long start_;
  long length_;
};

/// How the start of the inertial sequence is made admissible: either the
/// schedule itself has alpha_2 = 0, or lambda_1 = alpha_1 = 0 are imposed
/// (which forces w^1 = w^2 in the underlying Douglas-Rachford iteration).
enum class InitMode { Alpha2Zero, Lambda1Alpha1Zero };

std::string_view to_string(InitMode mode);

/// Upper bound on the relaxation parameters,
///   2 (delta - alpha[alpha(1+alpha) + alpha delta + sigma]) / (delta [1 + alpha(1+alpha) + alpha delta + sigma]).
/// Throws InfeasibleParameters when delta does not exceed delta_lower_bound.
double max_relaxation(double alpha, double sigma, double delta);

/// (alpha^2 (1 + alpha) + alpha sigma) / (1 - alpha^2). Throws for alpha
/// outside [0, 1) or sigma <= 0.
double delta_lower_bound(double alpha, double sigma);

/// Both deltas at which max_relaxation(alpha, sigma, delta) / 2 equals
/// `target` (in (0, 1)). Returns nullopt when (target, alpha, sigma) is
/// infeasible. delta1 >= delta2 > 0.
std::optional<std::pair<double, double>> delta_roots(double target, double alpha, double sigma);

/// Left-hand side of the feasibility inequality for delta_roots; feasible
/// iff the value is < 1.
double delta_roots_feasibility(double target, double alpha, double sigma);

struct InertialParams {
  double gamma = 1.0;
  double alpha = 0.0;
  double sigma = 0.01;
  double delta = 1.0;
  double lambda_lower = 0.5;
  Schedule alpha_schedule = Schedule::constant(0.0);
  Schedule lambda_schedule = Schedule::constant(1.0);
  InitMode init_mode = InitMode::Alpha2Zero;

  /// alpha_k after the init-mode override (k = 1 forced to 0 under
  /// Lambda1Alpha1Zero).
  double alpha_at(long k) const;
  double lambda_at(long k) const;
  double lambda_max() const { return max_relaxation(alpha, sigma, delta); }

  /// Preset: sigma = 0.01, delta = 1.5 x lower bound (delta = 1 when
  /// alpha = 0), lambda_k = 0.9 x max_relaxation, alpha_k = alpha, with
  /// lambda_1 = alpha_1 = 0 imposed.
  static InertialParams preset(double alpha, double gamma = 1.0);
  /// alpha = 0, constant lambda: classical (lambda = 1) or relaxed ADMM.
  static InertialParams relaxed(double lambda, double gamma = 1.0);
};

struct Violation {
  std::string condition;
  long first_index;  // 0 when the condition is not index-specific
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_text() const;
};

/// Checks every admissibility condition over schedule indices 1..horizon.
ValidationReport validate(const InertialParams& p, long horizon);

/// Throws InfeasibleParameters with the report text unless validate() passes.
void require_valid(const InertialParams& p, long horizon);

}  // namespace iadmm
