#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "iadmm/linalg.hpp"

namespace iadmm {

/// +inf marks points outside the effective domain. No catalog function ever
/// evaluates to -inf or NaN.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Relative slack used when deciding membership in a constraint set, so that
/// points produced by a projection are not rejected for rounding.
inline constexpr double kMembershipTolerance = 1e-9;

/// Parameters of f(x) = 1/2 x'Qx + q'x + r.
struct QuadraticData {
  Matrix Q;
  Vector q;
  double r = 0.0;
};

/// A proper closed convex function from a closed catalog. Every kind carries
/// an exact proximal map and a closed-form conjugate.
///
/// Values are immutable and cheap to copy; the eigendecomposition used by the
/// quadratic kind is computed once at construction.
class ConvexFn {
 public:
  enum class Kind {
    Zero,
    Quadratic,
    L1,                  // tau * ||x - c||_1
    L2Norm,              // tau * ||x - c||_2
    IndicatorPoint,      // {a}
    IndicatorBox,        // [lo, hi]
    IndicatorHyperplane, // {x : <a, x> = b}
    BlockSum,            // sum_i f_i(x_i) over stacked blocks
    IndicatorConsensus,  // {(x, ..., x)} in (R^n)^m
  };

  static ConvexFn zero(Eigen::Index n);
  static ConvexFn quadratic(Matrix Q, Vector q, double r = 0.0);
  static ConvexFn l1(Eigen::Index n, double tau, std::optional<Vector> center = std::nullopt);
  static ConvexFn l2norm(Eigen::Index n, double tau, std::optional<Vector> center = std::nullopt);
  static ConvexFn indicator_point(Vector a);
  static ConvexFn indicator_box(Vector lo, Vector hi);
  static ConvexFn indicator_hyperplane(Vector a, double b);
  static ConvexFn block_sum(std::vector<ConvexFn> blocks);
  static ConvexFn indicator_consensus(Eigen::Index blocks, Eigen::Index n);

  Kind kind() const;
  std::string_view kind_name() const;
  Eigen::Index dim() const;

  /// f(x), or kInfinity outside dom f.
  double eval(const Vector& x) const;
  /// argmin_y f(y) + ||y - x||^2 / (2 gamma).
  Vector prox(double gamma, const Vector& x) const;
  /// f*(u) = sup_x <u, x> - f(x), or kInfinity.
  double conj_eval(const Vector& u) const;
  /// prox of gamma f*, via the Moreau decomposition.
  Vector conj_prox(double gamma, const Vector& x) const;

  /// Non-null only for Kind::Quadratic.
  const QuadraticData* as_quadratic() const;
  /// Non-empty only for Kind::BlockSum.
  const std::vector<ConvexFn>& blocks() const;

  struct Impl;

 private:
  explicit ConvexFn(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

}  // namespace iadmm
