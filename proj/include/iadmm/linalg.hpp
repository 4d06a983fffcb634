#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string_view>

namespace iadmm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Singular values below this are treated as zero when computing the
/// injectivity modulus.
inline constexpr double kModulusTolerance = 1e-10;

/// Throws InputError unless every entry of `v` is finite.
void require_finite(const Vector& v, std::string_view what);
void require_finite(const Matrix& m, std::string_view what);

/// Throws InputError when `v.size() != n`.
void require_dim(const Vector& v, Eigen::Index n, std::string_view what);

/// A linear operator R^n -> R^m. Immutable once built.
class LinearMap {
 public:
  enum class Kind { Dense, Identity, ScaledIdentity };

  static LinearMap dense(Matrix m);
  static LinearMap identity(Eigen::Index n);
  static LinearMap scaled_identity(Eigen::Index n, double c);

  Kind kind() const { return kind_; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  /// Scale factor for the identity kinds (1 for plain identity).
  double scale() const { return scale_; }
  bool is_identity_like() const { return kind_ != Kind::Dense; }

  Vector apply(const Vector& x) const;
  Vector adjoint_apply(const Vector& y) const;
  LinearMap adjoint() const;

  /// Dense m x n matrix of this operator.
  Matrix as_dense() const;

  /// Largest theta >= 0 with ||Lx|| >= theta ||x|| for all x (smallest
  /// singular value; 0 when L has a nontrivial kernel or the value is below
  /// kModulusTolerance). Computed once per operator.
  double injectivity_modulus() const;

  bool operator==(const LinearMap& other) const;

 private:
  LinearMap(Kind kind, Eigen::Index rows, Eigen::Index cols, double scale, Matrix m);

  Kind kind_;
  Eigen::Index rows_;
  Eigen::Index cols_;
  double scale_;
  Matrix matrix_;
  double modulus_;
};

/// Smallest singular value together with a unit right singular vector that
/// attains it. For operators with more columns than rows the vector spans
/// part of the kernel and the value is 0.
struct ModulusWitness {
  double sigma_min;
  Vector direction;
};
ModulusWitness smallest_singular_pair(const LinearMap& L);

}  // namespace iadmm
