#include "iadmm/linalg.hpp"

#include <Eigen/SVD>
#include <string>

#include "iadmm/errors.hpp"

namespace iadmm {

void require_finite(const Vector& v, std::string_view what) {
  if (!v.allFinite()) throw InputError(std::string(what) + ": entries must be finite");
}

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) throw InputError(std::string(what) + ": entries must be finite");
}

void require_dim(const Vector& v, Eigen::Index n, std::string_view what) {
  if (v.size() != n) {
    throw InputError(std::string(what) + ": dimension mismatch (expected " + std::to_string(n) +
                     ", got " + std::to_string(v.size()) + ")");
  }
}

namespace {

double dense_modulus(const Matrix& m) {
  if (m.cols() > m.rows()) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const double s = svd.singularValues().minCoeff();
  return s < kModulusTolerance ? 0.0 : s;
}

}  // namespace

LinearMap::LinearMap(Kind kind, Eigen::Index rows, Eigen::Index cols, double scale, Matrix m)
    : kind_(kind), rows_(rows), cols_(cols), scale_(scale), matrix_(std::move(m)) {
  switch (kind_) {
    case Kind::Dense:
      modulus_ = dense_modulus(matrix_);
      break;
    case Kind::Identity:
      modulus_ = 1.0;
      break;
    case Kind::ScaledIdentity:
      modulus_ = std::abs(scale_) < kModulusTolerance ? 0.0 : std::abs(scale_);
      break;
  }
}

LinearMap LinearMap::dense(Matrix m) {
  if (m.rows() < 1 || m.cols() < 1) throw InputError("dense operator must be at least 1x1");
  require_finite(m, "dense operator");
  const auto r = m.rows();
  const auto c = m.cols();
  return LinearMap(Kind::Dense, r, c, 1.0, std::move(m));
}

LinearMap LinearMap::identity(Eigen::Index n) {
  if (n < 1) throw InputError("identity dimension must be >= 1");
  return LinearMap(Kind::Identity, n, n, 1.0, Matrix());
}

LinearMap LinearMap::scaled_identity(Eigen::Index n, double c) {
  if (n < 1) throw InputError("identity dimension must be >= 1");
  if (!std::isfinite(c)) throw InputError("identity scale must be finite");
  return LinearMap(Kind::ScaledIdentity, n, n, c, Matrix());
}

Vector LinearMap::apply(const Vector& x) const {
  require_dim(x, cols_, "LinearMap::apply");
  switch (kind_) {
    case Kind::Dense:
      return matrix_ * x;
    case Kind::Identity:
      return x;
    case Kind::ScaledIdentity:
      return scale_ * x;
  }
  return {};
}

Vector LinearMap::adjoint_apply(const Vector& y) const {
  require_dim(y, rows_, "LinearMap::adjoint_apply");
  switch (kind_) {
    case Kind::Dense:
      return matrix_.transpose() * y;
    case Kind::Identity:
      return y;
    case Kind::ScaledIdentity:
      return scale_ * y;
  }
  return {};
}

LinearMap LinearMap::adjoint() const {
  if (kind_ == Kind::Dense) return dense(matrix_.transpose());
  return *this;
}

Matrix LinearMap::as_dense() const {
  if (kind_ == Kind::Dense) return matrix_;
  return scale_ * Matrix::Identity(rows_, cols_);
}

double LinearMap::injectivity_modulus() const { return modulus_; }

bool LinearMap::operator==(const LinearMap& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && as_dense() == other.as_dense();
}

ModulusWitness smallest_singular_pair(const LinearMap& L) {
  const Matrix m = L.as_dense();
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Eigen::Index n = m.cols();
  if (m.rows() < n) {
    // Last right singular vector lies in the kernel.
    return {0.0, svd.matrixV().col(n - 1)};
  }
  Eigen::Index idx;
  const double s = svd.singularValues().minCoeff(&idx);
  return {s, svd.matrixV().col(idx)};
}

}  // namespace iadmm
