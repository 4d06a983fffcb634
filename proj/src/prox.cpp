#include "iadmm/prox.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>
#include <variant>

#include "iadmm/errors.hpp"

namespace iadmm {

namespace {

void require_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InputError("prox parameter must be positive and finite");
}

struct ZeroFn {
  Eigen::Index n;
  double eval(const Vector&) const { return 0.0; }
  Vector prox(double, const Vector& x) const { return x; }
  double conj(const Vector& u) const {
    return u.lpNorm<Eigen::Infinity>() <= kMembershipTolerance ? 0.0 : kInfinity;
  }
};

struct QuadraticFn {
  QuadraticData data;
  // Q = V diag(d) V'
  Matrix V;
  Vector d;
  double null_threshold;

  double eval(const Vector& x) const { return 0.5 * x.dot(data.Q * x) + data.q.dot(x) + data.r; }

  Vector prox(double gamma, const Vector& x) const {
    const Vector c = V.transpose() * (x - gamma * data.q);
    const Vector scaled = c.array() / (1.0 + gamma * d.array());
    return V * scaled;
  }

  double conj(const Vector& u) const {
    const Vector w = u - data.q;
    const Vector c = V.transpose() * w;
    const double slack = kMembershipTolerance * (1.0 + w.norm());
    double value = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (d[i] <= null_threshold) {
        if (std::abs(c[i]) > slack) return kInfinity;
      } else {
        value += 0.5 * c[i] * c[i] / d[i];
      }
    }
    return value - data.r;
  }
};

struct L1Fn {
  double tau;
  Vector center;
  double eval(const Vector& x) const { return tau * (x - center).lpNorm<1>(); }
  Vector prox(double gamma, const Vector& x) const {
    const double k = gamma * tau;
    const Vector s = x - center;
    return center + (s.array().sign() * (s.array().abs() - k).max(0.0)).matrix();
  }
  double conj(const Vector& u) const {
    if (u.lpNorm<Eigen::Infinity>() > tau + kMembershipTolerance * std::max(1.0, tau)) return kInfinity;
    return center.dot(u);
  }
};

struct L2NormFn {
  double tau;
  Vector center;
  double eval(const Vector& x) const { return tau * (x - center).norm(); }
  Vector prox(double gamma, const Vector& x) const {
    const Vector s = x - center;
    const double nrm = s.norm();
    const double k = gamma * tau;
    if (nrm <= k) return center;
    return center + (1.0 - k / nrm) * s;
  }
  double conj(const Vector& u) const {
    if (u.norm() > tau + kMembershipTolerance * std::max(1.0, tau)) return kInfinity;
    return center.dot(u);
  }
};

struct PointFn {
  Vector a;
  double eval(const Vector& x) const {
    const double slack = kMembershipTolerance * (1.0 + a.lpNorm<Eigen::Infinity>());
    return (x - a).lpNorm<Eigen::Infinity>() <= slack ? 0.0 : kInfinity;
  }
  Vector prox(double, const Vector&) const { return a; }
  double conj(const Vector& u) const { return a.dot(u); }
};

struct BoxFn {
  Vector lo;
  Vector hi;
  double eval(const Vector& x) const {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x[i] < lo[i] - kMembershipTolerance * (1.0 + std::abs(lo[i])) ||
          x[i] > hi[i] + kMembershipTolerance * (1.0 + std::abs(hi[i]))) {
        return kInfinity;
      }
    }
    return 0.0;
  }
  Vector prox(double, const Vector& x) const { return x.cwiseMax(lo).cwiseMin(hi); }
  // Support function of the box.
  double conj(const Vector& u) const {
    return (u.array() * lo.array()).max(u.array() * hi.array()).sum();
  }
};

struct HyperplaneFn {
  Vector a;
  double b;
  double eval(const Vector& x) const {
    const double slack = kMembershipTolerance * (1.0 + std::abs(b) + a.norm() * x.norm());
    return std::abs(a.dot(x) - b) <= slack ? 0.0 : kInfinity;
  }
  Vector prox(double, const Vector& x) const { return x - ((a.dot(x) - b) / a.squaredNorm()) * a; }
  // Finite only on span{a}: u = t a gives t b.
  double conj(const Vector& u) const {
    const double t = u.dot(a) / a.squaredNorm();
    if ((u - t * a).norm() > kMembershipTolerance * (1.0 + u.norm())) return kInfinity;
    return t * b;
  }
};

struct BlockSumFn {
  std::vector<ConvexFn> blocks;
  std::vector<Eigen::Index> offsets;

  double eval(const Vector& x) const {
    double total = 0.0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      total += blocks[i].eval(x.segment(offsets[i], blocks[i].dim()));
      if (total == kInfinity) return kInfinity;
    }
    return total;
  }
  Vector prox(double gamma, const Vector& x) const {
    Vector out(x.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      out.segment(offsets[i], blocks[i].dim()) = blocks[i].prox(gamma, x.segment(offsets[i], blocks[i].dim()));
    }
    return out;
  }
  double conj(const Vector& u) const {
    double total = 0.0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      total += blocks[i].conj_eval(u.segment(offsets[i], blocks[i].dim()));
      if (total == kInfinity) return kInfinity;
    }
    return total;
  }
};

struct ConsensusFn {
  Eigen::Index m;
  Eigen::Index n;

  Vector block_mean(const Vector& x) const {
    Vector mean = Vector::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i) mean += x.segment(i * n, n);
    return mean / static_cast<double>(m);
  }
  double eval(const Vector& x) const {
    const Vector mean = block_mean(x);
    const double slack = kMembershipTolerance * (1.0 + mean.norm());
    for (Eigen::Index i = 0; i < m; ++i) {
      if ((x.segment(i * n, n) - mean).norm() > slack) return kInfinity;
    }
    return 0.0;
  }
  Vector prox(double, const Vector& x) const { return block_mean(x).replicate(m, 1); }
  // Conjugate of the diagonal-subspace indicator is the indicator of its
  // orthogonal complement {sum_i u_i = 0}.
  double conj(const Vector& u) const {
    const Vector sum = block_mean(u) * static_cast<double>(m);
    return sum.norm() <= kMembershipTolerance * (1.0 + u.norm()) ? 0.0 : kInfinity;
  }
};

using Variant = std::variant<ZeroFn, QuadraticFn, L1Fn, L2NormFn, PointFn, BoxFn, HyperplaneFn, BlockSumFn,
                             ConsensusFn>;

Vector center_or_zero(Eigen::Index n, std::optional<Vector> center) {
  if (!center) return Vector::Zero(n);
  require_dim(*center, n, "function center");
  require_finite(*center, "function center");
  return std::move(*center);
}

void require_weight(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InputError("weight tau must be positive and finite");
}

}  // namespace

struct ConvexFn::Impl {
  Kind kind;
  Eigen::Index n;
  Variant fn;
};

ConvexFn::ConvexFn(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

ConvexFn ConvexFn::zero(Eigen::Index n) {
  if (n < 1) throw InputError("function dimension must be >= 1");
  return ConvexFn(std::make_shared<const Impl>(Impl{Kind::Zero, n, ZeroFn{n}}));
}

ConvexFn ConvexFn::quadratic(Matrix Q, Vector q, double r) {
  const Eigen::Index n = Q.rows();
  if (n < 1 || Q.cols() != n) throw InputError("quadratic: Q must be square and nonempty");
  require_dim(q, n, "quadratic: q");
  require_finite(Q, "quadratic: Q");
  require_finite(q, "quadratic: q");
  if (!std::isfinite(r)) throw InputError("quadratic: r must be finite");
  const double scale = 1.0 + Q.cwiseAbs().maxCoeff();
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw InputError("quadratic: Q must be symmetric");
  Q = 0.5 * (Q + Q.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Q);
  Vector d = eig.eigenvalues();
  if (d.minCoeff() < -1e-12 * scale) throw InputError("quadratic: Q must be positive semidefinite");
  d = d.cwiseMax(0.0);
  QuadraticFn fn{QuadraticData{std::move(Q), std::move(q), r}, eig.eigenvectors(), d,
                 1e-12 * std::max(1.0, d.maxCoeff())};
  return ConvexFn(std::make_shared<const Impl>(Impl{Kind::Quadratic, n, std::move(fn)}));
}

ConvexFn ConvexFn::l1(Eigen::Index n, double tau, std::optional<Vector> center) {
  if (n < 1) throw InputError("function dimension must be >= 1");
  require_weight(tau);
  return ConvexFn(std::make_shared<const Impl>(Impl{Kind::L1, n, L1Fn{tau, center_or_zero(n, std::move(center))}}));
}

ConvexFn ConvexFn::l2norm(Eigen::Index n, double tau, std::optional<Vector> center) {
  if (n < 1) throw InputError("function dimension must be >= 1");
  require_weight(tau);
  return ConvexFn(
      std::make_shared<const Impl>(Impl{Kind::L2Norm, n, L2NormFn{tau, center_or_zero(n, std::move(center))}}));
}

ConvexFn ConvexFn::indicator_point(Vector a) {
  if (a.size() < 1) throw InputError("function dimension must be >= 1");
  require_finite(a, "indicator_point: a");
  const auto n = a.size();
  return ConvexFn(std::make_shared<const Impl>(Impl{Kind::IndicatorPoint, n, PointFn{std::move(a)}}));
}

ConvexFn ConvexFn::indicator_box(Vector lo, Vector hi) {
  if (lo.size() < 1) throw InputError("function dimension must be >= 1");
  require_dim(hi, lo.size(), "indicator_box: hi");
  require_finite(lo, "indicator_box: lo");
  require_finite(hi, "indicator_box: hi");
  if ((lo.array() > hi.array()).any()) throw InputError("indicator_box: lo must not exceed hi");
  const auto n = lo.size();
  return ConvexFn(std::make_shared<const Impl>(Impl{Kind::IndicatorBox, n, BoxFn{std::move(lo), std::move(hi)}}));
}

ConvexFn ConvexFn::indicator_hyperplane(Vector a, double b) {
  if (a.size() < 1) throw InputError("function dimension must be >= 1");
  require_finite(a, "indicator_hyperplane: a");
  if (!std::isfinite(b)) throw InputError("indicator_hyperplane: b must be finite");
  if (a.norm() == 0.0) throw InputError("indicator_hyperplane: normal vector must be nonzero");
  const auto n = a.size();
  return ConvexFn(std::make_shared<const Impl>(Impl{Kind::IndicatorHyperplane, n, HyperplaneFn{std::move(a), b}}));
}

ConvexFn ConvexFn::block_sum(std::vector<ConvexFn> blocks) {
  if (blocks.empty()) throw InputError("block_sum: needs at least one block");
  std::vector<Eigen::Index> offsets;
  Eigen::Index n = 0;
  for (const auto& b : blocks) {
    offsets.push_back(n);
    n += b.dim();
  }
  return ConvexFn(
      std::make_shared<const Impl>(Impl{Kind::BlockSum, n, BlockSumFn{std::move(blocks), std::move(offsets)}}));
}

ConvexFn ConvexFn::indicator_consensus(Eigen::Index blocks, Eigen::Index n) {
  if (blocks < 1 || n < 1) throw InputError("indicator_consensus: block count and dimension must be >= 1");
  return ConvexFn(std::make_shared<const Impl>(Impl{Kind::IndicatorConsensus, blocks * n, ConsensusFn{blocks, n}}));
}

ConvexFn::Kind ConvexFn::kind() const { return impl_->kind; }

std::string_view ConvexFn::kind_name() const {
  switch (impl_->kind) {
    case Kind::Zero: return "zero";
    case Kind::Quadratic: return "quadratic";
    case Kind::L1: return "l1";
    case Kind::L2Norm: return "l2norm";
    case Kind::IndicatorPoint: return "indicator_point";
    case Kind::IndicatorBox: return "indicator_box";
    case Kind::IndicatorHyperplane: return "indicator_hyperplane";
    case Kind::BlockSum: return "block_sum";
    case Kind::IndicatorConsensus: return "indicator_consensus";
  }
  return "unknown";
}

Eigen::Index ConvexFn::dim() const { return impl_->n; }

double ConvexFn::eval(const Vector& x) const {
  require_dim(x, impl_->n, "ConvexFn::eval");
  return std::visit([&](const auto& fn) { return fn.eval(x); }, impl_->fn);
}

Vector ConvexFn::prox(double gamma, const Vector& x) const {
  require_gamma(gamma);
  require_dim(x, impl_->n, "ConvexFn::prox");
  return std::visit([&](const auto& fn) -> Vector { return fn.prox(gamma, x); }, impl_->fn);
}

double ConvexFn::conj_eval(const Vector& u) const {
  require_dim(u, impl_->n, "ConvexFn::conj_eval");
  return std::visit([&](const auto& fn) { return fn.conj(u); }, impl_->fn);
}

Vector ConvexFn::conj_prox(double gamma, const Vector& x) const {
  require_gamma(gamma);
  require_dim(x, impl_->n, "ConvexFn::conj_prox");
  return x - gamma * prox(1.0 / gamma, x / gamma);
}

const QuadraticData* ConvexFn::as_quadratic() const {
  if (const auto* q = std::get_if<QuadraticFn>(&impl_->fn)) return &q->data;
  return nullptr;
}

const std::vector<ConvexFn>& ConvexFn::blocks() const {
  static const std::vector<ConvexFn> none;
  if (const auto* b = std::get_if<BlockSumFn>(&impl_->fn)) return b->blocks;
  return none;
}

}  // namespace iadmm
