// Independent reference computations for the test suites. Nothing here calls
// into the library's prox or solver code.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }

  Vec vec(Eigen::Index n, double scale = 1.0) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * normal();
    return v;
  }
  Mat mat(Eigen::Index r, Eigen::Index c) {
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = normal();
    return m;
  }
  // Symmetric positive definite with eigenvalues in [lo, hi].
  Mat spd(Eigen::Index n, double lo = 0.2, double hi = 3.0) {
    Eigen::HouseholderQR<Mat> qr(mat(n, n));
    Mat U = qr.householderQ();
    Vec d(n);
    for (Eigen::Index i = 0; i < n; ++i) d[i] = uniform(lo, hi);
    return U * d.asDiagonal() * U.transpose();
  }
};

inline double soft(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

inline Vec soft(const Vec& x, double t) {
  Vec y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) y[i] = soft(x[i], t);
  return y;
}

inline Vec clamp(const Vec& x, const Vec& lo, const Vec& hi) {
  Vec y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) y[i] = std::min(std::max(x[i], lo[i]), hi[i]);
  return y;
}

// prox of gamma * tau * ||. - c||_1
inline Vec prox_l1(double gamma, double tau, const Vec& c, const Vec& x) { return c + soft(x - c, gamma * tau); }

// prox of gamma * tau * ||. - c||_2
inline Vec prox_l2(double gamma, double tau, const Vec& c, const Vec& x) {
  const Vec d = x - c;
  const double r = d.norm();
  if (r <= gamma * tau) return c;
  return c + (1.0 - gamma * tau / r) * d;
}

// prox of gamma (1/2 y'Qy + q'y): (I + gamma Q) y = x - gamma q
inline Vec prox_quadratic(double gamma, const Mat& Q, const Vec& q, const Vec& x) {
  const Mat A = Mat::Identity(x.size(), x.size()) + gamma * Q;
  return A.fullPivLu().solve(x - gamma * q);
}

inline Vec project_hyperplane(const Vec& a, double b, const Vec& x) { return x - ((a.dot(x) - b) / a.squaredNorm()) * a; }

// sup_x u x - f(x) on [-R, R] by a grid followed by repeated zooming.
inline double conjugate_1d(const std::function<double(double)>& f, double u, double R = 50.0) {
  double lo = -R, hi = R, best = -INFINITY, arg = 0.0;
  for (int round = 0; round < 12; ++round) {
    const int N = 2000;
    for (int i = 0; i <= N; ++i) {
      const double x = lo + (hi - lo) * i / N;
      const double val = u * x - f(x);
      if (val > best) {
        best = val;
        arg = x;
      }
    }
    const double w = (hi - lo) / N * 4;
    lo = std::max(-R, arg - w);
    hi = std::min(R, arg + w);
  }
  return best;
}

// Long-run proximal gradient for 1/2||Dx - b||^2 + tau||x||_1.
inline Vec lasso_pg(const Mat& D, const Vec& b, double tau, int iters = 200000) {
  const double Lip = Eigen::JacobiSVD<Mat>(D).singularValues()(0);
  const double step = 1.0 / (Lip * Lip);
  Vec x = Vec::Zero(D.cols());
  for (int k = 0; k < iters; ++k) {
    const Vec next = soft(x - step * D.transpose() * (D * x - b), step * tau);
    if ((next - x).norm() < 1e-15) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

// Textbook ADMM for min f(x) + g(Lx) with user-supplied argmins.
struct TextbookAdmm {
  std::function<Vec(const Vec& y, const Vec& z)> x_argmin;  // argmin f + <y,Lx> + gamma/2||Lx - z||^2
  std::function<Vec(const Vec& arg)> prox_g;                // prox_{g/gamma}
  std::function<Vec(const Vec& x)> L;
  double gamma;
  double lambda = 1.0;

  void step(Vec& x, Vec& z, Vec& y) const {
    x = x_argmin(y, z);
    const Vec Lx = L(x);
    const Vec mix = lambda * Lx + (1.0 - lambda) * z;
    const Vec z_next = prox_g(mix + y / gamma);
    y = y + gamma * (mix - z_next);
    z = z_next;
  }
};

}  // namespace oracle
