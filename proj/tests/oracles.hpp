// Independent reference computations shared by the unit and acceptance tests.
#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// (x - x0).R_{-theta}(nu), written out component-wise.
inline double m_dot_nu(double theta, const Eigen::Vector2d& x0, const Eigen::Vector2d& x, const Eigen::Vector2d& nu) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double mx = c * (x.x() - x0.x()) - s * (x.y() - x0.y());
  const double my = s * (x.x() - x0.x()) + c * (x.y() - x0.y());
  return mx * nu.x() + my * nu.y();
}

// Faddeev-LeVerrier: coefficients c[0..n] of det(zI - A), c[n] = 1.
inline std::vector<double> characteristic_polynomial(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  std::vector<double> c(static_cast<std::size_t>(n + 1), 0.0);
  c[static_cast<std::size_t>(n)] = 1.0;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    m = a * m + c[static_cast<std::size_t>(n - k + 1)] * id;
    c[static_cast<std::size_t>(n - k)] = -(a * m).trace() / static_cast<double>(k);
  }
  return c;
}

// Durand-Kerner simultaneous iteration on a monic polynomial.
inline std::vector<cplx> polynomial_roots(const std::vector<double>& c) {
  const std::size_t n = c.size() - 1;
  auto eval = [&](cplx z) {
    cplx v = 1.0;
    for (std::size_t k = n; k-- > 0;) v = v * z + c[k];
    return v;
  };
  double radius = 0.0;
  for (std::size_t k = 0; k < n; ++k) radius = std::max(radius, std::abs(c[k]));
  radius = 1.0 + radius;
  std::vector<cplx> z(n);
  for (std::size_t k = 0; k < n; ++k)
    z[k] = std::polar(0.5 * radius, 0.4 + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  for (int it = 0; it < 5000; ++it) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cplx denom = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) denom *= z[i] - z[j];
      const cplx dz = eval(z[i]) / denom;
      z[i] -= dz;
      change = std::max(change, std::abs(dz));
    }
    if (change < 1e-15) break;
  }
  return z;
}

// Largest distance from each value in a to its nearest unused partner in b.
inline double multiset_distance(const std::vector<cplx>& a, std::vector<cplx> b) {
  double worst = 0.0;
  for (const cplx& z : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](cplx x, cplx y) { return std::abs(x - z) < std::abs(y - z); });
    worst = std::max(worst, std::abs(*it - z));
    b.erase(it);
  }
  return worst;
}

inline Eigen::MatrixXd random_spd(Eigen::Index n, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = nd(rng);
  return g * g.transpose() + static_cast<double>(n) * Eigen::MatrixXd::Identity(n, n);
}

inline Eigen::VectorXd random_nonneg(Eigen::Index n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) b(i) = u(rng);
  return b;
}

// Spearman rank correlation (no ties expected).
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) r[idx[i]] = static_cast<double>(i);
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

}  // namespace oracle
