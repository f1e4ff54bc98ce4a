#include "rotmul/spectral.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "rotmul/errors.hpp"

namespace rotmul {

CompanionMatrix companion_matrix(const Eigen::MatrixXd& K, const Eigen::VectorXd& B) {
  const Eigen::Index n = K.rows();
  if (K.cols() != n || B.size() != n) throw InputError("K must be square and B must match its size");
  if (static_cast<std::size_t>(2 * n) > kMaxCompanionDimension)
    throw InputError("system too large for the dense eigensolver; use the time-domain fit");
  if (n == 0) throw InputError("empty operator");
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) throw NumericalError("K is not positive definite");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  m.topRightCorner(n, n).setIdentity();
  m.bottomLeftCorner(n, n) = -K;
  m.bottomRightCorner(n, n).diagonal() = -B;
  return CompanionMatrix(std::move(m));
}

CompanionMatrix companion_matrix(const DiscreteOperators& ops) { return companion_matrix(ops.K, ops.B); }

Balanced balance(const Eigen::MatrixXd& a) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  Balanced out{a, Eigen::VectorXd::Ones(a.rows())};
  Eigen::MatrixXd& m = out.matrix;
  const Eigen::Index n = m.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double r = 0.0;
      double c = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(m(j, i));
        r += std::abs(m(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        out.scaling(i) *= f;
        m.row(i) *= g;
        m.col(i) *= f;
      }
    }
  }
  return out;
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw InputError("eigenvalues need a square matrix");
  if (!a.allFinite()) throw NumericalError("matrix has non-finite entries");
  const Balanced b = balance(a);
  Eigen::EigenSolver<Eigen::MatrixXd> solver;
  solver.setMaxIterations(30 * std::max<Eigen::Index>(a.rows(), 1));
  solver.compute(b.matrix, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw NumericalError("QR iteration did not converge");
  std::vector<std::complex<double>> values(solver.eigenvalues().begin(), solver.eigenvalues().end());
  std::sort(values.begin(), values.end(), [](const auto& x, const auto& y) {
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  return values;
}

Spectrum spectrum(const CompanionMatrix& m) {
  Spectrum s;
  s.values = eigenvalues(m.matrix());
  s.abscissa = s.values.front().real();
  return s;
}

double spectral_abscissa(const CompanionMatrix& m) { return spectrum(m).abscissa; }

}  // namespace rotmul
