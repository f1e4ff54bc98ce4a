#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "rotmul/discretization.hpp"

namespace rotmul {

/// Largest first-order system handled by the dense eigensolver.
inline constexpr std::size_t kMaxCompanionDimension = 2000;

/// First-order form [[0, I], [-K, -B]] of U'' + B U' + K U = 0. Its
/// eigenvalues are the roots of det(lambda^2 I + lambda B + K).
class CompanionMatrix {
 public:
  explicit CompanionMatrix(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {}
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }

 private:
  Eigen::MatrixXd matrix_;
};

/// Throws NumericalError when K is not positive definite and InputError
/// above kMaxCompanionDimension.
CompanionMatrix companion_matrix(const Eigen::MatrixXd& K, const Eigen::VectorXd& B);
CompanionMatrix companion_matrix(const DiscreteOperators& ops);

/// Parlett-Reinsch diagonal balancing with power-of-two scalings, so the
/// similarity D^{-1} A D is exact in floating point.
struct Balanced {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd scaling;
};
Balanced balance(const Eigen::MatrixXd& a);

/// All eigenvalues of a real square matrix: balancing, Hessenberg reduction
/// and Francis double-shift QR. Sorted by decreasing real part, then by
/// decreasing imaginary part. Throws NumericalError when QR does not
/// converge within 30 iterations per row.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& a);

/// max Re(lambda) over the spectrum.
double spectral_abscissa(const CompanionMatrix& m);

struct Spectrum {
  std::vector<std::complex<double>> values;
  double abscissa;
};
Spectrum spectrum(const CompanionMatrix& m);

}  // namespace rotmul
