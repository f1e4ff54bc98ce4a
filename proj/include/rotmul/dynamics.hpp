#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "rotmul/discretization.hpp"

namespace rotmul {

/// Boundary feedback nonlinearity g.
class FeedbackLaw {
 public:
  /// g(s) = alpha s, alpha > 0.
  static FeedbackLaw linear(double alpha);
  /// g(s) = k |s|^{p-1} s for |s| <= 1 and K s beyond; p >= 1, 0 < k <= K.
  /// Leaving K unset makes g continuous (K = k).
  static FeedbackLaw power_law(double p, double k, std::optional<double> K = std::nullopt);

  bool is_linear() const { return linear_; }
  double p() const { return p_; }
  double k() const { return k_; }
  double K() const { return K_; }

  double operator()(double s) const;
  /// Derivative away from the splice |s| = 1 (one-sided there).
  double derivative(double s) const;

 private:
  FeedbackLaw(bool linear, double p, double k, double K) : linear_(linear), p_(p), k_(k), K_(K) {}
  bool linear_;
  double p_;
  double k_;
  double K_;
};

struct State {
  Eigen::VectorXd U;
  Eigen::VectorXd V;
};

/// Implicit midpoint for U' = V, V' = -K U - F(V) with the nodal feedback
/// F_i(V) = B_i sqrt(M_i) g(V_i / sqrt(M_i)), i.e. g acts on the physical
/// boundary velocity. For linear g this is exactly B g(V).
///
/// Each step satisfies E_{k+1} - E_k = -dt V_mid . F(V_mid) up to the inner
/// solver residual.
class MidpointIntegrator {
 public:
  MidpointIntegrator(const DiscreteOperators& ops, FeedbackLaw law, double dt);

  /// Advances one step; throws NumericalError when the inner Newton solve
  /// does not reach the residual tolerance within max_iterations.
  void step(State& state) const;

  double dt() const { return dt_; }
  /// Inner iterations used by the last nonlinear step.
  int last_iterations() const { return last_iterations_; }

  static constexpr int max_iterations = 100;
  static constexpr double residual_tolerance = 1e-12;

 private:
  Eigen::VectorXd feedback(const Eigen::VectorXd& v_active) const;

  const DiscreteOperators& ops_;
  FeedbackLaw law_;
  double dt_;
  // Linear law: factorization of I + dt^2/4 K + dt/2 B.
  Eigen::LLT<Eigen::MatrixXd> full_;
  // Nonlinear law: factorization of S = I + dt^2/4 K and S^{-1} columns on
  // the active feedback nodes.
  Eigen::LLT<Eigen::MatrixXd> base_;
  std::vector<Eigen::Index> active_;
  Eigen::MatrixXd inv_cols_;
  Eigen::MatrixXd inv_active_;
  Eigen::VectorXd weight_;  // B_i sqrt(M_i) on active nodes
  Eigen::VectorXd scale_;   // sqrt(M_i) on active nodes
  mutable int last_iterations_ = 0;
};

/// One implicit-midpoint step (convenience wrapper).
State step(const State& state, double dt, const DiscreteOperators& ops, const FeedbackLaw& law);

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> energies;
  /// Largest E_{k+1} - E_k over all steps, sampled or not.
  double max_step_increase = 0.0;

  std::size_t size() const { return times.size(); }
  void write_csv(std::ostream& out) const;
};

/// Integrates to t = T with round(T/dt) steps, sampling every
/// sample_every steps (the final state is always sampled).
EnergyTrace simulate(const State& initial, double T, double dt, const DiscreteOperators& ops,
                     const FeedbackLaw& law, std::size_t sample_every = 1);

/// Unit-norm eigenvector of the smallest eigenvalue of K, oriented so its
/// largest component is positive.
Eigen::VectorXd lowest_mode(const DiscreteOperators& ops);

struct FitWindow {
  double lo;
  double hi;
};

struct RateFit {
  double rate;
  double r_squared;
};

/// Negated least-squares slope of ln E against t over the window.
RateFit fit_exponential_rate(const EnergyTrace& trace, FitWindow window);
/// Negated least-squares slope of ln E against ln t (window.lo > 0).
RateFit fit_power_rate(const EnergyTrace& trace, FitWindow window);

inline FitWindow default_exponential_window(double T) { return {0.2 * T, 0.9 * T}; }
inline FitWindow default_power_window(double T) { return {0.5 * T, T}; }

struct KomornikResult {
  /// max over samples of (int_t^{T_end} E^{alpha+1}) / E(t), trapezoidal.
  double c_estimate;
  /// Whether E obeys the exponential (alpha = 0) or rational (alpha > 0)
  /// bound with T = C E(0)^alpha for every sample t >= T.
  bool bound_ok;
  /// Share of the integral carried by the second half of the trace.
  double tail_fraction;
  /// tail_fraction < 1%; otherwise the integral hypothesis is not supported
  /// by the trace and c_estimate grows with the window.
  bool hypothesis_ok;
};

/// Throws InputError for fewer than two samples, and NumericalError when E
/// reaches zero while the remaining tail integral is positive.
KomornikResult komornik_check(const EnergyTrace& trace, double alpha);

}  // namespace rotmul
