#include "rotmul/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "rotmul/errors.hpp"

namespace rotmul {

FeedbackLaw FeedbackLaw::linear(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InputError("linear feedback gain must be positive");
  return FeedbackLaw(true, 1.0, alpha, alpha);
}

FeedbackLaw FeedbackLaw::power_law(double p, double k, std::optional<double> K) {
  const double upper = K.value_or(k);
  if (!(p >= 1.0) || !std::isfinite(p)) throw InputError("power-law exponent p must be >= 1");
  if (!(k > 0.0) || !std::isfinite(k)) throw InputError("power-law coefficient k must be positive");
  if (!(upper >= k) || !std::isfinite(upper)) throw InputError("power-law bound K must satisfy K >= k");
  return FeedbackLaw(false, p, k, upper);
}

double FeedbackLaw::operator()(double s) const {
  if (linear_) return k_ * s;
  const double a = std::abs(s);
  if (a > 1.0) return K_ * s;
  return k_ * std::pow(a, p_ - 1.0) * s;
}

double FeedbackLaw::derivative(double s) const {
  if (linear_) return k_;
  const double a = std::abs(s);
  if (a > 1.0) return K_;
  if (p_ == 1.0) return k_;
  return k_ * p_ * std::pow(a, p_ - 1.0);
}

MidpointIntegrator::MidpointIntegrator(const DiscreteOperators& ops, FeedbackLaw law, double dt)
    : ops_(ops), law_(law), dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("time step must be positive");
  const Eigen::Index dim = ops.K.rows();
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(dim, dim) + (0.25 * dt * dt) * ops.K;
  if (law_.is_linear()) {
    Eigen::MatrixXd full = S;
    full.diagonal() += (0.5 * dt * law_.k()) * ops.B;
    full_.compute(full);
    if (full_.info() != Eigen::Success) throw NumericalError("midpoint system is not positive definite");
    return;
  }
  base_.compute(S);
  if (base_.info() != Eigen::Success) throw NumericalError("midpoint system is not positive definite");
  for (Eigen::Index i = 0; i < dim; ++i)
    if (ops.B(i) > 0.0) active_.push_back(i);
  const auto na = static_cast<Eigen::Index>(active_.size());
  Eigen::MatrixXd unit = Eigen::MatrixXd::Zero(dim, na);
  weight_.resize(na);
  scale_.resize(na);
  for (Eigen::Index a = 0; a < na; ++a) {
    const Eigen::Index i = active_[static_cast<std::size_t>(a)];
    unit(i, a) = 1.0;
    scale_(a) = std::sqrt(ops.mass(i));
    weight_(a) = ops.B(i) * scale_(a);
  }
  inv_cols_ = base_.solve(unit);
  inv_active_.resize(na, na);
  for (Eigen::Index a = 0; a < na; ++a) inv_active_.row(a) = inv_cols_.row(active_[static_cast<std::size_t>(a)]);
}

Eigen::VectorXd MidpointIntegrator::feedback(const Eigen::VectorXd& v_active) const {
  Eigen::VectorXd f(v_active.size());
  for (Eigen::Index a = 0; a < v_active.size(); ++a) f(a) = weight_(a) * law_(v_active(a) / scale_(a));
  return f;
}

void MidpointIntegrator::step(State& state) const {
  const double dt = dt_;
  // V_mid solves (I + dt^2/4 K) V_mid + dt/2 F(V_mid) = V - dt/2 K U.
  const Eigen::VectorXd rhs = state.V - (0.5 * dt) * (ops_.K * state.U);
  Eigen::VectorXd v_mid;
  if (law_.is_linear()) {
    v_mid = full_.solve(rhs);
    last_iterations_ = 1;
  } else {
    const Eigen::VectorXd free = base_.solve(rhs);
    const auto na = static_cast<Eigen::Index>(active_.size());
    // Reduced system on the active nodes: z + dt/2 P F(z) = a, P = S^{-1}|_NN.
    Eigen::VectorXd a(na);
    for (Eigen::Index k = 0; k < na; ++k) a(k) = free(active_[static_cast<std::size_t>(k)]);
    Eigen::VectorXd z = a;
    auto residual = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
      return y + (0.5 * dt) * (inv_active_ * feedback(y)) - a;
    };
    const double tol = residual_tolerance * std::max(1.0, a.lpNorm<Eigen::Infinity>());
    Eigen::VectorXd r = residual(z);
    double rnorm = na ? r.lpNorm<Eigen::Infinity>() : 0.0;
    int it = 0;
    while (rnorm > tol) {
      if (++it > max_iterations) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "inner Newton solve did not converge (residual %.3e)", rnorm);
        throw NumericalError(buf);
      }
      Eigen::MatrixXd J = Eigen::MatrixXd::Identity(na, na);
      for (Eigen::Index c = 0; c < na; ++c)
        J.col(c) += (0.5 * dt * ops_.B(active_[static_cast<std::size_t>(c)]) *
                     law_.derivative(z(c) / scale_(c))) * inv_active_.col(c);
      const Eigen::VectorXd delta = J.partialPivLu().solve(r);
      // Damped update: halve until the residual drops.
      double step_len = 1.0;
      Eigen::VectorXd trial = z - delta;
      Eigen::VectorXd r_trial = residual(trial);
      while (r_trial.lpNorm<Eigen::Infinity>() >= rnorm && step_len > 1e-4) {
        step_len *= 0.5;
        trial = z - step_len * delta;
        r_trial = residual(trial);
      }
      z = std::move(trial);
      r = std::move(r_trial);
      rnorm = r.lpNorm<Eigen::Infinity>();
    }
    last_iterations_ = it;
    v_mid = free - (0.5 * dt) * (inv_cols_ * feedback(z));
  }
  state.U += dt * v_mid;
  state.V = 2.0 * v_mid - state.V;
}

State step(const State& state, double dt, const DiscreteOperators& ops, const FeedbackLaw& law) {
  if (state.U.size() != ops.K.rows() || state.V.size() != ops.K.rows())
    throw InputError("state dimension does not match the operators");
  State next = state;
  MidpointIntegrator(ops, law, dt).step(next);
  return next;
}

void EnergyTrace::write_csv(std::ostream& out) const {
  out << "t,energy\n";
  char buf[64];
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", times[k], energies[k]);
    out << buf;
  }
}

EnergyTrace simulate(const State& initial, double T, double dt, const DiscreteOperators& ops,
                     const FeedbackLaw& law, std::size_t sample_every) {
  if (!(T > 0.0) || !std::isfinite(T)) throw InputError("final time must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("time step must be positive");
  if (sample_every == 0) throw InputError("sample interval must be at least 1");
  if (initial.U.size() != ops.K.rows() || initial.V.size() != ops.K.rows())
    throw InputError("state dimension does not match the operators");
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  if (steps == 0) throw InputError("final time is shorter than one step");

  MidpointIntegrator integrator(ops, law, dt);
  State s = initial;
  EnergyTrace trace;
  double e = discrete_energy(ops, s.U, s.V);
  trace.times.push_back(0.0);
  trace.energies.push_back(e);
  trace.max_step_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= steps; ++k) {
    integrator.step(s);
    const double next = discrete_energy(ops, s.U, s.V);
    if (!std::isfinite(next)) throw NumericalError("energy became non-finite");
    trace.max_step_increase = std::max(trace.max_step_increase, next - e);
    e = next;
    if (k % sample_every == 0 || k == steps) {
      trace.times.push_back(static_cast<double>(k) * dt);
      trace.energies.push_back(e);
    }
  }
  return trace;
}

Eigen::VectorXd lowest_mode(const DiscreteOperators& ops) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ops.K);
  if (eig.info() != Eigen::Success) throw NumericalError("symmetric eigensolve failed");
  Eigen::VectorXd v = eig.eigenvectors().col(0);
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0.0) v = -v;
  return v / v.norm();
}

namespace {

RateFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = x[k] - mx;
    const double dy = y[k] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw InputError("fit window has no spread in the abscissa");
  const double slope = sxy / sxx;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - (my + slope * (x[k] - mx));
    ss_res += r * r;
  }
  // A constant series is fit perfectly by a zero slope.
  const double r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return {slope == 0.0 ? 0.0 : -slope, r2};
}

RateFit fit_logs(const EnergyTrace& trace, FitWindow window, bool log_time) {
  if (trace.times.size() != trace.energies.size()) throw InputError("malformed trace");
  if (!(window.lo <= window.hi)) throw InputError("fit window is reversed");
  if (log_time && !(window.lo > 0.0)) throw InputError("power-law fit window must start after t = 0");
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    const double t = trace.times[k];
    if (t < window.lo || t > window.hi) continue;
    const double e = trace.energies[k];
    if (!(e > 0.0)) throw InputError("energy is not positive inside the fit window");
    x.push_back(log_time ? std::log(t) : t);
    y.push_back(std::log(e));
  }
  if (x.size() < 3) throw InputError("fewer than 3 samples inside the fit window");
  return least_squares(x, y);
}

}  // namespace

RateFit fit_exponential_rate(const EnergyTrace& trace, FitWindow window) {
  return fit_logs(trace, window, false);
}

RateFit fit_power_rate(const EnergyTrace& trace, FitWindow window) { return fit_logs(trace, window, true); }

KomornikResult komornik_check(const EnergyTrace& trace, double alpha) {
  const auto& t = trace.times;
  const auto& e = trace.energies;
  if (t.size() != e.size() || t.size() < 2) throw InputError("trace needs at least two samples");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InputError("alpha must be >= 0");
  const std::size_t n = t.size();

  // tail[k] = trapezoidal integral of E^{alpha+1} over [t_k, t_end].
  std::vector<double> tail(n, 0.0);
  for (std::size_t k = n - 1; k-- > 0;) {
    const double fa = std::pow(e[k], alpha + 1.0);
    const double fb = std::pow(e[k + 1], alpha + 1.0);
    tail[k] = tail[k + 1] + 0.5 * (t[k + 1] - t[k]) * (fa + fb);
  }

  KomornikResult res{};
  res.c_estimate = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (e[k] == 0.0) {
      if (tail[k] > 0.0) throw NumericalError("energy vanishes while the tail integral is positive");
      continue;
    }
    res.c_estimate = std::max(res.c_estimate, tail[k] / e[k]);
  }

  const double t_half = 0.5 * (t.front() + t.back());
  std::size_t mid = 0;
  while (mid + 1 < n && t[mid] < t_half) ++mid;
  res.tail_fraction = tail[0] > 0.0 ? tail[mid] / tail[0] : 0.0;
  res.hypothesis_ok = res.tail_fraction < 0.01;

  const double e0 = e.front();
  const double T = res.c_estimate * std::pow(e0, alpha);
  constexpr double rel_tol = 1e-9;
  res.bound_ok = true;
  for (std::size_t k = 0; k < n; ++k) {
    if (t[k] < T) continue;
    double bound = 0.0;
    if (alpha == 0.0) {
      bound = T > 0.0 ? e0 * std::exp(1.0 - t[k] / T) : 0.0;
    } else {
      bound = e0 * std::pow((T + alpha * T) / (T + alpha * t[k]), 1.0 / alpha);
    }
    if (e[k] > bound * (1.0 + rel_tol)) {
      res.bound_ok = false;
      break;
    }
  }
  return res;
}

}  // namespace rotmul
