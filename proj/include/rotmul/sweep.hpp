#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rotmul/geometry.hpp"

namespace rotmul {

/// Largest theta for which the reference partition admits pivots on the
/// half-line (the right edge stays Neumann iff tan(theta) <= 2).
double max_sweep_theta();

/// Point of the half-line D_theta: pivots x0 with m.nu = 0 at the interface
/// (0, 1/2) of the reference square partition, parametrized by arc length
/// lambda >= 0 from its first admissible point p_min.
struct DThetaPoint {
  Vec2 x0;
  Vec2 p_min;
  /// Unit direction (-sin theta, -cos theta) of the half-line.
  Vec2 direction;
  /// Distance of p_min from the interface point (0, 1/2) along direction.
  double mu_min;
};

/// Solves the sign constraints of the reference partition along the line
/// and returns x0 = p_min + lambda * direction. Throws InputError when
/// lambda < 0 or no admissible point exists on the line.
DThetaPoint d_theta_point(double theta, double lambda);

enum class SweepMode { Spectral, TimeDomain, Both };
SweepMode parse_sweep_mode(const std::string& name);

struct TimeDomainOptions {
  double t_final = 1600.0;
  double dt = 5e-3;
  std::size_t sample_every = 20;
};

struct SweepOptions {
  std::size_t n = 10;
  double alpha = 1.0;
  SweepMode mode = SweepMode::Spectral;
  TimeDomainOptions time_domain;
  bool clamp = false;
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 0;
};

struct SweepRecord {
  double theta = 0.0;
  double lambda = 0.0;
  Vec2 x0 = Vec2::Zero();
  bool s1_ok = false;
  bool s2_ok = false;
  std::optional<double> abscissa;
  std::optional<double> fitted_rate;
  std::optional<double> rel_err;
  /// Failure captured for this grid point, if any.
  std::string error;
};

/// Default grid: count values uniform in [0, arctan 2].
std::vector<double> default_theta_grid(std::size_t count = 8);
std::vector<double> default_lambda_grid();

/// One record per (theta, lambda), theta outer and lambda inner, whatever
/// the execution order. Per-record failures are stored, not thrown.
std::vector<SweepRecord> run_sweep(const std::vector<double>& thetas, const std::vector<double>& lambdas,
                                   const SweepOptions& options);

/// Columns theta,lambda,x0x,x0y,s1_ok,s2_ok,abscissa,fitted_rate,rel_err;
/// absent values are empty fields.
std::string sweep_to_csv(const std::vector<SweepRecord>& records);

/// Grayscale heatmap of |abscissa|, one row per theta and one column per
/// lambda. Throws InputError for an empty record list or a non-rectangular
/// grid.
std::string sweep_to_svg(const std::vector<SweepRecord>& records, double cell_px = 40.0);

}  // namespace rotmul
