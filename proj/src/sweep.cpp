#include "rotmul/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "rotmul/discretization.hpp"
#include "rotmul/dynamics.hpp"
#include "rotmul/errors.hpp"
#include "rotmul/parallel.hpp"
#include "rotmul/spectral.hpp"

namespace rotmul {

namespace {

const Vec2 kInterface{0.0, 0.5};

// Affine constraint sign * (c0 + c1 mu) >= 0 along the line.
struct LineConstraint {
  double c0;
  double c1;
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v + 0.0);  // folds -0 into 0
  return buf;
}

std::string optional_field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

double max_sweep_theta() { return std::atan(2.0); }

DThetaPoint d_theta_point(double theta, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InputError("lambda must be >= 0");
  const Vec2 direction(-std::sin(theta), -std::cos(theta));
  const auto square = PolygonDomain::unit_square();
  const auto partition = reference_square_partition();

  // Each condition is affine in the line parameter mu (x0 = interface + mu
  // * direction); recover its coefficients from two evaluations.
  auto along = [&](auto&& quantity) -> LineConstraint {
    const double at0 = quantity(MultiplierField(theta, kInterface));
    const double at1 = quantity(MultiplierField(theta, kInterface + direction));
    return {at0, at1 - at0};
  };
  std::vector<LineConstraint> constraints;
  for (const auto& s : partition.segments) {
    const Vec2 nu = square.edge(s.edge).normal();
    const double sign = s.condition == Condition::Neumann ? 1.0 : -1.0;
    for (const Vec2& p : {s.a, s.b}) {
      const auto c = along([&](const MultiplierField& f) { return f(p).dot(nu); });
      constraints.push_back({sign * c.c0, sign * c.c1});
    }
  }
  for (const auto& ip : partition.interfaces) {
    if (ip.at_vertex) continue;  // corners of angle < pi need no orientation check
    const auto c = along([&](const MultiplierField& f) { return f(ip.position).dot(ip.tau); });
    constraints.push_back({-c.c0, -c.c1});
  }

  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (const auto& c : constraints) {
    if (std::abs(c.c1) <= 1e-14) {
      if (c.c0 < -kSignTolerance) throw InputError("no admissible pivot on D_theta for this theta");
      continue;
    }
    const double root = -c.c0 / c.c1;
    if (c.c1 > 0.0)
      lo = std::max(lo, root);
    else
      hi = std::min(hi, root);
  }
  if (!(lo <= hi + 1e-12) || !std::isfinite(lo))
    throw InputError("no admissible pivot on D_theta for this theta");

  DThetaPoint out;
  out.direction = direction;
  out.mu_min = lo;
  out.p_min = kInterface + lo * direction;
  out.x0 = out.p_min + lambda * direction;
  return out;
}

SweepMode parse_sweep_mode(const std::string& name) {
  if (name == "spectral") return SweepMode::Spectral;
  if (name == "timedomain") return SweepMode::TimeDomain;
  if (name == "both") return SweepMode::Both;
  throw InputError("sweep mode must be spectral, timedomain or both");
}

std::vector<double> default_theta_grid(std::size_t count) {
  if (count == 0) throw InputError("theta grid must be nonempty");
  std::vector<double> grid(count, 0.0);
  if (count == 1) return grid;
  for (std::size_t k = 0; k < count; ++k)
    grid[k] = max_sweep_theta() * static_cast<double>(k) / static_cast<double>(count - 1);
  return grid;
}

std::vector<double> default_lambda_grid() { return {0.0, 0.25, 0.5, 1.0}; }

std::vector<SweepRecord> run_sweep(const std::vector<double>& thetas, const std::vector<double>& lambdas,
                                   const SweepOptions& options) {
  if (thetas.empty() || lambdas.empty()) throw InputError("sweep grids must be nonempty");
  const bool spectral = options.mode != SweepMode::TimeDomain;
  const bool timed = options.mode != SweepMode::Spectral;
  if (options.n < 2) throw InputError("grid needs n >= 2");
  const auto square = PolygonDomain::unit_square();
  const auto partition = reference_square_partition();
  std::vector<SweepRecord> records(thetas.size() * lambdas.size());
  parallel_for(records.size(), options.threads, [&](std::size_t idx) {
    SweepRecord& rec = records[idx];
    rec.theta = thetas[idx / lambdas.size()];
    rec.lambda = lambdas[idx % lambdas.size()];
    try {
      const auto point = d_theta_point(rec.theta, rec.lambda);
      rec.x0 = point.x0;
      const MultiplierField field(rec.theta, rec.x0);
      const auto report = check_conditions(square, partition, field);
      rec.s1_ok = report.s1_ok();
      rec.s2_ok = report.s2_ok && report.r_ok;
      const auto ops = square_operators(options.n, partition, field, options.alpha, {options.clamp});
      if (spectral) rec.abscissa = spectral_abscissa(companion_matrix(ops));
      if (timed) {
        const auto& td = options.time_domain;
        const State initial{lowest_mode(ops), Eigen::VectorXd::Zero(ops.K.rows())};
        const auto trace = simulate(initial, td.t_final, td.dt, ops, FeedbackLaw::linear(1.0), td.sample_every);
        rec.fitted_rate = fit_exponential_rate(trace, default_exponential_window(td.t_final)).rate;
      }
      if (rec.abscissa && rec.fitted_rate && *rec.abscissa != 0.0)
        rec.rel_err = std::abs(*rec.fitted_rate + 2.0 * *rec.abscissa) / std::abs(2.0 * *rec.abscissa);
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
  });
  return records;
}

std::string sweep_to_csv(const std::vector<SweepRecord>& records) {
  std::string out = "theta,lambda,x0x,x0y,s1_ok,s2_ok,abscissa,fitted_rate,rel_err\n";
  for (const auto& r : records) {
    out += format_double(r.theta) + ',' + format_double(r.lambda) + ',' + format_double(r.x0.x()) + ',' +
           format_double(r.x0.y()) + ',' + (r.s1_ok ? "1" : "0") + ',' + (r.s2_ok ? "1" : "0") + ',' +
           optional_field(r.abscissa) + ',' + optional_field(r.fitted_rate) + ',' + optional_field(r.rel_err) +
           '\n';
  }
  return out;
}

std::string sweep_to_svg(const std::vector<SweepRecord>& records, double cell_px) {
  if (records.empty()) throw InputError("no records to draw");
  std::size_t cols = 0;
  while (cols < records.size() && records[cols].theta == records.front().theta) ++cols;
  if (records.size() % cols != 0) throw InputError("records do not form a theta x lambda grid");
  const std::size_t rows = records.size() / cols;

  double vmax = 0.0;
  for (const auto& r : records)
    if (r.abscissa) vmax = std::max(vmax, std::abs(*r.abscissa));

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cols * cell_px << "\" height=\""
      << rows * cell_px << "\">\n";
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const auto& r = records[i * cols + j];
      std::string fill = "none";
      if (r.abscissa) {
        // Darker cells decay faster.
        const double t = vmax > 0.0 ? std::abs(*r.abscissa) / vmax : 0.0;
        const int level = static_cast<int>(std::lround(255.0 * (1.0 - t)));
        char buf[16];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", level, level, level);
        fill = buf;
      }
      svg << "<rect x=\"" << static_cast<double>(j) * cell_px << "\" y=\"" << static_cast<double>(i) * cell_px
          << "\" width=\"" << cell_px << "\" height=\"" << cell_px << "\" fill=\"" << fill
          << "\" stroke=\"#808080\"><title>theta=" << format_double(r.theta)
          << " lambda=" << format_double(r.lambda) << "</title></rect>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace rotmul
