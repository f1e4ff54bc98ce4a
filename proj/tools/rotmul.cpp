// rotmul: command line driver for the rotated-multiplier workbench.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rotmul/config.hpp"
#include "rotmul/discretization.hpp"
#include "rotmul/dynamics.hpp"
#include "rotmul/errors.hpp"
#include "rotmul/geometry.hpp"
#include "rotmul/rellich.hpp"
#include "rotmul/spectral.hpp"
#include "rotmul/sweep.hpp"

namespace {

using namespace rotmul;

struct Options {
  double theta = 0.0;
  std::vector<double> x0{0.0, 0.0};
  std::optional<double> lambda;
  std::string polygon;
  std::string partition;
  std::size_t n = 10;
  double alpha = 1.0;
  double p = 1.0;
  // Unset means the subcommand default.
  std::optional<double> t_final;
  std::optional<double> dt;
  std::size_t sample_every = 1;
  std::string out;
  std::string format = "csv";
  bool clamp = false;
  std::string config;
  // admissible
  std::vector<double> window{-2.0, 3.0, -2.0, 3.0};
  std::vector<std::size_t> resolution{50, 50};
  // rellich
  std::string u = "x2+y2";
  int q = 2048;
  bool symmetric = false;
  // spectrum
  bool all = false;
  std::string coo;
  // sweep
  std::size_t theta_count = 8;
  std::vector<double> thetas;
  std::vector<double> lambdas;
  std::string mode = "spectral";
  unsigned threads = 0;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v + 0.0);
  return buf;
}

std::string fmt(const Vec2& v) { return "(" + fmt(v.x()) + ", " + fmt(v.y()) + ")"; }

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw InputError("cannot write " + o.out);
  f << text;
  if (!f) throw InputError("failed writing " + o.out);
}

PolygonDomain domain_of(const Options& o) {
  return o.polygon.empty() ? PolygonDomain::unit_square() : PolygonDomain::load(o.polygon);
}

Vec2 pivot_of(const Options& o) {
  if (o.lambda) return d_theta_point(o.theta, *o.lambda).x0;
  return {o.x0[0], o.x0[1]};
}

BoundaryPartition partition_of(const Options& o, const PolygonDomain& domain, const MultiplierField& field,
                               const std::string& fallback) {
  const std::string rule = o.partition.empty() ? fallback : o.partition;
  if (rule == "auto") return build_partition(domain, field);
  if (rule == "reference") {
    if (!domain.is_unit_square()) throw InputError("the reference partition is defined on the unit square only");
    return reference_square_partition();
  }
  throw InputError("--partition must be auto or reference");
}

void add_field_flags(CLI::App* sub, Options& o, bool with_lambda) {
  sub->add_option("--theta", o.theta, "rotation angle in radians");
  sub->add_option("--x0", o.x0, "pivot point x,y")->delimiter(',')->expected(2);
  if (with_lambda)
    sub->add_option("--lambda", o.lambda, "place x0 on D_theta at this arc length (overrides --x0)");
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "flat key=value file; command line flags take precedence");
  sub->add_option("--out", o.out, "output path (default stdout)");
}

int run_classify(const Options& o) {
  const auto domain = domain_of(o);
  const MultiplierField field(o.theta, pivot_of(o));
  std::ostringstream s;
  s << "edge,ax,ay,bx,by,label,split_x,split_y\n";
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const Edge e = domain.edge(i);
    const auto c = classify_edge(e, field);
    s << i << ',' << fmt(e.a.x()) << ',' << fmt(e.a.y()) << ',' << fmt(e.b.x()) << ',' << fmt(e.b.y()) << ','
      << to_string(c.label) << ',' << (c.split ? fmt(c.split->x()) : "") << ','
      << (c.split ? fmt(c.split->y()) : "") << '\n';
  }
  emit(o, s.str());
  return 0;
}

int run_conditions(const Options& o) {
  const auto domain = domain_of(o);
  const MultiplierField field(o.theta, pivot_of(o));
  const auto part = partition_of(o, domain, field, "auto");
  const auto rep = check_conditions(domain, part, field);
  std::ostringstream s;
  s << "x0 " << fmt(field.x0()) << "  theta " << fmt(o.theta) << "\n";
  s << "segments:\n";
  for (const auto& seg : part.segments)
    s << "  edge " << seg.edge << ' ' << fmt(seg.a) << " -> " << fmt(seg.b) << ' ' << to_string(seg.condition)
      << '\n';
  s << "interface points:\n";
  for (const auto& p : rep.points) {
    s << "  " << fmt(p.position) << " omega=" << fmt(p.omega) << " m.tau=" << fmt(p.m_tau)
      << " m.nu=" << (p.m_nu ? fmt(*p.m_nu) : std::string("n/a")) << " S2'=" << (p.s2_ok ? "ok" : "FAIL")
      << " R=" << (p.r_ok ? "ok" : "FAIL") << '\n';
  }
  s << "S1 Neumann (min m.nu " << fmt(rep.min_m_nu_neumann) << "): " << (rep.s1_neumann_ok ? "ok" : "FAIL") << '\n';
  s << "S1 Dirichlet (max m.nu " << fmt(rep.max_m_nu_dirichlet) << "): " << (rep.s1_dirichlet_ok ? "ok" : "FAIL")
    << '\n';
  s << "S2': " << (rep.s2_ok ? "ok" : "FAIL") << "\nR: " << (rep.r_ok ? "ok" : "FAIL") << '\n';
  s << "Dirichlet part nonempty: " << (rep.dirichlet_nonempty ? "yes" : "no") << '\n';
  s << "valid: " << (rep.valid ? "yes" : "no") << '\n';
  emit(o, s.str());
  return 0;
}

int run_belt(const Options& o) {
  const auto domain = domain_of(o);
  const Vec2 x0 = pivot_of(o);
  std::ostringstream s;
  s << "edge,dir_x,dir_y,lower,upper,contains_x0\n";
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const auto b = edge_belt(domain.edge(i), o.theta);
    s << i << ',' << fmt(b.direction.x()) << ',' << fmt(b.direction.y()) << ',' << fmt(b.lower) << ','
      << fmt(b.upper) << ',' << (b.contains(x0) ? 1 : 0) << '\n';
  }
  emit(o, s.str());
  return 0;
}

int run_admissible(const Options& o) {
  const auto domain = domain_of(o);
  PartitionRule rule = RecomputePartition{};
  if (o.partition == "reference") {
    if (!domain.is_unit_square()) throw InputError("the reference partition is defined on the unit square only");
    rule = reference_square_partition();
  } else if (!o.partition.empty() && o.partition != "auto") {
    throw InputError("--partition must be auto or reference");
  }
  const GridRect rect{o.window[0], o.window[1], o.window[2], o.window[3], o.resolution[0], o.resolution[1]};
  const auto mask = admissible_region(domain, rule, o.theta, rect, o.threads);
  if (o.format == "svg") {
    emit(o, mask_to_svg(mask));
  } else if (o.format == "csv") {
    emit(o, mask_to_csv(mask));
  } else {
    throw InputError("--format must be csv or svg");
  }
  return 0;
}

int run_rellich(const Options& o) {
  const auto& u = test_function(o.u);
  const MultiplierField field(o.theta, pivot_of(o));
  const auto r = rellich_residual(u, field, domain_of(o), o.q,
                                  o.symmetric ? MultiplierPart::Symmetric : MultiplierPart::Full);
  char buf[256];
  std::snprintf(buf, sizeof buf, "lhs %.15g\nrhs %.15g\nresidual %.3e\n", r.lhs, r.rhs, r.residual);
  emit(o, buf);
  return 0;
}

DiscreteOperators operators_of(const Options& o, const MultiplierField& field, double alpha) {
  const auto square = PolygonDomain::unit_square();
  const auto part = partition_of(o, square, field, "reference");
  const auto ops = square_operators(o.n, part, field, alpha, {o.clamp});
  for (std::size_t k : ops.clamped) std::cerr << "warning: clamped negative m.nu at unknown " << k << '\n';
  return ops;
}

int run_simulate(const Options& o) {
  const MultiplierField field(o.theta, pivot_of(o));
  const auto ops = operators_of(o, field, 1.0);
  const auto law = o.p > 1.0 ? FeedbackLaw::power_law(o.p, o.alpha) : FeedbackLaw::linear(o.alpha);
  const State initial{lowest_mode(ops), Eigen::VectorXd::Zero(ops.K.rows())};
  const double t_final = o.t_final.value_or(20.0);
  const auto trace = simulate(initial, t_final, o.dt.value_or(1e-2), ops, law, o.sample_every);
  std::ostringstream s;
  trace.write_csv(s);
  emit(o, s.str());
  std::ostream& log = o.out.empty() ? std::cerr : std::cout;
  if (law.is_linear()) {
    const auto fit = fit_exponential_rate(trace, default_exponential_window(t_final));
    log << "exponential rate " << fmt(fit.rate) << " (r^2 " << fmt(fit.r_squared) << ")\n";
  } else {
    const auto fit = fit_power_rate(trace, default_power_window(t_final));
    log << "power exponent " << fmt(fit.rate) << " (r^2 " << fmt(fit.r_squared) << ")\n";
  }
  log << "max energy increase per step " << fmt(trace.max_step_increase) << '\n';
  return 0;
}

int run_spectrum(const Options& o) {
  const MultiplierField field(o.theta, pivot_of(o));
  const auto ops = operators_of(o, field, o.alpha);
  if (!o.coo.empty()) {
    std::ofstream k(o.coo + "_K.txt");
    std::ofstream b(o.coo + "_B.txt");
    if (!k || !b) throw InputError("cannot write operator files with prefix " + o.coo);
    write_coo(k, ops.K);
    write_coo(b, ops.B_matrix());
  }
  const auto sp = spectrum(companion_matrix(ops));
  std::ostringstream s;
  if (o.all) {
    s << "re,im\n";
    char buf[64];
    for (const auto& z : sp.values) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", z.real() + 0.0, z.imag() + 0.0);
      s << buf;
    }
    emit(o, s.str());
    std::cerr << "abscissa " << fmt(sp.abscissa) << '\n';
  } else {
    char buf[64];
    std::snprintf(buf, sizeof buf, "abscissa %.17g\n", sp.abscissa);
    emit(o, buf);
  }
  return 0;
}

int run_sweep_cmd(const Options& o) {
  SweepOptions opts;
  opts.n = o.n;
  opts.alpha = o.alpha;
  opts.mode = parse_sweep_mode(o.mode);
  opts.clamp = o.clamp;
  opts.threads = o.threads;
  if (o.t_final) opts.time_domain.t_final = *o.t_final;
  if (o.dt) opts.time_domain.dt = *o.dt;
  const auto thetas = o.thetas.empty() ? default_theta_grid(o.theta_count) : o.thetas;
  const auto lambdas = o.lambdas.empty() ? default_lambda_grid() : o.lambdas;
  const auto records = run_sweep(thetas, lambdas, opts);
  for (const auto& r : records)
    if (!r.error.empty()) std::cerr << "theta=" << fmt(r.theta) << " lambda=" << fmt(r.lambda) << ": " << r.error << '\n';
  if (o.format == "svg") {
    emit(o, sweep_to_svg(records));
  } else if (o.format == "csv") {
    emit(o, sweep_to_csv(records));
  } else {
    throw InputError("--format must be csv or svg");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Boundary stabilization workbench for the 2-D wave equation with a rotated multiplier", "rotmul"};
  app.require_subcommand(1);

  auto* classify = app.add_subcommand("classify", "label each polygon edge by the sign of m.nu");
  add_field_flags(classify, o, true);
  classify->add_option("--polygon", o.polygon, "vertex file, one \"x y\" per line, counter-clockwise");
  add_common(classify, o);

  auto* conditions = app.add_subcommand("conditions", "check (S1), (S2') and (R) for a partition");
  add_field_flags(conditions, o, true);
  conditions->add_option("--polygon", o.polygon, "vertex file");
  conditions->add_option("--partition", o.partition, "auto (sign of m.nu) or reference (unit square)");
  add_common(conditions, o);

  auto* belt = app.add_subcommand("belt", "pivot belts giving mixed conditions on each edge");
  add_field_flags(belt, o, false);
  belt->add_option("--polygon", o.polygon, "vertex file");
  add_common(belt, o);

  auto* admissible = app.add_subcommand("admissible", "mask of pivots x0 satisfying all conditions");
  admissible->add_option("--theta", o.theta, "rotation angle in radians");
  admissible->add_option("--polygon", o.polygon, "vertex file");
  admissible->add_option("--partition", o.partition, "auto (default) or reference");
  admissible->add_option("--window", o.window, "xmin,xmax,ymin,ymax")->delimiter(',')->expected(4);
  admissible->add_option("--resolution", o.resolution, "nx,ny")->delimiter(',')->expected(2);
  admissible->add_option("--format", o.format, "csv or svg");
  admissible->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  add_common(admissible, o);

  auto* rellich = app.add_subcommand("rellich", "quadrature check of the Rellich identity on the unit square");
  add_field_flags(rellich, o, false);
  rellich->add_option("--u", o.u, "catalog function name");
  rellich->add_option("--q", o.q, "quadrature cells per side");
  rellich->add_flag("--symmetric", o.symmetric, "use only the symmetric part d(x - x0) of the multiplier");
  add_common(rellich, o);

  auto* simulate_cmd = app.add_subcommand("simulate", "integrate the damped semi-discrete system, print t,energy");
  add_field_flags(simulate_cmd, o, true);
  simulate_cmd->add_option("--n", o.n, "interior nodes per side");
  simulate_cmd->add_option("--alpha", o.alpha, "feedback gain (k = K = alpha for the power law)");
  simulate_cmd->add_option("--p", o.p, "power-law exponent; 1 means linear feedback");
  simulate_cmd->add_option("--t-final", o.t_final, "final time (default 20)");
  simulate_cmd->add_option("--dt", o.dt, "time step (default 1e-2)");
  simulate_cmd->add_option("--sample-every", o.sample_every, "steps between samples");
  simulate_cmd->add_option("--partition", o.partition, "reference (default) or auto");
  simulate_cmd->add_flag("--clamp", o.clamp, "zero feedback at nodes with m.nu < 0 instead of failing");
  add_common(simulate_cmd, o);

  auto* spectrum_cmd = app.add_subcommand("spectrum", "spectral abscissa of the companion matrix");
  add_field_flags(spectrum_cmd, o, true);
  spectrum_cmd->add_option("--n", o.n, "interior nodes per side");
  spectrum_cmd->add_option("--alpha", o.alpha, "feedback gain");
  spectrum_cmd->add_option("--partition", o.partition, "reference (default) or auto");
  spectrum_cmd->add_flag("--all", o.all, "print every eigenvalue as re,im");
  spectrum_cmd->add_option("--coo", o.coo, "also write K and B as row col value to <prefix>_K.txt, <prefix>_B.txt");
  spectrum_cmd->add_flag("--clamp", o.clamp, "zero feedback at nodes with m.nu < 0 instead of failing");
  add_common(spectrum_cmd, o);

  auto* sweep = app.add_subcommand("sweep", "decay rate over a (theta, lambda) grid along D_theta");
  sweep->add_option("--theta-count", o.theta_count, "number of theta values uniform in [0, arctan 2]");
  sweep->add_option("--thetas", o.thetas, "explicit theta list")->delimiter(',');
  sweep->add_option("--lambdas", o.lambdas, "lambda list (default 0,0.25,0.5,1)")->delimiter(',');
  sweep->add_option("--n", o.n, "interior nodes per side");
  sweep->add_option("--alpha", o.alpha, "feedback gain");
  sweep->add_option("--mode", o.mode, "spectral, timedomain or both");
  sweep->add_option("--t-final", o.t_final, "time-domain horizon (default 1600)");
  sweep->add_option("--dt", o.dt, "time-domain step (default 5e-3)");
  sweep->add_option("--format", o.format, "csv or svg");
  sweep->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  sweep->add_flag("--clamp", o.clamp, "zero feedback at nodes with m.nu < 0 instead of failing");
  add_common(sweep, o);

  std::vector<std::string> args(argv, argv + argc);
  try {
    for (std::size_t i = 2; i < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
      if (!path.empty()) {
        args = merge_config_args(args, load_flat_config(path), {"clamp", "all", "symmetric"});
        break;
      }
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*classify) return run_classify(o);
    if (*conditions) return run_conditions(o);
    if (*belt) return run_belt(o);
    if (*admissible) return run_admissible(o);
    if (*rellich) return run_rellich(o);
    if (*simulate_cmd) return run_simulate(o);
    if (*spectrum_cmd) return run_spectrum(o);
    if (*sweep) return run_sweep_cmd(o);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
