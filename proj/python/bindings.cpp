#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rotmul/discretization.hpp"
#include "rotmul/dynamics.hpp"
#include "rotmul/errors.hpp"
#include "rotmul/geometry.hpp"
#include "rotmul/rellich.hpp"
#include "rotmul/spectral.hpp"
#include "rotmul/sweep.hpp"

namespace py = pybind11;
using namespace py::literals;
using namespace rotmul;

namespace {

PolygonDomain domain_of(const std::optional<std::vector<Vec2>>& polygon) {
  return polygon ? PolygonDomain(*polygon) : PolygonDomain::unit_square();
}

BoundaryPartition partition_of(const std::string& rule, const PolygonDomain& domain, const MultiplierField& field) {
  if (rule == "auto") return build_partition(domain, field);
  if (rule == "reference") {
    if (!domain.is_unit_square()) throw InputError("the reference partition is defined on the unit square only");
    return reference_square_partition();
  }
  throw InputError("unknown partition rule: " + rule);
}

DiscreteOperators ops_of(std::size_t n, double theta, const Vec2& x0, double alpha, const std::string& partition,
                         bool clamp) {
  const MultiplierField field(theta, x0);
  const auto domain = PolygonDomain::unit_square();
  return square_operators(n, partition_of(partition, domain, field), field, alpha, AssemblyOptions{clamp});
}

py::object opt(const std::optional<double>& v) { return v ? py::object(py::float_(*v)) : py::none(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rotated-multiplier boundary stabilization of the 2-D wave equation";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def(
      "classify",
      [](double theta, const Vec2& x0, const std::optional<std::vector<Vec2>>& polygon) {
        const auto domain = domain_of(polygon);
        const MultiplierField field(theta, x0);
        py::list out;
        for (std::size_t i = 0; i < domain.size(); ++i) {
          const Edge e = domain.edge(i);
          const auto c = classify_edge(e, field);
          out.append(py::dict("a"_a = e.a, "b"_a = e.b, "label"_a = to_string(c.label),
                              "split"_a = c.split ? py::cast(*c.split) : py::none()));
        }
        return out;
      },
      "theta"_a, "x0"_a, "polygon"_a = py::none(), "Sign class of m.nu on each polygon edge.");

  m.def(
      "conditions",
      [](double theta, const Vec2& x0, const std::string& partition,
         const std::optional<std::vector<Vec2>>& polygon) {
        const auto domain = domain_of(polygon);
        const MultiplierField field(theta, x0);
        const auto rep = check_conditions(domain, partition_of(partition, domain, field), field);
        py::list points;
        for (const auto& p : rep.points)
          points.append(py::dict("position"_a = p.position, "omega"_a = p.omega, "m_tau"_a = p.m_tau,
                                 "m_nu"_a = opt(p.m_nu), "s2_ok"_a = p.s2_ok, "r_ok"_a = p.r_ok));
        return py::dict("points"_a = points, "min_m_nu_neumann"_a = rep.min_m_nu_neumann,
                        "max_m_nu_dirichlet"_a = rep.max_m_nu_dirichlet, "s1_ok"_a = rep.s1_ok(),
                        "s2_ok"_a = rep.s2_ok, "r_ok"_a = rep.r_ok, "dirichlet_nonempty"_a = rep.dirichlet_nonempty,
                        "valid"_a = rep.valid);
      },
      "theta"_a, "x0"_a, "partition"_a = "auto", "polygon"_a = py::none());

  m.def(
      "belt",
      [](const Vec2& a, const Vec2& b, double theta) {
        const auto belt = edge_belt(Edge{a, b}, theta);
        return py::dict("direction"_a = belt.direction, "lower"_a = belt.lower, "upper"_a = belt.upper);
      },
      "a"_a, "b"_a, "theta"_a, "Strip of pivots for which the edge a->b gets mixed conditions.");

  m.def(
      "admissible",
      [](double theta, std::array<double, 4> window, std::array<std::size_t, 2> resolution,
         const std::string& partition, unsigned threads, const std::optional<std::vector<Vec2>>& polygon) {
        const auto domain = domain_of(polygon);
        PartitionRule rule = RecomputePartition{};
        if (partition == "reference") rule = partition_of(partition, domain, MultiplierField(theta, Vec2::Zero()));
        else if (partition != "auto") throw InputError("unknown partition rule: " + partition);
        const GridRect rect{window[0], window[1], window[2], window[3], resolution[0], resolution[1]};
        const auto mask = admissible_region(domain, rule, theta, rect, threads);
        py::array_t<bool> out({rect.ny, rect.nx});
        auto view = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < rect.ny; ++i)
          for (std::size_t j = 0; j < rect.nx; ++j) view(i, j) = mask[i][j];
        return out;
      },
      "theta"_a, "window"_a = std::array<double, 4>{-2, 3, -2, 3},
      "resolution"_a = std::array<std::size_t, 2>{50, 50}, "partition"_a = "auto", "threads"_a = 0u,
      "polygon"_a = py::none(), "Validity mask over pivot cells; rows run along y.");

  m.def("d_theta_point", [](double theta, double lam) {
    const auto p = d_theta_point(theta, lam);
    return py::dict("x0"_a = p.x0, "p_min"_a = p.p_min, "direction"_a = p.direction, "mu_min"_a = p.mu_min);
  }, "theta"_a, "lam"_a);
  m.def("max_sweep_theta", &max_sweep_theta);

  m.def(
      "rellich",
      [](const std::string& u, double theta, const Vec2& x0, int q, bool symmetric) {
        const auto r = rellich_residual(test_function(u), MultiplierField(theta, x0), PolygonDomain::unit_square(), q,
                                        symmetric ? MultiplierPart::Symmetric : MultiplierPart::Full);
        return py::dict("lhs"_a = r.lhs, "rhs"_a = r.rhs, "volume_term"_a = r.volume_term,
                        "boundary_term"_a = r.boundary_term, "residual"_a = r.residual);
      },
      "u"_a = "x2+y2", "theta"_a = 0.0, "x0"_a = Vec2(0, 0), "q"_a = 2048, "symmetric"_a = false);

  m.def(
      "operators",
      [](std::size_t n, double theta, const Vec2& x0, double alpha, const std::string& partition, bool clamp) {
        const auto ops = ops_of(n, theta, x0, alpha, partition, clamp);
        return py::dict("K"_a = ops.K, "B"_a = ops.B, "mass"_a = ops.mass, "clamped"_a = ops.clamped);
      },
      "n"_a = 10, "theta"_a = 0.0, "x0"_a = Vec2(0, 0), "alpha"_a = 1.0, "partition"_a = "reference",
      "clamp"_a = false, "Stiffness K, feedback diagonal B and mass weights in mass-scaled unknowns.");

  m.def(
      "spectrum",
      [](std::size_t n, double theta, const Vec2& x0, double alpha, const std::string& partition, bool clamp) {
        const auto sp = spectrum(companion_matrix(ops_of(n, theta, x0, alpha, partition, clamp)));
        return py::make_tuple(py::array(py::cast(sp.values)), sp.abscissa);
      },
      "n"_a = 10, "theta"_a = 0.0, "x0"_a = Vec2(0, 0), "alpha"_a = 1.0, "partition"_a = "reference",
      "clamp"_a = false, "Eigenvalues of the companion matrix, sorted by real part, and the abscissa.");

  m.def(
      "simulate",
      [](std::size_t n, double theta, const Vec2& x0, double alpha, double p, double t_final, double dt,
         std::size_t sample_every, const std::string& partition, bool clamp) {
        const auto ops = ops_of(n, theta, x0, 1.0, partition, clamp);
        const auto law = p > 1.0 ? FeedbackLaw::power_law(p, alpha) : FeedbackLaw::linear(alpha);
        EnergyTrace trace;
        {
          py::gil_scoped_release release;
          trace = simulate(State{lowest_mode(ops), Eigen::VectorXd::Zero(ops.K.rows())}, t_final, dt, ops, law,
                           sample_every);
        }
        return py::make_tuple(py::array(py::cast(trace.times)), py::array(py::cast(trace.energies)),
                              trace.max_step_increase);
      },
      "n"_a = 10, "theta"_a = 0.0, "x0"_a = Vec2(0, 0), "alpha"_a = 1.0, "p"_a = 1.0, "t_final"_a = 20.0,
      "dt"_a = 1e-2, "sample_every"_a = 1, "partition"_a = "reference", "clamp"_a = false,
      "Midpoint run from the lowest mode at rest; returns (t, energy, max_step_increase).");

  m.def(
      "fit_rate",
      [](const std::vector<double>& t, const std::vector<double>& e, double lo, double hi, bool power) {
        EnergyTrace trace;
        trace.times = t;
        trace.energies = e;
        const auto fit = power ? fit_power_rate(trace, {lo, hi}) : fit_exponential_rate(trace, {lo, hi});
        return py::make_tuple(fit.rate, fit.r_squared);
      },
      "t"_a, "energy"_a, "lo"_a, "hi"_a, "power"_a = false);

  m.def(
      "komornik",
      [](const std::vector<double>& t, const std::vector<double>& e, double alpha) {
        EnergyTrace trace;
        trace.times = t;
        trace.energies = e;
        const auto r = komornik_check(trace, alpha);
        return py::dict("C"_a = r.c_estimate, "bound_ok"_a = r.bound_ok, "tail_fraction"_a = r.tail_fraction);
      },
      "t"_a, "energy"_a, "alpha"_a);

  m.def(
      "sweep",
      [](std::optional<std::vector<double>> thetas, std::optional<std::vector<double>> lambdas, std::size_t n,
         double alpha, const std::string& mode, double t_final, double dt, bool clamp, unsigned threads) {
        SweepOptions o;
        o.n = n;
        o.alpha = alpha;
        o.mode = parse_sweep_mode(mode);
        o.time_domain.t_final = t_final;
        o.time_domain.dt = dt;
        o.clamp = clamp;
        o.threads = threads;
        std::vector<SweepRecord> records;
        {
          py::gil_scoped_release release;
          records = run_sweep(thetas.value_or(default_theta_grid()), lambdas.value_or(default_lambda_grid()), o);
        }
        py::list out;
        for (const auto& r : records)
          out.append(py::dict("theta"_a = r.theta, "lambda"_a = r.lambda, "x0"_a = r.x0, "s1_ok"_a = r.s1_ok,
                              "s2_ok"_a = r.s2_ok, "abscissa"_a = opt(r.abscissa),
                              "fitted_rate"_a = opt(r.fitted_rate), "rel_err"_a = opt(r.rel_err),
                              "error"_a = r.error));
        return out;
      },
      "thetas"_a = py::none(), "lambdas"_a = py::none(), "n"_a = 10, "alpha"_a = 1.0, "mode"_a = "spectral",
      "t_final"_a = TimeDomainOptions{}.t_final, "dt"_a = TimeDomainOptions{}.dt, "clamp"_a = false,
      "threads"_a = 0u);
}
