#include "rotmul/rellich.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rotmul/errors.hpp"

namespace rotmul {

namespace {

using std::numbers::pi;

std::vector<SmoothTestFunction> make_catalog() {
  std::vector<SmoothTestFunction> c;
  c.push_back({"one", [](const Vec2&) { return Jet{1.0, Vec2::Zero(), 0.0}; }});
  c.push_back({"x2+y2", [](const Vec2& p) {
                 const double x = p.x(), y = p.y();
                 return Jet{x * x + y * y, {2 * x, 2 * y}, 4.0};
               }});
  c.push_back({"x2-y2", [](const Vec2& p) {
                 const double x = p.x(), y = p.y();
                 return Jet{x * x - y * y, {2 * x, -2 * y}, 0.0};
               }});
  c.push_back({"x3y", [](const Vec2& p) {
                 const double x = p.x(), y = p.y();
                 return Jet{x * x * x * y, {3 * x * x * y, x * x * x}, 6 * x * y};
               }});
  c.push_back({"x4+y4", [](const Vec2& p) {
                 const double x = p.x(), y = p.y();
                 return Jet{x * x * x * x + y * y * y * y, {4 * x * x * x, 4 * y * y * y}, 12 * (x * x + y * y)};
               }});
  c.push_back({"x2y2", [](const Vec2& p) {
                 const double x = p.x(), y = p.y();
                 return Jet{x * x * y * y, {2 * x * y * y, 2 * x * x * y}, 2 * (x * x + y * y)};
               }});
  c.push_back({"sin(pi x)sin(pi y)", [](const Vec2& p) {
                 const double sx = std::sin(pi * p.x()), cx = std::cos(pi * p.x());
                 const double sy = std::sin(pi * p.y()), cy = std::cos(pi * p.y());
                 return Jet{sx * sy, {pi * cx * sy, pi * sx * cy}, -2 * pi * pi * sx * sy};
               }});
  c.push_back({"cos(pi x)cos(2pi y)", [](const Vec2& p) {
                 const double sx = std::sin(pi * p.x()), cx = std::cos(pi * p.x());
                 const double sy = std::sin(2 * pi * p.y()), cy = std::cos(2 * pi * p.y());
                 return Jet{cx * cy, {-pi * sx * cy, -2 * pi * cx * sy}, -5 * pi * pi * cx * cy};
               }});
  return c;
}

struct Rect {
  double x0, x1, y0, y1;
};

Rect as_rectangle(const PolygonDomain& domain) {
  if (domain.size() != 4) throw InputError("Rellich quadrature needs an axis-aligned rectangle");
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec2 d = domain.vertex(i + 1) - domain.vertex(i);
    if (d.x() != 0.0 && d.y() != 0.0) throw InputError("Rellich quadrature needs an axis-aligned rectangle");
  }
  Rect r{domain.vertex(0).x(), domain.vertex(0).x(), domain.vertex(0).y(), domain.vertex(0).y()};
  for (const auto& v : domain.vertices()) {
    r.x0 = std::min(r.x0, v.x());
    r.x1 = std::max(r.x1, v.x());
    r.y0 = std::min(r.y0, v.y());
    r.y1 = std::max(r.y1, v.y());
  }
  return r;
}

}  // namespace

const std::vector<SmoothTestFunction>& test_function_catalog() {
  static const std::vector<SmoothTestFunction> catalog = make_catalog();
  return catalog;
}

const SmoothTestFunction& test_function(const std::string& name) {
  for (const auto& f : test_function_catalog())
    if (f.name == name) return f;
  throw InputError("unknown test function '" + name + "'");
}

SmoothTestFunction translated(const SmoothTestFunction& u, const Vec2& shift) {
  auto inner = u.eval;
  return {u.name + " shifted", [inner, shift](const Vec2& p) { return inner(p - shift); }};
}

double derivative_self_check(const SmoothTestFunction& u, double h) {
  double worst = 0.0;
  constexpr int samples = 7;
  for (int a = 0; a < samples; ++a) {
    for (int b = 0; b < samples; ++b) {
      const Vec2 p((a + 0.5) / samples, (b + 0.5) / samples);
      const Jet j = u.eval(p);
      const Vec2 ex(h, 0.0), ey(0.0, h);
      const double fxp = u.eval(p + ex).value, fxm = u.eval(p - ex).value;
      const double fyp = u.eval(p + ey).value, fym = u.eval(p - ey).value;
      const double gx = (fxp - fxm) / (2 * h);
      const double gy = (fyp - fym) / (2 * h);
      const double lap = (fxp + fxm + fyp + fym - 4 * j.value) / (h * h);
      worst = std::max({worst, std::abs(gx - j.grad.x()), std::abs(gy - j.grad.y()),
                        std::abs(lap - j.laplacian)});
    }
  }
  return worst;
}

RellichResult rellich_residual(const SmoothTestFunction& u, const MultiplierField& field,
                               const PolygonDomain& domain, int q, MultiplierPart part) {
  if (q < 8) throw InputError("quadrature resolution q must be at least 8");
  const Rect r = as_rectangle(domain);
  constexpr int dim = 2;
  auto m = [&](const Vec2& x) -> Vec2 {
    return part == MultiplierPart::Full ? field(x) : field.symmetric_part(x);
  };

  const double dx = (r.x1 - r.x0) / q;
  const double dy = (r.y1 - r.y0) / q;
  double lhs = 0.0;
  double grad_sq = 0.0;
  for (int j = 0; j < q; ++j) {
    const double y = r.y0 + (j + 0.5) * dy;
    double row_lhs = 0.0;
    double row_grad = 0.0;
    for (int i = 0; i < q; ++i) {
      const Vec2 p(r.x0 + (i + 0.5) * dx, y);
      const Jet jet = u.eval(p);
      row_lhs += jet.laplacian * m(p).dot(jet.grad);
      row_grad += jet.grad.squaredNorm();
    }
    lhs += row_lhs;
    grad_sq += row_grad;
  }
  lhs *= 2.0 * dx * dy;
  grad_sq *= dx * dy;
  const double volume = field.d() * (dim - 2) * grad_sq;

  double boundary = 0.0;
  for (std::size_t e = 0; e < domain.size(); ++e) {
    const Edge edge = domain.edge(e);
    const Vec2 nu = edge.normal();
    const double ds = edge.length() / q;
    double sum = 0.0;
    for (int k = 0; k < q; ++k) {
      const Vec2 p = edge.a + ((k + 0.5) / q) * (edge.b - edge.a);
      const Jet jet = u.eval(p);
      const Vec2 mp = m(p);
      sum += 2.0 * jet.grad.dot(nu) * mp.dot(jet.grad) - mp.dot(nu) * jet.grad.squaredNorm();
    }
    boundary += sum * ds;
  }

  RellichResult res;
  res.lhs = lhs;
  res.volume_term = volume;
  res.boundary_term = boundary;
  res.rhs = volume + boundary;
  res.residual = std::abs(res.lhs - res.rhs) / std::max(1.0, std::abs(res.lhs));
  return res;
}

}  // namespace rotmul
