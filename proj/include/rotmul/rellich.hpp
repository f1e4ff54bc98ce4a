#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rotmul/geometry.hpp"

namespace rotmul {

/// Value, gradient and Laplacian of a scalar field at one point.
struct Jet {
  double value;
  Vec2 grad;
  double laplacian;
};

/// Analytic scalar field with closed-form derivatives.
struct SmoothTestFunction {
  std::string name;
  std::function<Jet(const Vec2&)> eval;
};

/// Built-in catalog: "one", "x2+y2", "x2-y2", "x3y", "x4+y4", "x2y2",
/// "sin(pi x)sin(pi y)", "cos(pi x)cos(2pi y)".
const std::vector<SmoothTestFunction>& test_function_catalog();
/// Throws InputError for unknown names.
const SmoothTestFunction& test_function(const std::string& name);

/// x -> u(x - shift).
SmoothTestFunction translated(const SmoothTestFunction& u, const Vec2& shift);

/// Largest deviation of the closed-form gradient and Laplacian from central
/// differences with step h over a sample grid of the unit square.
double derivative_self_check(const SmoothTestFunction& u, double h);

enum class MultiplierPart {
  Full,      // m(x) = R_theta (x - x0)
  Symmetric  // d (x - x0); the skew part dropped
};

struct RellichResult {
  /// 2 int Delta u (m . grad u)
  double lhs;
  /// d (n - 2) int |grad u|^2 + boundary integral
  double rhs;
  double volume_term;
  double boundary_term;
  /// |lhs - rhs| / max(1, |lhs|)
  double residual;
};

/// Composite midpoint quadrature with q x q cells and q points per edge on
/// an axis-aligned rectangle (InputError otherwise, or when q < 8).
RellichResult rellich_residual(const SmoothTestFunction& u, const MultiplierField& field,
                               const PolygonDomain& domain, int q,
                               MultiplierPart part = MultiplierPart::Full);

}  // namespace rotmul
