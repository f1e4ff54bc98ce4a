#include "rotmul/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "rotmul/errors.hpp"
#include "rotmul/parallel.hpp"

namespace rotmul {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  auto on_segment = [](const Vec2& a, const Vec2& b, const Vec2& p) {
    return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
           std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
  };
  return (d1 == 0 && on_segment(q1, q2, p1)) || (d2 == 0 && on_segment(q1, q2, p2)) ||
         (d3 == 0 && on_segment(p1, p2, q1)) || (d4 == 0 && on_segment(p1, p2, q2));
}

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// m.nu evaluated as x.dir - x0.dir with dir = R_{-theta}(nu); classify_edge
// and edge_belt share this form so belt membership and Mixed agree.
double m_dot_nu(const Vec2& x, const Vec2& dir, const Vec2& x0) { return x.dot(dir) - x0.dot(dir); }

}  // namespace

MultiplierField::MultiplierField(double theta, Vec2 x0)
    : theta_(theta), x0_(std::move(x0)), cos_(std::cos(theta)), sin_(std::sin(theta)) {
  if (!std::isfinite(theta) || !(std::abs(theta) < std::numbers::pi / 2))
    throw InputError("theta must lie in (-pi/2, pi/2)");
  if (!x0_.allFinite()) throw InputError("x0 must be finite");
}

Vec2 MultiplierField::rotate(const Vec2& v) const {
  return {cos_ * v.x() - sin_ * v.y(), sin_ * v.x() + cos_ * v.y()};
}

Vec2 MultiplierField::rotate_back(const Vec2& v) const {
  return {cos_ * v.x() + sin_ * v.y(), -sin_ * v.x() + cos_ * v.y()};
}

Vec2 eval_multiplier(const MultiplierField& field, const Vec2& x) { return field(x); }

PolygonDomain::PolygonDomain(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw InputError("polygon needs at least 3 vertices");
  for (const auto& v : vertices_)
    if (!v.allFinite()) throw InputError("polygon vertex is not finite");
  for (std::size_t i = 0; i < n; ++i)
    if ((vertex(i + 1) - vertex(i)).norm() == 0.0) throw InputError("polygon has a zero-length edge");
  if (!(area() > 0.0)) throw InputError("polygon vertices must be counter-clockwise");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(vertex(i), vertex(i + 1), vertex(j), vertex(j + 1)))
        throw InputError("polygon is not simple");
    }
  }
}

PolygonDomain PolygonDomain::unit_square() {
  return PolygonDomain({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
}

PolygonDomain PolygonDomain::parse(const std::string& text) {
  std::vector<Vec2> pts;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double x = 0.0;
    double y = 0.0;
    if (!(ls >> x)) continue;
    std::string rest;
    if (!(ls >> y) || (ls >> rest))
      throw InputError("polygon line " + std::to_string(lineno) + ": expected \"x y\"");
    pts.emplace_back(x, y);
  }
  return PolygonDomain(std::move(pts));
}

PolygonDomain PolygonDomain::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open polygon file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

double PolygonDomain::interior_angle(std::size_t i) const {
  const std::size_t n = size();
  const Vec2 incoming = vertex(i) - vertex(i + n - 1);
  const Vec2 outgoing = vertex(i + 1) - vertex(i);
  const double turn = std::atan2(cross(incoming, outgoing), incoming.dot(outgoing));
  return std::numbers::pi - turn;
}

double PolygonDomain::area() const {
  double twice = 0.0;
  for (std::size_t i = 0; i < size(); ++i) twice += cross(vertex(i), vertex(i + 1));
  return 0.5 * twice;
}

Vec2 PolygonDomain::barycenter() const {
  Vec2 c = Vec2::Zero();
  double twice = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const double w = cross(vertex(i), vertex(i + 1));
    c += w * (vertex(i) + vertex(i + 1));
    twice += w;
  }
  return c / (3.0 * twice);
}

bool PolygonDomain::is_unit_square() const {
  if (size() != 4) return false;
  const auto sq = unit_square();
  for (std::size_t shift = 0; shift < 4; ++shift) {
    bool same = true;
    for (std::size_t i = 0; i < 4 && same; ++i) same = vertex(i + shift) == sq.vertex(i);
    if (same) return true;
  }
  return false;
}

std::string to_string(EdgeLabel label) {
  switch (label) {
    case EdgeLabel::Dirichlet: return "Dirichlet";
    case EdgeLabel::Neumann: return "Neumann";
    case EdgeLabel::Mixed: return "Mixed";
    case EdgeLabel::Neutral: return "Neutral";
  }
  return "?";
}

std::string to_string(Condition c) { return c == Condition::Dirichlet ? "Dirichlet" : "Neumann"; }

EdgeClassification classify_edge(const Edge& edge, const MultiplierField& field) {
  if (!(edge.length() > 0.0)) throw InputError("edge has zero length");
  const Vec2 dir = field.rotate_back(edge.normal());
  const double fa = m_dot_nu(edge.a, dir, field.x0());
  const double fb = m_dot_nu(edge.b, dir, field.x0());
  const bool a_zero = std::abs(fa) < kSignTolerance;
  const bool b_zero = std::abs(fb) < kSignTolerance;
  if (a_zero && b_zero) return {EdgeLabel::Neutral, std::nullopt};
  if (!a_zero && !b_zero && (fa > 0) != (fb > 0)) {
    const double t = fa / (fa - fb);
    return {EdgeLabel::Mixed, Vec2(edge.a + t * (edge.b - edge.a))};
  }
  const bool positive = (a_zero ? fb : fa) > 0;
  return {positive ? EdgeLabel::Neumann : EdgeLabel::Dirichlet, std::nullopt};
}

Condition BoundaryPartition::condition_at(const Vec2& p, double tol) const {
  for (const auto& s : segments)
    if (s.condition == Condition::Dirichlet && distance_to_segment(p, s.a, s.b) <= tol)
      return Condition::Dirichlet;
  return Condition::Neumann;
}

double BoundaryPartition::dirichlet_length() const {
  double len = 0.0;
  for (const auto& s : segments)
    if (s.condition == Condition::Dirichlet) len += (s.b - s.a).norm();
  return len;
}

BoundaryPartition make_partition(const PolygonDomain& domain, std::vector<BoundarySegment> segments) {
  constexpr double tol = 1e-12;
  if (segments.empty()) throw InputError("partition has no segments");
  double perimeter = 0.0;
  for (std::size_t i = 0; i < domain.size(); ++i) perimeter += domain.edge(i).length();
  double covered = 0.0;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto& s = segments[k];
    if (s.edge >= domain.size()) throw InputError("segment references a missing edge");
    const Edge e = domain.edge(s.edge);
    if (distance_to_segment(s.a, e.a, e.b) > tol || distance_to_segment(s.b, e.a, e.b) > tol)
      throw InputError("segment does not lie on its edge");
    if ((s.b - s.a).dot(e.b - e.a) <= 0.0) throw InputError("segment is empty or reversed");
    const auto& next = segments[(k + 1) % segments.size()];
    if ((next.a - s.b).norm() > tol) throw InputError("partition segments are not consecutive");
    covered += (s.b - s.a).norm();
  }
  if (std::abs(covered - perimeter) > 1e-9 * std::max(1.0, perimeter))
    throw InputError("partition does not cover the boundary exactly once");

  BoundaryPartition part;
  part.segments = std::move(segments);
  const auto& segs = part.segments;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const auto& cur = segs[k];
    const auto& next = segs[(k + 1) % segs.size()];
    if (cur.condition == next.condition) continue;
    InterfacePoint ip;
    ip.position = cur.b;
    ip.at_vertex = cur.edge != next.edge;
    if (cur.condition == Condition::Neumann) {
      ip.tau = domain.edge(cur.edge).direction();
    } else {
      ip.tau = -domain.edge(next.edge).direction();
    }
    if (ip.at_vertex) {
      ip.omega = domain.interior_angle(next.edge);
      ip.normal = Vec2::Zero();
    } else {
      ip.omega = std::numbers::pi;
      ip.normal = domain.edge(cur.edge).normal();
    }
    part.interfaces.push_back(ip);
  }
  return part;
}

BoundaryPartition build_partition(const PolygonDomain& domain, const MultiplierField& field) {
  std::vector<BoundarySegment> segs;
  bool all_neutral = true;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const Edge e = domain.edge(i);
    const auto cls = classify_edge(e, field);
    switch (cls.label) {
      case EdgeLabel::Neumann:
        all_neutral = false;
        segs.push_back({i, e.a, e.b, Condition::Neumann});
        break;
      case EdgeLabel::Dirichlet:
        all_neutral = false;
        segs.push_back({i, e.a, e.b, Condition::Dirichlet});
        break;
      case EdgeLabel::Neutral:
        segs.push_back({i, e.a, e.b, Condition::Dirichlet});
        break;
      case EdgeLabel::Mixed: {
        all_neutral = false;
        const Vec2 dir = field.rotate_back(e.normal());
        const bool starts_positive = m_dot_nu(e.a, dir, field.x0()) > 0;
        const Condition first = starts_positive ? Condition::Neumann : Condition::Dirichlet;
        const Condition second = starts_positive ? Condition::Dirichlet : Condition::Neumann;
        segs.push_back({i, e.a, *cls.split, first});
        segs.push_back({i, *cls.split, e.b, second});
        break;
      }
    }
  }
  if (all_neutral) throw InputError("m.nu vanishes on the whole boundary");
  return make_partition(domain, std::move(segs));
}

BoundaryPartition reference_square_partition() {
  const auto sq = PolygonDomain::unit_square();
  return make_partition(sq, {{0, {0.0, 0.0}, {1.0, 0.0}, Condition::Dirichlet},
                             {1, {1.0, 0.0}, {1.0, 1.0}, Condition::Neumann},
                             {2, {1.0, 1.0}, {0.0, 1.0}, Condition::Neumann},
                             {3, {0.0, 1.0}, {0.0, 0.5}, Condition::Neumann},
                             {3, {0.0, 0.5}, {0.0, 0.0}, Condition::Dirichlet}});
}

ConditionReport check_conditions(const PolygonDomain& domain, const BoundaryPartition& partition,
                                 const MultiplierField& field) {
  ConditionReport rep;
  rep.min_m_nu_neumann = std::numeric_limits<double>::infinity();
  rep.max_m_nu_dirichlet = -std::numeric_limits<double>::infinity();
  for (const auto& s : partition.segments) {
    const Vec2 nu = domain.edge(s.edge).normal();
    // m.nu is affine along a segment, so the endpoints bound it.
    for (const Vec2& p : {s.a, s.b}) {
      const double v = field(p).dot(nu);
      if (s.condition == Condition::Neumann)
        rep.min_m_nu_neumann = std::min(rep.min_m_nu_neumann, v);
      else
        rep.max_m_nu_dirichlet = std::max(rep.max_m_nu_dirichlet, v);
    }
  }
  rep.s1_neumann_ok = rep.min_m_nu_neumann >= -kSignTolerance;
  rep.s1_dirichlet_ok = rep.max_m_nu_dirichlet <= kSignTolerance;

  rep.s2_ok = true;
  rep.r_ok = true;
  for (const auto& ip : partition.interfaces) {
    InterfaceCheck c;
    c.position = ip.position;
    c.omega = ip.omega;
    const Vec2 m = field(ip.position);
    c.m_tau = m.dot(ip.tau);
    constexpr double angle_tol = 1e-12;
    if (ip.omega > std::numbers::pi + angle_tol) {
      c.s2_ok = false;
    } else if (ip.omega >= std::numbers::pi - angle_tol) {
      c.s2_ok = c.m_tau <= kSignTolerance;
    } else {
      c.s2_ok = true;
    }
    if (ip.at_vertex) {
      c.r_ok = true;
    } else {
      c.m_nu = m.dot(ip.normal);
      c.r_ok = std::abs(*c.m_nu) < kSignTolerance;
    }
    rep.s2_ok = rep.s2_ok && c.s2_ok;
    rep.r_ok = rep.r_ok && c.r_ok;
    rep.points.push_back(c);
  }
  rep.dirichlet_nonempty = partition.dirichlet_length() > 0.0;
  rep.valid = rep.s1_ok() && rep.s2_ok && rep.r_ok;
  return rep;
}

Belt edge_belt(const Edge& edge, double theta) {
  if (!(edge.length() > 0.0)) throw InputError("edge has zero length");
  const MultiplierField rot(theta, Vec2::Zero());
  Belt belt;
  belt.direction = rot.rotate_back(edge.normal());
  const double pa = edge.a.dot(belt.direction);
  const double pb = edge.b.dot(belt.direction);
  belt.lower = std::min(pa, pb);
  belt.upper = std::max(pa, pb);
  return belt;
}

Vec2 GridRect::cell_center(std::size_t i, std::size_t j) const {
  const double dx = (xmax - xmin) / static_cast<double>(nx);
  const double dy = (ymax - ymin) / static_cast<double>(ny);
  return {xmin + (static_cast<double>(j) + 0.5) * dx, ymin + (static_cast<double>(i) + 0.5) * dy};
}

Mask admissible_region(const PolygonDomain& domain, const PartitionRule& rule, double theta,
                       const GridRect& rect, unsigned threads) {
  if (rect.nx < 2 || rect.ny < 2) throw InputError("grid resolution must be at least 2 per axis");
  if (!(rect.xmax > rect.xmin) || !(rect.ymax > rect.ymin)) throw InputError("grid rectangle is empty");
  MultiplierField(theta, Vec2::Zero());  // validates theta once
  Mask mask(rect.ny, std::vector<bool>(rect.nx, false));
  std::vector<char> flat(rect.nx * rect.ny, 0);
  parallel_for(flat.size(), threads, [&](std::size_t k) {
    const std::size_t i = k / rect.nx;
    const std::size_t j = k % rect.nx;
    const MultiplierField field(theta, rect.cell_center(i, j));
    if (const auto* fixed = std::get_if<BoundaryPartition>(&rule)) {
      flat[k] = check_conditions(domain, *fixed, field).valid;
      return;
    }
    try {
      flat[k] = check_conditions(domain, build_partition(domain, field), field).valid;
    } catch (const InputError&) {
      flat[k] = 0;
    }
  });
  for (std::size_t k = 0; k < flat.size(); ++k) mask[k / rect.nx][k % rect.nx] = flat[k] != 0;
  return mask;
}

std::string mask_to_csv(const Mask& mask) {
  std::string out;
  for (const auto& row : mask) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += row[j] ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

std::string mask_to_svg(const Mask& mask, double cell_px) {
  const std::size_t ny = mask.size();
  const std::size_t nx = ny ? mask.front().size() : 0;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << nx * cell_px << "\" height=\""
      << ny * cell_px << "\">\n";
  for (std::size_t i = 0; i < ny; ++i) {
    // Row 0 is the lowest y; draw it at the bottom.
    const double y = static_cast<double>(ny - 1 - i) * cell_px;
    for (std::size_t j = 0; j < nx; ++j) {
      svg << "<rect x=\"" << static_cast<double>(j) * cell_px << "\" y=\"" << y << "\" width=\""
          << cell_px << "\" height=\"" << cell_px << "\" fill=\""
          << (mask[i][j] ? "#404040" : "#f0f0f0") << "\"/>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace rotmul
