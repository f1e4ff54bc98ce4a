#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace rotmul {

using Vec2 = Eigen::Vector2d;

/// |m.nu| below this is treated as zero for classification and (R) checks.
inline constexpr double kSignTolerance = 1e-12;

/// The rotated multiplier m(x) = R_theta (x - x0). In two dimensions the
/// general form (dI + A)(x - x0) with A skew and d^2 + |A|^2 = 1 is exactly a
/// rotation, with d = cos(theta).
class MultiplierField {
 public:
  /// Throws InputError unless |theta| < pi/2 (d must stay positive).
  MultiplierField(double theta, Vec2 x0);

  double theta() const { return theta_; }
  const Vec2& x0() const { return x0_; }
  double d() const { return cos_; }
  /// Magnitude of the skew part, sin(theta).
  double skew() const { return sin_; }

  Vec2 operator()(const Vec2& x) const { return rotate(x - x0_); }
  Vec2 rotate(const Vec2& v) const;
  /// R_{-theta} v; m(x).nu == (x - x0).rotate_back(nu).
  Vec2 rotate_back(const Vec2& v) const;

  /// Symmetric part d(x - x0) of the field.
  Vec2 symmetric_part(const Vec2& x) const { return cos_ * (x - x0_); }

 private:
  double theta_;
  Vec2 x0_;
  double cos_;
  double sin_;
};

Vec2 eval_multiplier(const MultiplierField& field, const Vec2& x);

struct Edge {
  Vec2 a;
  Vec2 b;

  double length() const { return (b - a).norm(); }
  /// Unit direction a -> b.
  Vec2 direction() const { return (b - a) / length(); }
  /// Outward unit normal for a counter-clockwise polygon: the direction
  /// rotated by -pi/2.
  Vec2 normal() const {
    const Vec2 t = direction();
    return {t.y(), -t.x()};
  }
};

/// Simple polygon with counter-clockwise vertices.
class PolygonDomain {
 public:
  /// Validates vertex count, orientation and simplicity; throws InputError.
  explicit PolygonDomain(std::vector<Vec2> vertices);

  static PolygonDomain unit_square();
  /// Parses whitespace separated "x y" lines; blank lines and '#' comments
  /// are skipped.
  static PolygonDomain parse(const std::string& text);
  static PolygonDomain load(const std::string& path);

  std::size_t size() const { return vertices_.size(); }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const Vec2& vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }
  /// Edge i runs from vertex i to vertex i+1.
  Edge edge(std::size_t i) const { return {vertex(i), vertex(i + 1)}; }
  /// Interior angle at vertex i, in (0, 2 pi).
  double interior_angle(std::size_t i) const;
  double area() const;
  Vec2 barycenter() const;
  bool is_unit_square() const;

 private:
  std::vector<Vec2> vertices_;
};

enum class EdgeLabel { Dirichlet, Neumann, Mixed, Neutral };
std::string to_string(EdgeLabel label);

struct EdgeClassification {
  EdgeLabel label;
  /// Zero of m.nu along the edge; present iff label == Mixed.
  std::optional<Vec2> split;
};

/// Sign of f(x) = (x - x0).R_{-theta}(nu), which is affine along the edge.
EdgeClassification classify_edge(const Edge& edge, const MultiplierField& field);

enum class Condition { Dirichlet, Neumann };
std::string to_string(Condition c);

/// A piece of one polygon edge carrying a single boundary condition.
struct BoundarySegment {
  std::size_t edge;
  Vec2 a;
  Vec2 b;
  Condition condition;
};

/// A point of Gamma, the junction between Dirichlet and Neumann parts.
struct InterfacePoint {
  Vec2 position;
  /// Unit tangent pointing out of the Neumann part, into the Dirichlet part.
  Vec2 tau;
  /// Interior angle; pi for points strictly inside an edge.
  double omega;
  bool at_vertex;
  /// Edge normal; only meaningful when !at_vertex.
  Vec2 normal;
};

struct BoundaryPartition {
  /// Counter-clockwise, consecutive, covering the whole boundary.
  std::vector<BoundarySegment> segments;
  std::vector<InterfacePoint> interfaces;

  /// Dirichlet when p lies on the closure of any Dirichlet segment, so
  /// points of Gamma resolve to Dirichlet.
  Condition condition_at(const Vec2& p, double tol = 1e-12) const;
  double dirichlet_length() const;
};

/// Assembles a partition from explicit segments and derives Gamma. Throws
/// InputError when the segments do not chain around the boundary.
BoundaryPartition make_partition(const PolygonDomain& domain,
                                 std::vector<BoundarySegment> segments);

/// Partition induced by the sign of m.nu. Neutral edges go to Dirichlet.
/// Throws InputError when m.nu vanishes on the whole boundary.
BoundaryPartition build_partition(const PolygonDomain& domain, const MultiplierField& field);

/// Unit square with Dirichlet part ({0} x [0, 1/2]) U ([0, 1] x {0}).
BoundaryPartition reference_square_partition();

struct InterfaceCheck {
  Vec2 position;
  double omega;
  double m_tau;
  /// m.nu at the point; empty at polygon vertices where nu is undefined.
  std::optional<double> m_nu;
  bool s2_ok;
  bool r_ok;
};

struct ConditionReport {
  std::vector<InterfaceCheck> points;
  /// min of m.nu over the Neumann part and max over the Dirichlet part.
  double min_m_nu_neumann;
  double max_m_nu_dirichlet;
  bool s1_neumann_ok;
  bool s1_dirichlet_ok;
  bool s2_ok;
  bool r_ok;
  /// Dirichlet part has positive length. Reported only; not part of valid.
  bool dirichlet_nonempty;
  bool valid;

  bool s1_ok() const { return s1_neumann_ok && s1_dirichlet_ok; }
};

ConditionReport check_conditions(const PolygonDomain& domain, const BoundaryPartition& partition,
                                 const MultiplierField& field);

/// Strip of pivots x0 for which an edge gets mixed conditions.
struct Belt {
  Vec2 direction;
  double lower;
  double upper;

  bool empty() const { return !(lower < upper); }
  bool contains(const Vec2& x0) const {
    const double s = x0.dot(direction);
    return lower < s && s < upper;
  }
};

Belt edge_belt(const Edge& edge, double theta);

struct GridRect {
  double xmin;
  double xmax;
  double ymin;
  double ymax;
  std::size_t nx;
  std::size_t ny;

  /// Center of cell (row i, column j); rows run along y.
  Vec2 cell_center(std::size_t i, std::size_t j) const;
};

/// Either recompute the partition from m.nu for each pivot, or hold one fixed.
struct RecomputePartition {};
using PartitionRule = std::variant<RecomputePartition, BoundaryPartition>;

/// mask[i][j] is the overall validity at x0 = rect.cell_center(i, j).
using Mask = std::vector<std::vector<bool>>;

Mask admissible_region(const PolygonDomain& domain, const PartitionRule& rule, double theta,
                       const GridRect& rect, unsigned threads = 0);

std::string mask_to_csv(const Mask& mask);
std::string mask_to_svg(const Mask& mask, double cell_px = 6.0);

}  // namespace rotmul
