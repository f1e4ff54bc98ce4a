#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rotmul/geometry.hpp"

namespace rotmul {

enum class NodeKind { Interior, Dirichlet, Neumann, NeumannCorner };

/// Bit flags for the sides of the unit square a node sits on.
enum SideBit : unsigned { kLeft = 1u, kRight = 2u, kBottom = 4u, kTop = 8u };

struct GridNode {
  std::size_t i;  // x index
  std::size_t j;  // y index
  Vec2 position;
  NodeKind kind;
  unsigned sides;
  /// Sum of m.nu over the sides the node sits on (Neumann nodes only).
  double m_nu;
  /// Smallest per-side m.nu; a Neumann corner needs both sides nonnegative.
  double min_side_m_nu;
  /// Position in the unknown vector; npos for Dirichlet nodes.
  std::size_t unknown;
};

/// Vertex-centred grid on the unit square with n interior nodes per side,
/// spacing h = 1/(n+1). Dirichlet nodes are eliminated from the unknowns.
class Grid {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Grid(std::size_t n, std::vector<GridNode> nodes);

  std::size_t n() const { return n_; }
  std::size_t points_per_side() const { return n_ + 2; }
  double h() const { return 1.0 / static_cast<double>(n_ + 1); }
  const std::vector<GridNode>& nodes() const { return nodes_; }
  const GridNode& node(std::size_t i, std::size_t j) const { return nodes_[j * (n_ + 2) + i]; }
  std::size_t unknowns() const { return unknown_nodes_.size(); }
  /// Node index (into nodes()) of unknown k.
  std::size_t unknown_node(std::size_t k) const { return unknown_nodes_[k]; }
  std::size_t count(NodeKind kind) const;

 private:
  std::size_t n_;
  std::vector<GridNode> nodes_;
  std::vector<std::size_t> unknown_nodes_;
};

/// Labels each boundary node with the partition condition at its position;
/// nodes on Gamma, and corners touching a Dirichlet segment, are Dirichlet.
/// Throws InputError for n < 2 or a partition that is not on the unit square.
Grid build_grid(std::size_t n, const BoundaryPartition& partition, const MultiplierField& field);

struct AssemblyOptions {
  /// Zero the feedback at Neumann nodes with m.nu < 0 instead of failing.
  bool clamp = false;
};

/// Semi-discrete operators of U'' + B g(U') + K U = 0 in mass-scaled
/// unknowns U = M^{1/2} u.
struct DiscreteOperators {
  Eigen::MatrixXd K;
  /// Diagonal of B.
  Eigen::VectorXd B;
  /// Diagonal trapezoidal mass weights M (1, 1/2 on edges, 1/4 at corners).
  Eigen::VectorXd mass;
  /// Unknowns whose negative m.nu was clamped to zero feedback.
  std::vector<std::size_t> clamped;
  std::size_t dirichlet_nodes = 0;
  double h = 0.0;

  std::size_t dimension() const { return static_cast<std::size_t>(K.rows()); }
  Eigen::MatrixXd B_matrix() const { return B.asDiagonal(); }
  /// Cholesky of K succeeds.
  bool positive_definite() const;
};

/// Five-point Laplacian with ghost-node elimination on Neumann sides,
/// symmetrized by M^{-1/2} (.) M^{-1/2}; B_ii = alpha (2/h) m.nu at Neumann
/// nodes. Throws NumericalError on m.nu < -1e-12 at a Neumann node unless
/// options.clamp is set.
DiscreteOperators assemble_operators(const Grid& grid, double alpha, AssemblyOptions options = {});

/// Convenience: grid + assembly on the unit square.
DiscreteOperators square_operators(std::size_t n, const BoundaryPartition& partition,
                                   const MultiplierField& field, double alpha,
                                   AssemblyOptions options = {});

double discrete_energy(const DiscreteOperators& ops, const Eigen::VectorXd& U, const Eigen::VectorXd& V);

/// Coordinate-format dump, one "row col value" line per nonzero.
void write_coo(std::ostream& out, const Eigen::MatrixXd& matrix);

}  // namespace rotmul
