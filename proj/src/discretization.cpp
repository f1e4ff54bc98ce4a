#include "rotmul/discretization.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "rotmul/errors.hpp"

namespace rotmul {

namespace {

Vec2 side_normal(unsigned side) {
  switch (side) {
    case kLeft: return {-1.0, 0.0};
    case kRight: return {1.0, 0.0};
    case kBottom: return {0.0, -1.0};
    default: return {0.0, 1.0};
  }
}

bool on_unit_square_boundary(const Vec2& p) {
  constexpr double tol = 1e-12;
  const bool in_x = p.x() >= -tol && p.x() <= 1.0 + tol;
  const bool in_y = p.y() >= -tol && p.y() <= 1.0 + tol;
  const bool on_x = std::abs(p.x()) <= tol || std::abs(p.x() - 1.0) <= tol;
  const bool on_y = std::abs(p.y()) <= tol || std::abs(p.y() - 1.0) <= tol;
  return in_x && in_y && (on_x || on_y);
}

}  // namespace

Grid::Grid(std::size_t n, std::vector<GridNode> nodes) : n_(n), nodes_(std::move(nodes)) {
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    if (nodes_[k].kind == NodeKind::Dirichlet) {
      nodes_[k].unknown = npos;
    } else {
      nodes_[k].unknown = unknown_nodes_.size();
      unknown_nodes_.push_back(k);
    }
  }
}

std::size_t Grid::count(NodeKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [kind](const GridNode& g) { return g.kind == kind; }));
}

Grid build_grid(std::size_t n, const BoundaryPartition& partition, const MultiplierField& field) {
  if (n < 2) throw InputError("grid needs n >= 2 interior nodes per side");
  for (const auto& s : partition.segments)
    if (!on_unit_square_boundary(s.a) || !on_unit_square_boundary(s.b))
      throw InputError("partition is not a partition of the unit square boundary");

  const std::size_t side = n + 2;
  const double denom = static_cast<double>(n + 1);
  std::vector<GridNode> nodes;
  nodes.reserve(side * side);
  for (std::size_t j = 0; j < side; ++j) {
    for (std::size_t i = 0; i < side; ++i) {
      GridNode g{};
      g.i = i;
      g.j = j;
      // Division keeps lattice points such as 1/2 exact.
      g.position = {static_cast<double>(i) / denom, static_cast<double>(j) / denom};
      g.sides = (i == 0 ? kLeft : 0u) | (i == side - 1 ? kRight : 0u) | (j == 0 ? kBottom : 0u) |
                (j == side - 1 ? kTop : 0u);
      g.m_nu = 0.0;
      g.min_side_m_nu = 0.0;
      if (g.sides == 0) {
        g.kind = NodeKind::Interior;
      } else if (partition.condition_at(g.position) == Condition::Dirichlet) {
        g.kind = NodeKind::Dirichlet;
      } else {
        g.kind = std::popcount(g.sides) == 2 ? NodeKind::NeumannCorner : NodeKind::Neumann;
        const Vec2 m = field(g.position);
        g.min_side_m_nu = std::numeric_limits<double>::infinity();
        for (unsigned bit : {kLeft, kRight, kBottom, kTop}) {
          if (!(g.sides & bit)) continue;
          const double v = m.dot(side_normal(bit));
          g.m_nu += v;
          g.min_side_m_nu = std::min(g.min_side_m_nu, v);
        }
      }
      nodes.push_back(g);
    }
  }
  return Grid(n, std::move(nodes));
}

bool DiscreteOperators::positive_definite() const {
  if (K.rows() == 0) return false;
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) return false;
  // A singular K can still factor in floating point; its last pivot is then
  // at rounding level.
  const double pivot = llt.matrixLLT().diagonal().minCoeff();
  return pivot * pivot > 1e-12 * K.diagonal().maxCoeff();
}

DiscreteOperators assemble_operators(const Grid& grid, double alpha, AssemblyOptions options) {
  if (!std::isfinite(alpha) || alpha < 0.0) throw InputError("feedback gain must be finite and >= 0");
  const std::size_t dim = grid.unknowns();
  const std::size_t side = grid.points_per_side();
  const double h = grid.h();
  const double inv_h2 = 1.0 / (h * h);

  DiscreteOperators ops;
  ops.h = h;
  ops.K = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  ops.B = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  ops.mass = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(dim));
  ops.dirichlet_nodes = grid.count(NodeKind::Dirichlet);

  for (std::size_t k = 0; k < dim; ++k) {
    const GridNode& g = grid.nodes()[grid.unknown_node(k)];
    const auto idx = static_cast<Eigen::Index>(k);
    ops.mass(idx) = std::ldexp(1.0, -std::popcount(g.sides));
    if (g.kind == NodeKind::Neumann || g.kind == NodeKind::NeumannCorner) {
      if (g.min_side_m_nu < -kSignTolerance) {
        if (!options.clamp) {
          char buf[160];
          std::snprintf(buf, sizeof buf, "m.nu = %.3e < 0 at Neumann node (%.6g, %.6g)", g.min_side_m_nu,
                        g.position.x(), g.position.y());
          throw NumericalError(buf);
        }
        ops.clamped.push_back(k);
        continue;
      }
      ops.B(idx) = alpha * (2.0 / h) * std::max(g.m_nu, 0.0);
    }
  }

  // Links between lattice neighbours. Multiplying the ghost-eliminated
  // operator by M gives weight 1/2 to links running along one side and 1
  // to all others; the M^{-1/2} congruence then makes K symmetric.
  auto link = [&](const GridNode& p, const GridNode& q) {
    const double w = ((p.sides & q.sides) ? 0.5 : 1.0) * inv_h2;
    if (p.unknown != Grid::npos) {
      const auto a = static_cast<Eigen::Index>(p.unknown);
      ops.K(a, a) += w / ops.mass(a);
    }
    if (q.unknown != Grid::npos) {
      const auto b = static_cast<Eigen::Index>(q.unknown);
      ops.K(b, b) += w / ops.mass(b);
    }
    if (p.unknown != Grid::npos && q.unknown != Grid::npos) {
      const auto a = static_cast<Eigen::Index>(p.unknown);
      const auto b = static_cast<Eigen::Index>(q.unknown);
      const double off = -w / std::sqrt(ops.mass(a) * ops.mass(b));
      ops.K(a, b) += off;
      ops.K(b, a) += off;
    }
  };
  for (std::size_t j = 0; j < side; ++j) {
    for (std::size_t i = 0; i < side; ++i) {
      const GridNode& p = grid.node(i, j);
      if (i + 1 < side) link(p, grid.node(i + 1, j));
      if (j + 1 < side) link(p, grid.node(i, j + 1));
    }
  }
  return ops;
}

DiscreteOperators square_operators(std::size_t n, const BoundaryPartition& partition,
                                   const MultiplierField& field, double alpha, AssemblyOptions options) {
  return assemble_operators(build_grid(n, partition, field), alpha, options);
}

double discrete_energy(const DiscreteOperators& ops, const Eigen::VectorXd& U, const Eigen::VectorXd& V) {
  if (U.size() != ops.K.rows() || V.size() != ops.K.rows())
    throw InputError("state dimension does not match the operators");
  return 0.5 * (U.dot(ops.K * U) + V.squaredNorm());
}

void write_coo(std::ostream& out, const Eigen::MatrixXd& matrix) {
  char buf[96];
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      const double v = matrix(r, c);
      if (v == 0.0) continue;
      std::snprintf(buf, sizeof buf, "%td %td %.17g\n", r, c, v);
      out << buf;
    }
  }
}

}  // namespace rotmul
