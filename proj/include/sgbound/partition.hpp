#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgbound/reset_system.hpp"

namespace sgbound {

enum class CellKind { flow, jump };

/// One conical cell {x : E x >= 0} with its continuity matrix F.
/// For cells built by build_partition, E has two rows (the inward unit
/// normals of the bounding rays) and F has phi_dim rows; F x places the
/// cone coordinates of x in the rows of its two bounding rays, so that
/// F_k x = F_l x holds exactly for x on a shared ray.
struct Cell {
  Matrix E;
  Matrix F;
  CellKind kind = CellKind::flow;
  int ray_lo = -1;
  int ray_hi = -1;
};

struct ConicalPartition {
  int dim = 2;      // state dimension the cells act on
  int phi_dim = 0;  // row count of every F_i (= size of the shared Phi)
  std::vector<double> ray_angles;          // CCW in [0, 2pi); empty if not ray-based
  std::vector<Eigen::Vector2d> rays;       // unit vectors matching ray_angles
  std::vector<Cell> cells;
  std::vector<int> flow_idx;
  std::vector<int> jump_idx;
  bool trivial = false;  // global cells with E = 0 (no cone relaxation)

  int cell_count() const { return static_cast<int>(cells.size()); }
};

/// Build the 2-D polytopic conical partition for the sets {x'Mx >= 0} /
/// {x'Mx < 0}. The four set-boundary directions become rays; each of the
/// two flow fans is subdivided into (N-2)/2 equal-angle cells and each of
/// the two jump cones is a single cell. If M is positive semidefinite the
/// jump set is empty and the trivial single-cell partition is returned.
/// Throws std::invalid_argument when N-2 is odd, N < 4, or the jump set is
/// not a union of two opposite open cones (e.g. M negative definite).
ConicalPartition build_partition(const Matrix& m_matrix, int cell_count);

/// Common-quadratic baseline: one global flow cell (and, when the jump set
/// is nonempty, one global jump cell), each with E = 0 and F = I_n, so the
/// storage reduces to a single quadratic x' Phi x and every inequality is
/// imposed on all of R^n. Sound for any system since the true sets are
/// subsets of R^n; used as the comparison baseline and as the partition
/// for systems without jumps.
ConicalPartition baseline_partition(const Matrix& m_matrix);

/// Lowest index i with E_i x >= 0 (up to 1e-9 relative slack to absorb
/// roundoff on shared rays). x = 0 lies in every cell and returns 0 by
/// convention.
int cell_of(const ConicalPartition& part, const Eigen::Vector2d& x);

/// Samples `trials` points on every shared ray and checks
/// ||F_k x - F_l x||_inf <= tol for unit x. Deterministic given seed.
bool check_continuity(const ConicalPartition& part, int trials,
                      double tol = 1e-10, std::uint64_t seed = 0x5eedULL);

/// Partition dump/load (JSON): ray angles, per-cell E/F/kind. Loading
/// accepts hand-built partitions of any state dimension.
std::string partition_to_json_text(const ConicalPartition& part);
ConicalPartition partition_from_json_text(const std::string& text);

}  // namespace sgbound
