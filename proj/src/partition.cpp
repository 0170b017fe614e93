#include "sgbound/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace sgbound {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a;
}

Eigen::Vector2d unit_at(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Closed-form eigendecomposition of a symmetric 2x2 matrix.
void eig_sym2(const Eigen::Matrix2d& m, double& lo, double& hi, double& hi_angle) {
  const double a = m(0, 0), b = 0.5 * (m(0, 1) + m(1, 0)), c = m(1, 1);
  const double tr = a + c;
  const double disc = std::sqrt(std::max(0.0, 0.25 * (a - c) * (a - c) + b * b));
  hi = 0.5 * tr + disc;
  lo = 0.5 * tr - disc;
  hi_angle = 0.5 * std::atan2(2.0 * b, a - c);  // direction of the larger eigenvalue
}

double quad_at_angle(const Eigen::Matrix2d& m, double angle) {
  const Eigen::Vector2d v = unit_at(angle);
  return v.dot(m * v);
}

// Inward normals of the cone spanned CCW from angle lo to angle hi
// (sector strictly smaller than pi).
Eigen::Matrix2d cone_normals(double lo, double hi) {
  const Eigen::Vector2d vlo = unit_at(lo), vhi = unit_at(hi);
  Eigen::Matrix2d e;
  e.row(0) = Eigen::Vector2d(-vlo.y(), vlo.x());  // rotate +90deg: points into the sector
  e.row(1) = Eigen::Vector2d(vhi.y(), -vhi.x());  // rotate -90deg
  return e;
}

Matrix continuity_rows(int phi_dim, int ray_a, int ray_b,
                       const Eigen::Vector2d& va, const Eigen::Vector2d& vb) {
  Eigen::Matrix2d basis;
  basis.col(0) = va;
  basis.col(1) = vb;
  const Eigen::Matrix2d inv = basis.inverse();
  Matrix f = Matrix::Zero(phi_dim, 2);
  f.row(ray_a) = inv.row(0);
  f.row(ray_b) = inv.row(1);
  return f;
}

}  // namespace

ConicalPartition baseline_partition(const Matrix& m_matrix) {
  const int n = static_cast<int>(m_matrix.rows());
  if (m_matrix.cols() != n) throw std::invalid_argument("baseline_partition: M must be square");

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m_matrix + m_matrix.transpose()));
  const double scale = std::max(1.0, m_matrix.norm());
  const bool jump_nonempty = es.eigenvalues().minCoeff() < -1e-12 * scale;

  ConicalPartition part;
  part.dim = n;
  part.phi_dim = n;
  part.trivial = true;

  Cell flow;
  flow.E = Matrix::Zero(n, n);
  flow.F = Matrix::Identity(n, n);
  flow.kind = CellKind::flow;
  part.cells.push_back(flow);
  part.flow_idx.push_back(0);

  if (jump_nonempty) {
    Cell jump = flow;
    jump.kind = CellKind::jump;
    part.cells.push_back(jump);
    part.jump_idx.push_back(1);
  }
  return part;
}

ConicalPartition build_partition(const Matrix& m_matrix, int cell_count) {
  if (m_matrix.rows() != 2 || m_matrix.cols() != 2)
    throw std::invalid_argument("build_partition: only 2-D state supported");
  const Eigen::Matrix2d m = 0.5 * (Eigen::Matrix2d(m_matrix) + Eigen::Matrix2d(m_matrix).transpose());

  double lo_eig, hi_eig, hi_angle;
  eig_sym2(m, lo_eig, hi_eig, hi_angle);
  const double scale = std::max(1.0, m.norm());

  if (lo_eig >= -1e-12 * scale) return baseline_partition(m_matrix);  // empty jump set
  if (hi_eig <= 1e-12 * scale)
    throw std::invalid_argument("build_partition: flow set degenerate (M has no positive direction)");

  if (cell_count < 4 || (cell_count - 2) % 2 != 0)
    throw std::invalid_argument("build_partition: need N >= 4 with N-2 even");

  // Set boundary x'Mx = 0: in the eigenbasis g1 xi1^2 + g2 xi2^2 = 0 with
  // g1 = hi_eig > 0 > g2 = lo_eig, i.e. xi2 = +/- sqrt(g1/|g2|) xi1.
  const double slope = std::sqrt(hi_eig / -lo_eig);
  const double base = std::atan2(slope, 1.0);
  std::vector<double> boundary = {
      wrap_angle(hi_angle + base), wrap_angle(hi_angle - base),
      wrap_angle(hi_angle + base + std::numbers::pi), wrap_angle(hi_angle - base + std::numbers::pi)};
  std::sort(boundary.begin(), boundary.end());

  // Classify the four sectors between consecutive boundary rays and collect
  // all rays: subdividing only the two flow fans.
  const int per_fan = (cell_count - 2) / 2;
  struct Sector {
    double lo, hi;
    bool flow;
  };
  std::vector<Sector> sectors;
  for (int k = 0; k < 4; ++k) {
    const double lo = boundary[k];
    const double hi = (k == 3) ? boundary[0] + kTwoPi : boundary[k + 1];
    sectors.push_back({lo, hi, quad_at_angle(m, 0.5 * (lo + hi)) > 0.0});
  }

  std::vector<double> angles;
  for (const auto& s : sectors) {
    const int pieces = s.flow ? per_fan : 1;
    const double step = (s.hi - s.lo) / pieces;
    for (int i = 0; i < pieces; ++i) angles.push_back(wrap_angle(s.lo + i * step));
  }
  std::sort(angles.begin(), angles.end());  // canonical CCW order from the smallest angle

  ConicalPartition part;
  part.dim = 2;
  part.phi_dim = cell_count;
  for (double a : angles) {
    part.ray_angles.push_back(a);
    part.rays.push_back(unit_at(a));
  }

  const int n_rays = static_cast<int>(part.rays.size());
  for (int i = 0; i < n_rays; ++i) {
    const int j = (i + 1) % n_rays;
    const double a_lo = part.ray_angles[i];
    const double a_hi = (j == 0) ? part.ray_angles[0] + kTwoPi : part.ray_angles[j];
    Cell cell;
    cell.ray_lo = i;
    cell.ray_hi = j;
    cell.E = cone_normals(a_lo, a_hi);
    cell.F = continuity_rows(cell_count, i, j, part.rays[i], part.rays[j]);
    // Cells lie strictly inside one sector, so the midpoint sign classifies them.
    cell.kind = quad_at_angle(m, 0.5 * (a_lo + a_hi)) > 0.0 ? CellKind::flow : CellKind::jump;
    part.cells.push_back(cell);
  }
  for (int i = 0; i < part.cell_count(); ++i) {
    (part.cells[i].kind == CellKind::flow ? part.flow_idx : part.jump_idx).push_back(i);
  }
  if (static_cast<int>(part.flow_idx.size()) != cell_count - 2 || part.jump_idx.size() != 2)
    throw std::invalid_argument("build_partition: jump set is not a two-cone set");
  return part;
}

int cell_of(const ConicalPartition& part, const Eigen::Vector2d& x) {
  if (part.dim != 2) throw std::invalid_argument("cell_of: 2-D partitions only");
  if (part.trivial) return 0;
  const double slack = 1e-9 * std::max(x.norm(), 1e-300);
  int best = -1;
  double best_min = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < part.cell_count(); ++i) {
    const double mn = (part.cells[i].E * x).minCoeff();
    if (mn >= -slack) return i;  // lowest qualifying index
    if (mn > best_min) {
      best_min = mn;
      best = i;
    }
  }
  return best;  // unreachable for covering partitions; nearest cell as fallback
}

bool check_continuity(const ConicalPartition& part, int trials, double tol, std::uint64_t seed) {
  if (part.cell_count() < 2 || part.rays.empty()) return true;  // no shared rays
  const int n_rays = static_cast<int>(part.rays.size());
  std::uint64_t state = seed ? seed : 1;
  auto next_u01 = [&state]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return static_cast<double>(state >> 11) * 0x1.0p-53;
  };

  double worst = 0.0;
  for (int r = 0; r < n_rays; ++r) {
    // Ray r is the hi-ray of cell r-1 and the lo-ray of cell r.
    const int ca = (r + n_rays - 1) % n_rays;
    const int cb = r;
    for (int t = 0; t < std::max(trials, 1); ++t) {
      const double mag = t == 0 ? 1.0 : std::exp((next_u01() - 0.5) * 6.0);
      const Eigen::Vector2d x = mag * part.rays[r];
      const double dev = ((part.cells[ca].F - part.cells[cb].F) * x).cwiseAbs().maxCoeff() / mag;
      worst = std::max(worst, dev);
    }
  }
  return worst <= tol;
}

std::string partition_to_json_text(const ConicalPartition& part) {
  nlohmann::json j;
  j["dim"] = part.dim;
  j["phi_dim"] = part.phi_dim;
  j["trivial"] = part.trivial;
  j["ray_angles"] = part.ray_angles;
  nlohmann::json cells = nlohmann::json::array();
  auto mat = [](const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
      rows.push_back(row);
    }
    return rows;
  };
  for (const auto& c : part.cells) {
    nlohmann::json jc;
    jc["E"] = mat(c.E);
    jc["F"] = mat(c.F);
    jc["kind"] = c.kind == CellKind::flow ? "flow" : "jump";
    jc["ray_lo"] = c.ray_lo;
    jc["ray_hi"] = c.ray_hi;
    cells.push_back(jc);
  }
  j["cells"] = cells;
  return j.dump(2);
}

ConicalPartition partition_from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ConicalPartition part;
  part.dim = j.at("dim").get<int>();
  part.phi_dim = j.at("phi_dim").get<int>();
  part.trivial = j.value("trivial", false);
  if (j.contains("ray_angles")) {
    for (const auto& a : j.at("ray_angles")) {
      part.ray_angles.push_back(a.get<double>());
      part.rays.push_back(unit_at(part.ray_angles.back()));
    }
  }
  auto mat = [](const nlohmann::json& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (size_t i = 0; i < rows.size(); ++i)
      for (size_t k = 0; k < rows.at(i).size(); ++k) m(i, k) = rows.at(i).at(k).get<double>();
    return m;
  };
  int idx = 0;
  for (const auto& jc : j.at("cells")) {
    Cell c;
    c.E = mat(jc.at("E"));
    c.F = mat(jc.at("F"));
    c.kind = jc.at("kind").get<std::string>() == "flow" ? CellKind::flow : CellKind::jump;
    c.ray_lo = jc.value("ray_lo", -1);
    c.ray_hi = jc.value("ray_hi", -1);
    if (c.E.cols() != part.dim || c.F.cols() != part.dim || c.F.rows() != part.phi_dim)
      throw std::invalid_argument("partition JSON: cell matrix dimensions inconsistent");
    (c.kind == CellKind::flow ? part.flow_idx : part.jump_idx).push_back(idx++);
    part.cells.push_back(std::move(c));
  }
  if (part.flow_idx.empty()) throw std::invalid_argument("partition JSON: no flow cells");
  return part;
}

}  // namespace sgbound
