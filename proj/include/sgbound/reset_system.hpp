#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace sgbound {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Reset system with state-based resetting:
///   xdot = A x + B u   while x' M x >= 0   (flow set)
///   x+   = R x         when  x' M x <  0   (jump set)
///   y    = C x + D u
/// Square in the input/output channel: u, y both have dimension p.
/// Immutable after construction; safe to share across threads.
struct ResetSystem {
  Matrix A;  // n x n flow dynamics
  Matrix B;  // n x p
  Matrix C;  // p x n
  Matrix D;  // p x p
  Matrix R;  // n x n reset map
  Matrix M;  // n x n symmetric, defines flow/jump split

  int n() const { return static_cast<int>(A.rows()); }
  int p() const { return static_cast<int>(B.cols()); }

  /// Quadratic set form x' M x.
  double set_form(const Vector& x) const;

  /// True iff x' M x >= 0. The boundary belongs to the flow set.
  bool in_flow(const Vector& x) const;

  /// True iff x' M x < 0. Exact complement of in_flow.
  bool in_jump(const Vector& x) const;
};

/// Static checks on a system description. The Hurwitz flag is advisory:
/// stability is a property of trajectories and is enforced at runtime by
/// the simulator, so a non-Hurwitz A is reported but does not fail `ok`.
struct ValidationReport {
  bool dims_ok = false;
  bool m_symmetric = false;
  bool hurwitz = false;
  bool ok = false;  // dims_ok && m_symmetric
  std::vector<std::string> notes;
};

ValidationReport validate(const ResetSystem& sys);

/// Largest singular value of the transfer matrix C (jw I - A)^{-1} B + D of
/// the flow dynamics. Oracle for gain-based tests; throws std::domain_error
/// when jw is (numerically) an eigenvalue of A.
double lti_gain_at(const ResetSystem& sys, double omega);

/// System description file: JSON object with keys "A","B","C","D","R","M",
/// each a row-major nested array. Validated on load (throws
/// std::invalid_argument on malformed input or inconsistent dimensions).
ResetSystem system_from_json_text(const std::string& text);
ResetSystem load_system_json(const std::string& path);
std::string system_to_json_text(const ResetSystem& sys);

}  // namespace sgbound
