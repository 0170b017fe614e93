#include "sgbound/reset_system.hpp"

#include <Eigen/Eigenvalues>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace sgbound {

double ResetSystem::set_form(const Vector& x) const {
  if (x.size() != n()) throw std::invalid_argument("set_form: state dimension mismatch");
  return x.dot(M * x);
}

bool ResetSystem::in_flow(const Vector& x) const { return set_form(x) >= 0.0; }

bool ResetSystem::in_jump(const Vector& x) const { return !in_flow(x); }

ValidationReport validate(const ResetSystem& sys) {
  ValidationReport rep;
  const auto n = sys.A.rows();
  const auto p = sys.C.rows();

  rep.dims_ok = sys.A.cols() == n && sys.B.rows() == n && sys.C.cols() == n &&
                sys.R.rows() == n && sys.R.cols() == n && sys.M.rows() == n &&
                sys.M.cols() == n && sys.B.cols() == p && sys.D.rows() == p &&
                sys.D.cols() == p;
  if (!rep.dims_ok) rep.notes.push_back("inconsistent matrix dimensions (square p-channel expected)");

  if (rep.dims_ok) {
    const double scale = std::max(1e-300, sys.M.norm());
    rep.m_symmetric = (sys.M - sys.M.transpose()).norm() <= 1e-12 * scale;
    if (!rep.m_symmetric) rep.notes.push_back("M is not symmetric to 1e-12 relative tolerance");

    Eigen::EigenSolver<Matrix> es(sys.A);
    rep.hurwitz = (es.eigenvalues().real().array() < 0.0).all();
    if (!rep.hurwitz) rep.notes.push_back("A is not Hurwitz (warning only; stability is checked on trajectories)");
  }

  rep.ok = rep.dims_ok && rep.m_symmetric;
  return rep;
}

double lti_gain_at(const ResetSystem& sys, double omega) {
  using CMatrix = Eigen::MatrixXcd;
  const int n = sys.n();
  CMatrix resolvent = std::complex<double>(0.0, omega) * CMatrix::Identity(n, n) - sys.A;
  Eigen::FullPivLU<CMatrix> lu(resolvent);
  if (!lu.isInvertible()) throw std::domain_error("lti_gain_at: jw is an eigenvalue of A");
  CMatrix G = sys.C * lu.solve(CMatrix(sys.B.cast<std::complex<double>>())) + sys.D;
  if (!G.allFinite()) throw std::domain_error("lti_gain_at: singular resolvent");
  Eigen::JacobiSVD<CMatrix> svd(G);
  return svd.singularValues().maxCoeff();
}

namespace {

Matrix matrix_from_json(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key)) throw std::invalid_argument("system JSON: missing key " + key);
  const auto& rows = j.at(key);
  if (!rows.is_array() || rows.empty()) throw std::invalid_argument("system JSON: " + key + " must be a nested array");
  const size_t nc = rows.front().size();
  Matrix m(rows.size(), nc);
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows.at(i);
    if (!row.is_array() || row.size() != nc)
      throw std::invalid_argument("system JSON: ragged rows in " + key);
    for (size_t k = 0; k < nc; ++k) m(i, k) = row.at(k).get<double>();
  }
  return m;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

ResetSystem system_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("system JSON: parse error: ") + e.what());
  }
  ResetSystem sys;
  sys.A = matrix_from_json(j, "A");
  sys.B = matrix_from_json(j, "B");
  sys.C = matrix_from_json(j, "C");
  sys.D = matrix_from_json(j, "D");
  sys.R = matrix_from_json(j, "R");
  sys.M = matrix_from_json(j, "M");
  const auto rep = validate(sys);
  if (!rep.dims_ok) throw std::invalid_argument("system JSON: inconsistent dimensions");
  if (!rep.m_symmetric) throw std::invalid_argument("system JSON: M must be symmetric");
  return sys;
}

ResetSystem load_system_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open system file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return system_from_json_text(ss.str());
}

std::string system_to_json_text(const ResetSystem& sys) {
  nlohmann::json j;
  j["A"] = matrix_to_json(sys.A);
  j["B"] = matrix_to_json(sys.B);
  j["C"] = matrix_to_json(sys.C);
  j["D"] = matrix_to_json(sys.D);
  j["R"] = matrix_to_json(sys.R);
  j["M"] = matrix_to_json(sys.M);
  return j.dump(2);
}

}  // namespace sgbound
