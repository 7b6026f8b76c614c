#include "patchdyn/operator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

namespace patchdyn {

namespace {

struct BlockModes {
  std::vector<double> lambda;
  std::vector<Eigen::VectorXd> v;  // interior, j = -(n-1)..n-1
};

// Eigenpairs of K restricted to vectors of one parity.  Unknowns are
// y_0..y_{n-1} (even) or y_1..y_{n-1} (odd).
BlockModes solve_block(const Eigen::MatrixXd& K, int n, bool odd) {
  const int first = odd ? 1 : 0;
  const int m = n - first;
  auto idx = [n](int j) { return j + n - 1; };
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m, m);
  for (int i = first; i <= n - 1; ++i)
    for (int j = first; j <= n - 1; ++j) {
      double v = K(idx(i), idx(j));
      if (j != 0) v += (odd ? -1.0 : 1.0) * K(idx(i), idx(-j));
      P(i - first, j - first) = v;
    }

  Eigen::EigenSolver<Eigen::MatrixXd> solver(P);
  if (solver.info() != Eigen::Success) throw std::runtime_error("numeric_eigensystem: eigen solver failed");

  BlockModes out;
  for (int c = 0; c < m; ++c) {
    const auto ev = solver.eigenvalues()[c];
    if (std::abs(ev.imag()) > 1e-8 * std::max(1.0, std::abs(ev.real())))
      throw std::runtime_error("numeric_eigensystem: complex eigenvalue in a real spectrum");
    Eigen::VectorXd y = solver.eigenvectors().col(c).real();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * n - 1);
    for (int j = first; j <= n - 1; ++j) {
      v[idx(j)] = y[j - first];
      v[idx(-j)] = odd ? -y[j - first] : y[j - first];
    }
    out.lambda.push_back(ev.real());
    out.v.push_back(v);
  }

  for (int x = 0; x < m; ++x)
    for (int y = x + 1; y < m; ++y) {
      const double lx = out.lambda[x], ly = out.lambda[y];
      if (std::abs(lx - ly) < 1e-9 * std::max({1.0, std::abs(lx), std::abs(ly)})) {
        std::ostringstream os;
        os << "numeric eigensystem: coinciding " << (odd ? "odd" : "even") << " eigenvalues " << lx << " and " << ly
           << " (n=" << n << ")";
        throw DegenerateError({{x, y}}, os.str());
      }
    }
  return out;
}

}  // namespace

EigenSystem numeric_eigensystem(const PatchOperator& op) {
  const int n = op.geometry.n, K = 2 * n - 1;
  const Eigen::MatrixXd R = op.reduced();

  EigenSystem es;
  es.geometry = op.geometry;
  es.cos_ell = op.cos_ell;
  es.ell = std::acos(op.cos_ell);
  es.l.resize(K);
  es.lambda.resize(K);
  es.parity.resize(K);
  Eigen::MatrixXd Vint(K, K);

  int c = 0;
  for (bool odd : {false, true}) {
    if (odd && n == 1) break;
    auto block = solve_block(R, n, odd);
    for (std::size_t i = 0; i < block.lambda.size(); ++i, ++c) {
      es.lambda[c] = block.lambda[i];
      es.parity[c] = odd ? 1 : 0;
      Vint.col(c) = block.v[i];
    }
  }

  es.V = Eigen::MatrixXd::Zero(2 * n + 1, K);
  es.V.middleRows(1, K) = Vint;
  es.V.row(0) = op.L.row(0).segment(1, K) * Vint;
  es.V.row(2 * n) = op.L.row(2 * n).segment(1, K) * Vint;

  for (int k = 0; k < K; ++k) {
    auto v = es.V.col(k);
    v /= v.norm();
    Eigen::Index best = n;
    for (Eigen::Index r = n; r <= 2 * n; ++r)
      if (std::abs(v[r]) > std::abs(v[best]) * (1 + 1e-9)) best = r;
    if (v[best] < 0) v = -v;
    // Wavenumber measured on the reduced-width scale.
    const double th = std::acos(std::clamp(1.0 + es.lambda[k] / 2.0, -1.0, 1.0));
    es.l[k] = 2.0 * op.geometry.buffer() * th / std::acos(-1.0);
  }

  const Eigen::MatrixXd Zint = es.V.middleRows(1, K).fullPivLu().inverse().transpose();
  es.Z = Eigen::MatrixXd::Zero(2 * n + 1, K);
  es.Z.middleRows(1, K) = Zint;
  es.Z.row(0) = es.Z.row(1);
  es.Z.row(2 * n) = es.Z.row(2 * n - 1);

  return permuted(es, mode_order(es.lambda, es.parity));
}

}  // namespace patchdyn
