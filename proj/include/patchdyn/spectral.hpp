#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/constants/constants.hpp>

#include "patchdyn/geometry.hpp"
#include "patchdyn/types.hpp"

namespace patchdyn {

// The 2n-1 modes of one patch.  Column c of V and Z is mode k = c.
// Rows are j = -n..n (see at()).
template <typename Scalar>
struct EigenSystemT {
  PatchGeometry geometry;
  Scalar cos_ell = 1;
  Scalar ell = 0;
  VectorX<Scalar> l;       // wavenumbers l_k
  VectorX<Scalar> lambda;  // eigenvalues
  MatrixX<Scalar> V;       // right eigenvectors
  MatrixX<Scalar> Z;       // left eigenvectors
  Eigen::VectorXi parity;  // 0: even in j, 1: odd in j

  int modes() const noexcept { return static_cast<int>(lambda.size()); }

  template <typename Other>
  EigenSystemT<Other> cast() const {
    EigenSystemT<Other> o;
    o.geometry = geometry;
    o.cos_ell = static_cast<Other>(cos_ell);
    o.ell = static_cast<Other>(ell);
    o.l = l.template cast<Other>();
    o.lambda = lambda.template cast<Other>();
    o.V = V.template cast<Other>();
    o.Z = Z.template cast<Other>();
    o.parity = parity;
    return o;
  }
};

using EigenSystem = EigenSystemT<double>;

struct DegeneratePair {
  int k1 = 0;
  int k2 = 0;
  friend bool operator==(const DegeneratePair&, const DegeneratePair&) = default;
};

class DegenerateError : public std::runtime_error {
public:
  DegenerateError(std::vector<DegeneratePair> pairs, const std::string& what)
      : std::runtime_error(what), pairs_(std::move(pairs)) {}
  const std::vector<DegeneratePair>& pairs() const noexcept { return pairs_; }

private:
  std::vector<DegeneratePair> pairs_;
};

// Odd first-family modes (k1 <= 2(n-a-1)) whose wavenumber coincides with an
// odd second-family mode.  The test l_{k1}/2(n-a) == l_{k2}/(2a+1) is done in
// integers: (k1+1)(2a+1) == (m+1)2(n-a) with k2 = m + 2(n-a-1), m odd.
// cos_ell does not enter; it is accepted for interface symmetry.
inline std::vector<DegeneratePair> detect_degeneracy(const PatchGeometry& g, double /*cos_ell*/ = 0.91) {
  std::vector<DegeneratePair> out;
  const int b = g.n - g.a;
  for (int k1 = 1; k1 <= 2 * (b - 1); k1 += 2)
    for (int m = 1; m <= 2 * g.a; m += 2)
      if ((k1 + 1) * (2 * g.a + 1) == (m + 1) * 2 * b) out.push_back({k1, m + 2 * (b - 1)});
  return out;
}

inline std::string describe(const std::vector<DegeneratePair>& pairs) {
  std::ostringstream os;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    os << (i ? ", " : "") << "(" << pairs[i].k1 << "," << pairs[i].k2 << ")";
  return os.str();
}

// Column order used when comparing spectra: ascending |lambda|, near-equal
// eigenvalues ordered even before odd.
template <typename Scalar>
std::vector<int> mode_order(const VectorX<Scalar>& lambda, const Eigen::VectorXi& parity, double tol = 1e-9) {
  using std::abs;
  std::vector<int> idx(lambda.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int x, int y) {
    const Scalar lx = lambda[x], ly = lambda[y];
    const Scalar scale = std::max(Scalar(1), std::max(abs(lx), abs(ly)));
    if (abs(lx - ly) < Scalar(tol) * scale) return parity[x] < parity[y] || (parity[x] == parity[y] && x < y);
    return abs(lx) < abs(ly);
  });
  return idx;
}

template <typename Scalar>
EigenSystemT<Scalar> permuted(const EigenSystemT<Scalar>& es, const std::vector<int>& order) {
  EigenSystemT<Scalar> o = es;
  for (std::size_t c = 0; c < order.size(); ++c) {
    const auto src = order[c];
    o.l[c] = es.l[src];
    o.lambda[c] = es.lambda[src];
    o.V.col(c) = es.V.col(src);
    o.Z.col(c) = es.Z.col(src);
    o.parity[c] = es.parity[src];
  }
  return o;
}

namespace detail {

template <typename Scalar>
struct AnalyticModes {
  int n, a, b;
  Scalar c, ell, sin_ell, pi;

  bool first_family(int k) const { return k <= 2 * (b - 1); }

  Scalar wavenumber(int k) const {
    using std::ceil;
    if (first_family(k)) {
      if (k % 2) return Scalar(k + 1);
      const Scalar sign = (k / 2) % 2 ? Scalar(-1) : Scalar(1);
      return Scalar(k + 1) + sign * (2 * ell / pi - 1);
    }
    const int m = k - 2 * (b - 1);
    return Scalar(2 * ((m + 1) / 2));
  }

  Scalar guarded(const Scalar& d, int k, const char* what) const {
    using std::abs;
    if (abs(d) < Scalar(1e-12)) {
      std::ostringstream os;
      os << "analytic eigensystem: vanishing " << what << " for mode k=" << k
         << " (n=" << n << ", a=" << a << "); the case is degenerate";
      throw DegenerateError({}, os.str());
    }
    return d;
  }

  // Correction functions w_k(j) for j = 0..2a.
  Scalar w(int k, int j) const {
    using std::cos;
    using std::pow;
    using std::sin;
    using std::sqrt;
    const Scalar lk = wavenumber(k);
    if (first_family(k)) {
      const Scalar sign = (k / 2) % 2 ? Scalar(-1) : Scalar(1);
      const Scalar den = guarded(2 * sin(Scalar(2 * a + 1) * lk * pi / Scalar(4 * b)), k, "sin((2a+1)l pi/4(n-a))");
      const Scalar bracket = cos(lk * pi / Scalar(4 * b)) - cos(Scalar(2 * j + 1) * lk * pi / Scalar(4 * b));
      const Scalar scale = k % 2 ? 1 / sqrt(Scalar(b)) : 1 / sqrt(Scalar(b) * sin_ell);
      return sign / den * bracket * scale;
    }
    const int m = k - 2 * (b - 1);
    const Scalar sign = ((m - 1) / 2) % 2 ? Scalar(-1) : Scalar(1);
    const Scalar q = Scalar(2 * a + 1);
    const Scalar bracket = cos(lk * pi / (2 * q)) - cos(Scalar(2 * j + 1) * lk * pi / (2 * q));
    Scalar den;
    if (m % 2)
      den = guarded(sin(Scalar(b) * lk * pi / q), k, "sin((n-a)l pi/(2a+1))");
    else
      den = guarded(cos(Scalar(b) * lk * pi / q) - c, k, "cos((n-a)l pi/(2a+1)) - cos(ell)");
    return sign * bracket / (sqrt(q) * den);
  }
};

}  // namespace detail

// Closed-form eigenvalues and right/left eigenvectors.  Throws DegenerateError
// when an odd first-family mode collides with an odd second-family mode.
template <typename Scalar = double>
EigenSystemT<Scalar> analytic_eigensystem(const PatchGeometry& g, const Scalar& cos_ell) {
  using std::abs;
  using std::acos;
  using std::cos;
  using std::sin;
  using std::sqrt;
  if (!(cos_ell > 0 && cos_ell <= 1)) throw std::invalid_argument("analytic_eigensystem: need 0 < cos_ell <= 1");
  if (cos_ell == 1) throw std::invalid_argument("analytic_eigensystem: cos_ell = 1 gives sin(ell) = 0");
  if (auto pairs = detect_degeneracy(g); !pairs.empty())
    throw DegenerateError(pairs, "degenerate patch (n=" + std::to_string(g.n) + ", a=" + std::to_string(g.a) +
                                     "): coinciding modes " + describe(pairs));

  const int n = g.n, a = g.a, b = n - a, K = 2 * n - 1, rows = 2 * n + 1;
  detail::AnalyticModes<Scalar> am{n, a, b, cos_ell, acos(cos_ell), Scalar(0), boost::math::constants::pi<Scalar>()};
  am.sin_ell = sin(am.ell);

  EigenSystemT<Scalar> es;
  es.geometry = g;
  es.cos_ell = cos_ell;
  es.ell = am.ell;
  es.l.resize(K);
  es.lambda.resize(K);
  es.V = MatrixX<Scalar>::Zero(rows, K);
  es.Z = MatrixX<Scalar>::Zero(rows, K);
  es.parity.resize(K);

  const Scalar pi = am.pi;
  for (int k = 0; k < K; ++k) {
    const Scalar lk = am.wavenumber(k);
    const bool odd = k % 2;
    es.l[k] = lk;
    es.parity[k] = odd ? 1 : 0;
    auto v = es.V.col(k);
    auto z = es.Z.col(k);

    if (am.first_family(k)) {
      const Scalar th = lk * pi / Scalar(2 * b);
      es.lambda[k] = -2 * (1 - cos(th));
      const Scalar s = odd ? 1 / sqrt(Scalar(b)) : 1 / sqrt(Scalar(b) * am.sin_ell);
      for (int j = -n; j <= n; ++j) v[at(j, n)] = s * (odd ? sin(Scalar(j) * th) : cos(Scalar(j) * th));
    } else {
      const Scalar th = lk * pi / Scalar(2 * a + 1);
      es.lambda[k] = -2 * (1 - cos(th));
      const Scalar s = 1 / sqrt(Scalar(2 * a + 1));
      for (int j = -n; j <= n; ++j) v[at(j, n)] = s * (odd ? sin(Scalar(j) * th) : cos(Scalar(j) * th));
    }

    for (int j = -(n - 1); j <= n - 1; ++j) {
      const int aj = std::abs(j);
      Scalar zj = 0;
      if (am.first_family(k) && aj <= b) {
        const Scalar th = lk * pi / Scalar(2 * b);
        if (odd) {
          zj = sin(Scalar(j) * th) / sqrt(Scalar(b));
        } else {
          const Scalar sign = (k / 2) % 2 ? Scalar(-1) : Scalar(1);
          zj = sin(am.ell - sign * Scalar(aj) * th) / sqrt(Scalar(b) * am.sin_ell);
        }
      }
      if (!odd && aj <= a) zj += -2 * cos_ell * am.w(k, a - aj);
      // Each edge's action region, taken with its own sign; overlapping
      // regions both contribute.
      for (int s : {1, -1}) {
        const int sj = s * j;
        const Scalar sg = odd ? Scalar(s) : Scalar(1);
        if (n - 2 * a <= sj && sj <= n - a)
          zj += sg * am.w(k, sj - n + 2 * a);
        else if (n - a < sj && sj <= n - 1)
          zj += sg * am.w(k, n - sj);
      }
      z[at(j, n)] = zj;
    }
    z[at(-n, n)] = z[at(-(n - 1), n)];
    z[at(n, n)] = z[at(n - 1, n)];
  }
  return es;
}

// max |z_k^T B v_k' - delta_kk'| with B = diag(0,1,...,1,0).
template <typename Scalar>
Scalar check_biorthonormality(const EigenSystemT<Scalar>& es) {
  const int n = es.geometry.n;
  const auto inner = es.Z.middleRows(1, 2 * n - 1).transpose() * es.V.middleRows(1, 2 * n - 1);
  const MatrixX<Scalar> G = inner;
  return (G - MatrixX<Scalar>::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
}

// General B (for perturbation checks).
template <typename Scalar>
Scalar check_biorthonormality(const EigenSystemT<Scalar>& es, const MatrixX<Scalar>& B) {
  const MatrixX<Scalar> G = es.Z.transpose() * B * es.V;
  return (G - MatrixX<Scalar>::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
}

// One row per (k, j): k, l_k, lambda_k, j, v_kj, z_kj.
template <typename Scalar>
void write_modes_csv(std::ostream& os, const EigenSystemT<Scalar>& es);

}  // namespace patchdyn

#include "patchdyn/csv.hpp"

template <typename Scalar>
void patchdyn::write_modes_csv(std::ostream& os, const EigenSystemT<Scalar>& es) {
  const int n = es.geometry.n;
  os << "k,l_k,lambda_k,j,v,z\n";
  for (int k = 0; k < es.modes(); ++k)
    for (int j = -n; j <= n; ++j)
      csv_row(os, k, static_cast<double>(es.l[k]), static_cast<double>(es.lambda[k]), j,
              static_cast<double>(es.V(at(j, n), k)), static_cast<double>(es.Z(at(j, n), k)));
}
