#pragma once

#include <cmath>
#include <ostream>
#include <vector>

#include "patchdyn/special.hpp"
#include "patchdyn/spectral.hpp"

namespace patchdyn {

namespace detail {

template <typename Scalar>
Scalar bound_prefactor(const Scalar& delta_t, int Q) {
  using std::pow;
  return pow(delta_t, Q + 1) / factorial<Scalar>(Q + 1);
}

// R_{+-n} = sum of the interior entries of that edge's action region.
template <typename Scalar>
void fill_edges(VectorX<Scalar>& R, int n, int a) {
  R[at(-n, n)] = 0;
  R[at(n, n)] = 0;
  for (int j = -n + 1; j <= -n + 2 * a; ++j) R[at(-n, n)] += R[at(j, n)];
  for (int j = n - 2 * a; j <= n - 1; ++j) R[at(n, n)] += R[at(j, n)];
}

}  // namespace detail

// Scaled bound on |R_j| / max|f^Q| over one mesoscale step:
//   dt^{Q+1}/(Q+1)! |sum_k v_kj (z_{k,-n} + z_{k,n}) 1F1(1;Q+2;lambda_k dt)|.
// The sum equals the remainder produced by f^Q = 1 on both edges, so it is
// attained by that forcing and decays away from the edges.
template <typename Scalar>
VectorX<Scalar> remainder_bound(const EigenSystemT<Scalar>& es, const Scalar& delta_t, int Q) {
  using std::abs;
  const int n = es.geometry.n;
  VectorX<Scalar> c(es.modes());
  for (int k = 0; k < es.modes(); ++k)
    c[k] = (es.Z(0, k) + es.Z(2 * n, k)) * hyp1f1_1(Q, Scalar(es.lambda[k] * delta_t));
  VectorX<Scalar> R = (es.V * c).cwiseAbs() * detail::bound_prefactor(delta_t, Q);
  detail::fill_edges(R, n, es.geometry.a);
  return R;
}

// The same sum with |.| on every mode term.  Never smaller than
// remainder_bound; it does not decay into the patch.
template <typename Scalar>
VectorX<Scalar> remainder_bound_termwise(const EigenSystemT<Scalar>& es, const Scalar& delta_t, int Q) {
  using std::abs;
  const int n = es.geometry.n;
  VectorX<Scalar> R = VectorX<Scalar>::Zero(2 * n + 1);
  for (int k = 0; k < es.modes(); ++k) {
    const Scalar c = abs((es.Z(0, k) + es.Z(2 * n, k)) * hyp1f1_1(Q, Scalar(es.lambda[k] * delta_t)));
    R += es.V.col(k).cwiseAbs() * c;
  }
  R *= detail::bound_prefactor(delta_t, Q);
  detail::fill_edges(R, n, es.geometry.a);
  return R;
}

// Empirical fit (2 dt)^{Q+1} 10^{-Q-(1+0.025 Q/dt)(n-1-j)}, meant for dt ~ 0.5.
inline double remainder_bound_approx(int n, int j, double delta_t, int Q) {
  return std::pow(2.0 * delta_t, Q + 1) * std::pow(10.0, -Q - (1.0 + 0.025 * Q / delta_t) * (n - 1 - j));
}

// Scaled bound on (2a+1) |core-average error| / max|f^Q|; even modes only.
template <typename Scalar>
Scalar macro_error_bound(const EigenSystemT<Scalar>& es, const Scalar& delta_t, int Q) {
  using std::abs;
  const int n = es.geometry.n, a = es.geometry.a;
  Scalar sum = 0;
  for (int k = 0; k < es.modes(); ++k) {
    if (es.parity[k]) continue;
    const Scalar core = es.V.col(k).segment(at(-a, n), 2 * a + 1).sum();
    sum += core * es.Z(2 * n, k) * hyp1f1_1(Q, Scalar(es.lambda[k] * delta_t));
  }
  return abs(sum) * detail::bound_prefactor(delta_t, Q);
}

struct BoundReport {
  PatchGeometry geometry;
  double cos_ell = 0.0;
  double delta_t = 0.0;
  int Q = 1;
  std::vector<double> R_jmax;  // j = -n..n
  double E_max = 0.0;
};

struct SweepRanges {
  std::vector<int> n;
  std::vector<int> a;  // empty: every 0 <= a < n
  std::vector<double> delta_t;
  std::vector<int> Q;
  std::vector<double> cos_ell;
};

struct SkippedCase {
  int n = 0;
  int a = 0;
  double cos_ell = 0.0;
  std::string reason;
};

struct SweepResult {
  std::vector<BoundReport> reports;  // ordered by (n, a, cos_ell, delta_t, Q)
  std::vector<SkippedCase> skipped;
};

// Bounds for every valid (n, a, cos_ell, delta_t, Q), evaluated in quad
// precision on `threads` workers.  Output order does not depend on threads.
SweepResult bound_sweep(const SweepRanges& ranges, int threads = 1);

// n, a, n_minus_a, cos_ell, delta_t, Q, j, R_jmax
void write_remainder_csv(std::ostream& os, const SweepResult& sweep);
// n, a, n_minus_a, cos_ell, delta_t, Q, E_max
void write_macro_csv(std::ostream& os, const SweepResult& sweep);

}  // namespace patchdyn
