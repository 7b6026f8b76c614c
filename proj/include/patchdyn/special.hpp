#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>


namespace patchdyn {

template <typename Scalar>
Scalar factorial(int m) {
  Scalar f = 1;
  for (int p = 2; p <= m; ++p) f *= Scalar(p);
  return f;
}

// phi_m(x) = sum_{p>=0} x^p / (p+m)!  =  (e^x - sum_{p<m} x^p/p!) / x^m.
//
// Near the origin the series is used: for |x| <= m+1 the term ratio
// x/(p+m+1) is below one from the start, so an alternating series cannot
// cancel by more than a factor of two.  Further out the closed form is
// stable because e^x no longer competes with the partial sum.
template <typename Scalar>
Scalar phi(int m, const Scalar& x) {
  using std::abs;
  using std::exp;
  if (m < 0) throw std::invalid_argument("phi: order must be non-negative");
  if (m == 0) return exp(x);

  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  if (abs(x) <= Scalar(m + 1)) {
    Scalar term = Scalar(1) / factorial<Scalar>(m);
    Scalar sum = term;
    for (int p = 1; p < 400; ++p) {
      term *= x / Scalar(p + m);
      sum += term;
      if (abs(term) <= eps * abs(sum) / 4) break;
    }
    return sum;
  }

  Scalar partial = 0;
  Scalar term = 1;
  for (int p = 0; p < m; ++p) {
    partial += term;
    term *= x / Scalar(p + 1);
  }
  Scalar xm = 1;
  for (int p = 0; p < m; ++p) xm *= x;
  return (exp(x) - partial) / xm;
}

// Confluent hypergeometric 1F1(1; Q+2; x) = (Q+1)! phi_{Q+1}(x).
template <typename Scalar>
Scalar hyp1f1_1(int Q, const Scalar& x) {
  if (Q < 0) throw std::invalid_argument("hyp1f1_1: Q must be non-negative");
  return factorial<Scalar>(Q + 1) * phi(Q + 1, x);
}

}  // namespace patchdyn
