#pragma once

#include <stdexcept>
#include <string>

#include "patchdyn/geometry.hpp"
#include "patchdyn/spectral.hpp"
#include "patchdyn/types.hpp"

namespace patchdyn {

// Matrix form B du/dt = L u + f of one patch.
template <typename Scalar>
struct PatchOperatorT {
  PatchGeometry geometry;
  Scalar cos_ell = 1;
  MatrixX<Scalar> B;
  MatrixX<Scalar> L;
  bool wide_range = false;  // cos_ell outside the nearest-neighbour range (0.75, 1]

  // Interior operator after eliminating u_{+-n} with the boundary rows:
  // row +-(n-1) picks up L_{+-n, interior}.  Size (2n-1) x (2n-1).
  MatrixX<Scalar> reduced() const {
    const int n = geometry.n, m = 2 * n - 1;
    MatrixX<Scalar> K = L.block(1, 1, m, m);
    K.row(0) += L.row(0).segment(1, m);
    K.row(m - 1) += L.row(2 * n).segment(1, m);
    return K;
  }
};

using PatchOperator = PatchOperatorT<double>;

template <typename Scalar>
struct BoundaryMatrixT {
  MatrixX<Scalar> A;
};

using BoundaryMatrix = BoundaryMatrixT<double>;

template <typename Scalar = double>
PatchOperatorT<Scalar> assemble_operator(const PatchGeometry& g, const Scalar& cos_ell) {
  if (!(cos_ell > 0 && cos_ell <= 1)) throw std::invalid_argument("assemble_operator: need 0 < cos_ell <= 1");
  const int n = g.n, a = g.a, rows = 2 * n + 1;
  PatchOperatorT<Scalar> op;
  op.geometry = g;
  op.cos_ell = cos_ell;
  op.wide_range = !(cos_ell > Scalar(0.75));
  op.B = MatrixX<Scalar>::Zero(rows, rows);
  op.L = MatrixX<Scalar>::Zero(rows, rows);
  for (int j = -(n - 1); j <= n - 1; ++j) {
    op.B(at(j, n), at(j, n)) = 1;
    op.L(at(j, n), at(j - 1, n)) = 1;
    op.L(at(j, n), at(j, n)) = -2;
    op.L(at(j, n), at(j + 1, n)) = 1;
  }
  // Boundary rows: -1 over the action region, +cos_ell over the core,
  // summed where the two overlap.
  for (int s : {1, -1}) {
    const auto row = at(s * n, n);
    for (int j = -n; j <= n; ++j) {
      Scalar v = 0;
      if (n - 2 * a <= s * j && s * j <= n) v -= 1;
      if (-a <= j && j <= a) v += cos_ell;
      op.L(row, at(j, n)) = v;
    }
  }
  return op;
}

// A copies the first/last rows and columns of L.  The corners are those
// forced by z_{+-n} = z_{+-(n-1)}: A_{+-n,+-n} = L_{+-n,+-(n-1)} and
// A_{+-n,-+n} = L_{+-n,-+(n-1)}.  These equal -1 and 0 when 1 <= a <= n-2.
template <typename Scalar>
BoundaryMatrixT<Scalar> assemble_boundary_matrix(const PatchOperatorT<Scalar>& op) {
  const int n = op.geometry.n, last = 2 * n;
  BoundaryMatrixT<Scalar> bm;
  bm.A = MatrixX<Scalar>::Zero(last + 1, last + 1);
  bm.A.col(0) = op.L.col(0);
  bm.A.col(last) = op.L.col(last);
  bm.A.row(0) = op.L.row(0);
  bm.A.row(last) = op.L.row(last);
  bm.A(0, 0) = op.L(0, 1);
  bm.A(last, last) = op.L(last, last - 1);
  bm.A(0, last) = op.L(0, last - 1);
  bm.A(last, 0) = op.L(last, 1);
  return bm;
}

// Corners fixed at -1 and 0 regardless of a.
template <typename Scalar>
BoundaryMatrixT<Scalar> assemble_boundary_matrix_printed(const PatchOperatorT<Scalar>& op) {
  auto bm = assemble_boundary_matrix(op);
  const int last = 2 * op.geometry.n;
  bm.A(0, 0) = bm.A(last, last) = -1;
  bm.A(0, last) = bm.A(last, 0) = 0;
  return bm;
}

// Dense oracle for the generalised eigenproblem.  u_{+-n} are eliminated
// with the boundary rows, the reduced matrix is split into even and odd
// blocks and each block is solved as a standard eigenproblem.  Columns are
// ordered by mode_order(); v has unit 2-norm with its largest j >= 0 entry
// positive; Z_int^T = V_int^{-1} and z_{+-n} = z_{+-(n-1)}.
// Throws DegenerateError when two eigenvalues within one parity block
// coincide to |dl| < 1e-9 max(1,|l|).
EigenSystem numeric_eigensystem(const PatchOperator& op);

class IncompleteBasisError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// max |sum_k v_k z_k^T - (B + A)|.
template <typename Scalar>
Scalar verify_transition_identity(const EigenSystemT<Scalar>& es, const PatchOperatorT<Scalar>& op,
                                  const BoundaryMatrixT<Scalar>& bm) {
  const int n = op.geometry.n;
  if (es.V.cols() != 2 * n - 1 || es.Z.cols() != 2 * n - 1 || es.V.rows() != 2 * n + 1 || es.Z.rows() != 2 * n + 1)
    throw IncompleteBasisError("verify_transition_identity: need 2n-1 modes of length 2n+1, got " +
                               std::to_string(es.V.cols()));
  const MatrixX<Scalar> T0 = es.V * es.Z.transpose();
  return (T0 - op.B - bm.A).cwiseAbs().maxCoeff();
}

}  // namespace patchdyn
