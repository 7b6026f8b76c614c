#pragma once

#include <Eigen/Dense>

namespace patchdyn {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Patch vectors run over j = -n..n; storage row is j + n.
inline Eigen::Index at(int j, int n) noexcept { return static_cast<Eigen::Index>(j + n); }

// Forcing at the two patch edges, (f_{-n}, f_{+n}).
struct EdgePair {
  double minus = 0.0;
  double plus = 0.0;

  EdgePair& operator+=(const EdgePair& o) noexcept {
    minus += o.minus;
    plus += o.plus;
    return *this;
  }
  friend EdgePair operator+(EdgePair x, const EdgePair& y) noexcept { return x += y; }
  friend EdgePair operator*(double s, const EdgePair& x) noexcept {
    return {s * x.minus, s * x.plus};
  }
};

}  // namespace patchdyn
