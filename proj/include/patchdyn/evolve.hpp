#pragma once

#include <ostream>
#include <vector>

#include "patchdyn/coupling.hpp"
#include "patchdyn/operator.hpp"
#include "patchdyn/spectral.hpp"

namespace patchdyn {

// Field over j = -n..n at time t.
struct FieldVector {
  Eigen::VectorXd u;
  double t = 0.0;

  int half_width() const noexcept { return static_cast<int>(u.size() - 1) / 2; }
  double operator()(int j) const { return u[at(j, half_width())]; }
  // B u: edges zeroed.
  Eigen::VectorXd interior() const;
};

FieldVector zero_field(int n, double t = 0.0);

// Rank-one pieces T_k = v_k z_k^T and mu_k = exp(lambda_k dt).
struct TransitionKernel {
  std::vector<Eigen::MatrixXd> T;
  Eigen::VectorXd mu;
  double delta_t = 0.0;
};

TransitionKernel make_kernel(const EigenSystem& es, double delta_t);

// T(t) = sum_k exp(lambda_k t) v_k z_k^T.
Eigen::MatrixXd transition_matrix(const EigenSystem& es, double t);

// Fills u_{+-n} from the boundary rows: 0 = L_{+-n} u + f_{+-n}.
void reconstruct_edges(const PatchOperator& op, FieldVector& x, EdgePair f);

// Largest mismatch between action-region average and U cos(ell) + f/(2a+1).
double coupling_residual(const PatchOperator& op, const FieldVector& x, EdgePair f);

class QuadratureError : public std::runtime_error {
public:
  QuadratureError(const std::string& what, double achieved) : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

private:
  double achieved_;
};

// int_0^t f(s) exp(lambda (t - s)) ds per edge: closed form when the provider
// has one, adaptive Gauss-Kronrod otherwise.
EdgePair edge_convolution(const Forcing& f, double lambda, double t);

// Spectral solution with continuous coupling, all 2n+1 entries.
FieldVector exact_solution(const EigenSystem& es, const FieldVector& u0, const Forcing& f, double t);

enum class CouplingMode { continuous, meso };

struct DirectOptions {
  double dt_micro = 0.0;  // 0: min(delta_t/500, 1e-3) (delta_t = t when continuous)
  CouplingMode mode = CouplingMode::continuous;
  double delta_t = 0.0;
  int Q = 1;
};

// Classical RK4 on the 2n-1 interior equations; u_{+-n} solved from the
// active coupling condition at each stage.
FieldVector direct_integrate(const PatchOperator& op, const FieldVector& u0, const Forcing& f, double t,
                             DirectOptions options = {});

// One mesoscale step with Q held Taylor terms.  Returns B u(dt).
FieldVector meso_step(const EigenSystem& es, const FieldVector& u0, const TaylorHistory& history, double delta_t,
                      int Q);

// mu-weighted sums of projected forcing derivatives, one per (mode, order).
class MesoHistory {
public:
  MesoHistory(const EigenSystem& es, double delta_t, int Q);
  // Folds in f^0..f^{Q-1} sampled at the start of the next step.
  void push(const TaylorHistory& history);
  int steps() const noexcept { return steps_; }
  // sum_m mu_k^{M-m-1} (z_{k,-n} f^q_- + z_{k,n} f^q_+)(m dt).
  const Eigen::MatrixXd& accumulators() const noexcept { return acc_; }

private:
  Eigen::VectorXd zm_, zp_, mu_;
  Eigen::MatrixXd acc_;  // modes x Q
  int Q_;
  int steps_ = 0;
};

FieldVector meso_run(const EigenSystem& es, const FieldVector& u0, const Forcing& f, const MesoSchedule& schedule);

// Remainder vector R over M steps (M = 1 for a single step), all 2n+1
// entries; R_{+-n} = -sum of R_j over the rest of that action region.
Eigen::VectorXd remainder_exact(const EigenSystem& es, const Forcing& f, double delta_t, int Q, int M = 1);

// t, j, u_j for every snapshot.
void write_trajectory_csv(std::ostream& os, const std::vector<FieldVector>& snapshots);

}  // namespace patchdyn
