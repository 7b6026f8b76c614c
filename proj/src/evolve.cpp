#include "patchdyn/evolve.hpp"

#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "patchdyn/csv.hpp"
#include "patchdyn/special.hpp"

namespace patchdyn {

Eigen::VectorXd FieldVector::interior() const {
  Eigen::VectorXd b = u;
  b[0] = 0.0;
  b[b.size() - 1] = 0.0;
  return b;
}

FieldVector zero_field(int n, double t) { return {Eigen::VectorXd::Zero(2 * n + 1), t}; }

TransitionKernel make_kernel(const EigenSystem& es, double delta_t) {
  TransitionKernel tk;
  tk.delta_t = delta_t;
  tk.mu = (es.lambda * delta_t).array().exp();
  for (int k = 0; k < es.modes(); ++k) tk.T.push_back(es.V.col(k) * es.Z.col(k).transpose());
  return tk;
}

Eigen::MatrixXd transition_matrix(const EigenSystem& es, double t) {
  const Eigen::VectorXd mu = (es.lambda * t).array().exp();
  return es.V * mu.asDiagonal() * es.Z.transpose();
}

void reconstruct_edges(const PatchOperator& op, FieldVector& x, EdgePair f) {
  const int n = op.geometry.n, m = 2 * n - 1;
  const Eigen::VectorXd inner = x.u.segment(1, m);
  x.u[0] = (op.L.row(0).segment(1, m).dot(inner) + f.minus) / -op.L(0, 0);
  x.u[2 * n] = (op.L.row(2 * n).segment(1, m).dot(inner) + f.plus) / -op.L(2 * n, 2 * n);
}

double coupling_residual(const PatchOperator& op, const FieldVector& x, EdgePair f) {
  const int n = op.geometry.n;
  const double scale = 2 * op.geometry.a + 1;
  const double rm = op.L.row(0).dot(x.u) + f.minus;
  const double rp = op.L.row(2 * n).dot(x.u) + f.plus;
  return std::max(std::abs(rm), std::abs(rp)) / scale;
}

namespace {

double integrate(const std::function<double(double)>& g, double lo, double hi) {
  if (hi <= lo) return 0.0;
  double err = 0.0, l1 = 0.0;
  const double I = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, lo, hi, 20, 1e-13, &err, &l1);
  if (err > 1e-10 * std::max(1.0, l1))
    throw QuadratureError("quadrature did not converge: error estimate " + format_number(err), err);
  return I;
}

// Projections of an edge pair onto every left eigenvector: z_{k,-n} f_- + z_{k,n} f_+.
Eigen::VectorXd project(const EigenSystem& es, EdgePair f) {
  const int n = es.geometry.n;
  return es.Z.row(0).transpose() * f.minus + es.Z.row(2 * n).transpose() * f.plus;
}

void check_time(double t, const char* who) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument(std::string(who) + ": time must be >= 0");
}

}  // namespace

EdgePair edge_convolution(const Forcing& f, double lambda, double t) {
  if (auto c = f.convolution(lambda, t)) return *c;
  auto kernel = [&](bool plus) {
    return integrate(
        [&, plus](double s) {
          const EdgePair v = f.value(s);
          return (plus ? v.plus : v.minus) * std::exp(lambda * (t - s));
        },
        0.0, t);
  };
  return {kernel(false), kernel(true)};
}

FieldVector exact_solution(const EigenSystem& es, const FieldVector& u0, const Forcing& f, double t) {
  check_time(t, "exact_solution");
  const int n = es.geometry.n;
  Eigen::VectorXd coef = (es.lambda * t).array().exp().matrix().asDiagonal() * (es.Z.transpose() * u0.interior());
  for (int k = 0; k < es.modes(); ++k) {
    const EdgePair c = edge_convolution(f, es.lambda[k], t);
    coef[k] += es.Z(0, k) * c.minus + es.Z(2 * n, k) * c.plus;
  }
  FieldVector out{es.V * coef, u0.t + t};
  const EdgePair ft = f.value(t);
  out.u[0] += ft.minus;
  out.u[2 * n] += ft.plus;
  return out;
}

FieldVector direct_integrate(const PatchOperator& op, const FieldVector& u0, const Forcing& f, double t,
                             DirectOptions options) {
  check_time(t, "direct_integrate");
  const int n = op.geometry.n, m = 2 * n - 1;
  const bool meso = options.mode == CouplingMode::meso;
  if (meso && !(options.delta_t > 0.0)) throw std::invalid_argument("direct_integrate: meso mode needs delta_t > 0");

  const double horizon = meso ? options.delta_t : t;
  double dt = options.dt_micro > 0.0 ? options.dt_micro : std::min(horizon / 500.0, 1e-3);
  if (dt > 0.1) throw std::invalid_argument("direct_integrate: dt_micro must not exceed 0.1");
  if (t == 0.0) {
    FieldVector out = u0;
    reconstruct_edges(op, out, f.value(0.0));
    return out;
  }

  // Micro steps never straddle a mesoscale instant.
  long long per_meso = 0;
  long long steps = 0;
  if (meso) {
    per_meso = static_cast<long long>(std::ceil(options.delta_t / dt - 1e-9));
    dt = options.delta_t / static_cast<double>(per_meso);
    steps = static_cast<long long>(std::llround(t / dt));
    if (std::abs(static_cast<double>(steps) * dt - t) > 1e-9 * std::max(1.0, t))
      throw std::invalid_argument("direct_integrate: t must be a whole number of micro steps in meso mode");
  } else {
    steps = static_cast<long long>(std::ceil(t / dt - 1e-9));
    dt = t / static_cast<double>(steps);
  }

  const Eigen::MatrixXd K = op.reduced();
  TaylorHistory held;
  long long held_step = -1;
  auto edge_forcing = [&](long long step, double s) -> EdgePair {
    if (!meso) return f.value(s);
    const long long mstep = step / per_meso;
    if (mstep != held_step) {
      held = f.history(static_cast<double>(mstep) * options.delta_t, options.Q);
      held_step = mstep;
    }
    return taylor_extrapolate(held, s - static_cast<double>(mstep) * options.delta_t);
  };
  auto rhs = [&](const Eigen::VectorXd& y, long long step, double s) {
    Eigen::VectorXd d = K * y;
    const EdgePair g = edge_forcing(step, s);
    d[0] += g.minus;
    d[m - 1] += g.plus;
    return d;
  };

  Eigen::VectorXd y = u0.u.segment(1, m);
  for (long long i = 0; i < steps; ++i) {
    const double s = static_cast<double>(i) * dt;
    const Eigen::VectorXd k1 = rhs(y, i, s);
    const Eigen::VectorXd k2 = rhs(y + 0.5 * dt * k1, i, s + 0.5 * dt);
    const Eigen::VectorXd k3 = rhs(y + 0.5 * dt * k2, i, s + 0.5 * dt);
    const Eigen::VectorXd k4 = rhs(y + dt * k3, i, s + dt);
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  FieldVector out = zero_field(n, u0.t + t);
  out.u.segment(1, m) = y;
  reconstruct_edges(op, out, edge_forcing(steps - 1, t));
  return out;
}

FieldVector meso_step(const EigenSystem& es, const FieldVector& u0, const TaylorHistory& history, double delta_t,
                      int Q) {
  if (static_cast<int>(history.size()) < Q)
    throw std::invalid_argument("meso_step: " + std::to_string(Q) + " derivative orders needed, " +
                                std::to_string(history.size()) + " supplied");
  const Eigen::VectorXd mu = (es.lambda * delta_t).array().exp();
  Eigen::VectorXd coef = mu.asDiagonal() * (es.Z.transpose() * u0.interior());
  for (int q = 1; q <= Q; ++q) {
    const Eigen::VectorXd proj = project(es, history[q - 1]);
    const double dq = std::pow(delta_t, q);
    for (int k = 0; k < es.modes(); ++k) coef[k] += proj[k] * dq * phi(q, es.lambda[k] * delta_t);
  }
  FieldVector out{es.V * coef, u0.t + delta_t};
  out.u[0] = 0.0;
  out.u[out.u.size() - 1] = 0.0;
  return out;
}

MesoHistory::MesoHistory(const EigenSystem& es, double delta_t, int Q)
    : zm_(es.Z.row(0).transpose()),
      zp_(es.Z.row(2 * es.geometry.n).transpose()),
      mu_((es.lambda * delta_t).array().exp()),
      acc_(Eigen::MatrixXd::Zero(es.modes(), Q)),
      Q_(Q) {}

void MesoHistory::push(const TaylorHistory& history) {
  if (static_cast<int>(history.size()) < Q_) throw std::invalid_argument("MesoHistory: too few derivative orders");
  for (int q = 0; q < Q_; ++q) {
    acc_.col(q) = mu_.asDiagonal() * acc_.col(q);
    acc_.col(q) += zm_ * history[q].minus + zp_ * history[q].plus;
  }
  ++steps_;
}

FieldVector meso_run(const EigenSystem& es, const FieldVector& u0, const Forcing& f, const MesoSchedule& schedule) {
  const double dt = schedule.delta_t;
  MesoHistory hist(es, dt, schedule.Q);
  for (int m = 0; m < schedule.M; ++m) hist.push(f.history(m * dt, schedule.Q));

  const Eigen::VectorXd muM = (es.lambda * (dt * schedule.M)).array().exp();
  Eigen::VectorXd coef = muM.asDiagonal() * (es.Z.transpose() * u0.interior());
  for (int q = 1; q <= schedule.Q; ++q) {
    const double dq = std::pow(dt, q);
    for (int k = 0; k < es.modes(); ++k) coef[k] += hist.accumulators()(k, q - 1) * dq * phi(q, es.lambda[k] * dt);
  }
  FieldVector out{es.V * coef, u0.t + dt * schedule.M};
  out.u[0] = 0.0;
  out.u[out.u.size() - 1] = 0.0;
  return out;
}

Eigen::VectorXd remainder_exact(const EigenSystem& es, const Forcing& f, double delta_t, int Q, int M) {
  if (Q < 1) throw std::invalid_argument("remainder_exact: Q must be >= 1");
  const int n = es.geometry.n, a = es.geometry.a;
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(es.modes());
  for (int k = 0; k < es.modes(); ++k) {
    const double lam = es.lambda[k];
    const double mu = std::exp(lam * delta_t);
    double acc = 0.0;
    for (int m = 0; m < M; ++m) {
      const double t0 = m * delta_t;
      const double c = integrate(
          [&](double s) {
            const double w = delta_t - s;
            const EdgePair fq = f.derivative(Q, t0 + s);
            return (es.Z(0, k) * fq.minus + es.Z(2 * n, k) * fq.plus) * std::pow(w, Q) * phi(Q, lam * w);
          },
          0.0, delta_t);
      acc = acc * mu + c;
    }
    coef[k] = acc;
  }
  Eigen::VectorXd R = es.V * coef;
  R[0] = 0.0;
  R[2 * n] = 0.0;
  for (int j = -n + 1; j <= -n + 2 * a; ++j) R[at(-n, n)] -= R[at(j, n)];
  for (int j = n - 2 * a; j <= n - 1; ++j) R[at(n, n)] -= R[at(j, n)];
  return R;
}

void write_trajectory_csv(std::ostream& os, const std::vector<FieldVector>& snapshots) {
  os << "t,j,u_j\n";
  for (const auto& s : snapshots) {
    const int n = s.half_width();
    for (int j = -n; j <= n; ++j) csv_row(os, s.t, j, s.u[at(j, n)]);
  }
}

}  // namespace patchdyn
