#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "patchdyn/types.hpp"

namespace patchdyn {

inline constexpr int max_taylor_order = 8;

// cos(ell) = 1 - r^2 gamma for nearest-neighbour coupling.
double nn_cos_ell(double r, double gamma);

// f_{+-n} = (2a+1) r gamma [(r +- 1) U_next + (r -+ 1) U_prev] / 2.
EdgePair nn_forcing(double r, double gamma, int a, double U_prev, double U_next);

struct CouplingSpec {
  double gamma = 1.0;
  double r = 0.3;
  double cos_ell = 0.91;
  int Q = 1;
};

CouplingSpec make_coupling(double r, double gamma, int Q);

struct MesoSchedule {
  double delta_t = 0.5;
  int M = 1;
  int Q = 1;
};

MesoSchedule make_schedule(double delta_t, int M, int Q);

// f^0..f^{Q-1} at the start of a mesoscale step.
using TaylorHistory = std::vector<EdgePair>;

// sum_q f^q t^q / q! at offset t from the step start.
EdgePair taylor_extrapolate(const TaylorHistory& history, double t);
// Same, but demands exactly Q orders.
EdgePair taylor_extrapolate(const TaylorHistory& history, int Q, double t);

// Time-dependent edge forcing f(t) = (f_{-n}(t), f_{+n}(t)) with derivatives.
class Forcing {
public:
  virtual ~Forcing() = default;
  virtual EdgePair derivative(int q, double t) const = 0;
  EdgePair value(double t) const { return derivative(0, t); }
  // Closed form of int_0^t f(s) e^{lambda (t - s)} ds, when one exists.
  virtual std::optional<EdgePair> convolution(double /*lambda*/, double /*t*/) const { return std::nullopt; }
  // Highest derivative order the provider can supply.
  virtual int max_order() const { return max_taylor_order + 1; }

  TaylorHistory history(double t, int Q) const;
};

using ForcingPtr = std::shared_ptr<const Forcing>;

class ZeroForcing final : public Forcing {
public:
  EdgePair derivative(int, double) const override { return {}; }
  std::optional<EdgePair> convolution(double, double) const override { return EdgePair{}; }
};

// Per-edge polynomial: f(t) = sum_p c_p t^p.
class PolynomialForcing final : public Forcing {
public:
  PolynomialForcing(std::vector<double> minus, std::vector<double> plus);
  static PolynomialForcing constant(double minus, double plus) { return {{minus}, {plus}}; }
  EdgePair derivative(int q, double t) const override;
  std::optional<EdgePair> convolution(double lambda, double t) const override;

private:
  std::vector<double> minus_, plus_;
};

// Per edge: f(t) = s sin(w t) + c cos(w t) + d.
class SinusoidForcing final : public Forcing {
public:
  struct Edge {
    double sin_amp = 0.0;
    double cos_amp = 0.0;
    double offset = 0.0;
  };
  SinusoidForcing(double omega, Edge minus, Edge plus) : omega_(omega), minus_(minus), plus_(plus) {}
  EdgePair derivative(int q, double t) const override;
  std::optional<EdgePair> convolution(double lambda, double t) const override;

private:
  double edge_derivative(const Edge& e, int q, double t) const;
  double edge_convolution(const Edge& e, double lambda, double t) const;
  double omega_;
  Edge minus_, plus_;
};

// User-supplied derivatives; convolutions fall back to quadrature.
class FunctionForcing final : public Forcing {
public:
  using Fn = std::function<EdgePair(int q, double t)>;
  FunctionForcing(Fn fn, int max_order) : fn_(std::move(fn)), max_order_(max_order) {}
  EdgePair derivative(int q, double t) const override;
  int max_order() const override { return max_order_; }

private:
  Fn fn_;
  int max_order_;
};

// Forcing known only through past samples, e.g. a neighbour's macroscale
// history.  Derivative q at t (q = 0 included) differentiates the polynomial
// through the newest `order` samples at or before t.
class SampledForcing final : public Forcing {
public:
  explicit SampledForcing(int order) : order_(order) {}
  void push(double t, EdgePair f);
  EdgePair derivative(int q, double t) const override;
  int max_order() const override { return order_ - 1; }
  std::size_t size() const noexcept { return times_.size(); }

private:
  int order_;
  std::vector<double> times_;
  std::vector<EdgePair> values_;
};

// Finite-difference weights for derivatives 0..m at x0 from nodes x.
// Returns w with w[d][i] the weight of node i for derivative d.
std::vector<std::vector<double>> fd_weights(double x0, const std::vector<double>& x, int m);

// CSV of Taylor histories: m, t, f_minus, f_plus, q.
void write_history_csv(std::ostream& os, const std::vector<TaylorHistory>& steps, double delta_t);

}  // namespace patchdyn
