#include "patchdyn/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "patchdyn/csv.hpp"
#include "patchdyn/special.hpp"

namespace patchdyn {

double nn_cos_ell(double r, double gamma) {
  if (!(r > 0.0 && r < 0.5)) throw std::invalid_argument("nn_cos_ell: need 0 < r < 1/2, got " + format_number(r));
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument("nn_cos_ell: need 0 <= gamma <= 1, got " + format_number(gamma));
  return 1.0 - r * r * gamma;
}

EdgePair nn_forcing(double r, double gamma, int a, double U_prev, double U_next) {
  const double s = 0.5 * (2 * a + 1) * r * gamma;
  return {s * ((r - 1.0) * U_next + (r + 1.0) * U_prev), s * ((r + 1.0) * U_next + (r - 1.0) * U_prev)};
}

CouplingSpec make_coupling(double r, double gamma, int Q) {
  if (Q < 1 || Q > max_taylor_order)
    throw std::invalid_argument("coupling: Q must lie in 1.." + std::to_string(max_taylor_order));
  return {gamma, r, nn_cos_ell(r, gamma), Q};
}

MesoSchedule make_schedule(double delta_t, int M, int Q) {
  if (!(delta_t > 0.0)) throw std::invalid_argument("schedule: delta_t must be positive");
  if (M < 1) throw std::invalid_argument("schedule: M must be at least 1");
  if (Q < 1 || Q > max_taylor_order)
    throw std::invalid_argument("schedule: Q must lie in 1.." + std::to_string(max_taylor_order));
  return {delta_t, M, Q};
}

EdgePair taylor_extrapolate(const TaylorHistory& history, double t) {
  EdgePair out;
  double c = 1.0;
  for (std::size_t q = 0; q < history.size(); ++q) {
    out += c * history[q];
    c *= t / static_cast<double>(q + 1);
  }
  return out;
}

EdgePair taylor_extrapolate(const TaylorHistory& history, int Q, double t) {
  if (static_cast<int>(history.size()) < Q)
    throw std::invalid_argument("taylor_extrapolate: history holds " + std::to_string(history.size()) +
                                " derivative orders, Q=" + std::to_string(Q) + " needed");
  return taylor_extrapolate(TaylorHistory(history.begin(), history.begin() + Q), t);
}

TaylorHistory Forcing::history(double t, int Q) const {
  if (Q - 1 > max_order())
    throw std::invalid_argument("forcing supplies derivatives up to order " + std::to_string(max_order()) +
                                ", Q=" + std::to_string(Q) + " needs " + std::to_string(Q - 1));
  TaylorHistory h;
  for (int q = 0; q < Q; ++q) h.push_back(derivative(q, t));
  return h;
}

PolynomialForcing::PolynomialForcing(std::vector<double> minus, std::vector<double> plus)
    : minus_(std::move(minus)), plus_(std::move(plus)) {}

namespace {

double poly_derivative(const std::vector<double>& c, int q, double t) {
  double sum = 0.0;
  for (int p = static_cast<int>(c.size()) - 1; p >= q; --p) {
    double falling = 1.0;
    for (int i = 0; i < q; ++i) falling *= p - i;
    sum = sum * t + c[p] * falling;
  }
  return sum;
}

// int_0^t s^p e^{lambda (t-s)} ds = p! t^{p+1} phi_{p+1}(lambda t).
double poly_convolution(const std::vector<double>& c, double lambda, double t) {
  double sum = 0.0;
  for (std::size_t p = 0; p < c.size(); ++p)
    sum += c[p] * factorial<double>(static_cast<int>(p)) * std::pow(t, static_cast<int>(p + 1)) *
           phi(static_cast<int>(p + 1), lambda * t);
  return sum;
}

}  // namespace

EdgePair PolynomialForcing::derivative(int q, double t) const {
  return {poly_derivative(minus_, q, t), poly_derivative(plus_, q, t)};
}

std::optional<EdgePair> PolynomialForcing::convolution(double lambda, double t) const {
  return EdgePair{poly_convolution(minus_, lambda, t), poly_convolution(plus_, lambda, t)};
}

double SinusoidForcing::edge_derivative(const Edge& e, int q, double t) const {
  const double shift = q * std::numbers::pi / 2.0;
  const double wq = std::pow(omega_, q);
  double v = wq * (e.sin_amp * std::sin(omega_ * t + shift) + e.cos_amp * std::cos(omega_ * t + shift));
  if (q == 0) v += e.offset;
  return v;
}

// int_0^t e^{i w s} e^{lambda (t-s)} ds = (e^{i w t} - e^{lambda t}) / (i w - lambda).
double SinusoidForcing::edge_convolution(const Edge& e, double lambda, double t) const {
  double v = e.offset * t * phi(1, lambda * t);
  if (e.sin_amp != 0.0 || e.cos_amp != 0.0) {
    if (omega_ == 0.0) return v + e.cos_amp * t * phi(1, lambda * t);
    const std::complex<double> iw(0.0, omega_);
    const std::complex<double> I = (std::exp(iw * t) - std::exp(lambda * t)) / (iw - lambda);
    v += e.sin_amp * I.imag() + e.cos_amp * I.real();
  }
  return v;
}

EdgePair SinusoidForcing::derivative(int q, double t) const {
  return {edge_derivative(minus_, q, t), edge_derivative(plus_, q, t)};
}

std::optional<EdgePair> SinusoidForcing::convolution(double lambda, double t) const {
  return EdgePair{edge_convolution(minus_, lambda, t), edge_convolution(plus_, lambda, t)};
}

EdgePair FunctionForcing::derivative(int q, double t) const {
  if (q > max_order_)
    throw std::invalid_argument("forcing derivative of order " + std::to_string(q) + " not supplied");
  return fn_(q, t);
}

void SampledForcing::push(double t, EdgePair f) {
  if (!times_.empty() && !(t > times_.back()))
    throw std::invalid_argument("SampledForcing: sample times must increase");
  times_.push_back(t);
  values_.push_back(f);
}

EdgePair SampledForcing::derivative(int q, double t) const {
  if (times_.empty()) throw std::runtime_error("SampledForcing: no samples");
  const auto last = std::upper_bound(times_.begin(), times_.end(), t + 1e-12 * std::max(1.0, std::abs(t)));
  const auto count = static_cast<int>(last - times_.begin());
  if (count == 0) throw std::runtime_error("SampledForcing: no sample at or before t=" + format_number(t));
  const int use = std::min(count, order_);
  if (q >= use) return {};
  const std::vector<double> nodes(last - use, last);
  const auto w = fd_weights(t, nodes, q);
  EdgePair out;
  const auto first = static_cast<std::size_t>(count - use);
  for (int i = 0; i < use; ++i) out += w[q][i] * values_[first + i];
  return out;
}

// Fornberg's recursion for arbitrarily spaced nodes.
std::vector<std::vector<double>> fd_weights(double x0, const std::vector<double>& x, int m) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(m + 1, std::vector<double>(n, 0.0));
  if (n == 0) return c;
  c[0][0] = 1.0;
  double c1 = 1.0;
  double c4 = x[0] - x0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

void write_history_csv(std::ostream& os, const std::vector<TaylorHistory>& steps, double delta_t) {
  os << "m,t,f_minus,f_plus,q\n";
  for (std::size_t m = 0; m < steps.size(); ++m)
    for (std::size_t q = 0; q < steps[m].size(); ++q)
      csv_row(os, m, static_cast<double>(m) * delta_t, steps[m][q].minus, steps[m][q].plus, q);
}

}  // namespace patchdyn
