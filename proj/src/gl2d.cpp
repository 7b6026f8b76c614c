#include "patchdyn/gl2d.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <random>
#include <thread>

#include "patchdyn/csv.hpp"

namespace patchdyn {

namespace {

int whole(double x, const char* what) {
  const double w = std::round(x);
  if (w < 1.0 || std::abs(x - w) > 1e-9 * std::max(1.0, x))
    throw std::invalid_argument(std::string("gl2d: ") + what + " must be a positive integer, got " + format_number(x));
  return static_cast<int>(w);
}

}  // namespace

int GLConfig::N() const { return whole(H / h, "H/h"); }
int GLConfig::patches_per_axis() const { return whole(domain_width / H, "domain_width/H"); }

void validate(const GLConfig& c) {
  if (!(c.h > 0.0) || !(c.H > 0.0) || !(c.domain_width > 0.0)) throw std::invalid_argument("gl2d: lengths must be positive");
  const int N = c.N();
  if (c.patches_per_axis() < 2) throw std::invalid_argument("gl2d: need at least 2 patches per axis");
  if (c.n < 1 || 2 * c.n >= N) throw std::invalid_argument("gl2d: need 1 <= n and n h/H < 1/2");
  if (!(c.gamma >= 0.0 && c.gamma <= 1.0)) throw std::invalid_argument("gl2d: need 0 <= gamma <= 1");
  if (!(c.dt_micro > 0.0)) throw std::invalid_argument("gl2d: dt_micro must be positive");
  if (!(c.delta_t > 0.0)) throw std::invalid_argument("gl2d: delta_t must be positive");
  if (!(c.t_end > 0.0)) throw std::invalid_argument("gl2d: t_end must be positive");
  if (!(c.noise_std >= 0.0)) throw std::invalid_argument("gl2d: noise_std must be >= 0");
  if (c.stale_steps < 0) throw std::invalid_argument("gl2d: stale_steps must be >= 0");
  if (c.threads < 1) throw std::invalid_argument("gl2d: threads must be >= 1");
  whole(c.t_end / c.dt_micro, "t_end/dt_micro");
  whole(c.delta_t / c.dt_micro, "delta_t/dt_micro");
}

std::string to_string(GLMode mode) { return mode == GLMode::continuous ? "continuous" : "meso"; }

PatchField gl_rhs(const PatchField& u, double alpha, double beta, bool diffusion_only) {
  const Eigen::Index size = u.rows();
  PatchField d = PatchField::Zero(size, size);
  const cplx diff(1.0, alpha), cubic(1.0, beta);
  for (Eigen::Index x = 1; x + 1 < size; ++x)
    for (Eigen::Index y = 1; y + 1 < size; ++y) {
      const cplx c = u(x, y);
      cplx v = diff * (u(x + 1, y) + u(x - 1, y) + u(x, y + 1) + u(x, y - 1) - 4.0 * c);
      if (!diffusion_only) v += c - cubic * c * std::norm(c);
      d(x, y) = v;
    }
  return d;
}

cplx gl_coupling_2d(const GLConfig& cfg, cplx U_self, const NeighbourValues& nb, int jx, int jy) {
  const int n = cfg.n;
  const bool edge_x = std::abs(jx) == n, edge_y = std::abs(jy) == n;
  if (edge_x && edge_y) throw std::invalid_argument("gl_coupling_2d: corner (" + std::to_string(jx) + "," +
                                                    std::to_string(jy) + ") has no coupling condition");
  if (!edge_x && !edge_y) throw std::invalid_argument("gl_coupling_2d: point is not on a patch edge");
  // Signed distances in macroscale units; quadratic interpolation through
  // the patch centre and its two neighbours along each axis.
  const double x = jx * cfg.h / cfg.H, y = jy * cfg.h / cfg.H, g = cfg.gamma;
  const double cos_ell = cfg.as_printed ? 1.0 - (x * x - y * y) * g : 1.0 - (x * x + y * y) * g;
  const cplx f = g * (0.5 * x * (x + 1.0) * nb.east + 0.5 * x * (x - 1.0) * nb.west + 0.5 * y * (y + 1.0) * nb.north +
                      0.5 * y * (y - 1.0) * nb.south);
  return U_self * cos_ell + f;
}

std::vector<PatchField> gl_initial_condition(const GLConfig& cfg) {
  validate(cfg);
  const int P = cfg.patches_per_axis(), n = cfg.n;
  const double k = 2.0 * std::numbers::pi / cfg.domain_width;
  std::vector<PatchField> out(static_cast<std::size_t>(P) * P, PatchField::Zero(2 * n + 1, 2 * n + 1));
  for (int iy = 0; iy < P; ++iy)
    for (int ix = 0; ix < P; ++ix)
      for (int jx = -n; jx <= n; ++jx)
        for (int jy = -n; jy <= n; ++jy) {
          const double x = ix * cfg.H + jx * cfg.h, y = iy * cfg.H + jy * cfg.h;
          double v = cfg.init_amplitude * std::sin(k * x) * std::sin(k * y);
          if (cfg.noise_std > 0.0) {
            std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                              static_cast<std::uint32_t>(ix), static_cast<std::uint32_t>(iy),
                              static_cast<std::uint32_t>(jx + n), static_cast<std::uint32_t>(jy + n)};
            std::mt19937_64 eng(seq);
            v += std::normal_distribution<double>(0.0, cfg.noise_std)(eng);
          }
          out[ix + P * iy](jx + n, jy + n) = v;
        }
  return out;
}

namespace {

using Fields = std::vector<PatchField>;

class Integrator {
public:
  Integrator(const GLConfig& cfg, double dt) : cfg_(cfg), dt_(dt) {
    P_ = cfg.patches_per_axis();
    n_ = cfg.n;
  }

  Eigen::MatrixXcd macro(const Fields& u) const {
    Eigen::MatrixXcd U(P_, P_);
    for (int iy = 0; iy < P_; ++iy)
      for (int ix = 0; ix < P_; ++ix) U(ix, iy) = u[id(ix, iy)](n_, n_);
    return U;
  }

  // Overwrites every edge (not corner) entry from the coupling conditions.
  void fill_edges(Fields& u, const Eigen::MatrixXcd& neighbour_U) const {
    for (int iy = 0; iy < P_; ++iy)
      for (int ix = 0; ix < P_; ++ix) fill_patch(u[id(ix, iy)], ix, iy, neighbour_U);
  }

  Fields rhs(const Fields& y, const Eigen::MatrixXcd* held) const {
    const Eigen::MatrixXcd Ucur = macro(y);
    const Eigen::MatrixXcd& Unb = held ? *held : Ucur;
    Fields d(y.size());
    auto work = [&](int first, int last) {
      for (int p = first; p < last; ++p) {
        PatchField w = y[p];
        fill_patch(w, p % P_, p / P_, Unb);
        d[p] = gl_rhs(w, cfg_.alpha, cfg_.beta);
      }
    };
    const int total = static_cast<int>(y.size());
    const int threads = std::min(cfg_.threads, total);
    if (threads <= 1) {
      work(0, total);
    } else {
      std::vector<std::jthread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(work, total * t / threads, total * (t + 1) / threads);
    }
    return d;
  }

  void step(Fields& y, const Eigen::MatrixXcd* held) const {
    auto axpy = [](const Fields& a, double s, const Fields& b) {
      Fields r(a.size());
      for (std::size_t p = 0; p < a.size(); ++p) r[p] = a[p] + s * b[p];
      return r;
    };
    const Fields k1 = rhs(y, held);
    const Fields k2 = rhs(axpy(y, 0.5 * dt_, k1), held);
    const Fields k3 = rhs(axpy(y, 0.5 * dt_, k2), held);
    const Fields k4 = rhs(axpy(y, dt_, k3), held);
    for (std::size_t p = 0; p < y.size(); ++p) y[p] += dt_ / 6.0 * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p]);
  }

  int id(int ix, int iy) const { return ix + P_ * iy; }
  int P() const { return P_; }

private:
  void fill_patch(PatchField& w, int ix, int iy, const Eigen::MatrixXcd& U) const {
    const int n = n_;
    const cplx self = w(n, n);
    const NeighbourValues nb{U((ix + 1) % P_, iy), U((ix + P_ - 1) % P_, iy), U(ix, (iy + 1) % P_),
                             U(ix, (iy + P_ - 1) % P_)};
    for (int j = -(n - 1); j <= n - 1; ++j) {
      w(2 * n, j + n) = gl_coupling_2d(cfg_, self, nb, n, j);
      w(0, j + n) = gl_coupling_2d(cfg_, self, nb, -n, j);
      w(j + n, 2 * n) = gl_coupling_2d(cfg_, self, nb, j, n);
      w(j + n, 0) = gl_coupling_2d(cfg_, self, nb, j, -n);
    }
  }

  const GLConfig& cfg_;
  double dt_;
  int P_ = 0;
  int n_ = 0;
};

void check_finite(const Fields& u, double t) {
  for (const auto& f : u) {
    const double m = f.cwiseAbs().maxCoeff();
    if (!std::isfinite(m) || m > 1e6)
      throw GLBlowup(t, "gl2d: field blew up (|u| = " + format_number(m) + ") at t=" + format_number(t));
  }
}

void zero_corners(PatchField& w) {
  const auto last = w.rows() - 1;
  w(0, 0) = w(0, last) = w(last, 0) = w(last, last) = 0.0;
}

GLRun integrate(const GLConfig& cfg, GLMode mode, const Fields& initial, double dt, double t_stop,
                MessageLedger* ledger, bool record) {
  Integrator integ(cfg, dt);
  const int P = integ.P();
  const long long steps = whole(t_stop / dt, "t_end/dt_micro");
  const long long per_meso = mode == GLMode::meso ? whole(cfg.delta_t / dt, "delta_t/dt_micro") : 1;
  const long long series_every = std::max(1LL, static_cast<long long>(std::llround(cfg.series_dt / dt)));
  const Topology topo = ledger ? grid_topology(P, P) : Topology{};

  GLRun run;
  run.config = cfg;
  run.mode = mode;
  Fields y = initial;
  std::deque<Eigen::MatrixXcd> exchanged;
  Eigen::MatrixXcd held;

  auto snapshot_due = [&](long long i) {
    for (double ts : cfg.snapshot_times)
      if (std::llround(ts / dt) == i) return true;
    return false;
  };
  auto observe = [&](long long i) {
    if (!record) return;
    const double t = static_cast<double>(i) * dt;
    if (i % series_every == 0 || i == steps) run.series.push_back({t, integ.macro(y)});
    if (snapshot_due(i)) {
      Fields s = y;
      integ.fill_edges(s, mode == GLMode::meso ? held : integ.macro(y));
      for (auto& w : s) zero_corners(w);
      run.snapshots.push_back({t, std::move(s)});
    }
  };

  for (long long i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const bool exchange = mode == GLMode::continuous || i % per_meso == 0;
    if (exchange && i < steps) {
      if (mode == GLMode::meso) {
        exchanged.push_back(integ.macro(y));
        while (static_cast<int>(exchanged.size()) > cfg.stale_steps + 1) exchanged.pop_front();
        held = exchanged.front();
      }
      if (ledger) {
        const int age = mode == GLMode::meso ? static_cast<int>(exchanged.size()) - 1 : 0;
        for (int p = 0; p < topo.P; ++p)
          for (int q : topo.neighbours[p]) ledger->record(p, q, t, 1, age);
      }
    }
    if (mode == GLMode::meso && i == 0) held = integ.macro(y);
    observe(i);
    if (i == steps) break;
    integ.step(y, mode == GLMode::meso ? &held : nullptr);
    check_finite(y, t + dt);
  }
  return run;
}

}  // namespace

GLRun run_gl2d(const GLConfig& cfg, GLMode mode, MessageLedger* ledger) {
  return run_gl2d(cfg, mode, gl_initial_condition(cfg), ledger);
}

GLRun run_gl2d(const GLConfig& cfg, GLMode mode, const std::vector<PatchField>& init, MessageLedger* ledger) {
  validate(cfg);
  const int P = cfg.patches_per_axis(), size = 2 * cfg.n + 1;
  if (static_cast<int>(init.size()) != P * P)
    throw std::invalid_argument("gl2d: expected " + std::to_string(P * P) + " initial patches");
  for (const auto& f : init)
    if (f.rows() != size || f.cols() != size) throw std::invalid_argument("gl2d: initial patch has the wrong size");

  // Halving check on a short horizon: the step must already be converged.
  const double horizon = std::min(cfg.t_end, 20 * cfg.dt_micro);
  const auto coarse = integrate(cfg, GLMode::continuous, init, cfg.dt_micro, horizon, nullptr, true);
  const auto fine = integrate(cfg, GLMode::continuous, init, cfg.dt_micro / 2, horizon, nullptr, true);
  const double gap = (coarse.series.back().U - fine.series.back().U).cwiseAbs().maxCoeff();
  if (!(gap < 1e-8))
    throw std::runtime_error("gl2d: dt_micro=" + format_number(cfg.dt_micro) +
                             " is not converged (halving changes U by " + format_number(gap) + ")");

  return integrate(cfg, mode, init, cfg.dt_micro, cfg.t_end, ledger, true);
}

double compare_macroscale(const GLRun& a, const GLRun& b, double t) {
  auto find = [t](const GLRun& r) -> const GLSample& {
    for (const auto& s : r.series)
      if (std::abs(s.t - t) < 1e-9) return s;
    throw std::invalid_argument("compare_macroscale: no sample at t=" + format_number(t));
  };
  const auto& sa = find(a);
  const auto& sb = find(b);
  if (sa.U.rows() != sb.U.rows() || sa.U.cols() != sb.U.cols())
    throw std::invalid_argument("compare_macroscale: patch grids differ");
  return std::sqrt((sa.U - sb.U).cwiseAbs2().mean());
}

void write_snapshots_csv(std::ostream& os, const GLRun& run) {
  const int P = run.config.patches_per_axis(), n = run.config.n;
  os << "t,i_x,i_y,j_x,j_y,re_u,im_u\n";
  for (const auto& s : run.snapshots)
    for (int iy = 0; iy < P; ++iy)
      for (int ix = 0; ix < P; ++ix)
        for (int jx = -n; jx <= n; ++jx)
          for (int jy = -n; jy <= n; ++jy) {
            const cplx v = s.patches[ix + P * iy](jx + n, jy + n);
            csv_row(os, s.t, ix, iy, jx, jy, v.real(), v.imag());
          }
}

void write_series_csv(std::ostream& os, const GLRun& run, bool header) {
  if (header) os << "t,i_x,i_y,re_U,im_U,mode,delta_t,seed\n";
  const double dt = run.mode == GLMode::meso ? run.config.delta_t : 0.0;
  for (const auto& s : run.series)
    for (Eigen::Index iy = 0; iy < s.U.cols(); ++iy)
      for (Eigen::Index ix = 0; ix < s.U.rows(); ++ix)
        csv_row(os, s.t, ix, iy, s.U(ix, iy).real(), s.U(ix, iy).imag(), to_string(run.mode), dt,
                static_cast<long long>(run.config.seed));
}

}  // namespace patchdyn
