#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>

#include "patchdyn/commsim.hpp"
#include "patchdyn/csv.hpp"
#include "patchdyn/errbound.hpp"
#include "patchdyn/evolve.hpp"
#include "patchdyn/gl2d.hpp"
#include "patchdyn/operator.hpp"
#include "patchdyn/spectral.hpp"

namespace patchdyn::cli {

namespace fs = std::filesystem;

namespace {

fs::path out_dir(const ExperimentConfig& cfg) { return fs::path(cfg.get_text("out")); }

int as_int(long long v, const char* key) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw std::invalid_argument(std::string(key) + " out of range");
  return static_cast<int>(v);
}

PatchGeometry geometry_from(const ExperimentConfig& cfg) {
  const int n = as_int(cfg.get_int("n"), "n");
  const int a = as_int(cfg.get_int("a"), "a");
  int N = as_int(cfg.get_int("N"), "N");
  if (N == 0) N = 4 * n + 1;
  return make_geometry(n, a, N, cfg.get_real("h"));
}

std::vector<int> ints(const std::vector<long long>& v, const char* key) {
  std::vector<int> out;
  for (auto x : v) out.push_back(as_int(x, key));
  return out;
}

std::unique_ptr<Forcing> forcing_from(const std::string& name) {
  if (name == "sin") return std::make_unique<SinusoidForcing>(1.0, SinusoidForcing::Edge{1.0, 0.0, 0.0},
                                                              SinusoidForcing::Edge{1.0, 0.0, 0.0});
  if (name == "exp")
    return std::make_unique<FunctionForcing>(
        [](int, double t) {
          const double e = std::exp(t);
          return EdgePair{e, e};
        },
        max_taylor_order + 1);
  if (name == "zero") return std::make_unique<ZeroForcing>();
  throw std::invalid_argument("unknown forcing '" + name + "' (expected sin, exp or zero)");
}

void report_skipped(const SweepResult& sweep) {
  for (const auto& s : sweep.skipped)
    std::cerr << "skipped n=" << s.n << " a=" << s.a << " cos_ell=" << format_number(s.cos_ell) << ": " << s.reason
              << '\n';
}

// Unit vectors with the sign of the largest entry fixed, for comparing
// eigenvectors whose scalings differ.
// Largest entrywise gap between unit-norm x and y once their signs agree.
double direction_gap(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd u = x / x.norm();
  Eigen::VectorXd v = y / y.norm();
  if (u.dot(v) < 0) v = -v;
  return (u - v).cwiseAbs().maxCoeff();
}

GLConfig gl_config_from(const ExperimentConfig& cfg) {
  GLConfig c;
  c.alpha = cfg.get_real("alpha");
  c.beta = cfg.get_real("beta");
  c.domain_width = cfg.get_real("domain_width");
  c.h = cfg.get_real("h");
  c.H = cfg.get_real("H");
  c.n = as_int(cfg.get_int("n"), "n");
  c.gamma = cfg.get_real("gamma");
  c.delta_t = cfg.get_real("delta_t");
  c.dt_micro = cfg.get_real("dt_micro");
  c.t_end = cfg.get_real("t_end");
  const long long seed = cfg.get_int("seed");
  if (seed < 0) throw std::invalid_argument("seed must be >= 0");
  c.seed = static_cast<std::uint64_t>(seed);
  c.init_amplitude = cfg.get_real("init_amplitude");
  c.noise_std = cfg.get_real("noise_std");
  c.as_printed = cfg.get_bool("as_printed");
  c.stale_steps = as_int(cfg.get_int("stale_steps"), "stale_steps");
  c.snapshot_times = cfg.get_real_list("snapshot_times");
  c.series_dt = cfg.get_real("series_dt");
  c.threads = as_int(cfg.get_int("threads"), "threads");
  return c;
}

GLMode gl_mode(const std::string& s) {
  if (s == "continuous") return GLMode::continuous;
  if (s == "meso") return GLMode::meso;
  throw std::invalid_argument("unknown mode '" + s + "' (expected continuous or meso)");
}

void write_rms_csv(std::ostream& os, const GLRun& meso, const GLRun& reference, bool header = true) {
  if (header) os << "t,delta_t,seed,rms\n";
  for (const auto& s : meso.series)
    csv_row(os, s.t, meso.config.delta_t, static_cast<long long>(meso.config.seed),
            compare_macroscale(meso, reference, s.t));
}

void write_modes_subset(std::ostream& os, const EigenSystem& es, const std::vector<int>& ks) {
  const int n = es.geometry.n;
  os << "k,l_k,lambda_k,j,v,z\n";
  for (int k : ks) {
    if (k < 0 || k >= es.modes()) continue;
    for (int j = -n; j <= n; ++j)
      csv_row(os, k, es.l[k], es.lambda[k], j, es.V(at(j, n), k), es.Z(at(j, n), k));
  }
}

void write_approx_csv(std::ostream& os, int n, double delta_t, const std::vector<int>& Qs) {
  os << "n,delta_t,Q,j,R_approx\n";
  for (int Q : Qs)
    for (int j = 0; j <= n - 1; ++j) csv_row(os, n, delta_t, Q, j, remainder_bound_approx(n, j, delta_t, Q));
}

void write_bound_tables(const fs::path& dir, const std::string& stem, const SweepResult& sweep) {
  auto rem = open_csv(dir / (stem + "_remainder.csv"));
  write_remainder_csv(rem, sweep);
  auto mac = open_csv(dir / (stem + "_macro.csv"));
  write_macro_csv(mac, sweep);
}

EigenSystem reference_system(int a) { return analytic_eigensystem(make_geometry(20, a, 81), 0.91); }

void figure_modes(const fs::path& dir, const std::string& which) {
  if (which == "nobuff") {
    auto os = open_csv(dir / "nobuff.csv");
    write_modes_subset(os, reference_system(0), {0, 1, 2, 3});
  } else if (which == "patch") {
    auto os = open_csv(dir / "patch.csv");
    write_modes_subset(os, reference_system(5), {0, 1, 2, 3});
  } else if (which == "buff") {
    const auto es = reference_system(5);
    const int base = 2 * (es.geometry.n - es.geometry.a - 1);
    auto os = open_csv(dir / "buff.csv");
    write_modes_subset(os, es, {base + 1, base + 2, base + 3, base + 4});
  } else {
    const auto es = reference_system(5);
    const int n = es.geometry.n, a = es.geometry.a, first = 2 * (n - a - 1);
    auto os = open_csv(dir / "wavenum.csv");
    os << "k,family,l_k,scaled_l_k,lambda_k\n";
    for (int k = 0; k < es.modes(); ++k) {
      const bool buffer_mode = k <= first;
      const double scaled = buffer_mode ? es.l[k] / (2.0 * (n - a)) : es.l[k] / (2.0 * a + 1.0);
      csv_row(os, k, buffer_mode ? "buffer" : "core", es.l[k], scaled, es.lambda[k]);
    }
  }
}

void figure_gl(const fs::path& dir, const ExperimentConfig& cfg) {
  GLConfig base = gl_config_from(cfg);
  base.t_end = 0.4;
  base.snapshot_times = {0.04, 0.4};
  const auto reference = patchdyn::run_gl2d(base, GLMode::continuous);
  auto series = open_csv(dir / "gl_series.csv");
  write_series_csv(series, reference);
  auto snap_c = open_csv(dir / "gl_snapshots_continuous.csv");
  write_snapshots_csv(snap_c, reference);
  auto rms = open_csv(dir / "gl_rms.csv");
  bool header = true;
  for (double dt : {0.2, 0.1}) {
    GLConfig c = base;
    c.delta_t = dt;
    const auto run = patchdyn::run_gl2d(c, GLMode::meso);
    write_series_csv(series, run, false);
    write_rms_csv(rms, run, reference, header);
    header = false;
    if (dt == 0.2) {
      auto snap = open_csv(dir / "gl_snapshots_meso.csv");
      write_snapshots_csv(snap, run);
    }
  }
}

}  // namespace

void apply_subcommand_defaults(const std::string& name, ExperimentConfig& cfg) {
  if (name == "gl2d") {
    cfg.set_default("n", "6");
    cfg.set_default("h", "0.25");
    cfg.set_default("delta_t", "0.2");
    cfg.set_default("dt_micro", "0.001");
  } else if (name == "figures") {
    cfg.set_default("n", "6");
    cfg.set_default("h", "0.25");
    cfg.set_default("dt_micro", "0.001");
  } else if (name == "comms") {
    cfg.set_default("delta_t", "0.2");
    cfg.set_default("dt_micro", "0.001");
  }
}

int run_eig(const ExperimentConfig& cfg) {
  const auto g = geometry_from(cfg);
  const double cos_ell = cfg.get_real("cos_ell");
  const auto dir = out_dir(cfg);
  const auto op = assemble_operator(g, cos_ell);
  auto numeric = numeric_eigensystem(op);
  numeric = permuted(numeric, mode_order(numeric.lambda, numeric.parity));
  {
    auto os = open_csv(dir / "modes_numeric.csv");
    write_modes_csv(os, numeric);
  }
  auto summary = open_csv(dir / "summary.csv");
  summary << "n,a,cos_ell,source,biorthonormality,identity_residual,max_eigenvalue_diff,max_eigenvector_diff\n";
  const auto bm = assemble_boundary_matrix(op);
  csv_row(summary, g.n, g.a, cos_ell, "numeric", check_biorthonormality(numeric),
          verify_transition_identity(numeric, op, bm), 0.0, 0.0);

  if (auto pairs = detect_degeneracy(g); !pairs.empty()) {
    std::cerr << "skipped analytic eigensystem for n=" << g.n << " a=" << g.a << ": degenerate modes "
              << describe(pairs) << '\n';
    return 0;
  }
  auto analytic = analytic_eigensystem(g, cos_ell);
  analytic = permuted(analytic, mode_order(analytic.lambda, analytic.parity));
  {
    auto os = open_csv(dir / "modes_analytic.csv");
    write_modes_csv(os, analytic);
  }
  double dl = 0.0, dv = 0.0;
  for (int k = 0; k < analytic.modes(); ++k) {
    dl = std::max(dl, std::abs(analytic.lambda[k] - numeric.lambda[k]));
    dv = std::max(dv, direction_gap(analytic.V.col(k), numeric.V.col(k)));
  }
  csv_row(summary, g.n, g.a, cos_ell, "analytic", check_biorthonormality(analytic),
          verify_transition_identity(analytic, op, bm), dl, dv);
  return 0;
}

int run_evolve(const ExperimentConfig& cfg) {
  const auto g = geometry_from(cfg);
  const double cos_ell = cfg.get_real("cos_ell");
  const double dt = cfg.get_real("delta_t");
  const int Q = as_int(cfg.get_int("q"), "q");
  const int M = as_int(cfg.get_int("steps"), "steps");
  if (M < 1) throw std::invalid_argument("steps must be >= 1");
  const auto forcing = forcing_from(cfg.get_text("forcing"));
  const double dt_micro = cfg.get_real("dt_micro");
  const auto dir = out_dir(cfg);

  const auto op = assemble_operator(g, cos_ell);
  const auto es = analytic_eigensystem(g, cos_ell);
  const int n = g.n;

  FieldVector u0 = zero_field(n);
  for (int j = -n + 1; j <= n - 1; ++j) u0.u[at(j, n)] = std::cos(std::numbers::pi * j / (2.0 * n));
  reconstruct_edges(op, u0, forcing->value(0.0));

  auto traj = open_csv(dir / "trajectory.csv");
  traj << "t,j,u_exact,u_meso,u_direct,u_direct_meso\n";
  auto diff = open_csv(dir / "differences.csv");
  diff << "t,exact_vs_meso,exact_vs_direct,meso_vs_direct_meso\n";
  for (int m = 0; m <= M; ++m) {
    const double t = m * dt;
    const auto exact = exact_solution(es, u0, *forcing, t);
    auto meso = m == 0 ? u0 : meso_run(es, u0, *forcing, make_schedule(dt, m, Q));
    reconstruct_edges(op, meso, forcing->value(t));
    const auto direct = direct_integrate(op, u0, *forcing, t, {dt_micro, CouplingMode::continuous, 0.0, Q});
    const auto direct_meso = direct_integrate(op, u0, *forcing, t, {dt_micro, CouplingMode::meso, dt, Q});
    double em = 0.0, ed = 0.0, mm = 0.0;
    for (int j = -n; j <= n; ++j) {
      csv_row(traj, t, j, exact(j), meso(j), direct(j), direct_meso(j));
      if (std::abs(j) == n) continue;
      em = std::max(em, std::abs(exact(j) - meso(j)));
      ed = std::max(ed, std::abs(exact(j) - direct(j)));
      mm = std::max(mm, std::abs(meso(j) - direct_meso(j)));
    }
    csv_row(diff, t, em, ed, mm);
  }
  return 0;
}

int run_bounds(const ExperimentConfig& cfg) {
  SweepRanges r;
  const int n_min = as_int(cfg.get_int("n_min"), "n_min"), n_max = as_int(cfg.get_int("n_max"), "n_max");
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("need 1 <= n_min <= n_max");
  for (int n = n_min; n <= n_max; ++n) r.n.push_back(n);
  r.a = ints(cfg.get_int_list("a_list"), "a_list");
  r.delta_t = cfg.get_real_list("delta_t_list");
  r.Q = ints(cfg.get_int_list("q_list"), "q_list");
  r.cos_ell = cfg.get_real_list("cos_ell_list");
  const auto sweep = bound_sweep(r, as_int(cfg.get_int("threads"), "threads"));
  report_skipped(sweep);
  write_bound_tables(out_dir(cfg), "bounds", sweep);
  return 0;
}

int run_figures(const ExperimentConfig& cfg) {
  const std::string which = cfg.get_text("which");
  const std::vector<std::string> all{"penetrate20", "penetrate20_inset", "error1", "nobuff",
                                     "wavenum",     "patch",             "buff",   "gl"};
  std::vector<std::string> todo;
  if (which == "all")
    todo = all;
  else if (std::find(all.begin(), all.end(), which) != all.end())
    todo = {which};
  else
    throw std::invalid_argument("unknown figure '" + which + "'");

  const auto dir = out_dir(cfg);
  const int threads = as_int(cfg.get_int("threads"), "threads");
  for (const auto& w : todo) {
    if (w == "penetrate20" || w == "penetrate20_inset") {
      SweepRanges r;
      r.n = {20};
      r.delta_t = {0.5};
      r.Q = w == "penetrate20" ? std::vector<int>{1, 3, 5, 7} : std::vector<int>{1};
      r.cos_ell = w == "penetrate20" ? std::vector<double>{0.91} : std::vector<double>{0.65, 0.75, 0.85, 0.95};
      const auto sweep = bound_sweep(r, threads);
      report_skipped(sweep);
      write_bound_tables(dir, w, sweep);
      auto os = open_csv(dir / (w + "_approx.csv"));
      write_approx_csv(os, 20, 0.5, r.Q);
    } else if (w == "error1") {
      SweepRanges r;
      for (int n = 4; n <= 20; ++n) r.n.push_back(n);
      r.delta_t = {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0};
      r.Q = {1};
      r.cos_ell = {0.91};
      const auto sweep = bound_sweep(r, threads);
      report_skipped(sweep);
      auto os = open_csv(dir / "error1.csv");
      write_macro_csv(os, sweep);
    } else if (w == "gl") {
      figure_gl(dir, cfg);
    } else {
      figure_modes(dir, w);
    }
  }
  return 0;
}

int run_gl2d(const ExperimentConfig& cfg) {
  const GLConfig c = gl_config_from(cfg);
  const GLMode mode = gl_mode(cfg.get_text("mode"));
  const auto dir = out_dir(cfg);

  MessageLedger ledger;
  const auto run = patchdyn::run_gl2d(c, mode, &ledger);
  {
    auto os = open_csv(dir / "series.csv");
    write_series_csv(os, run);
    if (mode == GLMode::meso) {
      const auto reference = patchdyn::run_gl2d(c, GLMode::continuous);
      write_series_csv(os, reference, false);
      auto rms = open_csv(dir / "rms.csv");
      write_rms_csv(rms, run, reference);
    }
  }
  auto snap = open_csv(dir / "snapshots.csv");
  write_snapshots_csv(snap, run);
  auto led = open_csv(dir / "ledger.csv");
  write_ledger_csv(led, ledger);
  return 0;
}

namespace {

std::map<std::pair<int, int>, Delay> parse_delays(const std::string& text) {
  std::map<std::pair<int, int>, Delay> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int src = 0, dst = 0;
    char dash = 0, colon = 0;
    std::string steps;
    std::stringstream is(item);
    if (!(is >> src >> dash >> dst >> colon >> steps) || dash != '-' || colon != ':')
      throw std::invalid_argument("bad delay entry '" + item + "' (expected src-dst:steps)");
    out[{src, dst}] = steps == "inf" ? never_arrives : Delay{std::stoi(steps)};
  }
  return out;
}

}  // namespace

int run_comms(const ExperimentConfig& cfg) {
  const std::string kind = cfg.get_text("topology");
  const int P = as_int(cfg.get_int("patches"), "patches");
  Topology topo;
  if (kind == "grid")
    topo = grid_topology(P, P);
  else if (kind == "ring")
    topo = ring_topology(P);
  else if (kind == "line")
    topo = line_topology(P);
  else
    throw std::invalid_argument("unknown topology '" + kind + "' (expected grid, ring or line)");

  const double t_end = cfg.get_real("t_end"), delta_t = cfg.get_real("delta_t"), dt_micro = cfg.get_real("dt_micro");
  const long long payload = cfg.get_int("payload");
  const auto dir = out_dir(cfg);

  const auto meso = simulate_exchange(topo, {Cadence::meso, delta_t}, t_end, payload);
  const auto micro = simulate_exchange(topo, {Cadence::micro, dt_micro}, t_end, payload);
  {
    auto os = open_csv(dir / "ledger_meso.csv");
    write_ledger_csv(os, meso);
    auto om = open_csv(dir / "ledger_micro.csv");
    write_ledger_csv(om, micro);
  }
  auto summary = open_csv(dir / "summary.csv");
  summary << "topology,P,degree_sum,cadence,step,t_end,messages,expected,reduction\n";
  const double reduction = reduction_factor(micro, meso);
  csv_row(summary, topo.kind, topo.P, topo.degree_sum(), "meso", delta_t, t_end, meso.total_messages(),
          topo.degree_sum() * exchange_count(delta_t, t_end), reduction);
  csv_row(summary, topo.kind, topo.P, topo.degree_sum(), "micro", dt_micro, t_end, micro.total_messages(),
          topo.degree_sum() * exchange_count(dt_micro, t_end), 1.0);

  if (const auto text = cfg.get_text("delays"); !text.empty()) {
    const auto rep = inject_delay(topo, {Cadence::meso, delta_t}, t_end, parse_delays(text), payload);
    auto os = open_csv(dir / "staleness.csv");
    os << "patch,max_age,stale_evaluations,never_arrives\n";
    for (const auto& p : rep.patches)
      csv_row(os, p.patch, p.max_age, p.stale_evaluations, p.never_arrives ? "true" : "false");
    auto ol = open_csv(dir / "ledger_delay.csv");
    write_ledger_csv(ol, rep.ledger);
  }
  return 0;
}

}  // namespace patchdyn::cli
