#include "patchdyn/errbound.hpp"

#include <algorithm>
#include <atomic>
#include <optional>
#include <string>
#include <thread>

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

#include "patchdyn/csv.hpp"

namespace patchdyn {

namespace {

using quad = boost::multiprecision::float128;

struct Task {
  int n, a;
  double cos_ell;
};

struct TaskResult {
  std::vector<BoundReport> reports;
  std::optional<SkippedCase> skipped;
};

TaskResult run_task(const Task& task, const SweepRanges& ranges) {
  TaskResult out;
  // N does not enter the bounds; the smallest valid value is used.
  const auto g = make_geometry(task.n, task.a, 2 * task.n + 1);
  if (auto pairs = detect_degeneracy(g); !pairs.empty()) {
    out.skipped = SkippedCase{task.n, task.a, task.cos_ell, "degenerate modes " + describe(pairs)};
    return out;
  }
  EigenSystemT<quad> es;
  try {
    es = analytic_eigensystem<quad>(g, quad(task.cos_ell));
  } catch (const DegenerateError& e) {
    out.skipped = SkippedCase{task.n, task.a, task.cos_ell, e.what()};
    return out;
  }
  for (double dt : ranges.delta_t)
    for (int Q : ranges.Q) {
      BoundReport rep;
      rep.geometry = g;
      rep.cos_ell = task.cos_ell;
      rep.delta_t = dt;
      rep.Q = Q;
      const auto R = remainder_bound(es, quad(dt), Q);
      for (Eigen::Index i = 0; i < R.size(); ++i) rep.R_jmax.push_back(static_cast<double>(R[i]));
      rep.E_max = static_cast<double>(macro_error_bound(es, quad(dt), Q));
      out.reports.push_back(std::move(rep));
    }
  return out;
}

}  // namespace

SweepResult bound_sweep(const SweepRanges& ranges, int threads) {
  std::vector<Task> tasks;
  for (int n : ranges.n) {
    std::vector<int> as = ranges.a;
    if (as.empty())
      for (int a = 0; a < n; ++a) as.push_back(a);
    for (int a : as) {
      if (a < 0 || a >= n) continue;
      for (double c : ranges.cos_ell) tasks.push_back({n, a, c});
    }
  }

  std::vector<TaskResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) results[i] = run_task(tasks[i], ranges);
  };
  const int count = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));
  std::vector<std::jthread> pool;
  for (int t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  SweepResult out;
  for (auto& r : results) {
    if (r.skipped) out.skipped.push_back(*r.skipped);
    for (auto& rep : r.reports) out.reports.push_back(std::move(rep));
  }
  return out;
}

void write_remainder_csv(std::ostream& os, const SweepResult& sweep) {
  os << "n,a,n_minus_a,cos_ell,delta_t,Q,j,R_jmax\n";
  for (const auto& r : sweep.reports) {
    const int n = r.geometry.n;
    for (int j = -n; j <= n; ++j)
      csv_row(os, n, r.geometry.a, r.geometry.buffer(), r.cos_ell, r.delta_t, r.Q, j, r.R_jmax[at(j, n)]);
  }
}

void write_macro_csv(std::ostream& os, const SweepResult& sweep) {
  os << "n,a,n_minus_a,cos_ell,delta_t,Q,E_max\n";
  for (const auto& r : sweep.reports)
    csv_row(os, r.geometry.n, r.geometry.a, r.geometry.buffer(), r.cos_ell, r.delta_t, r.Q, r.E_max);
}

}  // namespace patchdyn
