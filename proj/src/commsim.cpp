#include "patchdyn/commsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "patchdyn/csv.hpp"

namespace patchdyn {

long long Topology::degree_sum() const {
  long long s = 0;
  for (const auto& nb : neighbours) s += static_cast<long long>(nb.size());
  return s;
}

bool Topology::symmetric() const {
  for (int p = 0; p < P; ++p)
    for (int q : neighbours[p]) {
      const auto cp = std::count(neighbours[p].begin(), neighbours[p].end(), q);
      const auto cq = std::count(neighbours[q].begin(), neighbours[q].end(), p);
      if (cp != cq) return false;
    }
  return true;
}

Topology ring_topology(int P) {
  if (P < 2) throw std::invalid_argument("ring topology needs at least 2 patches");
  Topology t{"ring", P, std::vector<std::vector<int>>(P)};
  for (int p = 0; p < P; ++p) t.neighbours[p] = {(p + P - 1) % P, (p + 1) % P};
  return t;
}

Topology line_topology(int P) {
  if (P < 2) throw std::invalid_argument("line topology needs at least 2 patches");
  Topology t{"line", P, std::vector<std::vector<int>>(P)};
  for (int p = 0; p < P; ++p) {
    if (p > 0) t.neighbours[p].push_back(p - 1);
    if (p + 1 < P) t.neighbours[p].push_back(p + 1);
  }
  return t;
}

Topology grid_topology(int px, int py) {
  if (px < 2 || py < 2) throw std::invalid_argument("grid topology needs at least 2 patches per axis");
  Topology t{"grid", px * py, std::vector<std::vector<int>>(px * py)};
  auto id = [px](int ix, int iy) { return ix + px * iy; };
  for (int iy = 0; iy < py; ++iy)
    for (int ix = 0; ix < px; ++ix)
      t.neighbours[id(ix, iy)] = {id((ix + 1) % px, iy), id((ix + px - 1) % px, iy), id(ix, (iy + 1) % py),
                                  id(ix, (iy + py - 1) % py)};
  return t;
}

void MessageLedger::record(int src, int dst, double t, long long scalars, int age) {
  auto& e = edges_[{src, dst}];
  ++e.messages;
  e.scalars += scalars;
  e.max_age = std::max(e.max_age, age);
  e.timestamps.push_back(t);
}

void MessageLedger::mark_never_arrives(int src, int dst) { edges_[{src, dst}].never_arrives = true; }

void MessageLedger::merge(const MessageLedger& other) {
  for (const auto& [key, o] : other.edges_) {
    auto& e = edges_[key];
    e.messages += o.messages;
    e.scalars += o.scalars;
    e.max_age = std::max(e.max_age, o.max_age);
    e.never_arrives = e.never_arrives || o.never_arrives;
    e.timestamps.insert(e.timestamps.end(), o.timestamps.begin(), o.timestamps.end());
    std::sort(e.timestamps.begin(), e.timestamps.end());
  }
}

long long MessageLedger::total_messages() const {
  long long s = 0;
  for (const auto& [key, e] : edges_) s += e.messages;
  return s;
}

long long MessageLedger::total_scalars() const {
  long long s = 0;
  for (const auto& [key, e] : edges_) s += e.scalars;
  return s;
}

long long exchange_count(double step, double t_end) {
  if (!(step > 0.0) || !(t_end >= 0.0)) throw std::invalid_argument("exchange: need step > 0 and t_end >= 0");
  const double ratio = t_end / step;
  const double whole = std::round(ratio);
  if (std::abs(ratio - whole) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument("exchange: t_end=" + format_number(t_end) + " is not a multiple of step " +
                                format_number(step));
  return static_cast<long long>(whole);
}

MessageLedger simulate_exchange(const Topology& topo, const ExchangeSchedule& schedule, double t_end,
                                long long payload) {
  const long long steps = exchange_count(schedule.step, t_end);
  MessageLedger ledger;
  for (long long m = 0; m < steps; ++m) {
    const double t = static_cast<double>(m) * schedule.step;
    for (int p = 0; p < topo.P; ++p)
      for (int q : topo.neighbours[p]) ledger.record(p, q, t, payload);
  }
  return ledger;
}

double reduction_factor(const MessageLedger& dense, const MessageLedger& sparse) {
  const long long s = sparse.total_messages();
  if (s == 0) throw std::invalid_argument("reduction_factor: sparse ledger is empty");
  return static_cast<double>(dense.total_messages()) / static_cast<double>(s);
}

StalenessReport inject_delay(const Topology& topo, const ExchangeSchedule& schedule, double t_end,
                             const std::map<std::pair<int, int>, Delay>& delays, long long payload) {
  for (const auto& [edge, d] : delays)
    if (d && *d < 0) throw std::invalid_argument("inject_delay: delays must be >= 0");
  const long long steps = exchange_count(schedule.step, t_end);

  StalenessReport rep;
  rep.patches.resize(topo.P);
  for (int p = 0; p < topo.P; ++p) rep.patches[p].patch = p;

  for (int p = 0; p < topo.P; ++p)
    for (int q : topo.neighbours[p]) {
      const auto it = delays.find({p, q});
      const Delay d = it == delays.end() ? Delay{0} : it->second;
      auto& ages = rep.ages[{p, q}];
      // The receiver q evaluates its coupling with data sent by p.
      auto& recv = rep.patches[q];
      if (!d) {
        rep.ledger.mark_never_arrives(p, q);
        recv.never_arrives = true;
        continue;
      }
      for (long long m = 0; m < steps; ++m) {
        ages.push_back(*d);
        rep.ledger.record(p, q, static_cast<double>(m) * schedule.step, payload, *d);
        if (*d > 0) ++recv.stale_evaluations;
      }
      recv.max_age = std::max(recv.max_age, *d);
    }
  return rep;
}

void write_ledger_csv(std::ostream& os, const MessageLedger& ledger) {
  os << "edge_src,edge_dst,messages,scalars,max_age\n";
  for (const auto& [key, e] : ledger.edges()) {
    if (e.never_arrives)
      csv_row(os, key.first, key.second, e.messages, e.scalars, "inf");
    else
      csv_row(os, key.first, key.second, e.messages, e.scalars, e.max_age);
  }
}

}  // namespace patchdyn
