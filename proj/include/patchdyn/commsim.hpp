#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace patchdyn {

// Nearest-neighbour patch graph.  neighbours[p] lists one entry per coupling
// slot, so a 2-wide periodic axis lists the same patch twice.
struct Topology {
  std::string kind;
  int P = 0;
  std::vector<std::vector<int>> neighbours;

  long long degree_sum() const;
  bool symmetric() const;
};

Topology ring_topology(int P);
Topology line_topology(int P);
Topology grid_topology(int px, int py);

struct EdgeStats {
  long long messages = 0;
  long long scalars = 0;
  int max_age = 0;
  bool never_arrives = false;
  std::vector<double> timestamps;
};

class MessageLedger {
public:
  void record(int src, int dst, double t, long long scalars, int age = 0);
  void mark_never_arrives(int src, int dst);
  void merge(const MessageLedger& other);

  long long total_messages() const;
  long long total_scalars() const;
  const std::map<std::pair<int, int>, EdgeStats>& edges() const noexcept { return edges_; }

private:
  std::map<std::pair<int, int>, EdgeStats> edges_;
};

enum class Cadence { micro, meso };

struct ExchangeSchedule {
  Cadence cadence = Cadence::meso;
  double step = 0.2;  // dt_micro or delta_t
};

// Every patch sends `payload` scalars to each neighbour at t = 0, step, ...,
// t_end - step.  Throws unless t_end is a whole number of steps.
MessageLedger simulate_exchange(const Topology& topo, const ExchangeSchedule& schedule, double t_end,
                                long long payload = 1);

// Number of exchanges in [0, t_end); throws on a fractional count.
long long exchange_count(double step, double t_end);

// Message-count ratio of two ledgers (e.g. micro over meso cadence).
double reduction_factor(const MessageLedger& dense, const MessageLedger& sparse);

// nullopt marks data that never arrives.
using Delay = std::optional<int>;
inline constexpr Delay never_arrives = std::nullopt;

struct PatchStaleness {
  int patch = 0;
  int max_age = 0;
  long long stale_evaluations = 0;
  bool never_arrives = false;
};

struct StalenessReport {
  // Age, in exchange steps, of the data used at each coupling evaluation;
  // empty for edges whose data never arrives.
  std::map<std::pair<int, int>, std::vector<int>> ages;
  std::vector<PatchStaleness> patches;
  MessageLedger ledger;
};

// Accounting only: edges not listed in `delays` deliver on time.
StalenessReport inject_delay(const Topology& topo, const ExchangeSchedule& schedule, double t_end,
                             const std::map<std::pair<int, int>, Delay>& delays, long long payload = 1);

// edge_src, edge_dst, messages, scalars, max_age
void write_ledger_csv(std::ostream& os, const MessageLedger& ledger);

}  // namespace patchdyn
