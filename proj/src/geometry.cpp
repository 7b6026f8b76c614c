#include "patchdyn/geometry.hpp"

#include <sstream>

namespace patchdyn {

std::string to_string(GeometryRule rule) {
  switch (rule) {
    case GeometryRule::NonNegative: return "non-negative sizes";
    case GeometryRule::CoreInsidePatch: return "0 <= a < n";
    case GeometryRule::NoOverlap: return "n/N < 1/2";
    case GeometryRule::PositiveSpacing: return "h > 0";
  }
  return "unknown";
}

namespace {

[[noreturn]] void reject(GeometryRule rule, int n, int a, int N) {
  std::ostringstream os;
  os << "invalid patch geometry (n=" << n << ", a=" << a << ", N=" << N
     << "): rule '" << to_string(rule) << "' violated";
  throw GeometryError(rule, os.str());
}

}  // namespace

PatchGeometry make_geometry(int n, int a, int N, double h) {
  if (n < 1 || a < 0 || N < 1) reject(GeometryRule::NonNegative, n, a, N);
  if (a >= n) reject(GeometryRule::CoreInsidePatch, n, a, N);
  if (2 * n >= N) reject(GeometryRule::NoOverlap, n, a, N);
  if (!(h > 0.0)) reject(GeometryRule::PositiveSpacing, n, a, N);

  PatchGeometry g;
  g.n = n;
  g.a = a;
  g.N = N;
  g.h = h;
  g.H = N * h;
  g.r = static_cast<double>(n - a) / N;
  return g;
}

}  // namespace patchdyn
