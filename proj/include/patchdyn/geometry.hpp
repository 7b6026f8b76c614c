#pragma once

#include <stdexcept>
#include <string>

namespace patchdyn {

// Rule names carried by GeometryError so callers can tell which invariant broke.
enum class GeometryRule { NonNegative, CoreInsidePatch, NoOverlap, PositiveSpacing };

class GeometryError : public std::invalid_argument {
public:
  GeometryError(GeometryRule rule, const std::string& what)
      : std::invalid_argument(what), rule_(rule) {}
  GeometryRule rule() const noexcept { return rule_; }

private:
  GeometryRule rule_;
};

// One patch on a 1D lattice: half-width n, core/action half-width a,
// N microscale points per macroscale step.  Immutable once built.
struct PatchGeometry {
  int n = 0;
  int a = 0;
  int N = 0;
  double h = 1.0;
  double H = 0.0;
  double r = 0.0;

  int buffer() const noexcept { return n - a; }
  // Number of modes of the generalised eigenproblem.
  int modes() const noexcept { return 2 * n - 1; }
  int size() const noexcept { return 2 * n + 1; }
  // Only warn-worthy: a buffer of width one barely shields the core.
  bool thin_buffer() const noexcept { return n == a + 1; }
};

PatchGeometry make_geometry(int n, int a, int N, double h = 1.0);

std::string to_string(GeometryRule rule);

}  // namespace patchdyn
