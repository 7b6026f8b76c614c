#pragma once

#include <complex>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "patchdyn/commsim.hpp"

namespace patchdyn {

using cplx = std::complex<double>;

struct GLConfig {
  double alpha = 1.0;
  double beta = 2.0;
  double domain_width = 20.0;
  double h = 0.25;
  double H = 5.0;
  int n = 6;
  double gamma = 1.0;
  double delta_t = 0.2;
  double dt_micro = 1e-3;
  double t_end = 0.4;
  std::uint64_t seed = 1;
  double init_amplitude = 0.5;
  double noise_std = 0.8;
  // Literal 1 - (r_x^2 - r_y^2) gamma instead of 1 - (r_x^2 + r_y^2) gamma.
  bool as_printed = false;
  // Experimental: meso-mode neighbour data this many exchanges old.
  int stale_steps = 0;
  std::vector<double> snapshot_times{0.04, 0.4};
  double series_dt = 0.01;
  int threads = 1;

  int N() const;
  int patches_per_axis() const;
  double r() const { return n * h / H; }
};

// Throws std::invalid_argument naming the broken rule.
void validate(const GLConfig& cfg);

enum class GLMode { continuous, meso };

std::string to_string(GLMode mode);

// One patch: entry (jx + n, jy + n).
using PatchField = Eigen::MatrixXcd;

// Interior time derivatives; edge entries are zero.
PatchField gl_rhs(const PatchField& u, double alpha, double beta, bool diffusion_only = false);

struct NeighbourValues {
  cplx east, west, north, south;  // U at (ix+1,iy), (ix-1,iy), (ix,iy+1), (ix,iy-1)
};

// Edge value U_self cos(ell_{jx,jy}) + f for (jx, jy) on an edge, not a corner.
cplx gl_coupling_2d(const GLConfig& cfg, cplx U_self, const NeighbourValues& nb, int jx, int jy);

struct GLSnapshot {
  double t = 0.0;
  std::vector<PatchField> patches;  // index ix + P iy
};

struct GLSample {
  double t = 0.0;
  Eigen::MatrixXcd U;  // (ix, iy)
};

struct GLRun {
  GLConfig config;
  GLMode mode = GLMode::continuous;
  std::vector<GLSample> series;
  std::vector<GLSnapshot> snapshots;
};

class GLBlowup : public std::runtime_error {
public:
  GLBlowup(double t, const std::string& what) : std::runtime_error(what), t_(t) {}
  double time() const noexcept { return t_; }

private:
  double t_;
};

// Initial field: A sin(2 pi x/W) sin(2 pi y/W) plus real normal noise drawn
// from an engine seeded by (seed, ix, iy, jx, jy).
std::vector<PatchField> gl_initial_condition(const GLConfig& cfg);

// RK4 on every patch interior.  In meso mode neighbour U values refresh at
// multiples of delta_t; the patch's own U is always current.  A ledger, if
// given, records one message per neighbour slot per exchange.
GLRun run_gl2d(const GLConfig& cfg, GLMode mode, MessageLedger* ledger = nullptr);
// Same, from explicit patch fields (index ix + P iy).
GLRun run_gl2d(const GLConfig& cfg, GLMode mode, const std::vector<PatchField>& initial,
               MessageLedger* ledger = nullptr);

// RMS over patches of |U_a - U_b| at time t.
double compare_macroscale(const GLRun& a, const GLRun& b, double t);

// t, i_x, i_y, j_x, j_y, re_u, im_u
void write_snapshots_csv(std::ostream& os, const GLRun& run);
// t, i_x, i_y, re_U, im_U, mode, delta_t, seed
void write_series_csv(std::ostream& os, const GLRun& run, bool header = true);

}  // namespace patchdyn
