#pragma once

#include <functional>
#include <vector>

#include "coneheat/counterexample.hpp"

namespace coneheat {

enum class Scheme { backward_euler, crank_nicolson };

// ---------------------------------------------------------------------------
// radially symmetric solver: du/dt = u_rr + (dim-1)/r u_r on (0, R),
// symmetry at r = 0 (ghost node), Dirichlet u(R, t) = g(t), zero initial data.
// ---------------------------------------------------------------------------

struct RadialResult {
  std::vector<double> times;    // t after each step
  std::vector<double> center;   // u(0, t)
  std::vector<double> radii;    // node coordinates
  std::vector<double> final_profile;
  double max_abs = 0.0;
};

// Throws std::runtime_error if any value exceeds instability_factor times the
// boundary-data sup (a monotone scheme cannot do that; it signals a bug or a
// misuse, e.g. Crank-Nicolson on rough data with a huge step).
RadialResult radial_solve(int dim, double R, int nr, double dt, double T,
                          const std::function<double(double)>& g,
                          Scheme scheme = Scheme::backward_euler,
                          double instability_factor = 10.0);

struct DecayFit {
  double beta_fit = 0.0;
  double c_fit = 0.0;          // smallest envelope constant for beta_fit
  double max_violation = 0.0;  // max of log u - envelope over the window
  int points_used = 0;
};

// Least-squares fit of log u(0,t) against -R^2/t over t in [t_lo, t_hi];
// c_fit is lifted so that u(0,t) <= c_fit e^(-beta_fit R^2/t) holds on the
// whole window (one-sided envelope), hence max_violation <= 0 exactly.
// Uses only finite, strictly positive samples. Zero positive samples return
// the empty fit (points_used = 0); between 1 and 7 the data is too thin to
// fit and the call throws.
DecayFit decay_fit(const std::vector<double>& times,
                   const std::vector<double>& center, double R, double t_lo,
                   double t_hi);

// ---------------------------------------------------------------------------
// polar sector solver: du/dt = u_rr + u_r/r + u_ww/r^2 on
// [r_in, r_out] x [-half_angle, half_angle], Dirichlet on all four edges.
// ---------------------------------------------------------------------------

struct SectorGrid {
  double r_in = 0.4, r_out = 2.0;
  double half_angle = 0.3;
  int nr = 32, nw = 32;  // intervals per direction

  double dr() const { return (r_out - r_in) / nr; }
  double dw() const { return 2.0 * half_angle / nw; }
  double r(int i) const { return r_in + i * dr(); }
  double w(int j) const { return -half_angle + j * dw(); }
};

// Field on the sector grid at one time level, row-major over (i, j) including
// boundary nodes.
struct GridField {
  SectorGrid grid;
  double dt = 0.0;
  double time = 0.0;
  std::vector<double> values;  // (nr+1) * (nw+1)

  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * (grid.nw + 1) + j]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * (grid.nw + 1) + j]; }
};

using SectorBoundaryFn = std::function<double(double r, double w, double t)>;
using SectorInitFn = std::function<double(double r, double w)>;

// Banded-LU implicit stepping (backward Euler or Crank-Nicolson) from t0 to
// t0 + steps*dt. Same instability guard as the radial solver.
GridField sector_solve(const SectorGrid& grid, double dt, double t0, int steps,
                       const SectorBoundaryFn& boundary, const SectorInitFn& init,
                       Scheme scheme = Scheme::backward_euler,
                       double instability_factor = 10.0);

struct CrosscheckResult {
  double max_rel_error = 0.0;  // max |num - exact| / sup |exact|, interior nodes
  double sup_exact = 0.0;
  GridField error_field;       // |num - exact| per node at the final time
};

// Marches the sector solution of the backward-heat counterexample in reversed
// time tau = s1 - s (a forward heat problem), with initial and boundary data
// from the closed form, then compares against the closed form at s0. The grid
// lives in the z-plane polar coordinates of the counterexample; its half-angle
// must stay below pi/(2 alpha).
CrosscheckResult counterexample_crosscheck(const CounterexampleParams& p,
                                           const SectorGrid& grid, double s0,
                                           double s1, int steps,
                                           Scheme scheme = Scheme::crank_nicolson);

struct ControlResult {
  double free_norm = 0.0;      // terminal norm with zero control
  double terminal_norm = 0.0;  // after optimizing bounded boundary controls
  std::vector<double> coefficients;
  int iterations = 0;
  bool converged = false;
};

// Boundary-control experiment: tensor hat functions (arc_hats interior nodes
// on the outer arc) x (time_hats interior nodes on [0, T]) drive the outer-arc
// Dirichlet data; coefficients are box-constrained by `bound`. Minimizes the
// terminal state l2 norm from a fixed smooth nonzero initial state via
// projected gradient with a 1e-12 Tikhonov term (iteration cap max_iter).
ControlResult control_experiment(const SectorGrid& grid, double dt, double T,
                                 int arc_hats, int time_hats, double bound,
                                 int max_iter = 20000);

}  // namespace coneheat
