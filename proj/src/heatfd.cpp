#include "coneheat/heatfd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "coneheat/smallmat.hpp"

namespace coneheat {

namespace {

double theta_of(Scheme scheme) {
  return scheme == Scheme::backward_euler ? 1.0 : 0.5;
}

}  // namespace

RadialResult radial_solve(int dim, double R, int nr, double dt, double T,
                          const std::function<double(double)>& g, Scheme scheme,
                          double instability_factor) {
  if (dim < 1) throw std::invalid_argument("radial_solve: dim must be >= 1");
  if (!(R > 2.0)) throw std::invalid_argument("radial_solve: requires R > 2");
  if (nr < 4) throw std::invalid_argument("radial_solve: nr too small");
  if (!(dt > 0.0) || !(T > 0.0))
    throw std::invalid_argument("radial_solve: dt and T must be positive");

  const double dr = R / nr;
  const double th = theta_of(scheme);
  const int m = nr;  // unknowns i = 0..nr-1; node nr carries the boundary data

  // spatial operator rows: (A u)_i = c_lo u_{i-1} + c_di u_i + c_up u_{i+1}
  std::vector<double> c_lo(m, 0.0), c_di(m, 0.0), c_up(m, 0.0);
  c_di[0] = -2.0 * dim / (dr * dr);
  c_up[0] = 2.0 * dim / (dr * dr);
  for (int i = 1; i < m; ++i) {
    const double r = i * dr;
    c_lo[i] = 1.0 / (dr * dr) - (dim - 1) / (2.0 * dr * r);
    c_di[i] = -2.0 / (dr * dr);
    c_up[i] = 1.0 / (dr * dr) + (dim - 1) / (2.0 * dr * r);
  }

  // I - theta dt A, fixed across steps
  std::vector<double> lo(m), di(m), up(m);
  for (int i = 0; i < m; ++i) {
    lo[i] = -th * dt * c_lo[i];
    di[i] = 1.0 - th * dt * c_di[i];
    up[i] = -th * dt * c_up[i];
  }

  const long steps = std::lround(T / dt);
  if (steps < 1) throw std::invalid_argument("radial_solve: T shorter than dt");

  RadialResult res;
  res.radii.resize(nr + 1);
  for (int i = 0; i <= nr; ++i) res.radii[i] = i * dr;
  res.times.reserve(steps);
  res.center.reserve(steps);

  std::vector<double> u(m, 0.0), rhs(m);
  double u_b = g(0.0);
  double sup_g = std::fabs(u_b);

  for (long s = 1; s <= steps; ++s) {
    const double t_new = s * dt;
    const double u_b_new = g(t_new);
    sup_g = std::max(sup_g, std::fabs(u_b_new));

    for (int i = 0; i < m; ++i) {
      double au = c_di[i] * u[i];
      if (i > 0) au += c_lo[i] * u[i - 1];
      au += c_up[i] * (i + 1 < m ? u[i + 1] : u_b);
      rhs[i] = u[i] + (1.0 - th) * dt * au;
    }
    rhs[m - 1] += th * dt * c_up[m - 1] * u_b_new;

    solve_tridiag(lo, di, up, rhs);
    u.swap(rhs);
    u_b = u_b_new;

    res.times.push_back(t_new);
    res.center.push_back(u[0]);
    for (double v : u) res.max_abs = std::max(res.max_abs, std::fabs(v));
    if (res.max_abs > instability_factor * std::max(sup_g, 1e-300))
      throw std::runtime_error("radial_solve: instability detected");
  }

  res.final_profile.assign(u.begin(), u.end());
  res.final_profile.push_back(u_b);
  return res;
}

DecayFit decay_fit(const std::vector<double>& times,
                   const std::vector<double>& center, double R, double t_lo,
                   double t_hi) {
  if (times.size() != center.size())
    throw std::invalid_argument("decay_fit: times/center size mismatch");
  if (!(R > 0.0) || !(t_lo > 0.0) || !(t_hi > t_lo))
    throw std::invalid_argument("decay_fit: bad window");

  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k], u = center[k];
    if (t < t_lo || t > t_hi) continue;
    if (!std::isfinite(u) || !(u > 0.0)) continue;
    xs.push_back(-R * R / t);
    ys.push_back(std::log(u));
  }
  if (xs.empty()) return {};  // all-zero window: distinguished empty fit
  if (xs.size() < 8)
    throw std::invalid_argument("decay_fit: fewer than 8 usable samples");

  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("decay_fit: degenerate window");

  DecayFit fit;
  fit.beta_fit = sxy / sxx;
  fit.points_used = static_cast<int>(xs.size());

  // lift the intercept so the envelope touches the data from above; the
  // violations then come from the same stored residuals and their max is 0
  std::vector<double> resid(xs.size());
  double c_log = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < xs.size(); ++k) {
    resid[k] = ys[k] - fit.beta_fit * xs[k];
    c_log = std::max(c_log, resid[k]);
  }
  fit.c_fit = std::exp(c_log);
  fit.max_violation = -std::numeric_limits<double>::infinity();
  for (double rk : resid)
    fit.max_violation = std::max(fit.max_violation, rk - c_log);
  return fit;
}

namespace {

// 5-point polar stencil coefficients at interior node (i, j)
struct PolarStencil {
  double rm, rp;  // radial neighbours i-1, i+1
  double wm, wp;  // angular neighbours j-1, j+1
  double di;      // center
};

PolarStencil polar_stencil(const SectorGrid& g, int i) {
  const double dr = g.dr(), dw = g.dw(), r = g.r(i);
  PolarStencil s;
  s.rm = 1.0 / (dr * dr) - 1.0 / (2.0 * dr * r);
  s.rp = 1.0 / (dr * dr) + 1.0 / (2.0 * dr * r);
  s.wm = 1.0 / (r * r * dw * dw);
  s.wp = s.wm;
  s.di = -2.0 / (dr * dr) - 2.0 / (r * r * dw * dw);
  return s;
}

}  // namespace

GridField sector_solve(const SectorGrid& grid, double dt, double t0, int steps,
                       const SectorBoundaryFn& boundary, const SectorInitFn& init,
                       Scheme scheme, double instability_factor) {
  if (!(grid.r_in > 0.0) || !(grid.r_out > grid.r_in))
    throw std::invalid_argument("sector_solve: need 0 < r_in < r_out");
  if (!(grid.half_angle > 0.0) ||
      !(grid.half_angle < std::numbers::pi / 2.0))
    throw std::invalid_argument("sector_solve: half_angle out of (0, pi/2)");
  if (grid.nr < 2 || grid.nw < 2)
    throw std::invalid_argument("sector_solve: grid too coarse");
  if (!(dt > 0.0) || steps < 1)
    throw std::invalid_argument("sector_solve: need dt > 0 and steps >= 1");

  const int ni = grid.nr - 1, nj = grid.nw - 1;  // interior extents
  const int N = ni * nj;
  const double th = theta_of(scheme);
  auto index = [nj](int i, int j) { return (i - 1) * nj + (j - 1); };

  BandedLU lu(N, nj);
  for (int i = 1; i < grid.nr; ++i) {
    const PolarStencil s = polar_stencil(grid, i);
    for (int j = 1; j < grid.nw; ++j) {
      const int k = index(i, j);
      lu.at(k, k) = 1.0 - th * dt * s.di;
      if (i > 1) lu.at(k, index(i - 1, j)) = -th * dt * s.rm;
      if (i < grid.nr - 1) lu.at(k, index(i + 1, j)) = -th * dt * s.rp;
      if (j > 1) lu.at(k, index(i, j - 1)) = -th * dt * s.wm;
      if (j < grid.nw - 1) lu.at(k, index(i, j + 1)) = -th * dt * s.wp;
    }
  }
  lu.factor();

  GridField cur;
  cur.grid = grid;
  cur.dt = dt;
  cur.time = t0;
  cur.values.assign(static_cast<std::size_t>(grid.nr + 1) * (grid.nw + 1), 0.0);
  double sup_data = 0.0;
  for (int i = 0; i <= grid.nr; ++i)
    for (int j = 0; j <= grid.nw; ++j) {
      const bool edge = i == 0 || i == grid.nr || j == 0 || j == grid.nw;
      cur.at(i, j) = edge ? boundary(grid.r(i), grid.w(j), t0)
                          : init(grid.r(i), grid.w(j));
      sup_data = std::max(sup_data, std::fabs(cur.at(i, j)));
    }

  std::vector<double> rhs(N);
  for (int s = 1; s <= steps; ++s) {
    const double t_new = t0 + s * dt;

    for (int i = 1; i < grid.nr; ++i) {
      const PolarStencil st = polar_stencil(grid, i);
      for (int j = 1; j < grid.nw; ++j) {
        const double au = st.di * cur.at(i, j) + st.rm * cur.at(i - 1, j) +
                          st.rp * cur.at(i + 1, j) + st.wm * cur.at(i, j - 1) +
                          st.wp * cur.at(i, j + 1);
        rhs[index(i, j)] = cur.at(i, j) + (1.0 - th) * dt * au;
      }
    }

    // boundary neighbours at the new time level enter the right side
    for (int i = 1; i < grid.nr; ++i) {
      const PolarStencil st = polar_stencil(grid, i);
      auto bval = [&](int bi, int bj) {
        const double v = boundary(grid.r(bi), grid.w(bj), t_new);
        sup_data = std::max(sup_data, std::fabs(v));
        return v;
      };
      if (i == 1)
        for (int j = 1; j < grid.nw; ++j)
          rhs[index(i, j)] += th * dt * st.rm * bval(0, j);
      if (i == grid.nr - 1)
        for (int j = 1; j < grid.nw; ++j)
          rhs[index(i, j)] += th * dt * st.rp * bval(grid.nr, j);
      rhs[index(i, 1)] += th * dt * st.wm * bval(i, 0);
      rhs[index(i, grid.nw - 1)] += th * dt * st.wp * bval(i, grid.nw);
    }

    lu.solve(rhs);

    for (int i = 1; i < grid.nr; ++i)
      for (int j = 1; j < grid.nw; ++j) cur.at(i, j) = rhs[index(i, j)];
    for (int j = 0; j <= grid.nw; ++j) {
      cur.at(0, j) = boundary(grid.r(0), grid.w(j), t_new);
      cur.at(grid.nr, j) = boundary(grid.r(grid.nr), grid.w(j), t_new);
    }
    for (int i = 0; i <= grid.nr; ++i) {
      cur.at(i, 0) = boundary(grid.r(i), grid.w(0), t_new);
      cur.at(i, grid.nw) = boundary(grid.r(i), grid.w(grid.nw), t_new);
    }
    cur.time = t_new;

    double sup_u = 0.0;
    for (double v : cur.values) sup_u = std::max(sup_u, std::fabs(v));
    if (sup_u > instability_factor * std::max(sup_data, 1e-300))
      throw std::runtime_error("sector_solve: instability detected");
  }
  return cur;
}

CrosscheckResult counterexample_crosscheck(const CounterexampleParams& p,
                                           const SectorGrid& grid, double s0,
                                           double s1, int steps, Scheme scheme) {
  if (!(s0 > 0.0) || !(s1 > s0) || s1 > 1.0)
    throw std::invalid_argument("crosscheck: need 0 < s0 < s1 <= 1");
  if (!(grid.half_angle < std::numbers::pi / (2.0 * p.alpha)))
    throw std::invalid_argument("crosscheck: grid leaves the bounded sector");

  // z-plane polar coordinates: y1 = r cos w - shift, y2 = r sin w
  auto exact = [&p](double r, double w, double s) {
    return sector_counterexample_v(p, r * std::cos(w) - p.shift,
                                   r * std::sin(w), s);
  };

  const double dt = (s1 - s0) / steps;
  // reversed time tau = s1 - s turns the backward equation into forward heat
  GridField num = sector_solve(
      grid, dt, 0.0, steps,
      [&](double r, double w, double tau) { return exact(r, w, s1 - tau); },
      [&](double r, double w) { return exact(r, w, s1); }, scheme,
      // |v| legitimately grows as s decreases; the guard only screens blowups
      1e6);

  CrosscheckResult res;
  res.error_field.grid = grid;
  res.error_field.dt = dt;
  res.error_field.time = s0;
  res.error_field.values.assign(num.values.size(), 0.0);

  for (int i = 0; i <= grid.nr; ++i)
    for (int j = 0; j <= grid.nw; ++j)
      res.sup_exact =
          std::max(res.sup_exact, std::fabs(exact(grid.r(i), grid.w(j), s0)));
  if (!(res.sup_exact > 0.0))
    throw std::runtime_error("crosscheck: exact solution vanished on the grid");

  double max_err = 0.0;
  for (int i = 0; i <= grid.nr; ++i)
    for (int j = 0; j <= grid.nw; ++j) {
      const double err =
          std::fabs(num.at(i, j) - exact(grid.r(i), grid.w(j), s0));
      res.error_field.at(i, j) = err;
      const bool edge = i == 0 || i == grid.nr || j == 0 || j == grid.nw;
      if (!edge) max_err = std::max(max_err, err);
    }
  res.max_rel_error = max_err / res.sup_exact;
  return res;
}

namespace {

// piecewise-linear hat with peak at node `k` of `count` interior nodes on [0,1]
double hat(int k, int count, double x) {
  const double h = 1.0 / (count + 1);
  const double peak = (k + 1) * h;
  const double v = 1.0 - std::fabs(x - peak) / h;
  return v > 0.0 ? v : 0.0;
}

}  // namespace

ControlResult control_experiment(const SectorGrid& grid, double dt, double T,
                                 int arc_hats, int time_hats, double bound,
                                 int max_iter) {
  if (arc_hats < 1 || time_hats < 1)
    throw std::invalid_argument("control: need at least one hat per direction");
  if (!(bound >= 0.0)) throw std::invalid_argument("control: bound must be >= 0");
  const int steps = static_cast<int>(std::lround(T / dt));
  if (steps < 2) throw std::invalid_argument("control: horizon shorter than 2 dt");

  // fixed smooth initial state vanishing on the boundary
  SectorInitFn init = [&grid](double r, double w) {
    const double pr =
        std::sin(std::numbers::pi * (r - grid.r_in) / (grid.r_out - grid.r_in));
    const double pw =
        std::cos(std::numbers::pi * w / (2.0 * grid.half_angle));
    return pr * pw;
  };
  SectorInitFn zero_init = [](double, double) { return 0.0; };

  const int n_controls = arc_hats * time_hats;
  auto control_boundary = [&](int a, int m) {
    return [&grid, a, m, arc_hats, time_hats, T](double r, double w, double t) {
      if (std::fabs(r - grid.r_out) > 1e-12 * grid.r_out) return 0.0;
      const double xw = (w + grid.half_angle) / (2.0 * grid.half_angle);
      return hat(a, arc_hats, xw) * hat(m, time_hats, t / T);
    };
  };
  SectorBoundaryFn zero_boundary = [](double, double, double) { return 0.0; };

  // terminal interior state weighted by sqrt of the polar area element, so
  // Euclidean norms below are the discrete L2 norm
  auto terminal = [&](const SectorBoundaryFn& b, const SectorInitFn& ic) {
    const GridField f =
        sector_solve(grid, dt, 0.0, steps, b, ic, Scheme::backward_euler, 50.0);
    const double cell = grid.dr() * grid.dw();
    std::vector<double> y;
    y.reserve(static_cast<std::size_t>(grid.nr - 1) * (grid.nw - 1));
    for (int i = 1; i < grid.nr; ++i)
      for (int j = 1; j < grid.nw; ++j)
        y.push_back(f.at(i, j) * std::sqrt(grid.r(i) * cell));
    return y;
  };

  const std::vector<double> y_free = terminal(zero_boundary, init);
  const std::size_t ny = y_free.size();

  ControlResult res;
  res.free_norm = stable_norm(y_free);
  res.coefficients.assign(n_controls, 0.0);

  if (bound == 0.0 || n_controls == 0) {
    res.terminal_norm = res.free_norm;
    res.converged = true;
    return res;
  }

  // impulse responses: one solve per basis function
  std::vector<std::vector<double>> Y(n_controls);
  for (int a = 0; a < arc_hats; ++a)
    for (int m = 0; m < time_hats; ++m)
      Y[a * time_hats + m] = terminal(control_boundary(a, m), zero_init);

  const double reg = 1e-12;
  SymMat G(n_controls);
  for (int p = 0; p < n_controls; ++p)
    for (int q = 0; q <= p; ++q) {
      double s = 0.0;
      for (std::size_t k = 0; k < ny; ++k) s += Y[p][k] * Y[q][k];
      G.at(p, q) = s;
      G.at(q, p) = s;
    }
  for (int p = 0; p < n_controls; ++p) G.at(p, p) += reg;

  std::vector<double> b(n_controls);
  for (int p = 0; p < n_controls; ++p) {
    double s = 0.0;
    for (std::size_t k = 0; k < ny; ++k) s += Y[p][k] * y_free[k];
    b[p] = s;
  }

  // power iteration for the Lipschitz constant of the gradient
  std::vector<double> v(n_controls, 1.0), gv(n_controls);
  double lip = 0.0;
  for (int it = 0; it < 200; ++it) {
    for (int p = 0; p < n_controls; ++p) {
      double s = 0.0;
      for (int q = 0; q < n_controls; ++q) s += G.at(p, q) * v[q];
      gv[p] = s;
    }
    lip = stable_norm(gv);
    if (!(lip > 0.0)) break;
    for (int p = 0; p < n_controls; ++p) v[p] = gv[p] / lip;
  }
  if (!(lip > 0.0)) {
    res.terminal_norm = res.free_norm;
    res.converged = true;
    return res;
  }
  const double step = 1.0 / lip;

  // projected gradient on 1/2 c^T G c + b^T c over the box |c| <= bound
  std::vector<double>& c = res.coefficients;
  std::vector<double> grad(n_controls);
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    for (int p = 0; p < n_controls; ++p) {
      double s = b[p];
      for (int q = 0; q < n_controls; ++q) s += G.at(p, q) * c[q];
      grad[p] = s;
    }
    double move = 0.0;
    for (int p = 0; p < n_controls; ++p) {
      const double next = std::clamp(c[p] - step * grad[p], -bound, bound);
      move = std::max(move, std::fabs(next - c[p]));
      c[p] = next;
    }
    if (move <= 1e-13 * std::max(1.0, bound)) {
      res.converged = true;
      break;
    }
  }

  std::vector<double> y(y_free);
  for (int p = 0; p < n_controls; ++p)
    for (std::size_t k = 0; k < ny; ++k) y[k] += c[p] * Y[p][k];
  res.terminal_norm = stable_norm(y);
  return res;
}

}  // namespace coneheat
