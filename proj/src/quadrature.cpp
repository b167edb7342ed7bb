#include "coneheat/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace coneheat {

void gauss_legendre(int order, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  if (order < 1 || order > 64)
    throw std::invalid_argument("gauss_legendre: order must be in [1, 64]");
  nodes.assign(order, 0.0);
  weights.assign(order, 0.0);

  // Newton on the Legendre polynomial from the Chebyshev-like initial guess;
  // roots are symmetric, so only the first half is solved and mirrored.
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      // p1 = P_n(x), p0 = P_{n-1}(x)
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::fabs(step) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;  // initial guesses start from the right end
    nodes[order - 1 - i] = x;
    weights[i] = w;
    weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) nodes[order / 2] = 0.0;
}

namespace {

struct Cell {
  std::vector<std::array<double, 2>> axes;
  std::vector<double> mass;
};

// tensor-product rule over one cell; appends order^dim evaluations
void cell_mass(const MultiIntegrand& f, int n_out, Cell& cell,
               const std::vector<double>& nodes,
               const std::vector<double>& weights, long& evals) {
  const int dim = static_cast<int>(cell.axes.size());
  const int order = static_cast<int>(nodes.size());
  std::vector<double> mid(dim), half(dim);
  for (int a = 0; a < dim; ++a) {
    mid[a] = 0.5 * (cell.axes[a][0] + cell.axes[a][1]);
    half[a] = 0.5 * (cell.axes[a][1] - cell.axes[a][0]);
  }

  cell.mass.assign(n_out, 0.0);
  std::vector<int> idx(dim, 0);
  std::vector<double> xt(dim), out(n_out);
  for (;;) {
    double w = 1.0;
    for (int a = 0; a < dim; ++a) {
      xt[a] = mid[a] + half[a] * nodes[idx[a]];
      w *= half[a] * weights[idx[a]];
    }
    f(xt.data(), dim, out.data());
    ++evals;
    for (int j = 0; j < n_out; ++j) {
      if (!std::isfinite(out[j]))
        throw std::runtime_error("quadrature: non-finite integrand value");
      cell.mass[j] += w * out[j];
    }

    int a = 0;
    while (a < dim && ++idx[a] == order) idx[a++] = 0;
    if (a == dim) break;
  }
}

}  // namespace

MultiQuadratureResult integrate_many(const MultiIntegrand& f, int n_out,
                                     const Box& box, int levels, int order,
                                     double dead_fraction) {
  const int dim = box.dim();
  if (dim < 1) throw std::invalid_argument("quadrature: empty box");
  if (n_out < 1) throw std::invalid_argument("quadrature: n_out must be >= 1");
  if (levels < 1) throw std::invalid_argument("quadrature: levels must be >= 1");
  for (const auto& ax : box.axes)
    if (!(ax[0] < ax[1]))
      throw std::invalid_argument("quadrature: degenerate box axis");

  std::vector<double> nodes, weights;
  gauss_legendre(order, nodes, weights);

  MultiQuadratureResult res;
  std::vector<Cell> live(1);
  live[0].axes = box.axes;
  cell_mass(f, n_out, live[0], nodes, weights, res.evals);

  std::vector<double> dead_sum(n_out, 0.0), dead_abs(n_out, 0.0);
  std::vector<double> prev(n_out, 0.0), cur(live[0].mass);

  for (int level = 1; level <= levels; ++level) {
    // running totals set the scale below which a cell stops being refined
    std::vector<double> total_abs(dead_abs);
    for (const Cell& c : live)
      for (int j = 0; j < n_out; ++j) total_abs[j] += std::fabs(c.mass[j]);

    std::vector<Cell> next;
    next.reserve(live.size());
    for (Cell& c : live) {
      bool dead = true;
      for (int j = 0; j < n_out; ++j)
        if (std::fabs(c.mass[j]) > dead_fraction * total_abs[j]) {
          dead = false;
          break;
        }
      if (dead) {
        for (int j = 0; j < n_out; ++j) {
          dead_sum[j] += c.mass[j];
          dead_abs[j] += std::fabs(c.mass[j]);
        }
        continue;
      }
      for (unsigned corner = 0; corner < (1u << dim); ++corner) {
        Cell child;
        child.axes.resize(dim);
        for (int a = 0; a < dim; ++a) {
          const double m = 0.5 * (c.axes[a][0] + c.axes[a][1]);
          child.axes[a] = (corner >> a) & 1u
                              ? std::array<double, 2>{m, c.axes[a][1]}
                              : std::array<double, 2>{c.axes[a][0], m};
        }
        cell_mass(f, n_out, child, nodes, weights, res.evals);
        next.push_back(std::move(child));
      }
    }
    live.swap(next);

    prev.swap(cur);
    cur = dead_sum;
    for (const Cell& c : live)
      for (int j = 0; j < n_out; ++j) cur[j] += c.mass[j];
  }

  res.values = cur;
  res.error_estimates.resize(n_out);
  for (int j = 0; j < n_out; ++j)
    res.error_estimates[j] = std::fabs(cur[j] - prev[j]);
  res.levels_used = levels;
  return res;
}

QuadratureResult integrate(const std::function<double(const double*, int)>& f,
                           const Box& box, int levels, int order) {
  MultiIntegrand g = [&f](const double* xt, int dim, double* out) {
    out[0] = f(xt, dim);
  };
  const MultiQuadratureResult r = integrate_many(g, 1, box, levels, order);
  return {r.values[0], r.error_estimates[0], r.evals};
}

}  // namespace coneheat
