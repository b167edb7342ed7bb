#pragma once

#include <array>
#include <functional>
#include <vector>

namespace coneheat {

struct Box {
  // [lo, hi] per axis
  std::vector<std::array<double, 2>> axes;
  int dim() const { return static_cast<int>(axes.size()); }
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;  // |I_L - I_{L-1}| between the last two levels
  long evals = 0;
};

struct MultiQuadratureResult {
  std::vector<double> values;
  std::vector<double> error_estimates;
  long evals = 0;
  int levels_used = 0;
};

// Gauss-Legendre rule on [-1, 1]; nodes ascending. order in [1, 64].
void gauss_legendre(int order, std::vector<double>& nodes,
                    std::vector<double>& weights);

// Integrand writing n_out values at the point xt (dim coordinates).
using MultiIntegrand =
    std::function<void(const double* xt, int dim, double* out)>;

// Tensor-product Gauss-Legendre over a dyadically refined partition. Level 0
// is the whole box; each level splits cells in two per axis. Cells whose
// absolute mass is below dead_fraction of the running total for every
// integrand are carried unrefined (their contribution is already converged at
// that scale). values come from the finest level; error_estimates compare the
// last two levels. Throws on non-finite integrand values.
MultiQuadratureResult integrate_many(const MultiIntegrand& f, int n_out,
                                     const Box& box, int levels, int order = 8,
                                     double dead_fraction = 1e-14);

QuadratureResult integrate(const std::function<double(const double*, int)>& f,
                           const Box& box, int levels, int order = 8);

}  // namespace coneheat
