#include "coneheat/positivity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace coneheat {

double convexity_margin(double alpha, double eps) {
  const double ea = std::pow(eps, alpha);
  return (alpha - 1.0 - 2.0 * ea) * (1.0 - ea) * (1.0 - ea) -
         2.0 * ea * eps * eps * (1.0 - eps * eps);
}

AlphaCurvePoint alpha_star(double eps, double tol, int max_iter) {
  const double eps_max = 1.0 / std::sqrt(3.0);
  if (!(eps > 0.0) || !(eps < eps_max))
    throw std::invalid_argument("alpha_star: eps must be in (0, 1/sqrt 3)");

  double lo = 1.0 + 1e-9;
  double hi = 2.0;
  double m_lo = convexity_margin(lo, eps);
  double m_hi = convexity_margin(hi, eps);
  if (m_lo >= 0.0) {
    // Margin already nonnegative at the left edge of the bracket.
    return {eps, lo, m_lo};
  }
  if (m_hi < 0.0)
    throw std::invalid_argument("alpha_star: no admissible power in (1, 2]");

  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (convexity_margin(mid, eps) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  // hi is the smallest bracketed power with nonnegative margin.
  return {eps, hi, convexity_margin(hi, eps)};
}

PsdScanResult hessian_psd_scan(double alpha, double eps, int dim, long count,
                               std::uint64_t seed) {
  const ConeSpec spec(dim, 2.0 * std::acos(eps));
  const auto pts = sample_points(spec, SampleRegion{}, count, seed);

  PsdScanResult res;
  res.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    const SpatialWeight sp = varphi_eval(alpha, eps, p.x);
    const double f = f_eval(alpha, eps, stable_norm(p.x));
    SymMat M = sp.hess;
    for (int k = 0; k < dim; ++k) M.at(k, k) += f;
    const Vec eig = jacobi_eigenvalues(M);
    if (eig[0] < res.min_eigenvalue) {
      res.min_eigenvalue = eig[0];
      res.argmin = p;
    }
    ++res.points_checked;
  }
  res.pass = res.min_eigenvalue >= -1e-10;
  return res;
}

A3ScanResult a3_scan(const WeightParams& w, long count, std::uint64_t seed,
                     bool near_ray) {
  const ConeSpec spec(w.dim, 2.0 * std::acos(w.eps));
  const SampleRegion region{};
  const auto pts = near_ray
                       ? sample_points_near_boundary(spec, region, count, seed)
                       : sample_points(spec, region, count, seed);

  A3ScanResult res;
  res.min_a3 = std::numeric_limits<double>::infinity();
  res.min_margin = std::numeric_limits<double>::infinity();
  res.admissible = convexity_margin(w.alpha, w.eps) >= 0.0;
  for (const auto& p : pts) {
    const ATerms terms = a_terms(w, p.x, p.t);
    // Prefactor of the closed-form bound sets the rounding scale for both
    // checks; a3 and the bound are sums of terms of this magnitude.
    const double r = stable_norm(p.x);
    const double lam3 = std::pow(lam(w.alpha, p.t).value, 3);
    const double prefactor = 4.0 * w.a * w.a * w.a * lam3 *
                             std::pow(w.alpha, 3) *
                             std::pow(r, 3.0 * w.alpha - 4.0) *
                             std::pow(w.eps, 2.0 * w.alpha - 2.0);
    const double tol = 1e-9 * std::max(1.0, prefactor);
    if (terms.a3 < -tol) ++res.nonneg_violations;
    if (terms.a3 < terms.a3_lower_bound - tol) ++res.bound_violations;
    if (terms.a3 < res.min_a3) {
      res.min_a3 = terms.a3;
      res.argmin = p;
    }
    res.min_margin = std::min(res.min_margin, terms.a3 - terms.a3_lower_bound);
    ++res.points_checked;
  }
  res.pass = res.admissible && res.nonneg_violations == 0 &&
             res.bound_violations == 0;
  return res;
}

}  // namespace coneheat
