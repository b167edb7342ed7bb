#include "coneheat/counterexample.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "coneheat/rng.hpp"

namespace coneheat {

double heat_kernel(const Vec& x, double t, int dim) {
  if (!(t > 0.0)) throw std::invalid_argument("heat_kernel: requires t > 0");
  if (static_cast<int>(x.size()) != dim)
    throw std::invalid_argument("heat_kernel: dimension mismatch");
  const double r = stable_norm(x);
  return std::pow(4.0 * std::numbers::pi * t, -0.5 * dim) *
         std::exp(-r * r / (4.0 * t));
}

SpaceTimeFn appell_transform(SpaceTimeFn u, int dim) {
  return [u = std::move(u), dim](const Vec& y, double s) {
    if (!(s > 0.0))
      throw std::invalid_argument("appell_transform: requires s > 0");
    Vec x(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) x[k] = y[k] / s;
    return u(x, 1.0 / s) / heat_kernel(x, 1.0 / s, dim);
  };
}

SectorValue sector_counterexample_v_detail(const CounterexampleParams& p,
                                           double y1, double y2, double s) {
  if (!(s > 0.0))
    throw std::invalid_argument("sector_counterexample: requires s > 0");
  if (!(p.alpha > 2.0))
    throw std::invalid_argument("sector_counterexample: requires alpha > 2");

  // z^alpha on the principal branch, written in polar form so the modulus and
  // argument never pass through complex pow.
  const double rho = std::hypot(y1 + p.shift, y2);
  const double omega = std::atan2(y2, y1 + p.shift);
  const double radial = p.A * std::pow(rho / s, p.alpha);

  SectorValue out;
  out.exponent = -radial * std::cos(p.alpha * omega) + rho * rho / (4.0 * s);
  const double im = -radial * std::sin(p.alpha * omega);
  // The 1/s prefactor goes into the exponent; clamping the combined value
  // keeps tiny results at exact zero instead of denormal residue scaled by
  // 1/s, which would grow as s -> 0 and fake a non-decaying tail.
  double ex = out.exponent - std::log(s);
  if (ex > 700.0) {
    ex = 700.0;
    out.saturated = true;
  }
  out.value = ex < -745.0 ? 0.0 : std::exp(ex) * std::cos(im);
  return out;
}

double sector_counterexample_v(const CounterexampleParams& p, double y1,
                               double y2, double s) {
  return sector_counterexample_v_detail(p, y1, y2, s).value;
}

SectorScan sector_bound_scan(const CounterexampleParams& p, double margin,
                             double r_min, double r_cap, long count,
                             std::uint64_t seed) {
  if (!(margin > 0.0)) throw std::invalid_argument("sector scan: margin <= 0");
  if (!(r_min > 0.0) || !(r_cap > r_min))
    throw std::invalid_argument("sector scan: need 0 < r_min < r_cap");
  const double half = std::numbers::pi / (2.0 * p.alpha);
  if (margin >= half)
    throw std::invalid_argument("sector scan: margin swallows the sector");

  Rng rng(seed);
  SectorScan scan;
  const double log_s_lo = std::log(1e-3);
  for (long i = 0; i < count; ++i) {
    const double r = rng.uniform(r_min, r_cap);
    const double s = std::exp(rng.uniform(log_s_lo, 0.0));
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;

    const double w_in = sign * rng.uniform(0.0, half - margin);
    const double y1_in = r * std::cos(w_in) - p.shift;
    const SectorValue inside =
        sector_counterexample_v_detail(p, y1_in, r * std::sin(w_in), s);
    scan.sup_inside = std::max(scan.sup_inside, std::fabs(inside.value));
    scan.saturated_inside = scan.saturated_inside || inside.saturated;
    ++scan.inside_count;

    const double w_out = sign * rng.uniform(half + margin, std::numbers::pi);
    const double y1_out = r * std::cos(w_out) - p.shift;
    const SectorValue outside =
        sector_counterexample_v_detail(p, y1_out, r * std::sin(w_out), s);
    scan.sup_outside = std::max(scan.sup_outside, std::fabs(outside.value));
    scan.saturated_outside = scan.saturated_outside || outside.saturated;
    ++scan.outside_count;
  }
  return scan;
}

}  // namespace coneheat
