#pragma once

#include <cstdint>
#include <functional>

#include "coneheat/smallmat.hpp"

namespace coneheat {

// Parameters of the bounded sector solution of the backward heat equation:
// complex power decay A z^alpha with alpha > 2, evaluated at z shifted along
// the real axis.
struct CounterexampleParams {
  double A = 1.0;
  double alpha = 4.0;
  double shift = 1.0;
};

// Gauss-Weierstrass kernel (4 pi t)^(-n/2) exp(-|x|^2/(4t)), t > 0.
double heat_kernel(const Vec& x, double t, int dim);

using SpaceTimeFn = std::function<double(const Vec&, double)>;

// Maps a forward heat solution u(x,t) to a backward one:
//   v(y,s) = u(y/s, 1/s) / G(y/s, 1/s),
// where G is the heat kernel. If du/dt = lap u then dv/ds + lap v = 0.
SpaceTimeFn appell_transform(SpaceTimeFn u, int dim);

struct SectorValue {
  double value = 0.0;
  double exponent = 0.0;   // real part of the exponent, 1/s factor excluded
  bool saturated = false;  // exponent + log(1/s) hit the +700 overflow clamp;
                           // large negative exponents round to exact zero
};

// v(y1, y2, s) = Re (1/s) exp(-A z^alpha / s^alpha + |z|^2/(4s)),
// z = (y1 + shift) + i y2 on the principal branch. Bounded for
// |arg z| <= pi/(2 alpha) - margin, s in (0, 1]; vanishes as s -> 0+ at
// in-sector points away from the origin. Solves dv/ds + lap v = 0.
double sector_counterexample_v(const CounterexampleParams& p, double y1,
                               double y2, double s);
SectorValue sector_counterexample_v_detail(const CounterexampleParams& p,
                                           double y1, double y2, double s);

struct SectorScan {
  long inside_count = 0;
  long outside_count = 0;
  double sup_inside = 0.0;
  double sup_outside = 0.0;
  bool saturated_inside = false;
  bool saturated_outside = false;
};

// Samples |v| over z-radii in [r_min, r_cap] and s in (0, 1]: inside the
// sector shrunk by `margin` (radians), and outside it by the same margin.
// Exponents are clamped at +700 and saturation is flagged, never silently
// overflowed.
SectorScan sector_bound_scan(const CounterexampleParams& p, double margin,
                             double r_min, double r_cap, long count,
                             std::uint64_t seed);

}  // namespace coneheat
