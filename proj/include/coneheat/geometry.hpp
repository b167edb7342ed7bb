#pragma once

#include <cstdint>
#include <vector>

#include "coneheat/smallmat.hpp"

namespace coneheat {

// Opening angle below which the convexity certificate admits a valid power:
// 2*arccos(1/sqrt(3)), in radians.
double critical_angle_radians();
double critical_angle_degrees();

// Right circular cone around the +x1 axis with full opening angle theta:
//   { x : x1 > |x| cos(theta/2) }.
struct ConeSpec {
  int dim;       // ambient dimension n >= 2
  double theta;  // full opening angle, (0, pi]
  double eps;    // cos(theta/2), cached

  ConeSpec(int dim, double theta);
};

struct SpaceTimePoint {
  Vec x;
  double t = 0.0;
};

bool cone_contains(const ConeSpec& spec, const Vec& x);

// Signed lateral-boundary distance x1 sin(theta/2) - |x'| cos(theta/2);
// positive inside the cone.
double distance_to_boundary(const ConeSpec& spec, const Vec& x);

// Points at least c inside the lateral boundary.
bool offset_cone_contains(const ConeSpec& spec, const Vec& x, double c);

// Space-time cylinder: cone points with x1 > 1, times in (0,1).
bool q_theta_contains(const ConeSpec& spec, const Vec& x, double t);

// Midpoint between theta and the critical angle. theta must lie in
// (critical, pi]; below the critical angle there is nothing to bisect.
double median_angle(double theta);

// Rate transferred from the delta-cone to the theta-cone:
// beta' = beta sin^2((theta - delta)/2). Requires theta > delta.
double beta_prime(double beta, double theta, double delta);

struct SampleRegion {
  double x1_lo = 1.0, x1_hi = 4.0;
  double t_lo = 1e-3, t_hi = 1.0 - 1e-6;
  double d_min = 0.0;  // minimum signed boundary distance
};

// Deterministic rejection sampler for cone points with x1 in [x1_lo, x1_hi],
// t in [t_lo, t_hi], boundary distance >= d_min, and x1 > 1 when x1_lo >= 1.
// Throws if the region rejects 10^6 consecutive proposals.
std::vector<SpaceTimePoint> sample_points(const ConeSpec& spec,
                                          const SampleRegion& region, long count,
                                          std::uint64_t seed);

// Sampler concentrated just inside the lateral boundary: x1/|x| is placed in
// (eps, eps*(1+ray_margin)]. Used to probe quantities that degenerate on the
// boundary ray.
std::vector<SpaceTimePoint> sample_points_near_boundary(
    const ConeSpec& spec, const SampleRegion& region, long count,
    std::uint64_t seed, double ray_margin = 0.02);

}  // namespace coneheat
