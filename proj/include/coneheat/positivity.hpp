#pragma once

#include <cstdint>

#include "coneheat/geometry.hpp"
#include "coneheat/weights.hpp"

namespace coneheat {

// Convexity certificate
//   m(alpha, eps) = (alpha - 1 - 2 eps^alpha)(1 - eps^alpha)^2
//                 - 2 eps^(alpha+2) (1 - eps^2).
// Nonnegativity of m makes the cubic coefficient block of the commutator
// expansion pointwise nonnegative on the cone. m(2, 1/sqrt 3) = 0; m increases
// in alpha and decreases in eps on (1,2) x (0, 1/sqrt 3).
double convexity_margin(double alpha, double eps);

struct AlphaCurvePoint {
  double eps = 0.0;
  double alpha_star = 0.0;  // smallest power in (1, 2] with m >= 0
  double residual = 0.0;    // m(alpha_star, eps)
};

// Bisection for the root of m(., eps) on [1 + 1e-9, 2]. Requires
// eps in (0, 1/sqrt 3); outside that range no root exists in the bracket.
AlphaCurvePoint alpha_star(double eps, double tol = 1e-12, int max_iter = 200);

struct PsdScanResult {
  long points_checked = 0;
  double min_eigenvalue = 0.0;
  SpaceTimePoint argmin;
  bool pass = false;
};

// Minimum eigenvalue of hess(varphi) + f*I over sampled cone points with
// x1 > 1 (Jacobi eigensolver). The matrix is a sum of two rank-one positive
// multiples for alpha in (1, 2], so the scan certifies the implementation
// rather than the formula.
PsdScanResult hessian_psd_scan(double alpha, double eps, int dim, long count,
                               std::uint64_t seed);

struct A3ScanResult {
  long points_checked = 0;
  long nonneg_violations = 0;  // points with a3 < -tol_scale
  long bound_violations = 0;   // points with a3 < bound - tol_scale
  double min_a3 = 0.0;
  double min_margin = 0.0;  // min of a3 - bound
  SpaceTimePoint argmin;
  bool admissible = false;  // m(alpha, eps) >= 0
  bool pass = false;        // zero violations of both properties
};

// Samples the space-time cylinder of the cone with eps = w.eps and evaluates
// the cubic coefficient and its closed-form lower bound at each point. With
// near_ray set, sampling concentrates just inside the lateral boundary where
// the coefficient loses positivity for eps > 1/sqrt 3.
A3ScanResult a3_scan(const WeightParams& w, long count, std::uint64_t seed,
                     bool near_ray = false);

}  // namespace coneheat
