#pragma once

#include "coneheat/smallmat.hpp"

namespace coneheat {

// Parameters of the space-time weight phi(x,t) = a*Lam(t)*varphi(x) + t^2 with
//   Lam(t)    = (1-t) / t^(alpha/2)               on (0, 1],
//   varphi(x) = x1^alpha - eps^alpha |x|^alpha    on the cone,
// eps = cos(theta/2) of the ambient cone, 1 < alpha <= 2, a > 0.
struct WeightParams {
  double a = 1.0;
  double alpha = 2.0;
  double eps = 0.5;
  int dim = 2;
};

// h(t) = t e^((1-t)/3); increasing on (0, 3), h(1) = 1.
double time_profile_h(double t);

struct LamEval {
  double value, d1, d2;
};

// Lam and its first two t-derivatives. Requires t in (0, 1].
LamEval lam(double alpha, double t);

struct SpatialWeight {
  double value = 0.0;
  Vec grad;
  SymMat hess;
  double lap = 0.0;
  double bilap = 0.0;
};

// varphi and all spatial derivatives used downstream. Requires x1 > 0, |x| > 0.
SpatialWeight varphi_eval(double alpha, double eps, const Vec& x);

// f(x) = alpha eps^alpha r^(alpha-2): the scalar that dominates the varphi
// Hessian from below (hess + f*I is positive semidefinite on the cone).
double f_eval(double alpha, double eps, double r);

// Laplacian of f in dimension dim.
double f_lap(double alpha, double eps, int dim, double r);

// F = 4 a Lam(t) f(x) + 1.
double big_f(const WeightParams& w, const Vec& x, double t);

struct WeightEval {
  double value = 0.0;
  Vec grad;          // spatial gradient
  SymMat hess;       // spatial Hessian
  double lap = 0.0;  // spatial Laplacian
  double bilap = 0.0;
  double dt = 0.0;          // d/dt phi
  double dtt = 0.0;         // d2/dt2 phi
  double dt_grad_sq = 0.0;  // d/dt |grad phi|^2 = 2 a^2 Lam Lam' |grad varphi|^2
};

WeightEval phi_total(const WeightParams& w, const Vec& x, double t);

// A test function together with the derivatives the operators consume.
struct FieldSample {
  double value = 0.0;
  double dt = 0.0;
  Vec grad;
  double lap = 0.0;
};

// Symmetric part:     S v = lap v + |grad phi|^2 v - (dphi/dt) v
// Skew part:          A v = dv/dt - 2 grad phi . grad v - (lap phi) v
// Conjugated operator L v = S v + A v; for v = e^phi u this equals
// e^phi (du/dt + lap u).
// The WeightEval overloads reuse one phi evaluation across the operators.
double op_S(const WeightEval& e, const FieldSample& v);
double op_A(const WeightEval& e, const FieldSample& v);
double op_L(const WeightEval& e, const FieldSample& v);
double op_S(const WeightParams& w, const Vec& x, double t, const FieldSample& v);
double op_A(const WeightParams& w, const Vec& x, double t, const FieldSample& v);
double op_L(const WeightParams& w, const Vec& x, double t, const FieldSample& v);

// Pointwise integrand whose space-time integral equals ([S,A]v, v) for
// compactly supported v:
//   4 phi_kl v_k v_l
//   + (2 grad phi . grad |grad phi|^2 - lap^2 phi + phi_tt - 2 d/dt |grad phi|^2) v^2.
double commutator_integrand(const WeightEval& e, const FieldSample& v);
double commutator_integrand(const WeightParams& w, const Vec& x, double t,
                            const FieldSample& v);

// The v^2 coefficient of ([S,A]v, v) + ||Sv||^2 - (gradient terms), grouped by
// powers of a. a3_lower_bound is the closed-form bound
//   4 a^3 Lam^3 alpha^3 r^(3 alpha - 4) eps^(2 alpha - 2) m(alpha, eps),
// valid pointwise on the cone with x1 > 1 whenever m(alpha, eps) >= 0.
struct ATerms {
  double a3, a2, a1, a0;
  double a3_lower_bound;
};

ATerms a_terms(const WeightParams& w, const Vec& x, double t);

// Certificate for the exponential decay transfer: with
// a = beta rho^2 / (2 log h(3/2)), the function
//   g(s) = h(s)^(-2a) e^(-rho^2/(32 s))
// must satisfy g(2) < 1 and g' >= 0 on (0, 2). g' is evaluated in closed form
// on a uniform grid of grid_n interior points.
struct GCheck {
  double a = 0.0;
  double g_at_2 = 0.0;
  double min_gprime = 0.0;
  double argmin_s = 0.0;
  bool pass = false;
};

GCheck decay_g_check(double a, double beta, double rho, int grid_n = 4000);

// Convenience overload computing a from (beta, rho).
GCheck decay_g_check(double beta, double rho, int grid_n = 4000);

}  // namespace coneheat
