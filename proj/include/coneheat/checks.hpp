#pragma once

#include <functional>

#include "coneheat/bump.hpp"
#include "coneheat/quadrature.hpp"
#include "coneheat/weights.hpp"

namespace coneheat {

// Any field with value, time derivative, gradient and Laplacian defined on a
// box; bumps are the usual source, but scaled or composed fields work too.
using SampledField = std::function<FieldSample(const Vec&, double)>;

struct CarlemanRatio {
  double lhs = 0.0, rhs = 0.0, ratio = 0.0;
  double lhs_error = 0.0, rhs_error = 0.0;
  // Both integrals carry the factor exp(-log_shift); the true values are
  // lhs * exp(log_shift) etc., which may overflow as a double. The ratio is
  // unaffected.
  double log_shift = 0.0;
  long evals = 0;
};

// Whole-space inequality with the kernel-type weight w = h(t)^(-2a) e^(-|x|^2/(4t)):
//   integral w [ (a/t) u^2 + |grad u|^2 ]   vs   integral w |du/dt + lap u|^2.
// The time support of u must lie inside (0, 2). The constant in front of the
// right side is not pinned; the ratio is reported as data.
CarlemanRatio check_global_inequality(const SampledField& u, const Box& support,
                                      double a, int levels = 4, int order = 8);
CarlemanRatio check_global_inequality(const Bump& u, double a, int levels = 4,
                                      int order = 8);

// Cone inequality with weight e^(2 phi), phi = a Lam(t) varphi(x) + t^2:
//   integral e^(2phi) [ a (Lam(t) + varphi(x)) u^2 + |grad u|^2 ]
//     <= 4 integral e^(2phi) |du/dt + lap u|^2
// for supports inside the cylinder of the cone; ratio = lhs/rhs is expected to
// fall below 4 once a is large enough. Weight exponents are evaluated relative
// to their maximum over the support, so the ratio is overflow-free for any a.
CarlemanRatio check_cone_inequality(const SampledField& u, const Box& support,
                                    const WeightParams& w, int levels = 4,
                                    int order = 8);
CarlemanRatio check_cone_inequality(const Bump& u, const WeightParams& w,
                                    int levels = 4, int order = 8);

struct IdentityCheck {
  double l2 = 0.0;           // integral |Lv|^2
  double s2 = 0.0;           // integral |Sv|^2
  double a2 = 0.0;           // integral |Av|^2
  double commutator = 0.0;   // integral of the commutator integrand
  double discrepancy = 0.0;  // l2 - s2 - a2 - commutator
  double quad_error = 0.0;   // max error estimate among the four integrals
  long evals = 0;
  bool pass = false;  // |discrepancy| <= 10 * quad_error
};

// Energy identity ||Lv||^2 = ||Sv||^2 + ||Av||^2 + ([S,A]v, v) for a
// compactly supported test function v (used directly, no conjugation).
IdentityCheck check_energy_identity(const SampledField& v, const Box& support,
                                    const WeightParams& w, int levels = 4,
                                    int order = 8);
IdentityCheck check_energy_identity(const Bump& v, const WeightParams& w,
                                    int levels = 4, int order = 8);

// Support box of a bump: spatial axes first, time last.
Box support_box(const Bump& u);

}  // namespace coneheat
