#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "coneheat/positivity.hpp"

using namespace coneheat;

TEST_CASE("convexity certificate closed form") {
  // alpha = 2 collapses to (1 - eps^2)(1 - 3 eps^2)
  for (double eps : {0.1, 0.3, 0.5, 0.57, 0.7}) {
    const double e2 = eps * eps;
    CHECK(convexity_margin(2.0, eps) ==
          doctest::Approx((1.0 - e2) * (1.0 - 3.0 * e2)).epsilon(1e-13));
  }
  CHECK(convexity_margin(2.0, 0.5) == doctest::Approx(0.1875).epsilon(1e-14));
  CHECK(convexity_margin(2.0, 1.0 / std::sqrt(3.0)) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("certificate is monotone: up in alpha, down in eps") {
  const int n = 30;
  for (int i = 0; i < n; ++i) {
    const double eps = 0.05 + (0.5 / (n - 1)) * i;
    double prev = -1e300;
    for (int j = 0; j < n; ++j) {
      const double alpha = 1.01 + (0.99 / (n - 1)) * j;
      const double m = convexity_margin(alpha, eps);
      CHECK(m >= prev - 1e-14);
      prev = m;
    }
  }
  for (int j = 0; j < n; ++j) {
    const double alpha = 1.01 + (0.99 / (n - 1)) * j;
    double prev = 1e300;
    for (int i = 0; i < n; ++i) {
      const double eps = 0.05 + (0.5 / (n - 1)) * i;
      const double m = convexity_margin(alpha, eps);
      CHECK(m <= prev + 1e-14);
      prev = m;
    }
  }
}

TEST_CASE("minimal admissible power curve") {
  // frozen bisection result; residual must sit at the root
  const AlphaCurvePoint low = alpha_star(0.05);
  CHECK(low.alpha_star == doctest::Approx(1.0791124086822732).epsilon(1e-9));
  CHECK(std::fabs(low.residual) <= 1e-10);

  double prev = 1.0;
  for (int i = 0; i < 40; ++i) {
    const double eps = 0.05 + (0.52 / 39.0) * i;
    const AlphaCurvePoint p = alpha_star(eps);
    CHECK(std::fabs(p.residual) <= 1e-10);
    CHECK(p.alpha_star >= prev - 1e-12);  // nondecreasing in eps
    // sign structure around the root: below is inadmissible
    if (p.alpha_star > 1.001)
      CHECK(convexity_margin(p.alpha_star - 1e-4, eps) < 0.0);
    CHECK(convexity_margin(p.alpha_star + 1e-4, eps) > 0.0);
    prev = p.alpha_star;
  }

  // at the critical opening the curve reaches the quadratic weight
  CHECK(alpha_star(1.0 / std::sqrt(3.0) - 1e-9).alpha_star ==
        doctest::Approx(2.0).epsilon(1e-6));

  CHECK_THROWS_AS(alpha_star(0.62), std::invalid_argument);  // past critical
  CHECK_THROWS_AS(alpha_star(0.0), std::invalid_argument);
}

TEST_CASE("shifted Hessian is positive semidefinite on the cone") {
  for (int dim : {2, 3, 5}) {
    const PsdScanResult r = hessian_psd_scan(1.85, 0.5, dim, 2000, 7);
    CHECK(r.points_checked == 2000);
    CHECK(r.min_eigenvalue >= -1e-10);
    CHECK(r.pass);
  }
  // alpha -> 1+ and alpha = 2 are the extreme curvature regimes
  CHECK(hessian_psd_scan(1.01, 0.3, 3, 1000, 8).pass);
  CHECK(hessian_psd_scan(2.0, 0.57, 3, 1000, 9).pass);
}

TEST_CASE("cubic coefficient scan: admissible parameters are violation-free") {
  WeightParams w;
  w.a = 10.0;
  w.alpha = 1.85;
  w.eps = 0.5;
  w.dim = 3;
  const A3ScanResult r = a3_scan(w, 2000, 11);
  CHECK(r.admissible);
  CHECK(r.nonneg_violations == 0);
  CHECK(r.bound_violations == 0);
  CHECK(r.pass);
  CHECK(r.min_a3 >= 0.0);
}

TEST_CASE("cubic coefficient loses positivity past the critical opening") {
  WeightParams w;
  w.a = 10.0;
  w.alpha = 1.99;
  w.eps = 0.6;  // eps > 1/sqrt 3: no admissible power exists
  w.dim = 3;
  CHECK(convexity_margin(w.alpha, w.eps) < 0.0);

  const A3ScanResult r = a3_scan(w, 2000, 13, /*near_ray=*/true);
  CHECK_FALSE(r.admissible);
  CHECK(r.nonneg_violations > 0);
  CHECK(r.min_a3 < 0.0);
  CHECK_FALSE(r.pass);
  // the witness lies close to the lateral boundary
  CHECK(r.argmin.x[0] / stable_norm(r.argmin.x) ==
        doctest::Approx(w.eps).epsilon(0.03));
}
