#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "coneheat/geometry.hpp"
#include "coneheat/positivity.hpp"
#include "coneheat/rng.hpp"
#include "coneheat/weights.hpp"

using namespace coneheat;

namespace {

double fd_step(double coord) { return 1e-4 * std::max(1.0, std::fabs(coord)); }

// central difference of a scalar function of one coordinate
template <typename F>
double central(const F& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

template <typename F>
double central2(const F& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

std::vector<SpaceTimePoint> qpoints(int dim, double eps, long count,
                                    std::uint64_t seed) {
  const ConeSpec cone(dim, 2.0 * std::acos(eps));
  SampleRegion region;
  region.d_min = 0.05;  // keep FD stencils off the lateral boundary
  region.t_lo = 0.05;
  region.t_hi = 0.95;
  return sample_points(cone, region, count, seed);
}

}  // namespace

TEST_CASE("time profile") {
  CHECK(time_profile_h(1.0) == 1.0);
  CHECK(time_profile_h(1.5) == doctest::Approx(1.2697225873359212).epsilon(1e-15));
  double prev = 0.0;
  for (int i = 1; i <= 200; ++i) {
    const double h = time_profile_h(2.0 * i / 201.0);
    CHECK(h > prev);
    prev = h;
  }
  CHECK(time_profile_h(0.0) == 0.0);
}

TEST_CASE("lam values and derivatives") {
  CHECK(lam(1.5, 1.0).value == 0.0);
  CHECK(lam(2.0, 0.25).value == doctest::Approx(3.0).epsilon(1e-15));

  for (double alpha : {1.2, 1.85, 2.0}) {
    for (double t : {0.1, 0.35, 0.6, 0.9}) {
      const LamEval e = lam(alpha, t);
      auto val = [alpha](double s) { return lam(alpha, s).value; };
      const double h = 1e-5 * t;
      CHECK(e.d1 == doctest::Approx(central(val, t, h)).epsilon(1e-8));
      CHECK(e.d2 == doctest::Approx(central2(val, t, h)).epsilon(1e-6));
    }
  }
  CHECK_THROWS_AS(lam(1.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(lam(1.5, 1.1), std::invalid_argument);
}

TEST_CASE("lam ratio and curvature inequalities") {
  // |Lam/Lam'| < 1/(2 alpha) and Lam'' + Lam' > alpha - 1 on (0,1)
  for (double alpha : {1.1, 1.5, 1.85, 1.99}) {
    double min_ratio_margin = 1e300, min_curv_margin = 1e300;
    for (int i = 1; i < 400; ++i) {
      const double t = i / 400.0;
      const LamEval e = lam(alpha, t);
      min_ratio_margin = std::min(
          min_ratio_margin, 1.0 / (2.0 * alpha) - std::fabs(e.value / e.d1));
      min_curv_margin =
          std::min(min_curv_margin, e.d2 + e.d1 - (alpha - 1.0));
    }
    CHECK(min_ratio_margin > 0.0);
    CHECK(min_curv_margin > 0.0);
  }
}

TEST_CASE("spatial weight closed forms") {
  // on the boundary ray x1 = eps r the weight vanishes
  const double eps = 0.5, s = std::sqrt(1.0 - eps * eps);
  const SpatialWeight ray = varphi_eval(1.7, eps, {2.0 * eps, 2.0 * s});
  CHECK(ray.value == doctest::Approx(0.0).epsilon(1e-14));

  CHECK(varphi_eval(2.0, 0.5, {2.0, 0.0}).value ==
        doctest::Approx(3.0).epsilon(1e-15));

  CHECK_THROWS_AS(varphi_eval(1.5, 0.5, {-1.0, 0.5}), std::invalid_argument);
}

TEST_CASE("spatial weight derivatives vs finite differences") {
  Rng rng(11);
  for (int dim : {2, 3, 4}) {
    const double alpha = 1.2 + 0.7 * rng.uniform(), eps = 0.3 + 0.3 * rng.uniform();
    const auto pts = qpoints(dim, eps, 25, 31 + dim);
    for (const auto& p : pts) {
      const SpatialWeight w = varphi_eval(alpha, eps, p.x);
      double lap_fd = 0.0;
      for (int k = 0; k < dim; ++k) {
        auto slice = [&](double s) {
          Vec y = p.x;
          y[k] = s;
          return varphi_eval(alpha, eps, y).value;
        };
        const double h = fd_step(p.x[k]);
        CHECK(w.grad[k] ==
              doctest::Approx(central(slice, p.x[k], h)).epsilon(1e-6));
        const double d2 = central2(slice, p.x[k], h);
        CHECK(w.hess.at(k, k) == doctest::Approx(d2).epsilon(2e-5));
        lap_fd += d2;
      }
      CHECK(w.lap == doctest::Approx(lap_fd).epsilon(2e-5));

      // off-diagonal Hessian, mixed stencil
      for (int k = 0; k < dim; ++k)
        for (int l = k + 1; l < dim; ++l) {
          const double hk = fd_step(p.x[k]), hl = fd_step(p.x[l]);
          auto at = [&](double sk, double sl) {
            Vec y = p.x;
            y[k] = sk;
            y[l] = sl;
            return varphi_eval(alpha, eps, y).value;
          };
          const double mixed =
              (at(p.x[k] + hk, p.x[l] + hl) - at(p.x[k] + hk, p.x[l] - hl) -
               at(p.x[k] - hk, p.x[l] + hl) + at(p.x[k] - hk, p.x[l] - hl)) /
              (4.0 * hk * hl);
          CHECK(w.hess.at(k, l) == doctest::Approx(mixed).epsilon(2e-5));
        }

      // bilaplacian gated against the FD laplacian of the closed-form laplacian
      double bilap_fd = 0.0;
      for (int k = 0; k < dim; ++k) {
        auto lap_slice = [&](double s) {
          Vec y = p.x;
          y[k] = s;
          return varphi_eval(alpha, eps, y).lap;
        };
        bilap_fd += central2(lap_slice, p.x[k], fd_step(p.x[k]));
      }
      CHECK(w.bilap == doctest::Approx(bilap_fd).epsilon(2e-5));
    }
  }
}

TEST_CASE("finite-difference convergence order is quadratic") {
  const double alpha = 1.85, eps = 0.5;
  const auto pts = qpoints(3, eps, 10, 5);
  int ok = 0;
  for (const auto& p : pts) {
    auto slice = [&](double s) {
      Vec y = p.x;
      y[0] = s;
      return varphi_eval(alpha, eps, y).value;
    };
    const double exact = varphi_eval(alpha, eps, p.x).grad[0];
    const double e1 = std::fabs(central(slice, p.x[0], 1e-2) - exact);
    const double e2 = std::fabs(central(slice, p.x[0], 5e-3) - exact);
    if (e1 == 0.0 || e2 == 0.0) continue;
    const double order = std::log2(e1 / e2);
    if (order > 1.7 && order < 2.3) ++ok;
  }
  CHECK(ok >= 8);  // allow a couple of degenerate draws
}

TEST_CASE("f and F") {
  // alpha = 2 makes f constant
  CHECK(f_eval(2.0, 0.5, 3.7) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(f_lap(2.0, 0.5, 3, 3.7) == doctest::Approx(0.0));
  CHECK(f_eval(1.8, 0.5, 2.0) == doctest::Approx(0.45).epsilon(1e-15));

  WeightParams w;
  w.a = 10.0;
  w.alpha = 2.0;
  w.eps = 0.5;
  CHECK(big_f(w, {2.0, 0.0}, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(big_f(w, {2.0, 0.0}, 0.25) == doctest::Approx(61.0).epsilon(1e-14));

  // F >= 1 on the cylinder: Lam >= 0 and f >= 0
  for (const auto& p : qpoints(3, 0.5, 100, 17)) {
    w.dim = 3;
    CHECK(big_f(w, p.x, p.t) >= 1.0);
  }

  // f laplacian against finite differences along each axis
  const double alpha = 1.6, eps = 0.45;
  for (const auto& p : qpoints(3, eps, 20, 23)) {
    double lap_fd = 0.0;
    for (int k = 0; k < 3; ++k) {
      auto slice = [&](double s) {
        Vec y = p.x;
        y[k] = s;
        return f_eval(alpha, eps, stable_norm(y));
      };
      lap_fd += central2(slice, p.x[k], fd_step(p.x[k]));
    }
    CHECK(f_lap(alpha, eps, 3, stable_norm(p.x)) ==
          doctest::Approx(lap_fd).epsilon(2e-5));
  }
}

TEST_CASE("space-time weight assembly") {
  WeightParams w;
  w.a = 3.0;
  w.alpha = 1.85;
  w.eps = 0.5;
  w.dim = 2;

  // Lam(1) = 0 kills the spatial part
  const WeightEval top = phi_total(w, {2.0, 0.5}, 1.0);
  CHECK(top.value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::fabs(top.grad[0]) < 1e-15);
  CHECK(std::fabs(top.grad[1]) < 1e-15);

  // on the boundary ray varphi = 0, so phi = t^2
  const double s = std::sqrt(1.0 - w.eps * w.eps);
  const WeightEval ray = phi_total(w, {2.0 * w.eps, 2.0 * s}, 0.5);
  CHECK(ray.value == doctest::Approx(0.25).epsilon(1e-12));

  for (const auto& p : qpoints(2, w.eps, 25, 41)) {
    const WeightEval e = phi_total(w, p.x, p.t);
    auto in_t = [&](double t) { return phi_total(w, p.x, t).value; };
    const double h = 1e-5 * p.t;
    CHECK(e.dt == doctest::Approx(central(in_t, p.t, h)).epsilon(1e-7));
    CHECK(e.dtt == doctest::Approx(central2(in_t, p.t, h)).epsilon(1e-5));

    auto grad_sq = [&](double t) {
      const WeightEval g = phi_total(w, p.x, t);
      return dot(g.grad, g.grad);
    };
    CHECK(e.dt_grad_sq ==
          doctest::Approx(central(grad_sq, p.t, h)).epsilon(1e-6));

    // spatial fields are a*Lam(t) times the varphi fields
    const SpatialWeight sw = varphi_eval(w.alpha, w.eps, p.x);
    const double scale = w.a * lam(w.alpha, p.t).value;
    CHECK(e.lap == doctest::Approx(scale * sw.lap).epsilon(1e-13));
    CHECK(e.bilap == doctest::Approx(scale * sw.bilap).epsilon(1e-13));
    for (int k = 0; k < 2; ++k)
      CHECK(e.grad[k] == doctest::Approx(scale * sw.grad[k]).epsilon(1e-13));
  }
}

TEST_CASE("operators: basic algebra") {
  WeightParams w;
  w.a = 2.5;
  w.alpha = 1.7;
  w.eps = 0.45;
  w.dim = 3;

  FieldSample zero;
  zero.grad = {0.0, 0.0, 0.0};
  CHECK(op_S(w, {2.0, 0.1, 0.2}, 0.5, zero) == 0.0);
  CHECK(op_A(w, {2.0, 0.1, 0.2}, 0.5, zero) == 0.0);
  CHECK(op_L(w, {2.0, 0.1, 0.2}, 0.5, zero) == 0.0);

  Rng rng(3);
  for (const auto& p : qpoints(3, w.eps, 30, 47)) {
    FieldSample v;
    v.value = rng.uniform(-2.0, 2.0);
    v.dt = rng.uniform(-2.0, 2.0);
    v.grad = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
              rng.uniform(-1.0, 1.0)};
    v.lap = rng.uniform(-3.0, 3.0);
    const WeightEval e = phi_total(w, p.x, p.t);
    CHECK(op_L(e, v) == doctest::Approx(op_S(e, v) + op_A(e, v)).epsilon(1e-14));
    CHECK(op_S(w, p.x, p.t, v) == doctest::Approx(op_S(e, v)).epsilon(1e-15));
  }
}

TEST_CASE("a = 0 reduces the operators to the pure time weight") {
  // phi = t^2: S v = lap v - 2t v, A v = dv/dt, commutator integrand = 2 v^2
  WeightParams w;
  w.a = 0.0;
  w.alpha = 1.8;
  w.eps = 0.5;
  w.dim = 2;

  FieldSample v;
  v.value = 0.7;
  v.dt = -1.3;
  v.grad = {0.4, -0.9};
  v.lap = 2.1;
  const Vec x{2.0, 0.3};
  const double t = 0.4;
  CHECK(op_S(w, x, t, v) == doctest::Approx(v.lap - 2.0 * t * v.value).epsilon(1e-15));
  CHECK(op_A(w, x, t, v) == doctest::Approx(v.dt).epsilon(1e-15));
  CHECK(commutator_integrand(w, x, t, v) ==
        doctest::Approx(2.0 * v.value * v.value).epsilon(1e-15));
}

TEST_CASE("conjugation identity L(e^phi u) = e^phi (du/dt + lap u)") {
  WeightParams w;
  w.a = 2.0;
  w.alpha = 1.85;
  w.eps = 0.5;
  w.dim = 2;

  // analytic test function with exact derivatives
  auto u_val = [](const Vec& x, double t) {
    return std::sin(x[0] + 0.5 * x[1] + t) * std::exp(0.2 * x[0]);
  };
  auto u_all = [&u_val](const Vec& x, double t, double& ut, Vec& gu,
                        double& lu) {
    const double s = std::sin(x[0] + 0.5 * x[1] + t);
    const double c = std::cos(x[0] + 0.5 * x[1] + t);
    const double e = std::exp(0.2 * x[0]);
    ut = c * e;
    gu = {c * e + 0.2 * s * e, 0.5 * c * e};
    // u_xx = (-s + 0.4 c + 0.04 s) e, u_yy = -0.25 s e
    lu = (-s + 0.4 * c + 0.04 * s) * e + (-0.25 * s) * e;
  };

  for (const auto& p : qpoints(2, w.eps, 20, 53)) {
    const WeightEval e = phi_total(w, p.x, p.t);
    const double ephi = std::exp(e.value);

    double ut, lu;
    Vec gu;
    u_all(p.x, p.t, ut, gu, lu);
    const double u = u_val(p.x, p.t);

    FieldSample v;  // v = e^phi u with exact chain-rule derivatives
    v.value = ephi * u;
    v.dt = ephi * (e.dt * u + ut);
    v.grad = {ephi * (e.grad[0] * u + gu[0]), ephi * (e.grad[1] * u + gu[1])};
    v.lap = ephi * (e.lap * u + dot(e.grad, e.grad) * u +
                    2.0 * dot(e.grad, gu) + lu);

    CHECK(op_L(e, v) == doctest::Approx(ephi * (ut + lu)).epsilon(1e-8));
  }
}

TEST_CASE("grouped coefficients") {
  WeightParams w;
  w.a = 10.0;
  w.alpha = 1.85;
  w.eps = 0.5;
  w.dim = 3;

  CHECK(a_terms(w, {2.0, 0.1, 0.1}, 0.25).a0 == doctest::Approx(2.25).epsilon(1e-15));
  CHECK(a_terms(w, {2.0, 0.1, 0.1}, 1.0).a3 == 0.0);  // Lam(1) = 0 exactly

  // admissible parameters: the cubic coefficient dominates its closed bound
  REQUIRE(convexity_margin(w.alpha, w.eps) >= 0.0);
  for (const auto& p : qpoints(3, w.eps, 300, 61)) {
    const ATerms at = a_terms(w, p.x, p.t);
    const double tol = 1e-9 * std::max(1.0, std::fabs(at.a3_lower_bound));
    CHECK(at.a3 >= at.a3_lower_bound - tol);
    CHECK(at.a3 >= -tol);
  }
}

TEST_CASE("second-order coefficient dominance from the weight display") {
  // A2 - |grad phi|^2 >= -(a^2/2) Lam Lam' x1^(2 alpha - 2) at admissible
  // parameters; Lam Lam' <= 0 makes the right side nonnegative.
  for (double a : {2.0, 10.0}) {
    WeightParams w;
    w.a = a;
    w.alpha = 1.9;
    w.eps = 0.45;
    w.dim = 3;
    REQUIRE(convexity_margin(w.alpha, w.eps) >= 0.0);
    for (const auto& p : qpoints(3, w.eps, 200, 71)) {
      const ATerms at = a_terms(w, p.x, p.t);
      const WeightEval e = phi_total(w, p.x, p.t);
      const LamEval L = lam(w.alpha, p.t);
      const double lhs = at.a2 - dot(e.grad, e.grad);
      const double rhs = -(a * a / 2.0) * L.value * L.d1 *
                         std::pow(p.x[0], 2.0 * w.alpha - 2.0);
      CHECK(rhs >= 0.0);
      CHECK(lhs >= rhs - 1e-9 * std::max(1.0, std::fabs(rhs)));
    }
  }
}

TEST_CASE("decay certificate for the transfer function") {
  const GCheck good = decay_g_check(0.003, 10.0);
  CHECK(good.a == doctest::Approx(0.6281448031843534).epsilon(1e-14));
  CHECK(good.pass);
  CHECK(good.g_at_2 < 1.0);
  CHECK(good.min_gprime >= -1e-12);

  const GCheck bad = decay_g_check(0.01, 10.0);
  CHECK_FALSE(bad.pass);
  CHECK(bad.min_gprime < -1e-5);
  CHECK(bad.argmin_s == doctest::Approx(1.49).epsilon(0.05));

  // closed-form derivative against a finite difference of g itself
  const double a = good.a, rho = 10.0;
  auto g = [&](double s) {
    return std::pow(time_profile_h(s), -2.0 * a) *
           std::exp(-rho * rho / (32.0 * s));
  };
  for (double s : {0.8, 1.3, 1.9}) {
    const double gp = g(s) * (-2.0 * a * (1.0 / s - 1.0 / 3.0) +
                              rho * rho / (32.0 * s * s));
    CHECK(gp == doctest::Approx(central(g, s, 1e-6)).epsilon(1e-7));
  }

  CHECK_THROWS_AS(decay_g_check(0.003, 1.5), std::invalid_argument);  // rho <= 2
  CHECK_THROWS_AS(decay_g_check(-0.1, 10.0), std::invalid_argument);
  // explicit a must match the (beta, rho) relation
  CHECK_THROWS_AS(decay_g_check(1.0, 0.003, 10.0), std::invalid_argument);
}
