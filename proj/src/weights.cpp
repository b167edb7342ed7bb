#include "coneheat/weights.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "coneheat/positivity.hpp"

namespace coneheat {

namespace {

void validate(const WeightParams& w) {
  if (!(w.a >= 0.0)) throw std::invalid_argument("weight: a must be >= 0");
  if (!(w.alpha > 1.0) || !(w.alpha <= 2.0))
    throw std::invalid_argument("weight: alpha must be in (1, 2]");
  if (!(w.eps > 0.0) || !(w.eps < 1.0))
    throw std::invalid_argument("weight: eps must be in (0, 1)");
  if (w.dim < 2) throw std::invalid_argument("weight: dim must be >= 2");
}

void validate_point(const Vec& x, int dim) {
  if (static_cast<int>(x.size()) != dim)
    throw std::invalid_argument("weight: point dimension mismatch");
  if (!(x[0] > 0.0)) throw std::invalid_argument("weight: requires x1 > 0");
}

}  // namespace

double time_profile_h(double t) { return t * std::exp((1.0 - t) / 3.0); }

LamEval lam(double alpha, double t) {
  if (!(t > 0.0) || t > 1.0)
    throw std::invalid_argument("lam: t must be in (0, 1]");
  const double p = std::pow(t, -alpha / 2.0);
  const double a2 = alpha / 2.0;
  LamEval e;
  e.value = (1.0 - t) * p;
  e.d1 = -(a2 + (1.0 - a2) * t) * p / t;
  e.d2 = a2 * ((a2 + 1.0) + (1.0 - a2) * t) * p / (t * t);
  return e;
}

SpatialWeight varphi_eval(double alpha, double eps, const Vec& x) {
  const int n = static_cast<int>(x.size());
  validate_point(x, n);
  const double r = stable_norm(x);
  if (!(r > 0.0)) throw std::invalid_argument("varphi: requires |x| > 0");
  const double x1 = x[0];
  const double ea = std::pow(eps, alpha);

  const double x1am2 = std::pow(x1, alpha - 2.0);
  const double x1am4 = x1am2 / (x1 * x1);
  const double ram2 = std::pow(r, alpha - 2.0);
  const double ram4 = ram2 / (r * r);

  SpatialWeight s;
  s.value = x1am2 * x1 * x1 - ea * ram2 * r * r;
  s.grad.assign(n, 0.0);
  for (int k = 0; k < n; ++k) s.grad[k] = -alpha * ea * ram2 * x[k];
  s.grad[0] += alpha * x1am2 * x1;

  s.hess = SymMat(n);
  const double c2 = alpha * (2.0 - alpha) * ea * ram4;
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) s.hess.at(k, l) = c2 * x[k] * x[l];
    s.hess.at(k, k) -= alpha * ea * ram2;
  }
  s.hess.at(0, 0) += alpha * (alpha - 1.0) * x1am2;

  s.lap = alpha * (alpha - 1.0) * x1am2 - ea * alpha * (alpha + n - 2.0) * ram2;
  s.bilap = alpha * (alpha - 1.0) * (alpha - 2.0) * (alpha - 3.0) * x1am4 -
            ea * alpha * (alpha + n - 2.0) * (alpha - 2.0) * (alpha + n - 4.0) * ram4;
  return s;
}

double f_eval(double alpha, double eps, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("f_eval: requires r > 0");
  return alpha * std::pow(eps, alpha) * std::pow(r, alpha - 2.0);
}

double f_lap(double alpha, double eps, int dim, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("f_lap: requires r > 0");
  return alpha * std::pow(eps, alpha) * (alpha - 2.0) * (alpha + dim - 4.0) *
         std::pow(r, alpha - 4.0);
}

double big_f(const WeightParams& w, const Vec& x, double t) {
  validate(w);
  validate_point(x, w.dim);
  const double r = stable_norm(x);
  return 4.0 * w.a * lam(w.alpha, t).value * f_eval(w.alpha, w.eps, r) + 1.0;
}

WeightEval phi_total(const WeightParams& w, const Vec& x, double t) {
  validate(w);
  validate_point(x, w.dim);
  const SpatialWeight sp = varphi_eval(w.alpha, w.eps, x);
  const LamEval L = lam(w.alpha, t);
  const double a = w.a;

  WeightEval e;
  e.value = a * L.value * sp.value + t * t;
  e.grad.resize(w.dim);
  double g2 = 0.0;
  for (int k = 0; k < w.dim; ++k) {
    e.grad[k] = a * L.value * sp.grad[k];
    g2 += sp.grad[k] * sp.grad[k];
  }
  e.hess = SymMat(w.dim);
  for (int k = 0; k < w.dim; ++k)
    for (int l = 0; l < w.dim; ++l)
      e.hess.at(k, l) = a * L.value * sp.hess.at(k, l);
  e.lap = a * L.value * sp.lap;
  e.bilap = a * L.value * sp.bilap;
  e.dt = a * L.d1 * sp.value + 2.0 * t;
  e.dtt = a * L.d2 * sp.value + 2.0;
  e.dt_grad_sq = 2.0 * a * a * L.value * L.d1 * g2;
  return e;
}

double op_S(const WeightEval& e, const FieldSample& v) {
  return v.lap + dot(e.grad, e.grad) * v.value - e.dt * v.value;
}

double op_A(const WeightEval& e, const FieldSample& v) {
  return v.dt - 2.0 * dot(e.grad, v.grad) - e.lap * v.value;
}

double op_L(const WeightEval& e, const FieldSample& v) {
  return op_S(e, v) + op_A(e, v);
}

double commutator_integrand(const WeightEval& e, const FieldSample& v) {
  // 2 grad phi . grad |grad phi|^2 = 4 (grad phi)^T hess(phi) (grad phi)
  const double coeff = 4.0 * quad_form(e.hess, e.grad) - e.bilap + e.dtt -
                       2.0 * e.dt_grad_sq;
  return 4.0 * quad_form(e.hess, v.grad) + coeff * v.value * v.value;
}

double op_S(const WeightParams& w, const Vec& x, double t, const FieldSample& v) {
  return op_S(phi_total(w, x, t), v);
}

double op_A(const WeightParams& w, const Vec& x, double t, const FieldSample& v) {
  return op_A(phi_total(w, x, t), v);
}

double op_L(const WeightParams& w, const Vec& x, double t, const FieldSample& v) {
  return op_L(phi_total(w, x, t), v);
}

double commutator_integrand(const WeightParams& w, const Vec& x, double t,
                            const FieldSample& v) {
  return commutator_integrand(phi_total(w, x, t), v);
}

ATerms a_terms(const WeightParams& w, const Vec& x, double t) {
  validate(w);
  validate_point(x, w.dim);
  const SpatialWeight sp = varphi_eval(w.alpha, w.eps, x);
  const LamEval L = lam(w.alpha, t);
  const double a = w.a, alpha = w.alpha, eps = w.eps;
  const double r = stable_norm(x);
  const double f = f_eval(alpha, eps, r);
  const double lapf = f_lap(alpha, eps, w.dim, r);
  const double g2 = dot(sp.grad, sp.grad);
  const double hgg = quad_form(sp.hess, sp.grad);
  const double L3 = L.value * L.value * L.value;

  ATerms out;
  out.a3 = 4.0 * a * a * a * L3 * (hgg - f * g2);
  out.a2 = -4.0 * a * a * L.value * L.d1 * g2 +
           4.0 * a * a * L.value * L.d1 * sp.value * f -
           4.0 * a * a * L.value * L.value * f * f -
           a * a * L.value * L.value * g2;
  out.a1 = -a * L.value * sp.bilap + a * L.d2 * sp.value -
           2.0 * a * L.value * lapf + a * L.d1 * sp.value -
           2.0 * a * L.value * f + 8.0 * a * t * L.value * f;
  out.a0 = 7.0 / 4.0 + 2.0 * t;
  out.a3_lower_bound = 4.0 * a * a * a * L3 * alpha * alpha * alpha *
                       std::pow(r, 3.0 * alpha - 4.0) *
                       std::pow(eps, 2.0 * alpha - 2.0) *
                       convexity_margin(alpha, eps);
  return out;
}

GCheck decay_g_check(double a, double beta, double rho, int grid_n) {
  if (!(rho > 2.0)) throw std::invalid_argument("decay_g_check: requires rho > 2");
  if (!(beta > 0.0)) throw std::invalid_argument("decay_g_check: requires beta > 0");
  if (grid_n < 16) throw std::invalid_argument("decay_g_check: grid too coarse");
  const double log_h_32 = std::log(time_profile_h(1.5));
  const double expected_a = beta * rho * rho / (2.0 * log_h_32);
  if (std::fabs(a - expected_a) > 1e-9 * std::max(1.0, std::fabs(expected_a)))
    throw std::invalid_argument("decay_g_check: a inconsistent with beta, rho");

  GCheck res;
  res.a = a;

  auto log_g = [&](double s) {
    return -2.0 * a * std::log(time_profile_h(s)) - rho * rho / (32.0 * s);
  };
  res.g_at_2 = std::exp(log_g(2.0));

  double min_gp = std::numeric_limits<double>::infinity();
  double arg = 0.0;
  for (int i = 1; i <= grid_n; ++i) {
    const double s = 2.0 * static_cast<double>(i) / (grid_n + 1);
    const double lg = log_g(s);
    const double g = lg < -745.0 ? 0.0 : std::exp(lg);
    // g'(s) = g(s) [ -2a (1/s - 1/3) + rho^2/(32 s^2) ]
    const double bracket =
        -2.0 * a * (1.0 / s - 1.0 / 3.0) + rho * rho / (32.0 * s * s);
    const double gp = g * bracket;
    if (gp < min_gp) {
      min_gp = gp;
      arg = s;
    }
  }
  res.min_gprime = min_gp;
  res.argmin_s = arg;
  res.pass = res.g_at_2 < 1.0 && res.min_gprime >= -1e-12;
  return res;
}

GCheck decay_g_check(double beta, double rho, int grid_n) {
  const double log_h_32 = std::log(time_profile_h(1.5));
  return decay_g_check(beta * rho * rho / (2.0 * log_h_32), beta, rho, grid_n);
}

}  // namespace coneheat
