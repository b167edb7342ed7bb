#include "coneheat/bump.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "coneheat/rng.hpp"

namespace coneheat {

namespace {

// Log-derivative ratios of the 1-D bump psi(u) = exp(-1/(1-u^2)) on (-1,1):
//   d1 = psi'/psi = -2u/(1-u^2)^2
//   d2 = psi''/psi = 4u^2/(1-u^2)^4 - 2/(1-u^2)^2 - 8u^2/(1-u^2)^3
// Multiplying the (possibly underflowed) value by these ratios is safe: the
// ratios stay finite strictly inside the interval and the value decays to
// zero much faster than they grow.
struct BumpRatios {
  double log_value;  // -1/(1-u^2)
  double d1;
  double d2;
};

BumpRatios ratios_1d(double u) {
  const double q = 1.0 - u * u;
  const double q2 = q * q;
  BumpRatios r;
  r.log_value = -1.0 / q;
  r.d1 = -2.0 * u / q2;
  r.d2 = 4.0 * u * u / (q2 * q2) - 2.0 / q2 - 8.0 * u * u / (q2 * q);
  return r;
}

double safe_exp(double log_v) { return log_v < -745.0 ? 0.0 : std::exp(log_v); }

}  // namespace

Bump::Bump(BumpSpec spec) : spec_(std::move(spec)) {
  const std::size_t n = spec_.center.size();
  if (n == 0) throw std::invalid_argument("bump: empty center");
  if (spec_.kind == BumpKind::product) {
    if (spec_.radii.size() != n)
      throw std::invalid_argument("bump: product kind needs one radius per axis");
  } else {
    if (spec_.radii.size() != 1)
      throw std::invalid_argument("bump: radial kind needs exactly one radius");
  }
  for (double r : spec_.radii)
    if (!(r > 0.0)) throw std::invalid_argument("bump: radii must be positive");
  if (!(spec_.t_radius > 0.0))
    throw std::invalid_argument("bump: t_radius must be positive");
  if (spec_.modulation && spec_.modulation->wave.size() != n)
    throw std::invalid_argument("bump: modulation wave dimension mismatch");
}

FieldSample Bump::eval(const Vec& x, double t) const {
  const int n = dim();
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("bump: point dimension mismatch");

  FieldSample out;
  out.grad.assign(n, 0.0);

  const double tau = (t - spec_.t_center) / spec_.t_radius;
  if (std::fabs(tau) >= 1.0) return out;

  double log_v;
  Vec lg(n);      // d/dx_k log(spatial factor)
  double lap_ratio;  // (lap of spatial factor) / (spatial factor)

  if (spec_.kind == BumpKind::product) {
    log_v = 0.0;
    lap_ratio = 0.0;
    for (int k = 0; k < n; ++k) {
      const double u = (x[k] - spec_.center[k]) / spec_.radii[k];
      if (std::fabs(u) >= 1.0) return out;
      const BumpRatios r = ratios_1d(u);
      log_v += r.log_value;
      lg[k] = r.d1 / spec_.radii[k];
      lap_ratio += r.d2 / (spec_.radii[k] * spec_.radii[k]);
    }
  } else {
    const double R = spec_.radii[0];
    Vec d(n);
    for (int k = 0; k < n; ++k) d[k] = x[k] - spec_.center[k];
    const double rho = stable_norm(d) / R;
    if (rho >= 1.0) return out;
    const BumpRatios r = ratios_1d(rho);
    const double q = 1.0 - rho * rho;
    // d1 / rho = -2/(1-rho^2)^2 stays finite at the center
    const double d1_over_rho = -2.0 / (q * q);
    log_v = r.log_value;
    for (int k = 0; k < n; ++k) lg[k] = d1_over_rho * d[k] / (R * R);
    lap_ratio = (r.d2 + (n - 1) * d1_over_rho) / (R * R);
  }

  const BumpRatios rt = ratios_1d(tau);
  log_v += rt.log_value;

  const double value = safe_exp(log_v);
  out.value = value;
  out.dt = value * rt.d1 / spec_.t_radius;
  for (int k = 0; k < n; ++k) out.grad[k] = value * lg[k];
  out.lap = value * lap_ratio;

  if (spec_.modulation) {
    const Modulation& m = *spec_.modulation;
    double arg = m.omega * t + m.phase;
    double wave_sq = 0.0;
    for (int k = 0; k < n; ++k) {
      arg += m.wave[k] * x[k];
      wave_sq += m.wave[k] * m.wave[k];
    }
    const double c = std::cos(arg), s = std::sin(arg);
    const double M = 1.0 + m.amplitude * c;
    const double Mt = -m.amplitude * m.omega * s;
    double grad_dot = 0.0;
    for (int k = 0; k < n; ++k) {
      const double Mk = -m.amplitude * m.wave[k] * s;
      grad_dot += out.grad[k] * Mk;
      out.grad[k] = out.grad[k] * M + out.value * Mk;
    }
    const double lapM = -m.amplitude * wave_sq * c;
    out.lap = out.lap * M + 2.0 * grad_dot + out.value * lapM;
    out.dt = out.dt * M + out.value * Mt;
    out.value *= M;
  }
  return out;
}

std::pair<double, double> Bump::support_interval(int axis) const {
  const int n = dim();
  if (axis < 0 || axis > n)
    throw std::invalid_argument("bump: axis out of range");
  if (axis == n)
    return {spec_.t_center - spec_.t_radius, spec_.t_center + spec_.t_radius};
  const double r =
      spec_.kind == BumpKind::product ? spec_.radii[axis] : spec_.radii[0];
  return {spec_.center[axis] - r, spec_.center[axis] + r};
}

Bump make_bump(const BumpSpec& spec, const DomainPredicate& domain,
               int surface_samples, std::uint64_t seed) {
  Bump bump(spec);
  const int n = bump.dim();
  const int axes = n + 1;

  std::vector<std::pair<double, double>> box(axes);
  for (int a = 0; a < axes; ++a) box[a] = bump.support_interval(a);

  auto check = [&](const std::vector<double>& pt) {
    Vec x(pt.begin(), pt.begin() + n);
    if (!domain(x, pt[n]))
      throw std::invalid_argument("bump support leaks outside the domain");
  };

  // all corners of the support box
  std::vector<double> pt(axes);
  for (unsigned mask = 0; mask < (1u << axes); ++mask) {
    for (int a = 0; a < axes; ++a)
      pt[a] = (mask >> a) & 1u ? box[a].second : box[a].first;
    check(pt);
  }

  // random points on each face
  Rng rng(seed);
  for (int face_axis = 0; face_axis < axes; ++face_axis) {
    for (int side = 0; side < 2; ++side) {
      const double fixed = side ? box[face_axis].second : box[face_axis].first;
      for (int s = 0; s < surface_samples; ++s) {
        for (int a = 0; a < axes; ++a)
          pt[a] = a == face_axis
                      ? fixed
                      : rng.uniform(box[a].first, box[a].second);
        check(pt);
      }
    }
  }
  return bump;
}

std::vector<BumpSpec> default_bump_suite(const ConeSpec& spec, int count,
                                         int modulated, std::uint64_t seed) {
  if (count <= 0) throw std::invalid_argument("bump suite: count must be > 0");
  if (modulated < 0 || modulated > count)
    throw std::invalid_argument("bump suite: modulated out of range");

  Rng rng(seed);
  const int n = spec.dim;
  const double half = spec.theta / 2.0;
  const double tan_half = std::tan(std::min(half, 1.3));

  DomainPredicate domain = [&spec](const Vec& x, double t) {
    return q_theta_contains(spec, x, t);
  };

  std::vector<BumpSpec> suite;
  suite.reserve(count);
  for (int i = 0; i < count; ++i) {
    BumpSpec b;
    b.kind = i % 2 == 0 ? BumpKind::product : BumpKind::radial;
    b.center.assign(n, 0.0);
    const double x1 = rng.uniform(1.6, 3.2);
    b.center[0] = x1;
    // lateral center at most halfway to the cone wall
    const double lat_cap = 0.5 * x1 * tan_half;
    for (int k = 1; k < n; ++k)
      b.center[k] = rng.uniform(-lat_cap, lat_cap) / std::sqrt(n - 1.0);

    const double room = std::min({distance_to_boundary(spec, b.center),
                                  x1 - 1.0, 4.0 - x1});
    const double r_cap = 0.75 * room / std::sqrt(static_cast<double>(n));
    if (b.kind == BumpKind::product) {
      b.radii.resize(n);
      for (int k = 0; k < n; ++k) b.radii[k] = r_cap * rng.uniform(0.6, 1.0);
    } else {
      b.radii = {r_cap * rng.uniform(0.6, 1.0)};
    }

    b.t_center = rng.uniform(0.3, 0.7);
    const double t_room = std::min(b.t_center - 0.05, 0.95 - b.t_center);
    b.t_radius = std::min(rng.uniform(0.12, 0.25), t_room);

    if (i >= count - modulated) {
      Modulation m;
      m.amplitude = rng.uniform(0.2, 0.5);
      m.wave.resize(n);
      for (int k = 0; k < n; ++k) m.wave[k] = rng.uniform(-3.0, 3.0);
      m.omega = rng.uniform(-4.0, 4.0);
      m.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      b.modulation = m;
    }

    // shrink on leak rather than trusting the construction margins
    for (int attempt = 0;; ++attempt) {
      try {
        make_bump(b, domain, 32, seed + i);
        break;
      } catch (const std::invalid_argument&) {
        if (attempt >= 10)
          throw std::logic_error("bump suite: could not fit bump in domain");
        for (double& r : b.radii) r *= 0.7;
      }
    }
    suite.push_back(std::move(b));
  }
  return suite;
}

}  // namespace coneheat
