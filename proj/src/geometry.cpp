#include "coneheat/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "coneheat/rng.hpp"

namespace coneheat {

double critical_angle_radians() { return 2.0 * std::acos(1.0 / std::sqrt(3.0)); }

double critical_angle_degrees() {
  return critical_angle_radians() * (180.0 / M_PI);
}

ConeSpec::ConeSpec(int dim_, double theta_) : dim(dim_), theta(theta_) {
  if (dim < 2) throw std::invalid_argument("ConeSpec: dim must be >= 2");
  if (!(theta > 0.0) || theta > M_PI)
    throw std::invalid_argument("ConeSpec: theta must be in (0, pi]");
  eps = std::cos(theta / 2.0);
}

namespace {

void check_dim(const ConeSpec& spec, const Vec& x) {
  if (static_cast<int>(x.size()) != spec.dim)
    throw std::invalid_argument("point dimension does not match cone spec");
}

// |x'| = norm of components 2..n
double lateral_norm(const Vec& x) {
  double m = 0.0;
  for (std::size_t k = 1; k < x.size(); ++k) m = std::max(m, std::fabs(x[k]));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t k = 1; k < x.size(); ++k) {
    double q = x[k] / m;
    s += q * q;
  }
  return m * std::sqrt(s);
}

}  // namespace

bool cone_contains(const ConeSpec& spec, const Vec& x) {
  check_dim(spec, x);
  return x[0] > spec.eps * stable_norm(x);
}

double distance_to_boundary(const ConeSpec& spec, const Vec& x) {
  check_dim(spec, x);
  return x[0] * std::sin(spec.theta / 2.0) -
         lateral_norm(x) * std::cos(spec.theta / 2.0);
}

bool offset_cone_contains(const ConeSpec& spec, const Vec& x, double c) {
  return distance_to_boundary(spec, x) > c;
}

bool q_theta_contains(const ConeSpec& spec, const Vec& x, double t) {
  check_dim(spec, x);
  return x[0] > 1.0 && t > 0.0 && t < 1.0 && cone_contains(spec, x);
}

double median_angle(double theta) {
  const double crit = critical_angle_radians();
  if (!(theta > crit) || theta > M_PI)
    throw std::invalid_argument("median_angle: theta must be in (critical, pi]");
  return 0.5 * (theta + crit);
}

double beta_prime(double beta, double theta, double delta) {
  if (!(theta > delta)) throw std::invalid_argument("beta_prime: need theta > delta");
  if (!(beta > 0.0)) throw std::invalid_argument("beta_prime: need beta > 0");
  double s = std::sin((theta - delta) / 2.0);
  return beta * s * s;
}

namespace {

constexpr long kMaxRejects = 1000000;

std::vector<SpaceTimePoint> sample_impl(const ConeSpec& spec,
                                        const SampleRegion& region, long count,
                                        std::uint64_t seed, bool near_ray,
                                        double ray_margin) {
  if (count < 0) throw std::invalid_argument("sample_points: negative count");
  if (!(region.x1_hi > region.x1_lo) || !(region.t_hi >= region.t_lo))
    throw std::invalid_argument("sample_points: empty region");

  Rng rng(seed);
  std::vector<SpaceTimePoint> out;
  out.reserve(static_cast<std::size_t>(count));

  // proposal width for the lateral coordinates: the cone section at x1 has
  // radius x1 tan(theta/2); cap for near-flat cones
  const double half = spec.theta / 2.0;
  const double lateral_cap =
      region.x1_hi * std::min(4.0, std::tan(std::min(half, 1.3258)));

  long rejects = 0;
  while (static_cast<long>(out.size()) < count) {
    if (rejects > kMaxRejects)
      throw std::runtime_error("sample_points: region rejected 1e6 proposals");

    SpaceTimePoint p;
    p.x.resize(spec.dim);
    p.x[0] = rng.uniform(region.x1_lo, region.x1_hi);
    if (near_ray) {
      // pick the ratio x1/|x| just above eps, then split |x'| over directions
      double ratio = spec.eps * (1.0 + ray_margin * std::max(rng.uniform(), 1e-4));
      if (ratio >= 1.0) ratio = 1.0 - 1e-12;
      double r = p.x[0] / ratio;
      double lat = std::sqrt(std::max(0.0, r * r - p.x[0] * p.x[0]));
      if (spec.dim == 2) {
        p.x[1] = (rng.uniform() < 0.5 ? -lat : lat);
      } else {
        Vec dir(spec.dim - 1);
        double nn = 0.0;
        do {
          nn = 0.0;
          for (auto& d : dir) {
            d = 2.0 * rng.uniform() - 1.0;
            nn += d * d;
          }
        } while (nn < 1e-12 || nn > 1.0);
        nn = std::sqrt(nn);
        for (int k = 1; k < spec.dim; ++k) p.x[k] = lat * dir[k - 1] / nn;
      }
    } else {
      for (int k = 1; k < spec.dim; ++k)
        p.x[k] = rng.uniform(-lateral_cap, lateral_cap);
    }
    p.t = rng.uniform(region.t_lo, region.t_hi);

    bool ok = cone_contains(spec, p.x) &&
              distance_to_boundary(spec, p.x) >= region.d_min &&
              p.x[0] >= region.x1_lo && p.x[0] <= region.x1_hi;
    if (ok) {
      out.push_back(std::move(p));
      rejects = 0;
    } else {
      ++rejects;
    }
  }
  return out;
}

}  // namespace

std::vector<SpaceTimePoint> sample_points(const ConeSpec& spec,
                                          const SampleRegion& region, long count,
                                          std::uint64_t seed) {
  return sample_impl(spec, region, count, seed, false, 0.0);
}

std::vector<SpaceTimePoint> sample_points_near_boundary(
    const ConeSpec& spec, const SampleRegion& region, long count,
    std::uint64_t seed, double ray_margin) {
  if (!(ray_margin > 0.0))
    throw std::invalid_argument("sample_points_near_boundary: margin must be > 0");
  return sample_impl(spec, region, count, seed, true, ray_margin);
}

}  // namespace coneheat
