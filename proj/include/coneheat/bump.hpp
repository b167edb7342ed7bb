#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "coneheat/geometry.hpp"
#include "coneheat/weights.hpp"

namespace coneheat {

enum class BumpKind { product, radial };

// Optional smooth factor 1 + amplitude * cos(wave . x + omega t + phase).
struct Modulation {
  double amplitude = 0.0;
  Vec wave;
  double omega = 0.0;
  double phase = 0.0;
};

// Compactly supported smooth test function, either a tensor product of 1-D
// bumps exp(-1/(1-rho^2)) per axis (space axes and time) or a radial bump in
// space times a 1-D bump in time.
struct BumpSpec {
  BumpKind kind = BumpKind::product;
  Vec center;             // spatial center
  Vec radii;              // per-axis spatial radii (product) or {radius} (radial)
  double t_center = 0.5;
  double t_radius = 0.1;
  std::optional<Modulation> modulation;
};

class Bump {
 public:
  explicit Bump(BumpSpec spec);

  // value, time derivative, spatial gradient and Laplacian; exact chain-rule
  // formulas, identically zero outside the support box.
  FieldSample eval(const Vec& x, double t) const;

  // closed support interval per axis; axis == dim() is the time axis
  std::pair<double, double> support_interval(int axis) const;
  int dim() const { return static_cast<int>(spec_.center.size()); }
  const BumpSpec& spec() const { return spec_; }

 private:
  BumpSpec spec_;
};

using DomainPredicate = std::function<bool(const Vec&, double)>;

// Validates that the support box lies inside the domain (all box corners plus
// `surface_samples` random boundary points per face) and returns the bump.
// Throws std::invalid_argument when the support leaks outside.
Bump make_bump(const BumpSpec& spec, const DomainPredicate& domain,
               int surface_samples = 64, std::uint64_t seed = 1234);

// Deterministic suite of bumps supported inside the space-time cylinder of the
// cone: `count` bumps of which the last `modulated` carry a trigonometric
// modulation.
std::vector<BumpSpec> default_bump_suite(const ConeSpec& spec, int count,
                                         int modulated, std::uint64_t seed);

}  // namespace coneheat
