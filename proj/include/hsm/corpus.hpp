#pragma once
//
// Smooth compactly supported test functions for grids in 1-3 dimensions:
// tensor and radial profiles (1 - s^2)_+^m, shifted/scaled copies and seeded
// mixtures. Supports are kept inside the domain so that sampling on a grid
// does not truncate them.
//

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hsm/error.hpp"
#include "hsm/geometry.hpp"
#include "hsm/grid.hpp"

namespace hsm {

enum class BumpShape { tensor, radial };

struct Bump {
  BumpShape shape = BumpShape::tensor;
  Vec3 center = Vec3::Zero();
  Vec3 radius = Vec3::Ones();  // per-axis half widths; radial uses radius[0]
  int m = 2;
  double coeff = 1;
};

struct CorpusFunction {
  std::string id;
  int dim = 1;
  std::vector<Bump> terms;

  double operator()(const Vec3& x) const {
    double v = 0;
    for (const auto& b : terms) {
      double prof = 1;
      if (b.shape == BumpShape::radial) {
        double r2 = 0;
        for (int j = 0; j < dim; ++j) r2 += std::pow((x[j] - b.center[j]) / b.radius[0], 2);
        prof = r2 < 1 ? std::pow(1 - r2, b.m) : 0.0;
      } else {
        for (int j = 0; j < dim && prof != 0; ++j) {
          const double s = (x[j] - b.center[j]) / b.radius[j];
          prof *= std::abs(s) < 1 ? std::pow(1 - s * s, b.m) : 0.0;
        }
      }
      v += b.coeff * prof;
    }
    return v;
  }

  GridFunction sample(GridDomainPtr gd) const {
    if (gd->dimension() != dim) throw InvalidInput("corpus function dimension does not match the grid");
    return GridFunction::sample(std::move(gd), *this);
  }
};

namespace detail {

/// Distance from the bump's support to the complement of omega is positive
/// (checked at the support's extreme points, exact for convex domains).
inline bool bump_fits(const Domain& omega, const Bump& b, int dim) {
  if (!omega.contains(b.center)) return false;
  double reach = 0;
  if (b.shape == BumpShape::radial) {
    reach = b.radius[0];
  } else {
    double s = 0;
    for (int j = 0; j < dim; ++j) s += b.radius[j] * b.radius[j];
    reach = std::sqrt(s);
  }
  return omega.boundary_distance(b.center) > reach;
}

}  // namespace detail

/// Canonical profiles for m = 2, 3, 4 (tensor then radial, centred at the
/// bounding box midpoint), then single shifted bumps, then mixtures of 2-3
/// bumps with normal coefficients.
inline std::vector<CorpusFunction> grid_corpus(const Domain& omega, std::size_t count = 24,
                                               std::uint64_t seed = 20240601) {
  if (!omega.bounded()) throw InvalidInput("grid corpus requires a bounded domain");
  const int dim = omega.dimension();
  const auto& bb = omega.bounds();
  const Vec3 mid = 0.5 * (bb.lo + bb.hi);
  std::vector<CorpusFunction> out;
  if (omega.contains(mid)) {
    const double r0 = 0.9 * omega.boundary_distance(mid);
    for (auto shape : {BumpShape::tensor, BumpShape::radial})
      for (int m = 2; m <= 4 && out.size() < count; ++m) {
        Bump b{shape, mid, Vec3::Constant(shape == BumpShape::radial ? r0 : r0 / std::sqrt(dim)), m, 1};
        out.push_back({std::string(shape == BumpShape::tensor ? "tensor" : "radial") + "_m" + std::to_string(m),
                       dim,
                       {b}});
      }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0, 1);
  std::normal_distribution<double> gauss;
  auto random_bump = [&]() {
    for (int attempt = 0; attempt < 10000; ++attempt) {
      Bump b;
      b.shape = unif(rng) < 0.5 ? BumpShape::tensor : BumpShape::radial;
      b.m = 2 + static_cast<int>(unif(rng) * 3);
      for (int j = 0; j < dim; ++j) b.center[j] = bb.lo[j] + (bb.hi[j] - bb.lo[j]) * unif(rng);
      if (!omega.contains(b.center)) continue;
      const double room = omega.boundary_distance(b.center);
      const double r = room * (0.3 + 0.6 * unif(rng));
      for (int j = 0; j < dim; ++j)
        b.radius[j] = b.shape == BumpShape::radial ? r : r / std::sqrt(dim) * (0.6 + 0.4 * unif(rng));
      if (detail::bump_fits(omega, b, dim)) return b;
    }
    throw InvalidInput("could not place a bump inside the domain");
  };
  std::size_t k = 0;
  while (out.size() < count) {
    const bool mixture = k % 2 == 1;
    CorpusFunction f{(mixture ? "mix_" : "shift_") + std::to_string(k), dim, {}};
    const int nterms = mixture ? 2 + static_cast<int>(unif(rng) * 2) : 1;
    for (int t = 0; t < nterms; ++t) {
      Bump b = random_bump();
      b.coeff = mixture ? gauss(rng) : 1.0;
      f.terms.push_back(b);
    }
    out.push_back(std::move(f));
    ++k;
  }
  return out;
}

}  // namespace hsm
