#pragma once
//
// Normalized surface averages over S^{N-1} and the Davies weight
//
//   D_{Omega,p}(x) = ( c_{N,p} avg_e d_e(x)^{-p} )^{-1/p},
//   c_{N,p} = sqrt(pi) Gamma((N+p)/2) / ( Gamma((p+1)/2) Gamma(N/2) ),
//
// where avg_e is the normalized average |S^{N-1}|^{-1} int de.
//

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "hsm/error.hpp"
#include "hsm/geometry.hpp"

namespace hsm {

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on P_n).
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw InvalidInput("Gauss-Legendre order must be >= 1");
  std::vector<double> x(n), w(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1, p1 = 0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (z * p0 - p1) / (z * z - 1);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1 - z * z) * dp * dp);
  }
  return {x, w};
}

/// Nodes/weights approximating the normalized average over S^{N-1}.
///   N = 1: the two points +-1, weight 1/2 each.
///   N = 2: M equispaced angles 2 pi k / M, weight 1/M.
///   N = 3: Gauss-Legendre in cos(theta) x equispaced azimuth.
struct SphereQuadrature {
  int dim = 1;
  std::vector<Vec3> nodes;
  std::vector<double> weights;
  int polar = 0;    // N = 3: Gauss-Legendre order; N = 2: angle count
  int azimuth = 0;  // N = 3 only

  static constexpr int kDefaultAngles2D = 2048;
  static constexpr int kDefaultPolar3D = 64;
  static constexpr int kDefaultAzimuth3D = 128;

  static SphereQuadrature make(int dim) {
    switch (dim) {
      case 1: return make_1d();
      case 2: return make_2d(kDefaultAngles2D);
      case 3: return make_3d(kDefaultPolar3D, kDefaultAzimuth3D);
      default: throw InvalidInput("sphere quadrature dimension must be 1, 2 or 3");
    }
  }

  static SphereQuadrature make_1d() {
    SphereQuadrature q;
    q.dim = 1;
    q.nodes = {Vec3(1, 0, 0), Vec3(-1, 0, 0)};
    q.weights = {0.5, 0.5};
    q.polar = 2;
    return q;
  }

  static SphereQuadrature make_2d(int angles) {
    if (angles < 1) throw InvalidInput("angle count must be positive");
    SphereQuadrature q;
    q.dim = 2;
    q.polar = angles;
    q.nodes.reserve(angles);
    for (int k = 0; k < angles; ++k) {
      const double t = 2 * std::numbers::pi * k / angles;
      q.nodes.emplace_back(std::cos(t), std::sin(t), 0.0);
    }
    q.weights.assign(angles, 1.0 / angles);
    return q;
  }

  static SphereQuadrature make_3d(int polar, int azimuth) {
    if (polar < 1 || azimuth < 1) throw InvalidInput("quadrature resolution must be positive");
    SphereQuadrature q;
    q.dim = 3;
    q.polar = polar;
    q.azimuth = azimuth;
    const auto [z, wz] = gauss_legendre(polar);
    q.nodes.reserve(static_cast<std::size_t>(polar) * azimuth);
    for (int i = 0; i < polar; ++i) {
      const double s = std::sqrt(std::max(0.0, 1 - z[i] * z[i]));
      for (int k = 0; k < azimuth; ++k) {
        const double phi = 2 * std::numbers::pi * k / azimuth;
        q.nodes.emplace_back(s * std::cos(phi), s * std::sin(phi), z[i]);
        q.weights.push_back(0.5 * wz[i] / azimuth);
      }
    }
    return q;
  }

  std::size_t size() const noexcept { return nodes.size(); }

  template <typename F>
  double average(F&& f) const {
    double s = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) s += weights[k] * f(nodes[k]);
    return s;
  }
};

/// c_{N,p}, via log-Gamma. c_{N,2} = N.
inline double gamma_normalization(int dim, double p) {
  if (dim < 1) throw InvalidInput("dimension must be >= 1");
  if (!(p >= 1)) throw InvalidInput("p must be >= 1");
  const double logc = 0.5 * std::log(std::numbers::pi) + std::lgamma(0.5 * (dim + p)) -
                      std::lgamma(0.5 * (p + 1)) - std::lgamma(0.5 * dim);
  return std::exp(logc);
}

/// D_{Omega,p}(x). Infinite directional distances contribute zero; throws
/// InfiniteWeight if every sampled line stays inside Omega.
inline double davies_weight(const Domain& domain, const Vec3& x, double p,
                            const SphereQuadrature& quad) {
  if (quad.dim != domain.dimension()) throw InvalidInput("quadrature/domain dimension mismatch");
  if (!(p >= 1)) throw InvalidInput("p must be >= 1");
  if (!domain.contains(x)) throw InvalidInput("point is not inside the domain");
  if (domain.boundary_distance(x) < domain.proximity_floor())
    throw InvalidInput("point too close to the boundary for weight evaluation");
  double sum = 0;
  if (p == 2) {
    for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
      const double d = domain.directional_distance(x, quad.nodes[k]);
      if (std::isfinite(d)) sum += quad.weights[k] / (d * d);
    }
  } else {
    for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
      const double d = domain.directional_distance(x, quad.nodes[k]);
      if (std::isfinite(d)) sum += quad.weights[k] * std::pow(d, -p);
    }
  }
  if (!(sum > 0)) throw InfiniteWeight("Davies weight is infinite at this point (no direction exits the domain)");
  return std::pow(gamma_normalization(domain.dimension(), p) * sum, -1.0 / p);
}

/// D_{Omega,p}(x) for several p from one sweep over the directions.
inline std::vector<double> davies_weights(const Domain& domain, const Vec3& x,
                                          const std::vector<double>& ps,
                                          const SphereQuadrature& quad) {
  std::vector<double> sums(ps.size(), 0.0);
  if (quad.dim != domain.dimension()) throw InvalidInput("quadrature/domain dimension mismatch");
  if (!domain.contains(x)) throw InvalidInput("point is not inside the domain");
  for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
    const double d = domain.directional_distance(x, quad.nodes[k]);
    if (!std::isfinite(d)) continue;
    for (std::size_t i = 0; i < ps.size(); ++i) sums[i] += quad.weights[k] * std::pow(d, -ps[i]);
  }
  std::vector<double> out(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (!(sums[i] > 0)) throw InfiniteWeight("Davies weight is infinite at this point");
    out[i] = std::pow(gamma_normalization(domain.dimension(), ps[i]) * sums[i], -1.0 / ps[i]);
  }
  return out;
}

struct MomentCheck {
  double quadrature;
  double analytic;
};

/// avg_e |a.e|^p by quadrature against Gamma((p+1)/2) Gamma(N/2) /
/// (sqrt(pi) Gamma((N+p)/2)) |a|^p.
inline MomentCheck sphere_moment_check(const Vec3& a, double p, const SphereQuadrature& quad) {
  if (!(p >= 1)) throw InvalidInput("p must be >= 1");
  if (a.norm() == 0) throw InvalidInput("a must be nonzero");
  const double quad_value = quad.average([&](const Vec3& e) { return std::pow(std::abs(a.dot(e)), p); });
  const double analytic = std::pow(a.norm(), p) / gamma_normalization(quad.dim, p);
  return {quad_value, analytic};
}

/// D_Omega(x) <= dist(x, Omega^c) + tol; only meaningful for convex Omega.
inline bool min_directional_distance_property(const Domain& domain, const Vec3& x,
                                              const SphereQuadrature& quad, double p = 2,
                                              double rel_tol = 1e-3) {
  if (!domain.is_convex())
    throw InvalidInput("convexity comparison requested on a non-convex domain");
  const double dist = domain.boundary_distance(x);
  return davies_weight(domain, x, p, quad) <= dist * (1 + rel_tol);
}

}  // namespace hsm
