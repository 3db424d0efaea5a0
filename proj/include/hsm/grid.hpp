#pragma once
//
// Uniform Cartesian grids over a domain's bounding box, the set of active
// (unknown) nodes, grid functions, and sampled weight fields.
//

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hsm/error.hpp"
#include "hsm/geometry.hpp"
#include "hsm/parallel.hpp"
#include "hsm/sphere_weight.hpp"

namespace hsm {

/// Nodes origin + i*h (per axis, i in [0, counts)). The node block covers the
/// bounding box plus one ghost layer on every side.
struct Grid {
  int dim = 1;
  double h = 0;
  Vec3 origin = Vec3::Zero();
  std::array<int, 3> counts{1, 1, 1};

  static Grid covering(const Domain& domain, double h) {
    if (!(h > 0) || !std::isfinite(h)) throw InvalidInput("grid spacing must be positive");
    if (!domain.bounded()) throw InvalidInput("grid requires a bounded domain");
    Grid g;
    g.dim = domain.dimension();
    g.h = h;
    const auto& b = domain.bounds();
    for (int j = 0; j < g.dim; ++j) {
      const double cells = std::ceil((b.hi[j] - b.lo[j]) / h - 1e-9);
      if (cells > 1e8) throw InvalidInput("grid too fine for the domain");
      g.origin[j] = b.lo[j] - h;
      g.counts[j] = static_cast<int>(cells) + 3;
    }
    const double total = static_cast<double>(g.counts[0]) * g.counts[1] * g.counts[2];
    if (total > 5e7) throw InvalidInput("grid has too many nodes (" + std::to_string(total) + ")");
    return g;
  }

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(counts[0]) * counts[1] * counts[2];
  }
  std::size_t linear(int i, int j = 0, int k = 0) const noexcept {
    return (static_cast<std::size_t>(k) * counts[1] + j) * counts[0] + i;
  }
  std::array<int, 3> multi(std::size_t n) const noexcept {
    const int i = static_cast<int>(n % counts[0]);
    n /= counts[0];
    return {i, static_cast<int>(n % counts[1]), static_cast<int>(n / counts[1])};
  }
  /// Offset of the neighbor +1 along axis a.
  std::size_t stride(int axis) const noexcept {
    return axis == 0 ? 1 : axis == 1 ? counts[0] : static_cast<std::size_t>(counts[0]) * counts[1];
  }
  Vec3 point(std::size_t n) const {
    const auto m = multi(n);
    Vec3 x = Vec3::Zero();
    for (int j = 0; j < dim; ++j) x[j] = origin[j] + m[j] * h;
    return x;
  }
  bool on_ghost_layer(std::size_t n) const {
    const auto m = multi(n);
    for (int j = 0; j < dim; ++j)
      if (m[j] == 0 || m[j] == counts[j] - 1) return true;
    return false;
  }
  double cell_volume() const { return std::pow(h, dim); }
};

/// A grid over a domain plus its active nodes. A node is active iff it lies
/// in the domain at distance >= h from the complement; all other values of a
/// grid function are held at zero (Dirichlet truncation).
class GridDomain {
 public:
  GridDomain(Domain domain, double h) : domain_(std::move(domain)), grid_(Grid::covering(domain_, h)) {
    const std::size_t n = grid_.size();
    inside_.assign(n, 0);
    unknown_.assign(n, -1);
    const double margin = std::max(h * (1 - 1e-9), domain_.proximity_floor());
    for (std::size_t i = 0; i < n; ++i) {
      if (grid_.on_ghost_layer(i)) continue;
      const Vec3 x = grid_.point(i);
      if (!domain_.contains(x)) continue;
      inside_[i] = 1;
      if (domain_.boundary_distance(x) >= margin) {
        unknown_[i] = static_cast<std::int64_t>(active_.size());
        active_.push_back(i);
      }
    }
    inside_count_ = 0;
    for (auto c : inside_) inside_count_ += c;
  }

  static std::shared_ptr<const GridDomain> make(Domain domain, double h) {
    return std::make_shared<const GridDomain>(std::move(domain), h);
  }

  const Domain& domain() const noexcept { return domain_; }
  const Grid& grid() const noexcept { return grid_; }
  int dimension() const noexcept { return grid_.dim; }
  double h() const noexcept { return grid_.h; }

  bool inside(std::size_t node) const { return inside_[node] != 0; }
  bool active(std::size_t node) const { return unknown_[node] >= 0; }
  std::int64_t unknown(std::size_t node) const { return unknown_[node]; }
  const std::vector<std::size_t>& active_nodes() const noexcept { return active_; }
  std::size_t unknowns() const noexcept { return active_.size(); }

  /// |Omega| estimated as (#nodes inside) * h^N.
  double measure() const { return static_cast<double>(inside_count_) * grid_.cell_volume(); }

 private:
  Domain domain_;
  Grid grid_;
  std::vector<char> inside_;
  std::vector<std::int64_t> unknown_;
  std::vector<std::size_t> active_;
  std::size_t inside_count_ = 0;
};

using GridDomainPtr = std::shared_ptr<const GridDomain>;

/// Values on every grid node; zero off the active set.
class GridFunction {
 public:
  explicit GridFunction(GridDomainPtr gd) : gd_(std::move(gd)), values_(Eigen::VectorXd::Zero(gd_->grid().size())) {}

  GridFunction(GridDomainPtr gd, Eigen::VectorXd values) : gd_(std::move(gd)), values_(std::move(values)) {
    validate();
  }

  /// u(x_i) = f(x_i) at active nodes, 0 elsewhere.
  template <typename F>
  static GridFunction sample(GridDomainPtr gd, F&& f) {
    GridFunction u(gd);
    for (std::size_t n : gd->active_nodes()) u.values_[n] = f(gd->grid().point(n));
    u.validate();
    return u;
  }

  /// From a vector over the active nodes (unknown ordering).
  static GridFunction from_unknowns(GridDomainPtr gd, const Eigen::VectorXd& x) {
    if (static_cast<std::size_t>(x.size()) != gd->unknowns()) throw InvalidInput("unknown vector has the wrong size");
    GridFunction u(gd);
    const auto& act = gd->active_nodes();
    for (std::size_t k = 0; k < act.size(); ++k) u.values_[act[k]] = x[k];
    u.validate();
    return u;
  }

  Eigen::VectorXd unknowns() const {
    const auto& act = gd_->active_nodes();
    Eigen::VectorXd x(act.size());
    for (std::size_t k = 0; k < act.size(); ++k) x[k] = values_[act[k]];
    return x;
  }

  const GridDomain& grid_domain() const noexcept { return *gd_; }
  const GridDomainPtr& grid_domain_ptr() const noexcept { return gd_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  double operator[](std::size_t n) const { return values_[n]; }

  GridFunction scaled(double c) const { return GridFunction(gd_, c * values_); }

 private:
  void validate() const {
    if (static_cast<std::size_t>(values_.size()) != gd_->grid().size())
      throw InvalidInput("grid function has the wrong number of values");
    for (Eigen::Index n = 0; n < values_.size(); ++n) {
      if (!std::isfinite(values_[n])) throw InvalidInput("grid function has a non-finite value");
      if (values_[n] != 0 && !gd_->active(static_cast<std::size_t>(n)))
        throw InvalidInput("grid function is nonzero off the active nodes");
    }
  }

  GridDomainPtr gd_;
  Eigen::VectorXd values_;
};

enum class WeightKind { davies, euclidean, none };

inline std::string to_string(WeightKind k) {
  switch (k) {
    case WeightKind::davies: return "davies";
    case WeightKind::euclidean: return "euclidean";
    default: return "none";
  }
}

inline WeightKind weight_kind_from_string(const std::string& s) {
  if (s == "davies") return WeightKind::davies;
  if (s == "euclidean") return WeightKind::euclidean;
  if (s == "none") return WeightKind::none;
  throw InvalidInput("unknown weight kind '" + s + "'");
}

/// A weight sampled at the grid nodes inside the domain (NaN = absent).
struct WeightField {
  GridDomainPtr grid_domain;
  WeightKind kind = WeightKind::davies;
  double p = 2;
  Eigen::VectorXd values;
  double epsilon_floor = std::numeric_limits<double>::infinity();
  int quad_polar = 0;
  int quad_azimuth = 0;

  bool present(std::size_t node) const { return !std::isnan(values[node]); }
};

namespace detail {

inline std::string describe_node(const Grid& g, std::size_t n) {
  std::ostringstream os;
  os.precision(17);
  const Vec3 x = g.point(n);
  os << "node " << n << " at (";
  for (int j = 0; j < g.dim; ++j) os << (j ? ", " : "") << x[j];
  os << ")";
  return os.str();
}

}  // namespace detail

/// Samples the weight at every node inside the domain (beyond the proximity
/// floor). Per-node failures are rethrown with the node's coordinates.
inline WeightField weight_field(GridDomainPtr gd, WeightKind kind, double p, const SphereQuadrature& quad,
                                int threads = 1) {
  WeightField wf;
  wf.grid_domain = gd;
  wf.kind = kind;
  wf.p = p;
  wf.quad_polar = quad.polar;
  wf.quad_azimuth = quad.azimuth;
  const Grid& g = gd->grid();
  const Domain& dom = gd->domain();
  wf.values = Eigen::VectorXd::Constant(g.size(), std::numeric_limits<double>::quiet_NaN());
  if (kind == WeightKind::none) return wf;
  std::vector<std::size_t> nodes;
  for (std::size_t n = 0; n < g.size(); ++n)
    if (gd->inside(n) && dom.boundary_distance(g.point(n)) >= dom.proximity_floor()) nodes.push_back(n);
  parallel_for(nodes.size(), threads, [&](std::size_t k) {
    const std::size_t n = nodes[k];
    const Vec3 x = g.point(n);
    try {
      wf.values[n] = kind == WeightKind::davies ? davies_weight(dom, x, p, quad) : dom.boundary_distance(x);
    } catch (const InfiniteWeight& e) {
      throw InfiniteWeight(detail::describe_node(g, n) + ": " + e.what());
    } catch (const NumericFailure& e) {
      throw NumericFailure(detail::describe_node(g, n) + ": " + e.what());
    } catch (const InvalidInput& e) {
      throw InvalidInput(detail::describe_node(g, n) + ": " + e.what());
    }
    if (!(wf.values[n] > 0) || !std::isfinite(wf.values[n]))
      throw NumericFailure(detail::describe_node(g, n) + ": weight is not positive and finite");
  });
  for (std::size_t n : nodes) wf.epsilon_floor = std::min(wf.epsilon_floor, wf.values[n]);
  return wf;
}

inline WeightField weight_field(GridDomainPtr gd, WeightKind kind, double p = 2, int threads = 1) {
  const SphereQuadrature quad = SphereQuadrature::make(gd->dimension());
  return weight_field(std::move(gd), kind, p, quad, threads);
}

}  // namespace hsm
