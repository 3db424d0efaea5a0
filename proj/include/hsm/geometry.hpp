#pragma once
//
// Domains Omega in R^N (N = 1, 2, 3) with membership, directional-distance and
// boundary-distance queries. Points and directions are carried as Vec3; the
// coordinates past dimension() must be zero.
//

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>

#include "hsm/error.hpp"

namespace hsm {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo;
  double hi;
};

/// Finite union of disjoint open intervals, sorted by lower endpoint.
struct IntervalUnion {
  std::vector<Interval> intervals;
};

/// Simple polygon, counter-clockwise vertex list (the closing edge is implied).
struct Polygon {
  std::vector<Vec2> vertices;
};

struct Ball {
  Vec3 center;
  double radius;
};

/// Open box; bounds may be infinite as long as one of them is finite.
struct AxisBox {
  Vec3 lo;
  Vec3 hi;
};

/// { x : normal . x < offset }
struct HalfSpace {
  Vec3 normal;
  double offset;
};

/// Bounded intersection of open half-spaces with nonempty interior.
struct ConvexPolytope {
  std::vector<HalfSpace> faces;
};

struct BoundingBox {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
  bool finite(int dim) const {
    for (int j = 0; j < dim; ++j)
      if (!std::isfinite(lo[j]) || !std::isfinite(hi[j])) return false;
    return true;
  }
};

namespace detail {

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

inline double point_segment_distance(const Vec2& x, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0 ? (x - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (x - (a + s * ab)).norm();
}

inline int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross2(b - a, c - a);
  return (v > 0) - (v < 0);
}

inline bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

// Closed segments [a,b] and [c,d] share at least one point.
inline bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

inline std::string edge_name(std::size_t i, std::size_t n) {
  return "edge " + std::to_string(i) + " (vertices " + std::to_string(i) + "-" +
         std::to_string((i + 1) % n) + ")";
}

// Unit directions spanning the lines where `dim - 1` face normals are tight.
inline std::vector<Vec3> candidate_recession_directions(const std::vector<HalfSpace>& faces,
                                                        int dim) {
  std::vector<Vec3> out;
  if (dim == 1) {
    out.push_back(Vec3(1, 0, 0));
  } else if (dim == 2) {
    for (const auto& f : faces) {
      Vec3 d(-f.normal.y(), f.normal.x(), 0.0);
      if (d.norm() > 0) out.push_back(d.normalized());
    }
  } else {
    for (std::size_t i = 0; i < faces.size(); ++i)
      for (std::size_t j = i + 1; j < faces.size(); ++j) {
        Vec3 d = faces[i].normal.cross(faces[j].normal);
        if (d.norm() > 1e-12 * faces[i].normal.norm() * faces[j].normal.norm())
          out.push_back(d.normalized());
      }
  }
  return out;
}

}  // namespace detail

/// An open domain Omega, a proper subset of R^N. Immutable after
/// construction; all queries are const and thread-safe.
class Domain {
 public:
  using Shape = std::variant<IntervalUnion, Polygon, Ball, AxisBox, ConvexPolytope>;

  static Domain interval_union(std::vector<Interval> intervals) {
    if (intervals.empty()) throw DomainSpecError("/intervals", "at least one interval required");
    for (std::size_t i = 0; i < intervals.size(); ++i) {
      const auto& iv = intervals[i];
      const std::string path = "/intervals/" + std::to_string(i);
      if (std::isnan(iv.lo) || std::isnan(iv.hi)) throw DomainSpecError(path, "NaN endpoint");
      if (!(iv.lo < iv.hi)) throw DomainSpecError(path, "interval must have positive length");
    }
    std::vector<std::size_t> order(intervals.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](auto a, auto b) { return intervals[a].lo < intervals[b].lo; });
    std::vector<Interval> sorted;
    for (auto i : order) sorted.push_back(intervals[i]);
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i].lo < sorted[i - 1].hi)
        throw DomainSpecError("/intervals/" + std::to_string(order[i]),
                              "intervals must be pairwise disjoint");
    if (sorted.size() == 1 && std::isinf(sorted[0].lo) && std::isinf(sorted[0].hi))
      throw DomainSpecError("/intervals", "domain must be a proper subset of R");
    Domain d;
    d.dim_ = 1;
    d.convex_ = sorted.size() == 1;
    d.bbox_.lo = Vec3(sorted.front().lo, 0, 0);
    d.bbox_.hi = Vec3(sorted.back().hi, 0, 0);
    d.shape_ = IntervalUnion{std::move(sorted)};
    d.finish();
    return d;
  }

  static Domain interval(double lo, double hi) { return interval_union({{lo, hi}}); }

  /// Vertices in either orientation; stored counter-clockwise.
  static Domain polygon(std::vector<Vec2> vertices) {
    const std::size_t n = vertices.size();
    if (n < 3) throw DomainSpecError("/vertices", "polygon needs at least 3 vertices");
    for (std::size_t i = 0; i < n; ++i)
      if (!vertices[i].allFinite())
        throw DomainSpecError("/vertices/" + std::to_string(i), "non-finite coordinate");
    for (std::size_t i = 0; i < n; ++i)
      if (vertices[i] == vertices[(i + 1) % n])
        throw DomainSpecError("/vertices/" + std::to_string((i + 1) % n),
                              "repeated vertex (zero-length " + detail::edge_name(i, n) + ")");
    // Adjacent edges may only share their common vertex.
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = vertices[i];
      const Vec2& b = vertices[(i + 1) % n];
      const Vec2& c = vertices[(i + 2) % n];
      if (detail::cross2(b - a, c - b) == 0 && (b - a).dot(c - b) < 0)
        throw DomainSpecError("/vertices",
                              "self-intersecting polygon: " + detail::edge_name(i, n) + " and " +
                                  detail::edge_name((i + 1) % n, n) + " overlap");
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;  // adjacent through the closing edge
        if (detail::segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j],
                                       vertices[(j + 1) % n]))
          throw DomainSpecError("/vertices", "self-intersecting polygon: " +
                                                 detail::edge_name(i, n) + " and " +
                                                 detail::edge_name(j, n) + " intersect");
      }
    double area2 = 0;
    for (std::size_t i = 0; i < n; ++i) area2 += detail::cross2(vertices[i], vertices[(i + 1) % n]);
    if (area2 == 0) throw DomainSpecError("/vertices", "polygon has zero area");
    if (area2 < 0) std::reverse(vertices.begin(), vertices.end());

    Domain d;
    d.dim_ = 2;
    bool convex = true;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = vertices[i];
      const Vec2& b = vertices[(i + 1) % n];
      const Vec2& c = vertices[(i + 2) % n];
      if (detail::cross2(b - a, c - b) < 0) convex = false;
    }
    d.convex_ = convex;
    d.bbox_.lo = Vec3(kInf, kInf, 0);
    d.bbox_.hi = Vec3(-kInf, -kInf, 0);
    for (const auto& v : vertices) {
      d.bbox_.lo.head<2>() = d.bbox_.lo.head<2>().cwiseMin(v);
      d.bbox_.hi.head<2>() = d.bbox_.hi.head<2>().cwiseMax(v);
    }
    d.shape_ = Polygon{std::move(vertices)};
    d.finish();
    return d;
  }

  static Domain ball(int dim, const Vec3& center, double radius) {
    check_dim(dim);
    if (!center.allFinite()) throw DomainSpecError("/center", "non-finite coordinate");
    for (int j = dim; j < 3; ++j)
      if (center[j] != 0) throw DomainSpecError("/center", "coordinates beyond dim must be 0");
    if (!(radius > 0) || !std::isfinite(radius))
      throw DomainSpecError("/radius", "radius must be positive and finite");
    Domain d;
    d.dim_ = dim;
    d.convex_ = true;
    d.shape_ = Ball{center, radius};
    for (int j = 0; j < dim; ++j) {
      d.bbox_.lo[j] = center[j] - radius;
      d.bbox_.hi[j] = center[j] + radius;
    }
    d.finish();
    return d;
  }

  static Domain box(int dim, const Vec3& lo, const Vec3& hi) {
    check_dim(dim);
    bool any_finite = false;
    for (int j = 0; j < dim; ++j) {
      if (std::isnan(lo[j]) || std::isnan(hi[j]))
        throw DomainSpecError("/min/" + std::to_string(j), "NaN bound");
      if (!(lo[j] < hi[j]))
        throw DomainSpecError("/min/" + std::to_string(j), "box needs min < max componentwise");
      any_finite = any_finite || std::isfinite(lo[j]) || std::isfinite(hi[j]);
    }
    if (!any_finite) throw DomainSpecError("", "box must have at least one finite bound");
    Domain d;
    d.dim_ = dim;
    d.convex_ = true;
    AxisBox b{Vec3::Zero(), Vec3::Zero()};
    for (int j = 0; j < dim; ++j) {
      b.lo[j] = lo[j];
      b.hi[j] = hi[j];
    }
    d.bbox_.lo = b.lo;
    d.bbox_.hi = b.hi;
    d.shape_ = b;
    d.finish();
    return d;
  }

  static Domain polytope(int dim, std::vector<HalfSpace> faces) {
    check_dim(dim);
    if (faces.empty()) throw DomainSpecError("/halfspaces", "at least one half-space required");
    for (std::size_t i = 0; i < faces.size(); ++i) {
      const std::string path = "/halfspaces/" + std::to_string(i);
      if (!faces[i].normal.allFinite() || !std::isfinite(faces[i].offset))
        throw DomainSpecError(path, "non-finite coefficient");
      for (int j = dim; j < 3; ++j)
        if (faces[i].normal[j] != 0)
          throw DomainSpecError(path + "/a", "coefficients beyond dim must be 0");
      if (faces[i].normal.norm() == 0) throw DomainSpecError(path + "/a", "zero normal");
    }
    // Bounded iff the recession cone {d : a_i . d <= 0 for all i} is {0}.
    // Extreme rays of that cone lie on lines where dim-1 constraints are tight.
    {
      Eigen::MatrixXd a(faces.size(), dim);
      for (std::size_t i = 0; i < faces.size(); ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = faces[i].normal[j] / faces[i].normal.norm();
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (lu.rank() < dim) throw DomainSpecError("/halfspaces", "polytope is unbounded");
      for (const Vec3& dir : detail::candidate_recession_directions(faces, dim))
        for (double sgn : {1.0, -1.0}) {
          bool recedes = true;
          for (const auto& f : faces)
            if (sgn * f.normal.dot(dir) > 1e-12 * f.normal.norm()) {
              recedes = false;
              break;
            }
          if (recedes) throw DomainSpecError("/halfspaces", "polytope is unbounded");
        }
    }
    auto verts = polytope_vertices(faces, dim);
    if (verts.empty()) throw DomainSpecError("/halfspaces", "polytope is empty");
    Vec3 centroid = Vec3::Zero();
    for (const auto& v : verts) centroid += v;
    centroid /= static_cast<double>(verts.size());
    double scale = 0;
    for (const auto& v : verts) scale = std::max(scale, (v - centroid).norm());
    for (const auto& f : faces)
      if (!(f.offset - f.normal.dot(centroid) > 1e-12 * scale * f.normal.norm()))
        throw DomainSpecError("/halfspaces", "polytope has empty interior");
    Domain d;
    d.dim_ = dim;
    d.convex_ = true;
    d.bbox_.lo = Vec3::Zero();
    d.bbox_.hi = Vec3::Zero();
    for (int j = 0; j < dim; ++j) {
      d.bbox_.lo[j] = kInf;
      d.bbox_.hi[j] = -kInf;
      for (const auto& v : verts) {
        d.bbox_.lo[j] = std::min(d.bbox_.lo[j], v[j]);
        d.bbox_.hi[j] = std::max(d.bbox_.hi[j], v[j]);
      }
    }
    d.shape_ = ConvexPolytope{std::move(faces)};
    d.finish();
    return d;
  }

  int dimension() const noexcept { return dim_; }
  bool is_convex() const noexcept { return convex_; }
  const Shape& shape() const noexcept { return shape_; }
  const BoundingBox& bounds() const noexcept { return bbox_; }
  bool bounded() const noexcept { return bbox_.finite(dim_); }

  /// Diameter of the bounding box over its finite extents (1 if none).
  double length_scale() const noexcept { return length_scale_; }

  /// Points closer than this to the boundary are rejected by weight
  /// evaluation.
  double proximity_floor() const noexcept { return 1e-12 * length_scale_; }

  // -- unchecked queries (coordinates past dimension() must be zero) --------

  bool contains(const Vec3& x) const {
    return std::visit([&](const auto& s) { return contains_impl(s, x); }, shape_);
  }

  /// d_e(x) = inf{|t| : x + t e not in Omega}; +inf when the whole line stays
  /// inside. Requires x in Omega and |e| = 1.
  double directional_distance(const Vec3& x, const Vec3& e) const {
    return std::visit([&](const auto& s) { return directional_impl(s, x, e); }, shape_);
  }

  /// Euclidean distance from x in Omega to the complement.
  double boundary_distance(const Vec3& x) const {
    return std::visit([&](const auto& s) { return boundary_impl(s, x); }, shape_);
  }

  // -- checked queries -------------------------------------------------------

  bool contains(std::span<const double> x) const { return contains(to_point(x)); }

  double directional_distance(std::span<const double> x, std::span<const double> e) const {
    const Vec3 p = to_point(x);
    const Vec3 dir = to_point(e);
    if (std::abs(dir.norm() - 1.0) > 1e-12) throw InvalidInput("direction must be a unit vector");
    if (!contains(p)) throw InvalidInput("point is not inside the domain");
    return directional_distance(p, dir);
  }

  double boundary_distance(std::span<const double> x) const {
    const Vec3 p = to_point(x);
    if (!contains(p)) throw InvalidInput("point is not inside the domain");
    return boundary_distance(p);
  }

  Vec3 to_point(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_)
      throw InvalidInput("dimension mismatch: point has " + std::to_string(x.size()) +
                         " coordinates, domain has dimension " + std::to_string(dim_));
    Vec3 p = Vec3::Zero();
    for (int j = 0; j < dim_; ++j) p[j] = x[j];
    return p;
  }

 private:
  Domain() = default;

  static void check_dim(int dim) {
    if (dim < 1 || dim > 3) throw DomainSpecError("/dim", "dimension must be 1, 2 or 3");
  }

  void finish() {
    double s2 = 0;
    for (int j = 0; j < dim_; ++j) {
      const double lo = bbox_.lo[j], hi = bbox_.hi[j];
      if (std::isfinite(lo) && std::isfinite(hi)) s2 += (hi - lo) * (hi - lo);
    }
    length_scale_ = s2 > 0 ? std::sqrt(s2) : 1.0;
  }

  static std::vector<Vec3> polytope_vertices(const std::vector<HalfSpace>& faces, int dim) {
    std::vector<Vec3> out;
    const std::size_t m = faces.size();
    auto feasible = [&](const Vec3& v) {
      for (const auto& f : faces) {
        const double tol = 1e-9 * (std::abs(f.offset) + f.normal.norm() * v.norm() + 1.0);
        if (f.normal.dot(v) > f.offset + tol) return false;
      }
      return true;
    };
    auto solve = [&](std::initializer_list<std::size_t> idx) {
      Eigen::MatrixXd a(dim, dim);
      Eigen::VectorXd b(dim);
      int r = 0;
      for (auto i : idx) {
        for (int j = 0; j < dim; ++j) a(r, j) = faces[i].normal[j];
        b[r++] = faces[i].offset;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (lu.rank() < dim) return;
      Eigen::VectorXd x = lu.solve(b);
      Vec3 v = Vec3::Zero();
      for (int j = 0; j < dim; ++j) v[j] = x[j];
      if (v.allFinite() && feasible(v)) out.push_back(v);
    };
    for (std::size_t i = 0; i < m; ++i) {
      if (dim == 1) {
        solve({i});
        continue;
      }
      for (std::size_t j = i + 1; j < m; ++j) {
        if (dim == 2) {
          solve({i, j});
          continue;
        }
        for (std::size_t k = j + 1; k < m; ++k) solve({i, j, k});
      }
    }
    return out;
  }

  // IntervalUnion ------------------------------------------------------------
  static const Interval* find_interval(const IntervalUnion& s, double x) {
    for (const auto& iv : s.intervals)
      if (iv.lo < x && x < iv.hi) return &iv;
    return nullptr;
  }
  bool contains_impl(const IntervalUnion& s, const Vec3& x) const {
    return find_interval(s, x[0]) != nullptr;
  }
  double directional_impl(const IntervalUnion& s, const Vec3& x, const Vec3&) const {
    return boundary_impl(s, x);
  }
  double boundary_impl(const IntervalUnion& s, const Vec3& x) const {
    const Interval* iv = find_interval(s, x[0]);
    if (!iv) return 0.0;
    return std::min(x[0] - iv->lo, iv->hi - x[0]);
  }

  // Polygon ------------------------------------------------------------------
  bool contains_impl(const Polygon& s, const Vec3& x3) const {
    const Vec2 x = x3.head<2>();
    const auto& v = s.vertices;
    const std::size_t n = v.size();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Vec2& a = v[j];
      const Vec2& b = v[i];
      if (detail::orientation(a, b, x) == 0 && detail::on_segment(a, b, x)) return false;
      // Half-open crossing rule: a vertex on the ray counts for exactly one of
      // its two edges.
      if ((a.y() > x.y()) != (b.y() > x.y())) {
        const double xc = a.x() + (x.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
        if (x.x() < xc) inside = !inside;
      }
    }
    return inside;
  }
  double directional_impl(const Polygon& s, const Vec3& x3, const Vec3& e3) const {
    const Vec2 x = x3.head<2>();
    const Vec2 e = e3.head<2>();
    const auto& v = s.vertices;
    const std::size_t n = v.size();
    double best = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = v[i];
      const Vec2& b = v[(i + 1) % n];
      const Vec2 ab = b - a;
      const Vec2 ax = a - x;
      const double denom = detail::cross2(e, ab);
      if (denom != 0) {
        const double t = detail::cross2(ax, ab) / denom;
        const double u = detail::cross2(ax, e) / denom;
        if (u >= 0 && u <= 1) best = std::min(best, std::abs(t));
      } else if (detail::cross2(ax, e) == 0) {
        // Line runs along the edge: the nearest endpoint is the first contact.
        best = std::min({best, std::abs(ax.dot(e)), std::abs((b - x).dot(e))});
      }
    }
    return best;
  }
  double boundary_impl(const Polygon& s, const Vec3& x3) const {
    const Vec2 x = x3.head<2>();
    const auto& v = s.vertices;
    double best = kInf;
    for (std::size_t i = 0; i < v.size(); ++i)
      best = std::min(best, detail::point_segment_distance(x, v[i], v[(i + 1) % v.size()]));
    return best;
  }

  // Ball ---------------------------------------------------------------------
  bool contains_impl(const Ball& s, const Vec3& x) const {
    return (x - s.center).squaredNorm() < s.radius * s.radius;
  }
  double directional_impl(const Ball& s, const Vec3& x, const Vec3& e) const {
    const Vec3 w = x - s.center;
    const double b = e.dot(w);
    const double c = s.radius * s.radius - w.squaredNorm();  // > 0 inside
    // Roots of t^2 + 2bt - c = 0 are -b +- sqrt(b^2 + c); the smaller
    // magnitude is c / (sqrt(b^2 + c) + |b|), free of cancellation.
    return c / (std::sqrt(b * b + c) + std::abs(b));
  }
  double boundary_impl(const Ball& s, const Vec3& x) const {
    return s.radius - (x - s.center).norm();
  }

  // AxisBox ------------------------------------------------------------------
  bool contains_impl(const AxisBox& s, const Vec3& x) const {
    for (int j = 0; j < dim_; ++j)
      if (!(s.lo[j] < x[j] && x[j] < s.hi[j])) return false;
    return true;
  }
  double directional_impl(const AxisBox& s, const Vec3& x, const Vec3& e) const {
    double best = kInf;
    for (int j = 0; j < dim_; ++j) {
      const double ej = std::abs(e[j]);
      if (ej == 0) continue;
      const double margin = std::min(x[j] - s.lo[j], s.hi[j] - x[j]);
      best = std::min(best, margin / ej);
    }
    return best;
  }
  double boundary_impl(const AxisBox& s, const Vec3& x) const {
    double best = kInf;
    for (int j = 0; j < dim_; ++j) best = std::min({best, x[j] - s.lo[j], s.hi[j] - x[j]});
    return best;
  }

  // ConvexPolytope -----------------------------------------------------------
  bool contains_impl(const ConvexPolytope& s, const Vec3& x) const {
    for (const auto& f : s.faces)
      if (!(f.normal.dot(x) < f.offset)) return false;
    return true;
  }
  double directional_impl(const ConvexPolytope& s, const Vec3& x, const Vec3& e) const {
    double best = kInf;
    for (const auto& f : s.faces) {
      const double ae = std::abs(f.normal.dot(e));
      if (ae == 0) continue;
      best = std::min(best, (f.offset - f.normal.dot(x)) / ae);
    }
    return best;
  }
  double boundary_impl(const ConvexPolytope& s, const Vec3& x) const {
    double best = kInf;
    for (const auto& f : s.faces) best = std::min(best, (f.offset - f.normal.dot(x)) / f.normal.norm());
    return best;
  }

  int dim_ = 1;
  bool convex_ = false;
  Shape shape_ = IntervalUnion{};
  BoundingBox bbox_;
  double length_scale_ = 1.0;
};

}  // namespace hsm
