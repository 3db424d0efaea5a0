#pragma once
//
// Domain spec files (JSON):
//
//   { "dim": 1, "shape": "interval_union", "intervals": [[-1, 0], [0, "inf"]] }
//   { "dim": 2, "shape": "polygon", "vertices": [[0,0], [1,0], [1,1], [0,1]] }
//   { "dim": 3, "shape": "ball", "center": [0,0,0], "radius": 1 }
//   { "dim": 2, "shape": "box", "min": [0,0], "max": [1,1] }
//   { "dim": 3, "shape": "polytope", "halfspaces": [{"a": [1,0,0], "b": 1}, ...] }
//
// Interval and box bounds may be the strings "inf" / "-inf".
//

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "hsm/geometry.hpp"

namespace hsm {

namespace detail {

inline double json_number(const nlohmann::json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw DomainSpecError(path, "expected a number");
}

inline nlohmann::json number_json(double x) {
  if (std::isinf(x)) return x > 0 ? nlohmann::json("inf") : nlohmann::json("-inf");
  return x;
}

inline Vec3 json_vector(const nlohmann::json& v, int dim, const std::string& path) {
  if (!v.is_array()) throw DomainSpecError(path, "expected an array");
  if (static_cast<int>(v.size()) != dim)
    throw DomainSpecError(path, "expected " + std::to_string(dim) + " coordinates, got " +
                                    std::to_string(v.size()));
  Vec3 out = Vec3::Zero();
  for (int j = 0; j < dim; ++j) out[j] = json_number(v[j], path + "/" + std::to_string(j));
  return out;
}

inline const nlohmann::json& require(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw DomainSpecError(std::string("/") + key, "missing key");
  return j.at(key);
}

}  // namespace detail

inline Domain domain_from_json(const nlohmann::json& j) {
  using detail::json_number;
  using detail::json_vector;
  using detail::require;
  if (!j.is_object()) throw DomainSpecError("", "domain spec must be a JSON object");
  const auto& dim_node = require(j, "dim");
  if (!dim_node.is_number_integer()) throw DomainSpecError("/dim", "expected an integer");
  const int dim = dim_node.get<int>();
  if (dim < 1 || dim > 3) throw DomainSpecError("/dim", "dimension must be 1, 2 or 3");
  const auto& shape_node = require(j, "shape");
  if (!shape_node.is_string()) throw DomainSpecError("/shape", "expected a string");
  const std::string shape = shape_node.get<std::string>();

  if (shape == "interval_union" || shape == "interval") {
    if (dim != 1) throw DomainSpecError("/dim", "interval_union requires dim 1");
    const auto& arr = require(j, "intervals");
    if (!arr.is_array()) throw DomainSpecError("/intervals", "expected an array");
    std::vector<Interval> ivs;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = "/intervals/" + std::to_string(i);
      if (!arr[i].is_array() || arr[i].size() != 2) throw DomainSpecError(p, "expected [lo, hi]");
      ivs.push_back({json_number(arr[i][0], p + "/0"), json_number(arr[i][1], p + "/1")});
    }
    return Domain::interval_union(std::move(ivs));
  }
  if (shape == "polygon") {
    if (dim != 2) throw DomainSpecError("/dim", "polygon requires dim 2");
    const auto& arr = require(j, "vertices");
    if (!arr.is_array()) throw DomainSpecError("/vertices", "expected an array");
    std::vector<Vec2> verts;
    for (std::size_t i = 0; i < arr.size(); ++i)
      verts.push_back(json_vector(arr[i], 2, "/vertices/" + std::to_string(i)).head<2>());
    return Domain::polygon(std::move(verts));
  }
  if (shape == "ball") {
    const Vec3 c = json_vector(require(j, "center"), dim, "/center");
    const double r = json_number(require(j, "radius"), "/radius");
    return Domain::ball(dim, c, r);
  }
  if (shape == "box") {
    const Vec3 lo = json_vector(require(j, "min"), dim, "/min");
    const Vec3 hi = json_vector(require(j, "max"), dim, "/max");
    return Domain::box(dim, lo, hi);
  }
  if (shape == "polytope") {
    const auto& arr = require(j, "halfspaces");
    if (!arr.is_array()) throw DomainSpecError("/halfspaces", "expected an array");
    std::vector<HalfSpace> faces;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = "/halfspaces/" + std::to_string(i);
      if (!arr[i].is_object() || !arr[i].contains("a") || !arr[i].contains("b"))
        throw DomainSpecError(p, "expected {\"a\": [...], \"b\": number}");
      faces.push_back({json_vector(arr[i]["a"], dim, p + "/a"), json_number(arr[i]["b"], p + "/b")});
    }
    return Domain::polytope(dim, std::move(faces));
  }
  throw DomainSpecError("/shape", "unknown shape '" + shape + "'");
}

inline nlohmann::json domain_to_json(const Domain& d) {
  using nlohmann::json;
  const int dim = d.dimension();
  auto vec = [&](const Vec3& v) {
    json a = json::array();
    for (int j = 0; j < dim; ++j) a.push_back(detail::number_json(v[j]));
    return a;
  };
  json out;
  out["dim"] = dim;
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, IntervalUnion>) {
          out["shape"] = "interval_union";
          out["intervals"] = json::array();
          for (const auto& iv : s.intervals)
            out["intervals"].push_back({detail::number_json(iv.lo), detail::number_json(iv.hi)});
        } else if constexpr (std::is_same_v<S, Polygon>) {
          out["shape"] = "polygon";
          out["vertices"] = json::array();
          for (const auto& v : s.vertices) out["vertices"].push_back({v.x(), v.y()});
        } else if constexpr (std::is_same_v<S, Ball>) {
          out["shape"] = "ball";
          out["center"] = vec(s.center);
          out["radius"] = s.radius;
        } else if constexpr (std::is_same_v<S, AxisBox>) {
          out["shape"] = "box";
          out["min"] = vec(s.lo);
          out["max"] = vec(s.hi);
        } else {
          out["shape"] = "polytope";
          out["halfspaces"] = json::array();
          for (const auto& f : s.faces) out["halfspaces"].push_back({{"a", vec(f.normal)}, {"b", f.offset}});
        }
      },
      d.shape());
  return out;
}

inline Domain load_domain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open domain file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainSpecError("", std::string("malformed JSON: ") + e.what());
  }
  return domain_from_json(j);
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 15];
  return s;
}

/// Hash of the canonical (validated, normalized) form of the domain.
inline std::string domain_hash(const Domain& d) { return hex64(fnv1a(domain_to_json(d).dump())); }

}  // namespace hsm
