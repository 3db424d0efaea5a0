#pragma once
//
// Output plumbing: locale-independent 17-digit numbers, CSV with a
// '#'-prefixed run manifest, weight and trace exports, and the JSON format
// for 1D test-function corpora:
//
//   { "functions": [
//       { "id": "a", "terms": [ { "lo": -1, "hi": 1, "m": 2, "coeffs": [1, 0.5] } ] },
//       { "id": "b", "samples": { "lo": -0.5, "hi": 0.5, "values": [0, ..., 0] } } ] }
//

#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "hsm/error.hpp"
#include "hsm/forms.hpp"
#include "hsm/grid.hpp"
#include "hsm/oned_lab.hpp"

namespace hsm {

inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest round-trip form is not used on purpose: every number is printed
/// with 17 significant digits so column widths are stable across runs.
inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

inline std::string fmt(long long x) { return std::to_string(x); }

struct RunManifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> entries;  // insertion order
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void add(const std::string& key, const std::string& value) { entries.emplace_back(key, value); }
  void add(const std::string& key, double value) { entries.emplace_back(key, fmt(value)); }

  /// Header lines; wall time is the only field that differs between reruns.
  std::string header() const {
    std::ostringstream os;
    os << "# hsmtool " << kToolVersion << "\n# subcommand: " << subcommand << "\n";
    for (const auto& [k, v] : entries) os << "# " << k << ": " << v << "\n";
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    os << "# wall_time_s: " << fmt(secs) << "\n";
    return os.str();
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["tool_version"] = kToolVersion;
    j["subcommand"] = subcommand;
    for (const auto& [k, v] : entries) j["parameters"][k] = v;
    j["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return j;
  }
};

class CsvWriter {
 public:
  CsvWriter(const RunManifest& manifest, std::vector<std::string> columns) : columns_(std::move(columns)) {
    os_ << manifest.header();
    for (std::size_t i = 0; i < columns_.size(); ++i) os_ << (i ? "," : "") << columns_[i];
    os_ << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size()) throw InvalidInput("CSV row has the wrong number of cells");
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << "\n";
  }

  std::string str() const { return os_.str(); }

 private:
  std::vector<std::string> columns_;
  std::ostringstream os_;
};

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw InvalidInput("failed writing '" + path + "'");
}

/// node, coordinates, D at every node where the weight is present.
inline std::string weight_csv(const WeightField& w, RunManifest manifest) {
  const Grid& g = w.grid_domain->grid();
  std::vector<std::string> cols{"node"};
  for (int j = 0; j < g.dim; ++j) cols.push_back(std::string(1, "xyz"[j]));
  cols.push_back("D");
  CsvWriter csv(manifest, cols);
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (!w.present(n)) continue;
    std::vector<std::string> r{fmt(static_cast<long long>(n))};
    const Vec3 x = g.point(n);
    for (int j = 0; j < g.dim; ++j) r.push_back(fmt(x[j]));
    r.push_back(fmt(w.values[n]));
    csv.row(r);
  }
  return csv.str();
}

inline std::string trace_csv(const std::vector<TraceEntry>& trace, const RunManifest& manifest) {
  CsvWriter csv(manifest, {"iteration", "quotient", "step"});
  for (const auto& t : trace) csv.row({fmt(static_cast<long long>(t.iteration)), fmt(t.quotient), fmt(t.step)});
  return csv.str();
}

// ---------------------------------------------------------------------------
// 1D corpus JSON.

inline TestFunction1D test_function_from_json(const nlohmann::json& j, std::size_t index) {
  const std::string path = "/functions/" + std::to_string(index);
  try {
    const std::string id = j.value("id", "f" + std::to_string(index));
    if (j.contains("samples")) {
      const auto& s = j.at("samples");
      return TestFunction1D::samples(s.at("lo").get<double>(), s.at("hi").get<double>(),
                                     s.at("values").get<std::vector<double>>(), id);
    }
    std::vector<BumpTerm> terms;
    for (const auto& t : j.at("terms"))
      terms.push_back({t.at("lo").get<double>(), t.at("hi").get<double>(), t.value("m", 2),
                       t.at("coeffs").get<std::vector<double>>()});
    return TestFunction1D::bumps(std::move(terms), id);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("corpus " + path + ": " + e.what());
  } catch (const InvalidInput& e) {
    throw InvalidInput("corpus " + path + ": " + e.what());
  }
}

inline std::vector<TestFunction1D> corpus_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("functions") || !j.at("functions").is_array())
    throw InvalidInput("corpus must be an object with a 'functions' array");
  std::vector<TestFunction1D> out;
  const auto& fs = j.at("functions");
  for (std::size_t i = 0; i < fs.size(); ++i) out.push_back(test_function_from_json(fs[i], i));
  return out;
}

inline nlohmann::ordered_json corpus_to_json(const std::vector<TestFunction1D>& corpus) {
  nlohmann::ordered_json fs = nlohmann::ordered_json::array();
  for (const auto& f : corpus) {
    if (f.sampled()) throw InvalidInput("sampled functions are not serialized");
    nlohmann::ordered_json jf;
    jf["id"] = f.id();
    for (const auto& t : f.terms()) jf["terms"].push_back({{"lo", t.lo}, {"hi", t.hi}, {"m", t.m}, {"coeffs", t.coeffs}});
    fs.push_back(jf);
  }
  return {{"functions", fs}};
}

inline std::vector<TestFunction1D> load_corpus(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot open corpus file '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("corpus file '" + path + "' is not valid JSON: " + e.what());
  }
  return corpus_from_json(j);
}

}  // namespace hsm
