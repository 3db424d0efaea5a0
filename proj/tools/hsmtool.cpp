// hsmtool: command-line driver for the weight, 1D, quotient, spectral and
// constant computations. Exit codes: 0 pass, 2 input error, 3 numeric
// failure, 4 inequality violation or nonpositive form.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hsm/hsm.hpp"

namespace {

using namespace hsm;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitViolation = 4;

struct Global {
  std::uint64_t seed = 20240601;
  int threads = 1;
  std::string out;
};

/// Raised after the report is written when some check failed.
struct Violation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const Global& g, const std::string& text) {
  if (g.out.empty() || g.out == "-")
    std::cout << text;
  else
    write_file(g.out, text);
}

std::string file_hash(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return hex64(fnv1a(ss.str()));
}

RunManifest manifest(const std::string& sub, const Global& g) {
  RunManifest m;
  m.subcommand = sub;
  m.add("seed", std::to_string(g.seed));
  m.add("threads", std::to_string(g.threads));
  return m;
}

void add_domain(RunManifest& m, const std::string& path, const Domain& d) {
  m.add("input.domain", path);
  m.add("input.domain.file_hash", file_hash(path));
  m.add("domain_hash", domain_hash(d));
}

SphereQuadrature quadrature(int dim, int angles, int polar, int azimuth) {
  if (dim == 1) return SphereQuadrature::make_1d();
  if (dim == 2) return SphereQuadrature::make_2d(angles);
  return SphereQuadrature::make_3d(polar, azimuth);
}

void add_quadrature(RunManifest& m, int dim, const SphereQuadrature& q) {
  if (dim == 2) m.add("quadrature.angles", std::to_string(q.polar));
  if (dim == 3) {
    m.add("quadrature.polar", std::to_string(q.polar));
    m.add("quadrature.azimuth", std::to_string(q.azimuth));
  }
}

// ---------------------------------------------------------------------------

struct WeightArgs {
  std::string domain;
  double p = 2;
  double h = 1.0 / 32;
  std::string kind = "davies";
  int angles = SphereQuadrature::kDefaultAngles2D;
  int polar = SphereQuadrature::kDefaultPolar3D;
  int azimuth = SphereQuadrature::kDefaultAzimuth3D;
};

int cmd_weight(const Global& g, const WeightArgs& a) {
  const Domain d = load_domain(a.domain);
  const WeightKind kind = weight_kind_from_string(a.kind);
  if (kind == WeightKind::none) throw InvalidInput("weight kind 'none' has nothing to export");
  const auto gd = GridDomain::make(d, a.h);
  const SphereQuadrature quad = quadrature(d.dimension(), a.angles, a.polar, a.azimuth);
  RunManifest m = manifest("weight", g);
  add_domain(m, a.domain, d);
  m.add("kind", a.kind);
  m.add("p", a.p);
  m.add("h", a.h);
  add_quadrature(m, d.dimension(), quad);
  const WeightField w = weight_field(gd, kind, a.p, quad, g.threads);
  emit(g, weight_csv(w, m));
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct Verify1dArgs {
  std::string corpus;
  std::size_t count = 1000;
  std::string domain;
  std::vector<double> qs;
  std::vector<double> ps{2};
  int search_restarts = 0;
};

int cmd_verify1d(const Global& g, const Verify1dArgs& a) {
  if (a.qs.empty()) throw InvalidInput("empty q list");
  if (a.ps.empty()) throw InvalidInput("empty p list");
  for (double q : a.qs)
    if (!(q >= 2)) throw InvalidInput("every q must be >= 2");
  for (double p : a.ps)
    if (!(p >= 2)) throw InvalidInput("every p must be >= 2");
  const Domain omega = a.domain.empty() ? Domain::interval(-1, 1) : load_domain(a.domain);
  if (omega.dimension() != 1) throw InvalidInput("verify-1d needs a one-dimensional domain");
  const bool unit = a.domain.empty() || domain_hash(omega) == domain_hash(Domain::interval(-1, 1));

  RunManifest m = manifest("verify-1d", g);
  std::vector<TestFunction1D> corpus;
  if (a.corpus.empty()) {
    corpus = default_corpus(a.count, g.seed);
    m.add("input.corpus", "default");
    m.add("corpus_count", std::to_string(a.count));
  } else {
    corpus = load_corpus(a.corpus);
    m.add("input.corpus", a.corpus);
    m.add("input.corpus.file_hash", file_hash(a.corpus));
  }
  if (!a.domain.empty()) add_domain(m, a.domain, omega);
  std::string qlist, plist;
  for (double q : a.qs) qlist += (qlist.empty() ? "" : " ") + fmt(q);
  for (double p : a.ps) plist += (plist.empty() ? "" : " ") + fmt(p);
  m.add("q", qlist);
  m.add("p", plist);
  m.add("search_restarts", std::to_string(a.search_restarts));

  CsvWriter csv(m, {"function", "q", "p", "ratio", "bound", "margin", "status"});
  std::vector<std::string> bad_functions;
  bool violated = false;
  for (const auto& f : corpus) {
    const std::string id = f.id();
    for (double p : a.ps) {
      if (p != 2 && !unit) throw InvalidInput("p != 2 is evaluated on (-1, 1) only");
      for (double q : a.qs) {
        if (p != 2 && q < p) continue;
        try {
          if (p == 2) {
            const double r = keycor_ratio(f, omega, q).ratio;
            const double b = cq_bound(q);
            violated = violated || r > b;
            csv.row({id, fmt(q), fmt(p), fmt(r), fmt(b), fmt(b - r), r > b ? "violation" : "ok"});
          } else {
            const double r = keyp_ratio(f, p, q).ratio;
            csv.row({id, fmt(q), fmt(p), fmt(r), "none", "none", "reported"});
          }
        } catch (const PreconditionViolation& e) {
          bad_functions.push_back(id + " (" + e.what() + ")");
          csv.row({id, fmt(q), fmt(p), "nan", "nan", "nan", "precondition"});
        } catch (const NonpositiveForm& e) {
          bad_functions.push_back(id + " (" + e.what() + ")");
          csv.row({id, fmt(q), fmt(p), "nan", "nan", "nan", "nonpositive_form"});
        }
      }
    }
  }
  if (a.search_restarts > 0) {
    for (double p : a.ps)
      for (double q : a.qs) {
        if (q < p) continue;
        SearchOptions so;
        so.q = q;
        so.p = p;
        so.restarts = a.search_restarts;
        so.seed = g.seed;
        so.threads = g.threads;
        const auto sr = worst_case_search(so);
        if (p == 2) {
          const double b = cq_bound(q);
          violated = violated || sr.ratio > b;
          csv.row({"search", fmt(q), fmt(p), fmt(sr.ratio), fmt(b), fmt(b - sr.ratio),
                   sr.ratio > b ? "violation" : "ok"});
        } else {
          csv.row({"search", fmt(q), fmt(p), fmt(sr.ratio), "none", "none", "reported"});
        }
      }
  }
  emit(g, csv.str());
  if (!bad_functions.empty()) {
    std::string msg = "functions failing the preconditions or with a nonpositive form:";
    std::sort(bad_functions.begin(), bad_functions.end());
    bad_functions.erase(std::unique(bad_functions.begin(), bad_functions.end()), bad_functions.end());
    for (const auto& b : bad_functions) msg += "\n  " + b;
    throw Violation(msg);
  }
  if (violated) throw Violation("some ratio exceeds (q+2)^2");
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct GridArgs {
  std::string domain;
  double h = 1.0 / 32;
  double p = 2;
  double q = 6;
  double eps = 0;
  std::string weight = "davies";
};

struct GridSetup {
  Domain domain;
  GridDomainPtr gd;
  WeightField w;
  FormParams params;
};

GridSetup grid_setup(const Global& g, const GridArgs& a, RunManifest& m) {
  GridSetup s{load_domain(a.domain), nullptr, {}, {}};
  s.gd = GridDomain::make(s.domain, a.h);
  if (s.gd->unknowns() == 0) throw InvalidInput("no active grid nodes; refine h");
  s.params.p = a.p;
  s.params.epsilon = a.eps;
  s.params.hardy_weight = weight_kind_from_string(a.weight);
  s.params.validate();
  add_domain(m, a.domain, s.domain);
  m.add("h", a.h);
  m.add("p", a.p);
  m.add("q", a.q);
  m.add("epsilon", a.eps);
  m.add("weight", a.weight);
  if (s.params.hardy_weight != WeightKind::none) {
    const SphereQuadrature quad = SphereQuadrature::make(s.domain.dimension());
    add_quadrature(m, s.domain.dimension(), quad);
    s.w = weight_field(s.gd, s.params.hardy_weight, a.p, quad, g.threads);
  } else {
    s.w = weight_field(s.gd, WeightKind::none, a.p, g.threads);
  }
  return s;
}

struct QuotientArgs : GridArgs {
  std::size_t count = 24;
};

int cmd_quotient(const Global& g, const QuotientArgs& a) {
  RunManifest m = manifest("quotient", g);
  const GridSetup s = grid_setup(g, a, m);
  m.add("corpus_count", std::to_string(a.count));
  CsvWriter csv(m, {"function", "gradient", "hardy", "form", "lq_norm", "quotient"});
  std::vector<std::string> bad;
  for (const auto& f : grid_corpus(s.domain, a.count, g.seed)) {
    const GridFunction u = f.sample(s.gd);
    const double nq = lq_norm(u, a.q);
    if (!(nq > 0)) {
      bad.push_back(f.id + " (vanishes on the grid)");
      continue;
    }
    const double grad = gradient_power_integral(u, a.p);
    const double hardy = s.params.hardy_weight == WeightKind::none ? 0.0 : hardy_integral(u, s.w, s.params);
    const double form = grad - (1 - a.eps) * hardy;
    if (!(form > 0)) bad.push_back(f.id + " (form " + fmt(form) + ")");
    csv.row({f.id, fmt(grad), fmt(hardy), fmt(form), fmt(nq), fmt(form / std::pow(nq, a.p))});
  }
  emit(g, csv.str());
  if (!bad.empty()) {
    std::string msg = "nonpositive discrete forms:";
    for (const auto& b : bad) msg += "\n  " + b;
    throw Violation(msg);
  }
  return kExitOk;
}

struct MinimizeArgs : GridArgs {
  int iterations = 200;
  double step = 0.1;
  bool precondition = false;
  std::string objective = "hsm";
};

int cmd_minimize(const Global& g, const MinimizeArgs& a) {
  RunManifest m = manifest("minimize", g);
  const GridSetup s = grid_setup(g, a, m);
  MinimizeOptions opt;
  opt.iterations = a.iterations;
  opt.initial_step = a.step;
  opt.sobolev_preconditioner = a.precondition;
  if (a.objective == "hsm")
    opt.objective = Objective::hsm_quotient;
  else if (a.objective == "hardy")
    opt.objective = Objective::hardy_ratio;
  else
    throw InvalidInput("unknown objective '" + a.objective + "' (hsm or hardy)");
  m.add("objective", a.objective);
  m.add("iterations", std::to_string(a.iterations));
  m.add("initial_step", a.step);
  m.add("preconditioner", a.precondition ? "sobolev" : "none");
  // The seed picks the starting function: the first random mixture of the
  // seeded corpus.
  const auto corpus = grid_corpus(s.domain, 8, g.seed);
  const CorpusFunction* start = &corpus.back();
  for (const auto& f : corpus)
    if (f.id.rfind("mix_", 0) == 0) {
      start = &f;
      break;
    }
  m.add("initial_function", start->id);
  const GridFunction u0 = start->sample(s.gd);
  if (!(lq_norm(u0, 2) > 0)) throw InvalidInput("initial function vanishes on the grid; refine h");
  const MinimizeResult r = minimize_quotient(u0, s.w, s.params, a.q, opt);
  m.add("final_quotient", r.trace.back().quotient);
  m.add("stalled", r.stalled ? "true" : "false");
  emit(g, trace_csv(r.trace, m));
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SpectrumArgs {
  std::string domain;
  double h = 1.0 / 64;
  double eps = 0.01;
  double depth = 100;
  double width = 0.2;
  double gamma = 1;
  bool list_eigenvalues = false;
};

int cmd_spectrum(const Global& g, const SpectrumArgs& a) {
  const Domain d = load_domain(a.domain);
  const int N = d.dimension();
  RunManifest m = manifest("spectrum", g);
  add_domain(m, a.domain, d);
  m.add("h", a.h);
  m.add("epsilon", a.eps);
  m.add("well_depth", a.depth);
  m.add("well_width", a.width);
  const auto gd = GridDomain::make(d, a.h);
  if (gd->unknowns() == 0) throw InvalidInput("no active grid nodes; refine h");
  const SphereQuadrature quad = SphereQuadrature::make(N);
  add_quadrature(m, N, quad);
  const WeightField w = weight_field(gd, WeightKind::davies, 2, quad, g.threads);
  const auto& bb = d.bounds();
  const Vec3 c = 0.5 * (bb.lo + bb.hi);
  if (!(a.width > 0)) throw InvalidInput("well width must be positive");
  const Potential V = Potential::sample(*gd, [&](const Vec3& x) {
    return -a.depth * std::exp(-(x - c).squaredNorm() / (2 * a.width * a.width));
  });

  nlohmann::ordered_json j;
  SpectralReport rep;
  ConstantChain chain;
  if (N == 3) {
    chain = constant_chain(3);
    rep = clr_bound_check(gd, w, V, *chain.L_N, a.eps);
    j["check"] = "clr";
    j["constant"] = *chain.L_N;
  } else {
    m.add("gamma", a.gamma);
    chain = constant_chain(N, 2, std::nullopt, a.gamma);
    if (!chain.L_gamma_tilde) throw InvalidInput("no Lieb-Thirring constant for this gamma");
    rep = lieb_thirring_check(gd, w, V, a.gamma, *chain.L_gamma_tilde, a.eps);
    j["check"] = "lieb_thirring";
    j["gamma"] = a.gamma;
    j["chain_q"] = chain.q;
    j["constant"] = *chain.L_gamma_tilde;
  }
  j["dimension"] = N;
  j["unknowns"] = gd->unknowns();
  j["count"] = rep.count;
  j["indeterminate"] = rep.indeterminate;
  j["statistic"] = rep.statistic;
  j["bound"] = rep.bound;
  j["slack"] = rep.slack;
  j["method"] = rep.method;
  j["notes"] = rep.notes;
  if (a.list_eigenvalues && rep.eigenvalues) j["eigenvalues"] = *rep.eigenvalues;
  nlohmann::ordered_json out;
  out["manifest"] = m.to_json();
  out["report"] = j;
  emit(g, out.dump(2) + "\n");
  if (rep.slack < 0) throw Violation("bound violated: slack " + fmt(rep.slack));
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ConstantsArgs {
  int N = 3;
  double p = 2;
  double q = 0;  // 0: default for N
  double gamma_tilde = 1;
};

int cmd_constants(const Global& g, const ConstantsArgs& a) {
  RunManifest m = manifest("constants", g);
  m.add("N", std::to_string(a.N));
  m.add("p", a.p);
  if (a.q > 0) m.add("q", a.q);
  if (a.N < 3) m.add("gamma_tilde", a.gamma_tilde);
  const ConstantChain c =
      constant_chain(a.N, a.p, a.q > 0 ? std::optional<double>(a.q) : std::nullopt, a.gamma_tilde);
  CsvWriter csv(m, {"name", "value", "derivation"});
  auto prov = [&](const std::string& k) {
    auto it = c.provenance.find(k);
    return it == c.provenance.end() ? std::string() : "\"" + it->second + "\"";
  };
  auto row = [&](const std::string& name, const std::optional<double>& v, const std::string& key) {
    csv.row({name, v ? fmt(*v) : "none", prov(key)});
  };
  row("q", c.q, "q");
  row("C_q", c.C_q, "C_q");
  if (a.N >= 3) {
    row("K_" + std::to_string(a.N), c.K, "K");
    row("L_" + std::to_string(a.N), c.L_N, "L_N");
    row("kappa", c.kappa, "kappa");
  } else {
    row("theta", c.theta, "theta");
    row("K_theta", c.K, "K");
    row("gamma", c.gamma, "gamma");
    row("kappa", c.kappa, "kappa");
    row("gamma_tilde", c.gamma_tilde, "");
    row("L_gamma_tilde", c.L_gamma_tilde, "L_gamma~");
  }
  emit(g, csv.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardy-Sobolev-Maz'ya numerical toolkit"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");
  Global g;
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::Range(1, 1024))->capture_default_str();
  app.add_option("--out", g.out, "output file (default stdout)");

  WeightArgs wa;
  auto* weight = app.add_subcommand("weight", "sample the Davies weight on a grid");
  weight->add_option("--domain", wa.domain, "domain spec (JSON)")->required();
  weight->add_option("--p", wa.p, "weight exponent")->capture_default_str();
  weight->add_option("--h", wa.h, "grid spacing")->capture_default_str();
  weight->add_option("--kind", wa.kind, "davies or euclidean")->capture_default_str();
  weight->add_option("--angles", wa.angles, "2D quadrature angles")->capture_default_str();
  weight->add_option("--polar", wa.polar, "3D polar nodes")->capture_default_str();
  weight->add_option("--azimuth", wa.azimuth, "3D azimuth nodes")->capture_default_str();

  Verify1dArgs va;
  std::string qlist, plist = "2";
  auto* verify = app.add_subcommand("verify-1d", "check the 1D ratio against (q+2)^2 on a corpus");
  verify->add_option("--corpus", va.corpus, "corpus file (JSON); default: seeded corpus");
  verify->add_option("--count", va.count, "size of the seeded corpus")->capture_default_str();
  verify->add_option("--domain", va.domain, "1D domain spec (default (-1, 1))");
  verify->add_option("--q", qlist, "comma-separated q values")->required();
  verify->add_option("--p", plist, "comma-separated p values")->capture_default_str();
  verify->add_option("--search-restarts", va.search_restarts, "adversarial search restarts (0 = off)");

  QuotientArgs qa;
  MinimizeArgs ma;
  auto grid_opts = [](CLI::App* sub, GridArgs& a) {
    sub->add_option("--domain", a.domain, "domain spec (JSON)")->required();
    sub->add_option("--h", a.h, "grid spacing")->capture_default_str();
    sub->add_option("--p", a.p, "gradient exponent")->capture_default_str();
    sub->add_option("--q", a.q, "L^q exponent")->capture_default_str();
    sub->add_option("--eps", a.eps, "Hardy term scaled by 1 - eps")->capture_default_str();
    sub->add_option("--weight", a.weight, "davies, euclidean or none")->capture_default_str();
  };
  auto* quotient = app.add_subcommand("quotient", "evaluate the quotient on a seeded grid corpus");
  grid_opts(quotient, qa);
  quotient->add_option("--count", qa.count, "corpus size")->capture_default_str();
  auto* minimize = app.add_subcommand("minimize", "descend on the quotient from a seeded start");
  grid_opts(minimize, ma);
  minimize->add_option("--iterations", ma.iterations)->capture_default_str();
  minimize->add_option("--step", ma.step, "initial relative step")->capture_default_str();
  minimize->add_flag("--precondition", ma.precondition, "Sobolev-preconditioned gradient");
  minimize->add_option("--objective", ma.objective, "hsm or hardy")->capture_default_str();

  SpectrumArgs sa;
  auto* spectrum = app.add_subcommand("spectrum", "negative spectrum of a Gaussian well against the bound");
  spectrum->add_option("--domain", sa.domain, "domain spec (JSON)")->required();
  spectrum->add_option("--h", sa.h, "grid spacing")->capture_default_str();
  spectrum->add_option("--eps", sa.eps, "Hardy regularization")->capture_default_str();
  spectrum->add_option("--depth", sa.depth, "well depth")->capture_default_str();
  spectrum->add_option("--width", sa.width, "well width")->capture_default_str();
  spectrum->add_option("--gamma", sa.gamma, "Riesz exponent (N = 1, 2)")->capture_default_str();
  spectrum->add_flag("--eigenvalues", sa.list_eigenvalues, "include the negative eigenvalues");

  ConstantsArgs ca;
  auto* constants = app.add_subcommand("constants", "print the chain of constants");
  constants->add_option("--N", ca.N, "dimension")->capture_default_str();
  constants->add_option("--p", ca.p)->capture_default_str();
  constants->add_option("--q", ca.q, "q (N = 1, 2; default: best for gamma~)");
  constants->add_option("--gamma-tilde", ca.gamma_tilde)->capture_default_str();

  for (auto* sub : app.get_subcommands({})) {
    sub->set_help_flag("--help", "print help");
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  auto parse_list = [](const std::string& s, const char* what) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.find_first_not_of(" \t") == std::string::npos) continue;
      double x = 0;
      const char* b = item.data() + item.find_first_not_of(" \t");
      const auto r = std::from_chars(b, item.data() + item.size(), x);
      if (r.ec != std::errc()) throw InvalidInput(std::string("bad ") + what + " value '" + item + "'");
      v.push_back(x);
    }
    return v;
  };

  try {
    if (*weight) return cmd_weight(g, wa);
    if (*verify) {
      va.qs = parse_list(qlist, "q");
      va.ps = parse_list(plist, "p");
      return cmd_verify1d(g, va);
    }
    if (*quotient) return cmd_quotient(g, qa);
    if (*minimize) return cmd_minimize(g, ma);
    if (*spectrum) return cmd_spectrum(g, sa);
    if (*constants) return cmd_constants(g, ca);
  } catch (const Violation& e) {
    std::cerr << "violation: " << e.what() << "\n";
    return kExitViolation;
  } catch (const NonpositiveForm& e) {
    std::cerr << "nonpositive form: " << e.what() << "\n";
    return kExitViolation;
  } catch (const InvalidInput& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitInput;
}
