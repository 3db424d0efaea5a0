#pragma once
//
// One-dimensional experiments: test functions built from polynomial bumps,
// graded quadrature for the Hardy term, the sup/energy/L^q ratios of the key
// 1D inequalities and their corollaries, an adversarial search over a bump
// family, and the Gagliardo-Nirenberg product lemma.
//

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hsm/constants.hpp"
#include "hsm/error.hpp"
#include "hsm/geometry.hpp"
#include "hsm/parallel.hpp"
#include "hsm/sphere_weight.hpp"

namespace hsm {

class SearchFailure : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

/// (1 - s^2)^m sum_k c_k T_k(s), s the affine image of (lo, hi) on (-1, 1);
/// zero outside (lo, hi).
struct BumpTerm {
  double lo = -1;
  double hi = 1;
  int m = 2;
  std::vector<double> coeffs{1.0};
};

namespace detail {

/// sum c_k T_k(s) and its derivative sum c_k k U_{k-1}(s).
inline std::pair<double, double> chebyshev(const std::vector<double>& c, double s) {
  double tkm1 = s, tk = 1;     // T_{-1} := s so the recurrence yields T_1 = s
  double ukm2 = -1, ukm1 = 0;  // U_{-2} := -1, U_{-1} = 0, so U_0 = 1
  double v = 0, d = 0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    v += c[k] * tk;
    d += c[k] * static_cast<double>(k) * ukm1;
    const double tn = 2 * s * tk - tkm1, un = 2 * s * ukm1 - ukm2;
    tkm1 = tk, tk = tn;
    ukm2 = ukm1, ukm1 = un;
  }
  return {v, d};
}

}  // namespace detail

class TestFunction1D {
 public:
  static constexpr double kMaxSampleSpacing = 1.0 / 1024;

  static TestFunction1D bumps(std::vector<BumpTerm> terms, std::string id = {}) {
    if (terms.empty()) throw InvalidInput("test function needs at least one term");
    for (const auto& t : terms) {
      if (!(t.lo < t.hi) || !std::isfinite(t.lo) || !std::isfinite(t.hi))
        throw InvalidInput("bump term needs finite lo < hi");
      if (t.m < 1) throw InvalidInput("bump vanishing order m must be >= 1");
      if (t.coeffs.empty()) throw InvalidInput("bump term needs coefficients");
      for (double c : t.coeffs)
        if (!std::isfinite(c)) throw InvalidInput("non-finite bump coefficient");
    }
    TestFunction1D f;
    f.terms_ = std::move(terms);
    f.id_ = std::move(id);
    return f;
  }

  /// Piecewise-linear interpolant of samples at lo + i (hi-lo)/(n-1).
  static TestFunction1D samples(double lo, double hi, std::vector<double> values, std::string id = {}) {
    if (values.size() < 3 || !(lo < hi)) throw InvalidInput("sampled function needs >= 3 samples on lo < hi");
    const double dx = (hi - lo) / static_cast<double>(values.size() - 1);
    if (dx > kMaxSampleSpacing * (1 + 1e-12)) throw InvalidInput("sample spacing must be <= 2^-10");
    for (double v : values)
      if (!std::isfinite(v)) throw InvalidInput("non-finite sample");
    TestFunction1D f;
    f.sample_lo_ = lo;
    f.sample_hi_ = hi;
    f.samples_ = std::move(values);
    f.id_ = std::move(id);
    return f;
  }

  bool sampled() const noexcept { return !samples_.empty(); }
  const std::vector<BumpTerm>& terms() const noexcept { return terms_; }
  const std::string& id() const noexcept { return id_; }

  double value(double t) const { return eval(t).first; }
  double derivative(double t) const { return eval(t).second; }

  std::pair<double, double> eval(double t) const {
    if (sampled()) {
      const double dx = sample_dx();
      if (t <= sample_lo_ || t >= sample_hi_) return {0, 0};
      std::size_t i = std::min<std::size_t>(static_cast<std::size_t>((t - sample_lo_) / dx), samples_.size() - 2);
      const double a = sample_lo_ + i * dx;
      const double slope = (samples_[i + 1] - samples_[i]) / dx;
      return {samples_[i] + slope * (t - a), slope};
    }
    double v = 0, d = 0;
    for (const auto& term : terms_) {
      if (!(t > term.lo && t < term.hi)) continue;
      const double scale = 2 / (term.hi - term.lo);
      const double s = (2 * t - term.lo - term.hi) / (term.hi - term.lo);
      const double w = 1 - s * s;
      const auto [p, dp] = detail::chebyshev(term.coeffs, s);
      const double wm = std::pow(w, term.m);
      v += wm * p;
      d += scale * (wm * dp - 2.0 * term.m * s * std::pow(w, term.m - 1) * p);
    }
    return {v, d};
  }

  /// Smallest closed interval containing the support.
  std::pair<double, double> support() const {
    if (sampled()) {
      std::size_t first = samples_.size(), last = 0;
      for (std::size_t i = 0; i < samples_.size(); ++i)
        if (samples_[i] != 0) first = std::min(first, i), last = i;
      if (first == samples_.size()) return {0, 0};
      const double dx = sample_dx();
      return {sample_lo_ + (first > 0 ? first - 1 : 0) * dx,
              sample_lo_ + std::min(last + 1, samples_.size() - 1) * dx};
    }
    double lo = kInf, hi = -kInf;
    for (const auto& t : terms_) lo = std::min(lo, t.lo), hi = std::max(hi, t.hi);
    return {lo, hi};
  }

  /// Points where the function may fail to be smooth.
  std::vector<double> breakpoints() const {
    std::vector<double> b;
    if (sampled()) {
      const auto [lo, hi] = support();
      const double dx = sample_dx();
      for (std::size_t i = 0; i < samples_.size(); ++i) {
        const double x = sample_lo_ + i * dx;
        if (x >= lo - 0.5 * dx && x <= hi + 0.5 * dx) b.push_back(x);
      }
      return b;
    }
    for (const auto& t : terms_) b.push_back(t.lo), b.push_back(t.hi);
    return b;
  }

  /// Grid maximum of |f| refined by parabolic interpolation and a short
  /// golden-section polish; returns (sup |f|, argmax).
  std::pair<double, double> sup_abs() const {
    if (sampled()) {
      double best = 0, arg = sample_lo_;
      for (std::size_t i = 0; i < samples_.size(); ++i)
        if (std::abs(samples_[i]) > best) best = std::abs(samples_[i]), arg = sample_lo_ + i * sample_dx();
      return {best, arg};
    }
    auto absf = [&](double t) { return std::abs(value(t)); };
    double best = 0, arg = 0, step = 0;
    for (const auto& term : terms_) {
      const double len = term.hi - term.lo;
      const int n = std::max(2048, static_cast<int>(std::ceil(len * 1024)));
      const double dx = len / n;
      for (int i = 1; i < n; ++i) {
        const double t = term.lo + i * dx;
        const double v = absf(t);
        if (v > best) best = v, arg = t, step = dx;
      }
    }
    if (best == 0) return {0, 0};
    double a = arg - step, b = arg + step;
    const double fa = absf(a), fm = best, fb = absf(b);
    const double den = fa - 2 * fm + fb;
    if (den < 0) {
      const double tv = arg + 0.5 * step * (fa - fb) / den;
      const double v = absf(tv);
      if (v > best) best = v, arg = tv;
    }
    const double r = 0.5 * (std::sqrt(5.0) - 1);
    for (int it = 0; it < 60; ++it) {
      const double c = b - r * (b - a), d = a + r * (b - a);
      if (absf(c) > absf(d)) b = d; else a = c;
    }
    const double tg = 0.5 * (a + b);
    const double vg = absf(tg);
    if (vg > best) best = vg, arg = tg;
    return {best, arg};
  }

 private:
  double sample_dx() const { return (sample_hi_ - sample_lo_) / static_cast<double>(samples_.size() - 1); }

  std::vector<BumpTerm> terms_;
  double sample_lo_ = 0, sample_hi_ = 0;
  std::vector<double> samples_;
  std::string id_;
};

// ---------------------------------------------------------------------------
// Quadrature.

namespace detail {

inline const std::pair<std::vector<double>, std::vector<double>>& gl16() {
  static const auto rule = gauss_legendre(16);
  return rule;
}

/// Visits (t, weight) quadrature nodes on [a, b], graded geometrically
/// toward both ends: t = a + (c - a) e^{-tau} on the left half and
/// t = b - (b - c) e^{-tau} on the right, tau in [0, 40] in chunks of 1/2.
template <typename Visit>
void graded_nodes(double a, double b, Visit&& visit) {
  if (!(b > a)) return;
  const auto& [x, w] = gl16();
  const double half = 0.5 * (b - a);
  for (int chunk = 0; chunk < 80; ++chunk) {
    const double t0 = 0.5 * chunk;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = std::exp(-(t0 + 0.25 * (x[i] + 1)));
      const double jw = 0.25 * w[i] * half * e;
      // Deep nodes round onto the endpoint; their weight is below ulp anyway.
      if (const double t = a + half * e; t > a) visit(t, jw);
      if (const double t = b - half * e; t < b) visit(t, jw);
    }
  }
}

template <typename G>
double graded_integral(double a, double b, G&& g) {
  double s = 0;
  graded_nodes(a, b, [&](double t, double w) { s += w * g(t); });
  return s;
}

/// Components of an IntervalUnion as (lo, hi) pairs.
inline std::vector<Interval> components(const Domain& omega) {
  const auto* iu = std::get_if<IntervalUnion>(&omega.shape());
  if (!iu) throw InvalidInput("expected a one-dimensional interval-union domain");
  return iu->intervals;
}

inline double dist_in(const Interval& iv, double t) { return std::min(t - iv.lo, iv.hi - t); }

}  // namespace detail

/// Integrals entering the ratios.
struct Integrals1D {
  double grad_p = 0;   // int |f'|^p
  double hardy_p = 0;  // ((p-1)/p)^p int |f|^p / dist^p
  double l2sq = 0;     // int |f|^2
  std::map<double, double> lq;  // q -> int |f|^q

  double form() const { return grad_p - hardy_p; }
};

/// Checks that f is supported in the closure of omega and that any contact
/// with the boundary has vanishing order >= 2.
inline void check_support(const TestFunction1D& f, const Domain& omega) {
  const auto comps = detail::components(omega);
  auto component_of = [&](double lo, double hi) -> const Interval* {
    for (const auto& c : comps)
      if (lo >= c.lo && hi <= c.hi) return &c;
    return nullptr;
  };
  if (f.sampled()) {
    const auto [lo, hi] = f.support();
    if (lo == hi) throw PreconditionViolation("test function vanishes identically");
    const Interval* c = component_of(lo, hi);
    if (!c || lo <= c->lo || hi >= c->hi)
      throw PreconditionViolation("sampled function support [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                  "] is not strictly inside the open set");
    return;
  }
  for (const auto& t : f.terms()) {
    const Interval* c = component_of(t.lo, t.hi);
    if (!c)
      throw PreconditionViolation("term support (" + std::to_string(t.lo) + ", " + std::to_string(t.hi) +
                                  ") leaves the open set");
    if ((t.lo == c->lo || t.hi == c->hi) && t.m < 2)
      throw PreconditionViolation("term support touches the boundary with vanishing order m = " +
                                  std::to_string(t.m) + " < 2");
  }
}

/// Integrals of f over omega for gradient power p and exponents qs.
inline Integrals1D integrals_1d(const TestFunction1D& f, const Domain& omega, double p,
                                const std::vector<double>& qs) {
  check_support(f, omega);
  const double coef = std::pow((p - 1) / p, p);
  const auto [slo, shi] = f.support();
  const std::vector<double> bps = f.breakpoints();
  std::vector<double> acc(qs.size(), 0.0);
  Integrals1D out;
  double hardy = 0;
  for (const auto& c : detail::components(omega)) {
    const double lo = std::max(c.lo, slo), hi = std::min(c.hi, shi);
    if (!(hi > lo)) continue;
    std::vector<double> pts{lo, hi};
    if (std::isfinite(c.lo) && std::isfinite(c.hi)) pts.push_back(0.5 * (c.lo + c.hi));
    for (double b : bps)
      if (b > lo && b < hi) pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      detail::graded_nodes(pts[i], pts[i + 1], [&](double t, double w) {
        const auto [v, d] = f.eval(t);
        const double av = std::abs(v), ad = std::abs(d);
        out.grad_p += w * (p == 2 ? ad * ad : std::pow(ad, p));
        if (av == 0) return;
        const double r = av / detail::dist_in(c, t);
        hardy += w * (p == 2 ? r * r : std::pow(r, p));
        out.l2sq += w * av * av;
        for (std::size_t k = 0; k < qs.size(); ++k) acc[k] += w * std::pow(av, qs[k]);
      });
    }
  }
  out.hardy_p = coef * hardy;
  for (std::size_t k = 0; k < qs.size(); ++k) out.lq[qs[k]] = acc[k];
  return out;
}

struct RatioResult {
  double ratio;
  double t_star;
};

namespace detail {

inline void require_positive_form(double form) {
  if (!(form > 0))
    throw NonpositiveForm("nonpositive Hardy form (" + std::to_string(form) +
                          "): refine grid or enlarge support margin");
}

}  // namespace detail

/// sup_t |f|^{q+2} / ( t[f] int |f|^q ) with weight 1/(4 dist(t, omega^c)^2).
inline RatioResult keycor_ratio(const TestFunction1D& f, const Domain& omega, double q) {
  if (!(q >= 2)) throw InvalidInput("q must be >= 2");
  const auto I = integrals_1d(f, omega, 2, {q});
  detail::require_positive_form(I.form());
  const auto [sup, t] = f.sup_abs();
  const double lr = (q + 2) * std::log(sup) - std::log(I.form()) - std::log(I.lq.at(q));
  return {std::exp(lr), t};
}

/// keycor_ratio for several q from one set of integrals.
inline std::vector<double> keycor_ratios(const TestFunction1D& f, const Domain& omega, const std::vector<double>& qs) {
  for (double q : qs)
    if (!(q >= 2)) throw InvalidInput("q must be >= 2");
  const auto I = integrals_1d(f, omega, 2, qs);
  detail::require_positive_form(I.form());
  const double ls = std::log(f.sup_abs().first);
  std::vector<double> out;
  for (double q : qs) out.push_back(std::exp((q + 2) * ls - std::log(I.form()) - std::log(I.lq.at(q))));
  return out;
}

/// The ratio on (-1, 1); the 1D constant satisfies C_q <= (q+2)^2.
inline RatioResult key_ratio(const TestFunction1D& f, double q) {
  static const Domain unit = Domain::interval(-1, 1);
  return keycor_ratio(f, unit, q);
}

/// sup |f|^q / ( t[f] (int f^2)^{2/(q-2)} (int |f|^q)^{(q-4)/(q-2)} ), q >= 4;
/// bounded by C_{q-2} <= q^2.
inline double keycor2_ratio(const TestFunction1D& f, const Domain& omega, double q) {
  if (!(q >= 4)) throw InvalidInput("keycor2 requires q >= 4");
  const auto I = integrals_1d(f, omega, 2, {q});
  detail::require_positive_form(I.form());
  const double sup = f.sup_abs().first;
  const double lr = q * std::log(sup) - std::log(I.form()) - 2 / (q - 2) * std::log(I.l2sq) -
                    (q - 4) / (q - 2) * std::log(I.lq.at(q));
  return std::exp(lr);
}

/// sup |f|^{q(p-1)+p} / ( t_p[f] (int |f|^q)^{p-1} ) on (-1, 1), q >= p >= 2.
inline RatioResult keyp_ratio(const TestFunction1D& f, double p, double q) {
  if (!(p >= 2)) throw InvalidInput("keyp requires p >= 2");
  if (!(q >= p)) throw InvalidInput("keyp requires q >= p");
  static const Domain unit = Domain::interval(-1, 1);
  const auto I = integrals_1d(f, unit, p, {q});
  if (!(I.form() > 0))
    throw NonpositiveForm("nonpositive p-form (" + std::to_string(I.form()) + ")");
  const auto [sup, t] = f.sup_abs();
  const double lr = (q * (p - 1) + p) * std::log(sup) - std::log(I.form()) - (p - 1) * std::log(I.lq.at(q));
  return {std::exp(lr), t};
}

// ---------------------------------------------------------------------------
// Corpus.

/// Seeded corpus of bump mixtures on (-1, 1): canonical profiles (1-t^2)^m,
/// shifted/scaled bumps, and random Chebyshev mixtures. Every member vanishes
/// to order >= 2 wherever it touches +-1.
inline std::vector<TestFunction1D> default_corpus(std::size_t count = 1000, std::uint64_t seed = 20240601) {
  std::vector<TestFunction1D> out;
  for (int m = 2; m <= 4 && out.size() < count; ++m)
    out.push_back(TestFunction1D::bumps({{-1, 1, m, {1.0}}}, "profile_m" + std::to_string(m)));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0, 1);
  std::normal_distribution<double> gauss;
  std::size_t k = 0;
  while (out.size() < count) {
    const int nterms = 1 + static_cast<int>(unif(rng) * 3);
    std::vector<BumpTerm> terms;
    for (int j = 0; j < nterms; ++j) {
      BumpTerm t;
      t.m = 2 + static_cast<int>(unif(rng) * 3);
      if (unif(rng) < 0.3) {
        t.lo = -1;
        t.hi = 1;
      } else {
        const double len = 0.05 + 1.9 * unif(rng);
        t.lo = -1 + (2 - len) * unif(rng);
        t.hi = std::min(1.0, t.lo + len);
      }
      const int K = 1 + static_cast<int>(unif(rng) * 6);
      t.coeffs.resize(K);
      for (int i = 0; i < K; ++i) t.coeffs[i] = gauss(rng) / (1 + i);
      terms.push_back(std::move(t));
    }
    out.push_back(TestFunction1D::bumps(std::move(terms), "mix_" + std::to_string(k++)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Adversarial search over span{(1 - t^2)^2 T_k(t) : k < M}.

struct SearchOptions {
  double q = 2;
  double p = 2;
  int family_dim = 8;
  int restarts = 20;
  int iterations = 60;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct SearchResult {
  std::vector<double> coeffs;
  double ratio = 0;
  int restart = -1;
  int failed_restarts = 0;
};

namespace detail {

inline TestFunction1D family_member(const std::vector<double>& c) {
  return TestFunction1D::bumps({{-1, 1, 2, c}});
}

inline double family_ratio(const std::vector<double>& c, double p, double q) {
  const auto f = family_member(c);
  return p == 2 ? key_ratio(f, q).ratio : keyp_ratio(f, p, q).ratio;
}

/// Quadrature nodes on (-1, 1) matching graded_integral over [-1,0], [0,1].
struct FamilyNodes {
  std::vector<double> t, w;
  Eigen::MatrixXd phi, dphi;  // node x basis
};

inline FamilyNodes family_nodes(int M) {
  FamilyNodes fn;
  for (auto [a, b] : {std::pair{-1.0, 0.0}, std::pair{0.0, 1.0}})
    graded_nodes(a, b, [&](double t, double w) { fn.t.push_back(t), fn.w.push_back(w); });
  const std::size_t n = fn.t.size();
  fn.phi.resize(n, M);
  fn.dphi.resize(n, M);
  for (int k = 0; k < M; ++k) {
    std::vector<double> c(k + 1, 0.0);
    c[k] = 1;
    const auto f = family_member(c);
    for (std::size_t i = 0; i < n; ++i) {
      const auto [v, d] = f.eval(fn.t[i]);
      fn.phi(i, k) = v;
      fn.dphi(i, k) = d;
    }
  }
  return fn;
}

/// Gradient of log R with respect to the coefficients.
inline Eigen::VectorXd family_log_gradient(const FamilyNodes& fn, const Eigen::VectorXd& c, double p, double q) {
  const Eigen::VectorXd f = fn.phi * c, df = fn.dphi * c;
  const Eigen::Index n = f.size(), M = c.size();
  const double coef = std::pow((p - 1) / p, p);
  double F = 0, Q = 0;
  Eigen::VectorXd gF_node(n), gFd_node(n), gQ_node(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = 1 - std::abs(fn.t[i]);
    const double af = std::abs(f[i]), adf = std::abs(df[i]);
    F += fn.w[i] * (std::pow(adf, p) - coef * std::pow(af / d, p));
    Q += fn.w[i] * std::pow(af, q);
    gFd_node[i] = fn.w[i] * p * std::pow(adf, p - 2) * df[i];
    gF_node[i] = -fn.w[i] * coef * p * std::pow(af, p - 2) * f[i] / std::pow(d, p);
    gQ_node[i] = fn.w[i] * q * std::pow(af, q - 2) * f[i];
  }
  const Eigen::VectorXd gF = fn.dphi.transpose() * gFd_node + fn.phi.transpose() * gF_node;
  const Eigen::VectorXd gQ = fn.phi.transpose() * gQ_node;
  // sup term by the envelope theorem at the maximiser.
  Eigen::VectorXd gS = Eigen::VectorXd::Zero(M);
  std::vector<double> cv(c.data(), c.data() + M);
  const auto fam = family_member(cv);
  const auto [sup, ts] = fam.sup_abs();
  for (Eigen::Index k = 0; k < M; ++k) {
    std::vector<double> ek(k + 1, 0.0);
    ek[k] = 1;
    gS[k] = family_member(ek).value(ts) / fam.value(ts);
  }
  const double ex = q * (p - 1) + p;
  return ex * gS - gF / F - (p - 1) * gQ / Q;
}

}  // namespace detail

/// Projected gradient ascent of log R on the unit sphere of coefficients,
/// with seeded restarts run in parallel and a deterministic reduction
/// (largest ratio, then lowest restart index).
inline SearchResult worst_case_search(const SearchOptions& opt) {
  if (opt.family_dim < 1) throw InvalidInput("family dimension must be >= 1");
  if (opt.restarts < 1) throw InvalidInput("need at least one restart");
  const int M = opt.family_dim;
  const auto nodes = detail::family_nodes(M);
  std::vector<SearchResult> per(opt.restarts);
  parallel_for(opt.restarts, opt.threads, [&](std::size_t r) {
    std::seed_seq ss{static_cast<std::uint64_t>(opt.seed), static_cast<std::uint64_t>(r)};
    std::mt19937_64 rng(ss);
    std::normal_distribution<double> g;
    Eigen::VectorXd c(M);
    if (r == 0) {
      c.setZero();
      c[0] = 1;
    } else {
      for (int k = 0; k < M; ++k) c[k] = g(rng);
      c.normalize();
    }
    auto ratio_of = [&](const Eigen::VectorXd& v) {
      try {
        return detail::family_ratio(std::vector<double>(v.data(), v.data() + M), opt.p, opt.q);
      } catch (const NonpositiveForm&) {
        return -1.0;
      }
    };
    double cur = ratio_of(c);
    SearchResult& out = per[r];
    out.restart = static_cast<int>(r);
    if (cur < 0) {
      out.failed_restarts = 1;
      return;
    }
    double step = 0.5;
    for (int it = 0; it < opt.iterations && M > 1; ++it) {
      Eigen::VectorXd grad = detail::family_log_gradient(nodes, c, opt.p, opt.q);
      grad -= grad.dot(c) * c;
      const double gn = grad.norm();
      if (!(gn > 1e-14) || !std::isfinite(gn)) break;
      grad /= gn;
      bool moved = false;
      for (double s = std::min(1.0, 2 * step); s > 1e-10; s *= 0.5) {
        const Eigen::VectorXd trial = (c + s * grad).normalized();
        const double v = ratio_of(trial);
        if (v > cur) {
          c = trial;
          cur = v;
          step = s;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    out.coeffs.assign(c.data(), c.data() + M);
    out.ratio = cur;
  });
  SearchResult best;
  for (const auto& r : per) {
    best.failed_restarts += r.failed_restarts;
    if (r.failed_restarts == 0 && (best.restart < 0 || r.ratio > best.ratio)) {
      best.coeffs = r.coeffs;
      best.ratio = r.ratio;
      best.restart = r.restart;
    }
  }
  if (best.restart < 0) throw SearchFailure("every restart hit a nonpositive form");
  return best;
}

// ---------------------------------------------------------------------------
// Gagliardo-Nirenberg product lemma.

struct GnCheck {
  double lhs;
  double rhs;
};

/// N = 2: f_j are vectors of length n (functions of one variable).
/// N = 3: f_j are n x n matrices; f_1(x2, x3), f_2(x1, x3), f_3(x1, x2).
/// Cell size h. lhs = || prod f_j(x~_j) ||_1, rhs = prod ||f_j||_{N-1}.
inline GnCheck gn_product_check(const std::vector<Eigen::MatrixXd>& f, double h) {
  if (!(h > 0)) throw InvalidInput("cell size must be positive");
  const std::size_t N = f.size();
  if (N != 2 && N != 3) throw InvalidInput("gn_product_check supports N = 2 or 3");
  if (N == 2) {
    for (const auto& fj : f)
      if (fj.cols() != 1 || fj.rows() != f[0].rows()) throw InvalidInput("grid mismatch across the f_j");
    const double a = f[0].cwiseAbs().sum() * h, b = f[1].cwiseAbs().sum() * h;
    return {a * b, a * b};
  }
  const Eigen::Index n = f[0].rows();
  for (const auto& fj : f)
    if (fj.rows() != n || fj.cols() != n) throw InvalidInput("grid mismatch across the f_j");
  const Eigen::MatrixXd A1 = f[0].cwiseAbs(), A2 = f[1].cwiseAbs(), A3 = f[2].cwiseAbs();
  // sum_{i,j,k} A1(j,k) A2(i,k) A3(i,j) = sum_{i,j} A3(i,j) (A2 A1^T)(i,j)
  const double lhs = A3.cwiseProduct(A2 * A1.transpose()).sum() * h * h * h;
  double rhs = 1;
  for (const auto& A : {A1, A2, A3}) rhs *= std::sqrt(A.squaredNorm() * h * h);
  return {lhs, rhs};
}

}  // namespace hsm
