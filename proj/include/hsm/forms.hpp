#pragma once
//
// Discrete Hardy-Sobolev-Maz'ya functionals on grid functions:
//
//   G[u] = sum_cells |grad u|^p h^N                 (forward differences)
//   H[u] = ((p-1)/p)^p sum_nodes |u|^p / w^p h^N    (collocation)
//   t[u] = G[u] - (1 - eps) H[u]
//

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>

#include "hsm/error.hpp"
#include "hsm/grid.hpp"
#include "hsm/operators.hpp"

namespace hsm {

struct FormParams {
  double p = 2;
  double epsilon = 0;
  WeightKind hardy_weight = WeightKind::davies;

  double hardy_coefficient() const { return std::pow((p - 1) / p, p); }
  void validate() const {
    if (!(p >= 1)) throw InvalidInput("p must be >= 1");
    if (!(epsilon >= 0 && epsilon <= 1)) throw InvalidInput("epsilon must lie in [0, 1]");
  }
};

namespace detail {

/// Calls f(cell, d) for every cell with all forward neighbours on the grid,
/// d = forward differences (u(c + e_a) - u(c)) / h.
template <typename F>
void for_each_cell(const Grid& g, const Eigen::VectorXd& u, F&& f) {
  const int nx = g.counts[0], ny = g.dim > 1 ? g.counts[1] : 1, nz = g.dim > 2 ? g.counts[2] : 1;
  const int ex = nx - 1, ey = g.dim > 1 ? ny - 1 : 1, ez = g.dim > 2 ? nz - 1 : 1;
  const double inv_h = 1.0 / g.h;
  Vec3 d = Vec3::Zero();
  for (int k = 0; k < ez; ++k)
    for (int j = 0; j < ey; ++j)
      for (int i = 0; i < ex; ++i) {
        const std::size_t c = g.linear(i, j, k);
        const double uc = u[c];
        bool any = uc != 0;
        for (int a = 0; a < g.dim; ++a) {
          d[a] = (u[c + g.stride(a)] - uc) * inv_h;
          any = any || d[a] != 0;
        }
        if (any) f(c, d);
      }
}

inline void check_weight(const GridFunction& u, const WeightField& w, const FormParams& params) {
  if (params.hardy_weight == WeightKind::none) return;
  if (w.values.size() != static_cast<Eigen::Index>(u.grid_domain().grid().size()))
    throw InvalidInput("weight field does not match the grid");
  if (w.kind != params.hardy_weight) throw InvalidInput("weight field kind does not match the form parameters");
  if (w.kind == WeightKind::davies && w.p != params.p)
    throw InvalidInput("weight field p does not match the form parameters");
  for (std::size_t n : u.grid_domain().active_nodes())
    if (u[n] != 0 && !w.present(n))
      throw InvalidInput("missing weight value under the support of u (" + detail::describe_node(u.grid_domain().grid(), n) + ")");
}

}  // namespace detail

inline double gradient_power_integral(const GridFunction& u, double p) {
  if (!(p >= 1)) throw InvalidInput("p must be >= 1");
  const Grid& g = u.grid_domain().grid();
  double s = 0;
  detail::for_each_cell(g, u.values(), [&](std::size_t, const Vec3& d) {
    const double n2 = d.squaredNorm();
    s += p == 2 ? n2 : std::pow(n2, 0.5 * p);
  });
  return s * g.cell_volume();
}

inline double lq_norm(const GridFunction& u, double q) {
  if (!(q >= 1)) throw InvalidInput("q must be >= 1");
  double s = 0;
  for (std::size_t n : u.grid_domain().active_nodes()) s += std::pow(std::abs(u[n]), q);
  return std::pow(s * u.grid_domain().grid().cell_volume(), 1.0 / q);
}

/// Unregularized Hardy term ((p-1)/p)^p sum |u|^p / w^p h^N.
inline double hardy_integral(const GridFunction& u, const WeightField& w, const FormParams& params) {
  if (params.hardy_weight == WeightKind::none) return 0;
  detail::check_weight(u, w, params);
  double s = 0;
  for (std::size_t n : u.grid_domain().active_nodes()) {
    if (u[n] == 0) continue;
    s += std::pow(std::abs(u[n]) / w.values[n], params.p);
  }
  return params.hardy_coefficient() * s * u.grid_domain().grid().cell_volume();
}

/// t[u]. Negative values are returned as they are.
inline double hsm_form(const GridFunction& u, const WeightField& w, const FormParams& params) {
  params.validate();
  return gradient_power_integral(u, params.p) - (1 - params.epsilon) * hardy_integral(u, w, params);
}

inline double hsm_quotient(const GridFunction& u, const WeightField& w, const FormParams& params, double q) {
  const double nq = lq_norm(u, q);
  if (!(nq > 0)) throw InvalidInput("quotient undefined: u has zero L^q norm");
  return hsm_form(u, w, params) / std::pow(nq, params.p);
}

/// (N/2)(1 - 2/q).
inline double interpolation_theta(int dim, double q) { return 0.5 * dim * (1 - 2 / q); }

/// t[u]^theta ||u||_2^{2(1-theta)} / ||u||_q^2 (p = 2).
inline double interpolation_quotient(const GridFunction& u, const WeightField& w, const FormParams& params, double q) {
  const int dim = u.grid_domain().dimension();
  if (params.p != 2) throw InvalidInput("interpolation quotient is defined for p = 2");
  if (!(q >= 2)) throw InvalidInput("q must be >= 2");
  if (dim >= 3 && q > 2.0 * dim / (dim - 2)) throw InvalidInput("q exceeds the Sobolev exponent");
  const double t = hsm_form(u, w, params);
  if (t < 0) throw NonpositiveForm("form negative (" + std::to_string(t) + ") - refine grid");
  const double nq = lq_norm(u, q);
  if (!(nq > 0)) throw InvalidInput("quotient undefined: u has zero L^q norm");
  const double theta = interpolation_theta(dim, q);
  const double n2 = lq_norm(u, 2);
  return std::pow(t, theta) * std::pow(n2, 2 * (1 - theta)) / (nq * nq);
}

struct HhlCheck {
  double lhs;
  double rhs;
  double slack;
};

/// t[u] against K |Omega|^{-2/N} ||u||_2^2, |Omega| by node counting.
inline HhlCheck hhl_check(const GridFunction& u, const WeightField& w, double K, const FormParams& params = {}) {
  const GridDomain& gd = u.grid_domain();
  if (!gd.domain().bounded()) throw InvalidInput("domain must be bounded");
  if (gd.dimension() < 3) throw InvalidInput("hhl_check requires N >= 3");
  const double lhs = hsm_form(u, w, params);
  const double n2 = lq_norm(u, 2);
  const double rhs = K * std::pow(gd.measure(), -2.0 / gd.dimension()) * n2 * n2;
  return {lhs, rhs, lhs - rhs};
}

// ---------------------------------------------------------------------------
// Quotient minimization.

enum class Objective {
  hsm_quotient,  // t[u] / ||u||_q^p
  hardy_ratio,   // G[u] / H[u]  (p = 2 gives int |u'|^2 / int u^2/(4 w^2))
};

struct QuotientValue {
  double value;
  Eigen::VectorXd gradient;  // over the active nodes
};

/// Value and analytic gradient of the objective with respect to the active
/// node values.
inline QuotientValue quotient_with_gradient(const GridFunction& u, const WeightField& w, const FormParams& params,
                                            double q, Objective obj = Objective::hsm_quotient) {
  params.validate();
  const GridDomain& gd = u.grid_domain();
  const Grid& g = gd.grid();
  const double vol = g.cell_volume();
  const double p = params.p;
  const bool hardy = params.hardy_weight != WeightKind::none;
  if (hardy) detail::check_weight(u, w, params);

  Eigen::VectorXd dG = Eigen::VectorXd::Zero(g.size());
  double G = 0;
  detail::for_each_cell(g, u.values(), [&](std::size_t c, const Vec3& d) {
    const double n2 = d.squaredNorm();
    if (n2 == 0) return;
    const double gp = p == 2 ? n2 : std::pow(n2, 0.5 * p);
    G += gp;
    const double f = p * (p == 2 ? 1.0 : std::pow(n2, 0.5 * p - 1)) / g.h;
    for (int a = 0; a < g.dim; ++a) {
      dG[c + g.stride(a)] += f * d[a];
      dG[c] -= f * d[a];
    }
  });
  G *= vol;
  dG *= vol;

  const auto& act = gd.active_nodes();
  const std::size_t m = act.size();
  Eigen::VectorXd gG(m), gH = Eigen::VectorXd::Zero(m), gN(m);
  double H = 0, Nq = 0;
  const double coef = params.hardy_coefficient();
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t n = act[k];
    const double un = u[n];
    gG[k] = dG[n];
    const double au = std::abs(un);
    if (hardy && un != 0) {
      const double wp = std::pow(w.values[n], p);
      H += std::pow(au, p) / wp;
      gH[k] = p * std::pow(au, p - 2) * un / wp;
    }
    if (obj == Objective::hsm_quotient) {
      Nq += std::pow(au, q);
      gN[k] = un == 0 ? 0.0 : std::pow(au, q - 2) * un;
    }
  }
  H *= coef * vol;
  gH *= coef * vol;

  if (obj == Objective::hardy_ratio) {
    if (!(H > 0)) throw InvalidInput("Hardy ratio undefined: Hardy term vanishes");
    return {G / H, (gG - (G / H) * gH) / H};
  }
  Nq *= vol;
  if (!(Nq > 0)) throw InvalidInput("quotient undefined: u has zero L^q norm");
  const double F = G - (1 - params.epsilon) * H;
  const Eigen::VectorXd gF = gG - (1 - params.epsilon) * gH;
  const double den = std::pow(Nq, p / q);                      // ||u||_q^p
  const Eigen::VectorXd gden = (p * std::pow(Nq, p / q - 1) * vol) * gN;  // d/du ||u||_q^p
  return {F / den, (gF * den - F * gden) / (den * den)};
}

struct MinimizeOptions {
  int iterations = 200;
  double initial_step = 0.1;  // relative to ||u||
  int max_halvings = 40;
  bool sobolev_preconditioner = false;
  Objective objective = Objective::hsm_quotient;
};

struct TraceEntry {
  int iteration;
  double quotient;
  double step;
};

struct MinimizeResult {
  GridFunction best;
  std::vector<TraceEntry> trace;
  bool stalled = false;  // stopped because backtracking found no decrease
};

/// Normalized gradient descent with backtracking; u is renormalized to
/// ||u||_q = 1 (or ||u||_2 = 1 for the Hardy ratio) after every step, so the
/// trace is non-increasing. Deterministic for a given initial function.
inline MinimizeResult minimize_quotient(const GridFunction& init, const WeightField& w, const FormParams& params,
                                        double q, const MinimizeOptions& opt = {}) {
  const GridDomainPtr gd = init.grid_domain_ptr();
  const double vol = gd->grid().cell_volume();
  const double norm_exp = opt.objective == Objective::hardy_ratio ? 2.0 : q;
  auto normalize = [&](Eigen::VectorXd x) {
    double s = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]), norm_exp);
    s = std::pow(s * vol, 1.0 / norm_exp);
    if (!(s > 0)) throw InvalidInput("initial function has zero norm");
    return Eigen::VectorXd(x / s);
  };
  std::optional<Eigen::SimplicialLDLT<SparseMatrix>> precond;
  if (opt.sobolev_preconditioner) {
    precond.emplace(laplacian_matrix(*gd));
    if (precond->info() != Eigen::Success) throw NumericFailure("preconditioner factorization failed");
  }
  auto evaluate = [&](const Eigen::VectorXd& x, int it) {
    auto r = quotient_with_gradient(GridFunction::from_unknowns(gd, x), w, params, q, opt.objective);
    if (!std::isfinite(r.value) || !r.gradient.allFinite())
      throw NumericFailure("non-finite quotient at iterate " + std::to_string(it));
    return r;
  };

  Eigen::VectorXd x = normalize(init.unknowns());
  auto cur = evaluate(x, 0);
  MinimizeResult res{GridFunction::from_unknowns(gd, x), {{0, cur.value, 0.0}}, false};
  double step = opt.initial_step;
  for (int it = 1; it <= opt.iterations; ++it) {
    Eigen::VectorXd dir = precond ? Eigen::VectorXd(precond->solve(cur.gradient)) : cur.gradient;
    const double dn = dir.norm();
    if (!(dn > 0)) {
      res.stalled = true;
      break;
    }
    dir *= x.norm() / dn;
    bool accepted = false;
    double s = std::min(1.0, 2 * step);
    for (int halving = 0; halving <= opt.max_halvings; ++halving, s *= 0.5) {
      Eigen::VectorXd trial = x - s * dir;
      if (trial.norm() == 0) continue;
      trial = normalize(std::move(trial));
      auto val = evaluate(trial, it);
      if (val.value < cur.value) {
        x = std::move(trial);
        cur = std::move(val);
        step = s;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.stalled = true;
      break;
    }
    res.trace.push_back({it, cur.value, step});
  }
  res.best = GridFunction::from_unknowns(gd, x);
  return res;
}

}  // namespace hsm
