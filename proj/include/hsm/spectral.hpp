#pragma once
//
// Discrete Schroedinger operators A = L_h - (1-eps)/(4 w^2) + V on the
// active nodes, negative-eigenvalue counting by LDL^T inertia, and the
// counting / Riesz-mean / Birman-Schwinger checks built on top of it.
//

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>

#include "hsm/error.hpp"
#include "hsm/grid.hpp"
#include "hsm/operators.hpp"

namespace hsm {

/// V at the active nodes (unknown ordering).
struct Potential {
  Eigen::VectorXd values;

  template <typename F>
  static Potential sample(const GridDomain& gd, F&& f) {
    Potential v;
    v.values.resize(gd.unknowns());
    const auto& act = gd.active_nodes();
    for (std::size_t k = 0; k < act.size(); ++k) v.values[k] = f(gd.grid().point(act[k]));
    if (!v.values.allFinite()) throw InvalidInput("potential has non-finite values");
    return v;
  }
  static Potential constant(const GridDomain& gd, double c) {
    return {Eigen::VectorXd::Constant(gd.unknowns(), c)};
  }
  Eigen::VectorXd negative_part() const { return (-values).cwiseMax(0.0); }
};

struct SchrodingerOperator {
  GridDomainPtr grid_domain;
  SparseMatrix matrix;
  double epsilon = 0;
  bool hardy = true;

  double h() const { return grid_domain->h(); }
  Eigen::Index size() const { return matrix.rows(); }
};

/// Returns the diagonal (1-eps)/(4 w^2) at the active nodes.
inline Eigen::VectorXd hardy_diagonal(const GridDomain& gd, const WeightField& w, double epsilon) {
  if (w.values.size() != static_cast<Eigen::Index>(gd.grid().size()))
    throw InvalidInput("weight field does not match the grid");
  const auto& act = gd.active_nodes();
  Eigen::VectorXd d(act.size());
  for (std::size_t k = 0; k < act.size(); ++k) {
    const double wk = w.values[act[k]];
    if (std::isnan(wk)) throw InvalidInput("missing weight (" + detail::describe_node(gd.grid(), act[k]) + ")");
    d[k] = (1 - epsilon) / (4 * wk * wk);
  }
  return d;
}

/// A = L_h - (1-eps)/(4 w^2) + V. Pass w = nullptr for no Hardy term.
inline SchrodingerOperator assemble(GridDomainPtr gd, const WeightField* w, const Potential& V, double epsilon) {
  if (!(epsilon >= 0 && epsilon <= 1)) throw InvalidInput("epsilon must lie in [0, 1]");
  if (static_cast<std::size_t>(V.values.size()) != gd->unknowns())
    throw InvalidInput("potential does not cover the active nodes");
  if (w && w->kind == WeightKind::davies && w->p != 2) throw InvalidInput("operator uses the p = 2 weight");
  SchrodingerOperator op;
  op.grid_domain = gd;
  op.epsilon = epsilon;
  op.hardy = w != nullptr && w->kind != WeightKind::none;
  op.matrix = laplacian_matrix(*gd);
  Eigen::VectorXd diag = V.values;
  if (op.hardy) diag -= hardy_diagonal(*gd, *w, epsilon);
  for (Eigen::Index k = 0; k < diag.size(); ++k) op.matrix.coeffRef(k, k) += diag[k];
  op.matrix.makeCompressed();
  return op;
}

struct Inertia {
  Eigen::Index negative = 0;
  Eigen::Index zero = 0;
  Eigen::Index positive = 0;
  std::string method;
};

inline constexpr Eigen::Index kDenseLimit = 3000;

inline Eigen::VectorXd dense_eigenvalues(const SparseMatrix& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(A), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericFailure("dense eigensolve failed");
  return es.eigenvalues();
}

inline double inf_norm(const SparseMatrix& A) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(A.rows());
  for (Eigen::Index k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) rows[it.row()] += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

/// Inertia of A - shift I. Sparse LDL^T (AMD ordering) first; falls back to a
/// dense eigensolve (<= kDenseLimit unknowns) when a pivot is tiny or the
/// factorization's residual is poor.
inline Inertia inertia(const SparseMatrix& A, double shift = 0, bool force_dense = false) {
  const Eigen::Index n = A.rows();
  SparseMatrix M = A;
  if (shift != 0)
    for (Eigen::Index k = 0; k < n; ++k) M.coeffRef(k, k) -= shift;
  const double scale = std::max(inf_norm(M), 1e-300);
  if (!force_dense) {
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(M);
    bool ok = ldlt.info() == Eigen::Success;
    if (ok) {
      const Eigen::VectorXd D = ldlt.vectorD();
      ok = D.allFinite() && (D.cwiseAbs().minCoeff() > 1e-13 * scale);
      if (ok) {
        std::mt19937_64 rng(0x5eed);
        std::normal_distribution<double> g;
        Eigen::VectorXd b(n);
        for (Eigen::Index i = 0; i < n; ++i) b[i] = g(rng);
        const Eigen::VectorXd x = ldlt.solve(b);
        const double res = (M * x - b).norm() / (scale * x.norm() + b.norm());
        ok = x.allFinite() && res < 1e-8;
      }
      if (ok) {
        Inertia in;
        in.method = "inertia";
        for (Eigen::Index i = 0; i < n; ++i) (D[i] < 0 ? in.negative : in.positive)++;
        return in;
      }
    }
  }
  if (n > kDenseLimit) throw NumericFailure("LDL^T factorization unreliable and matrix too large for dense fallback");
  const Eigen::VectorXd ev = dense_eigenvalues(M);
  Inertia in;
  in.method = "dense";
  const double tol = 1e-12 * scale;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ev[i] < -tol) in.negative++;
    else if (ev[i] > tol) in.positive++;
    else in.zero++;
  }
  return in;
}

struct NegativeCount {
  Eigen::Index count = 0;          // eigenvalues below -tol
  Eigen::Index indeterminate = 0;  // eigenvalues in [-tol, tol]
  std::string method;
};

/// Number of eigenvalues of A below `shift`, with those within
/// 1e-12 ||A||_inf of the shift reported separately.
inline NegativeCount count_negative(const SparseMatrix& A, double shift = 0, bool force_dense = false) {
  const double tol = 1e-12 * std::max(inf_norm(A), 1e-300);
  const Inertia lo = inertia(A, shift - tol, force_dense);
  const Inertia hi = inertia(A, shift + tol, force_dense);
  NegativeCount c;
  c.count = lo.negative;
  c.indeterminate = hi.negative + hi.zero - lo.negative;
  c.method = (lo.method == "dense" || hi.method == "dense") ? "dense" : "inertia";
  return c;
}

inline NegativeCount count_negative(const SchrodingerOperator& op, double shift = 0) {
  return count_negative(op.matrix, shift);
}

struct SpectralReport {
  Eigen::Index count = 0;
  Eigen::Index indeterminate = 0;
  std::optional<std::vector<double>> eigenvalues;
  double statistic = 0;  // the quantity the bound controls
  double bound = 0;
  double slack = 0;      // bound - statistic
  std::string method;
  std::vector<std::string> notes;
};

inline double potential_integral(const GridDomain& gd, const Potential& V, double power) {
  const Eigen::VectorXd vm = V.negative_part();
  double s = 0;
  for (Eigen::Index k = 0; k < vm.size(); ++k)
    if (vm[k] > 0) s += std::pow(vm[k], power);
  return s * gd.grid().cell_volume();
}

/// N(A) against L * sum V_-^{N/2} h^N.
inline SpectralReport clr_bound_check(GridDomainPtr gd, const WeightField& w, const Potential& V, double L,
                                      double epsilon = 0.01) {
  if (gd->dimension() != 3) throw InvalidInput("CLR check requires N = 3");
  const SchrodingerOperator op = assemble(gd, &w, V, epsilon);
  const NegativeCount nc = count_negative(op);
  SpectralReport r;
  r.count = nc.count;
  r.indeterminate = nc.indeterminate;
  r.method = nc.method;
  r.statistic = static_cast<double>(nc.count + nc.indeterminate);
  r.bound = L * potential_integral(*gd, V, 1.5);
  r.slack = r.bound - r.statistic;
  if (epsilon == 0) r.notes.push_back("unregularized (epsilon = 0)");
  return r;
}

struct CountingReport {
  SpectralReport report;  // statistic = N(-Delta - mu), bound = bound1
  double bound2 = 0;
  bool pointwise_ok = true;
};

/// N(-Delta - mu) (Dirichlet Laplacian, no Hardy term) against
///   bound1 = L sum ((2D)^{-2} - mu)_-^{3/2} h^3,
///   bound2 = L mu^{3/2} |{D > (4 mu)^{-1/2}}|.
inline CountingReport counting_function_bound(GridDomainPtr gd, const WeightField& w, double mu, double L) {
  if (gd->dimension() != 3) throw InvalidInput("counting-function bound requires N = 3");
  if (!(mu > 0)) throw InvalidInput("mu must be positive");
  const SparseMatrix lap = laplacian_matrix(*gd);
  const NegativeCount nc = count_negative(lap, mu);
  const auto& act = gd->active_nodes();
  const double vol = gd->grid().cell_volume();
  const double threshold = 1 / std::sqrt(4 * mu);
  double b1 = 0, b2 = 0;
  bool pointwise = true;
  for (std::size_t n : act) {
    const double D = w.values[n];
    if (std::isnan(D)) throw InvalidInput("missing weight (" + detail::describe_node(gd->grid(), n) + ")");
    const double vminus = std::max(mu - 1 / (4 * D * D), 0.0);
    const double t1 = std::pow(vminus, 1.5);
    const double t2 = D > threshold ? std::pow(mu, 1.5) : 0.0;
    if (t1 > t2 * (1 + 1e-12)) pointwise = false;
    b1 += t1;
    b2 += t2;
  }
  CountingReport cr;
  cr.report.count = nc.count;
  cr.report.indeterminate = nc.indeterminate;
  cr.report.method = nc.method;
  cr.report.statistic = static_cast<double>(nc.count + nc.indeterminate);
  cr.report.bound = L * b1 * vol;
  cr.report.slack = cr.report.bound - cr.report.statistic;
  cr.bound2 = L * b2 * vol;
  cr.pointwise_ok = pointwise;
  return cr;
}

/// Sorted negative eigenvalues of the operator (dense).
inline std::vector<double> negative_eigenvalues(const SchrodingerOperator& op) {
  if (op.size() > kDenseLimit) throw NumericFailure("operator too large for the dense eigensolve");
  const Eigen::VectorXd ev = dense_eigenvalues(op.matrix);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < ev.size() && ev[i] < 0; ++i) out.push_back(ev[i]);
  return out;
}

/// sum_j |E_j|^gamma over the negative eigenvalues.
inline double riesz_moment(const SchrodingerOperator& op, double gamma) {
  if (!(gamma > 0)) throw InvalidInput("gamma must be positive");
  double s = 0;
  for (double e : negative_eigenvalues(op)) s += std::pow(-e, gamma);
  return s;
}

/// Theorem hypotheses on gamma by dimension.
inline void check_lt_gamma(int dim, double gamma) {
  if (dim == 1 && !(gamma > 0.5)) throw InvalidInput("gamma must exceed 1/2 in one dimension");
  if (dim == 2 && !(gamma > 0)) throw InvalidInput("gamma must be positive in two dimensions");
}

/// Riesz moment against L_gamma sum V_-^{gamma + N/2} h^N.
inline SpectralReport lieb_thirring_check(GridDomainPtr gd, const WeightField& w, const Potential& V, double gamma,
                                          double L, double epsilon = 0.01) {
  check_lt_gamma(gd->dimension(), gamma);
  const SchrodingerOperator op = assemble(gd, &w, V, epsilon);
  const auto ev = negative_eigenvalues(op);
  SpectralReport r;
  r.count = static_cast<Eigen::Index>(ev.size());
  r.eigenvalues = ev;
  r.method = "dense";
  for (double e : ev) r.statistic += std::pow(-e, gamma);
  r.bound = L * potential_integral(*gd, V, gamma + 0.5 * gd->dimension());
  r.slack = r.bound - r.statistic;
  if (epsilon == 0) r.notes.push_back("unregularized (epsilon = 0)");
  return r;
}

// ---------------------------------------------------------------------------
// Birman-Schwinger.

struct BirmanSchwingerCounts {
  double mu;
  Eigen::Index count_a;  // eigenvalues of W^{1/2}(L+tau)^{-1}W^{1/2} above 1/mu
  Eigen::Index count_b;  // negative eigenvalues of L + tau - mu W
};

inline void check_positive_weight(const Eigen::VectorXd& W) {
  if (W.size() == 0 || !W.allFinite() || W.minCoeff() <= 0)
    throw InvalidInput("W must be finite and strictly positive on the active nodes");
}

/// Both counts for each mu, from two independent dense eigensolves.
inline std::vector<BirmanSchwingerCounts> birman_schwinger_check(const GridDomain& gd, const Eigen::VectorXd& W,
                                                                 const std::vector<double>& mus, double tau) {
  check_positive_weight(W);
  if (static_cast<std::size_t>(W.size()) != gd.unknowns()) throw InvalidInput("W does not cover the active nodes");
  if (!(tau >= 0)) throw InvalidInput("tau must be >= 0");
  if (gd.unknowns() > 400) throw InvalidInput("Birman-Schwinger check is limited to 400 unknowns");
  const Eigen::Index n = W.size();
  Eigen::MatrixXd Lt = Eigen::MatrixXd(laplacian_matrix(gd));
  Lt.diagonal().array() += tau;
  Eigen::LLT<Eigen::MatrixXd> llt(Lt);
  if (llt.info() != Eigen::Success) throw NumericFailure("-Delta + tau is singular");
  const Eigen::VectorXd s = W.cwiseSqrt();
  Eigen::MatrixXd K = llt.solve(Eigen::MatrixXd(s.asDiagonal()));
  K = s.asDiagonal() * K;
  K = 0.5 * (K + K.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericFailure("eigensolve of the Birman-Schwinger kernel failed");
  const Eigen::VectorXd kev = es.eigenvalues();
  std::vector<BirmanSchwingerCounts> out;
  for (double mu : mus) {
    if (!(mu > 0)) throw InvalidInput("mu must be positive");
    Eigen::Index a = 0;
    for (Eigen::Index i = 0; i < n; ++i) a += kev[i] > 1 / mu;
    Eigen::MatrixXd B = Lt;
    B.diagonal() -= mu * W;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(B, Eigen::EigenvaluesOnly);
    if (eb.info() != Eigen::Success) throw NumericFailure("eigensolve of L + tau - mu W failed");
    Eigen::Index b = 0;
    for (Eigen::Index i = 0; i < n; ++i) b += eb.eigenvalues()[i] < 0;
    out.push_back({mu, a, b});
  }
  return out;
}

struct WeightedEigenvalueReport {
  std::vector<double> mu;  // ascending eigenvalues of W^{-1/2}(L + tau)W^{-1/2}
  double slope = 0;        // least-squares slope of log mu_j against log j
  double expected_slope = 0;
  double constant = 0;     // min_j mu_j / j^{expected_slope}
  Eigen::Index fit_from = 0, fit_to = 0;
};

/// Eigenvalue growth mu_j ~ C j^{2/N} of the weighted operator, fitted over
/// j in [fit_from, fit_to] (defaults: 1 .. n/4).
inline WeightedEigenvalueReport weighted_eigenvalue_bound(const GridDomain& gd, const Eigen::VectorXd& W, double tau,
                                                          Eigen::Index fit_from = 1, Eigen::Index fit_to = 0) {
  check_positive_weight(W);
  if (static_cast<std::size_t>(W.size()) != gd.unknowns()) throw InvalidInput("W does not cover the active nodes");
  if (W.size() > kDenseLimit) throw InvalidInput("weighted eigenvalue fit is limited to dense sizes");
  Eigen::MatrixXd M = Eigen::MatrixXd(laplacian_matrix(gd));
  M.diagonal().array() += tau;
  const Eigen::VectorXd s = W.cwiseSqrt().cwiseInverse();
  M = s.asDiagonal() * M * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericFailure("weighted eigensolve failed");
  WeightedEigenvalueReport r;
  const Eigen::Index n = W.size();
  r.mu.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  r.expected_slope = 2.0 / gd.dimension();
  r.fit_from = std::max<Eigen::Index>(fit_from, 1);
  r.fit_to = fit_to > 0 ? std::min(fit_to, n) : std::max<Eigen::Index>(n / 4, r.fit_from + 1);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (Eigen::Index j = r.fit_from; j <= r.fit_to; ++j) {
    const double x = std::log(static_cast<double>(j)), y = std::log(r.mu[j - 1]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++m;
  }
  r.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  r.constant = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 1; j <= n; ++j)
    r.constant = std::min(r.constant, r.mu[j - 1] / std::pow(static_cast<double>(j), r.expected_slope));
  return r;
}

/// min over u of u^T A u / u^T B u for A symmetric, B diagonal positive:
/// bisection on the inertia of A - lambda B.
inline double pencil_minimum(const SparseMatrix& A, const Eigen::VectorXd& Bdiag, double lo, double hi,
                             double rel_tol = 1e-12) {
  if (Bdiag.size() != A.rows() || Bdiag.minCoeff() <= 0) throw InvalidInput("B must be positive diagonal");
  auto below = [&](double lambda) {
    SparseMatrix M = A;
    for (Eigen::Index k = 0; k < M.rows(); ++k) M.coeffRef(k, k) -= lambda * Bdiag[k];
    return inertia(M).negative > 0;  // some generalized eigenvalue < lambda
  };
  if (below(lo)) throw InvalidInput("pencil minimum lies below the lower bracket");
  if (!below(hi)) throw InvalidInput("pencil minimum lies above the upper bracket");
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (below(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Discrete Hardy ratio min sum|grad u|^2 / sum u^2/(4 w^2) (exact, by pencil
/// bisection).
inline double hardy_ratio_minimum(const GridDomain& gd, const WeightField& w) {
  const SparseMatrix L = laplacian_matrix(gd);
  const Eigen::VectorXd B = hardy_diagonal(gd, w, 0);
  // Upper bracket: Rayleigh quotient of the all-ones vector, which is >= min.
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(L.rows());
  const double hi = one.dot(L * one) / one.dot(B.asDiagonal() * one) * (1 + 1e-9);
  return pencil_minimum(L, B, 0, hi);
}

}  // namespace hsm
