#pragma once
//
// Explicit constants: the 1D constant C_q <= (q+2)^2, the Sobolev-type
// constants K_N (N >= 3) and K_{N,theta} (N = 1, 2) obtained from it, the
// CLR constant L_N, the Sobolev/CLR bracket and the Lieb-Thirring constant
// L_gamma~. Every derived number carries a provenance string.
//

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hsm/error.hpp"

namespace hsm {

namespace detail {

/// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0;
  double comp_ = 0;
};

inline double xlogx(double x) { return x == 0 ? 0.0 : x * std::log(x); }

}  // namespace detail

/// Np/(N-p), 1 <= p < N.
inline double sobolev_exponent(int N, double p) {
  if (N < 1) throw InvalidInput("N must be >= 1");
  if (!(p >= 1)) throw InvalidInput("p must be >= 1");
  if (!(p < N)) throw InvalidInput("sobolev_exponent requires p < N");
  return N * p / (N - p);
}

/// Upper bound (q+2)^2 for the 1D constant.
inline double cq_bound(double q) {
  if (!(q >= 2)) throw InvalidInput("q must be >= 2");
  return (q + 2) * (q + 2);
}

/// (q+2)^2 / (4(q+1)).
inline double alpha_constant(double q) {
  if (!(q >= 2)) throw InvalidInput("q must be >= 2");
  return (q + 2) * (q + 2) / (4 * (q + 1));
}

/// K_N = N C_q^{-4(N-1)/(N-2)}.
inline double kn_from_cq(int N, double cq) {
  if (N < 3) throw InvalidInput("kn_from_cq requires N >= 3");
  if (!(cq > 0)) throw InvalidInput("C_q must be positive");
  return N * std::pow(cq, -4.0 * (N - 1) / (N - 2));
}

/// L_N = e^{N/2 - 1} K_N^{-N/2}.
inline double clr_constant(int N, double kn) {
  if (N < 3) throw InvalidInput("clr_constant requires N >= 3");
  if (!(kn > 0)) throw InvalidInput("K_N must be positive");
  const double kappa = 0.5 * N;
  return std::exp(kappa - 1) * std::pow(kn, -kappa);
}

struct Bracket {
  double lower;
  double upper;
};

/// S^{-kappa} <= L <= e^{kappa-1} S^{-kappa}.
inline Bracket clr_from_sobolev(double S, double kappa) {
  if (!(S > 0)) throw InvalidInput("S must be positive");
  if (!(kappa > 1)) throw InvalidInput("clr_from_sobolev requires kappa > 1");
  return {std::pow(S, -kappa), std::exp(kappa - 1) * std::pow(S, -kappa)};
}

/// (N/2)(1 - 2/q).
inline double theta_of(int N, double q) {
  if (N < 1) throw InvalidInput("N must be >= 1");
  if (!(q >= 2)) throw InvalidInput("theta_of requires q >= 2");
  if (N >= 3 && q > 2.0 * N / (N - 2)) throw InvalidInput("theta_of requires q <= 2N/(N-2) for N >= 3");
  return 0.5 * N * (1 - 2 / q);
}

struct GammaKappa {
  double gamma;
  double kappa;
};

/// gamma = q(1-theta)/(q-2), kappa = q theta/(q-2).
inline GammaKappa gamma_kappa(double q, double theta) {
  if (!(q > 2)) throw InvalidInput("gamma_kappa requires q > 2");
  if (!(theta > 0 && theta < 1)) throw InvalidInput("gamma_kappa requires 0 < theta < 1");
  return {q * (1 - theta) / (q - 2), q * theta / (q - 2)};
}

/// log of the Lieb-Thirring constant bound, given log S; +inf when gamma~ = gamma.
inline double log_lt_constant_from_log_s(double gt, double gamma, double kappa, double theta, double log_s) {
  if (!(gamma > 0) || !(kappa > 0)) throw InvalidInput("gamma and kappa must be positive");
  if (!(theta > 0 && theta < 1)) throw InvalidInput("theta must lie in (0, 1)");
  if (!std::isfinite(log_s)) throw InvalidInput("S must be positive and finite");
  if (gt < gamma) throw InvalidInput("lt_constant requires gamma~ > gamma");
  if (gt == gamma) return std::numeric_limits<double>::infinity();
  const double d = gt - gamma;
  detail::CompensatedSum s;
  s.add((gt + 1) * std::log(gt));
  s.add(-detail::xlogx(gamma));
  s.add(-detail::xlogx(d));
  s.add(std::lgamma(gamma + kappa + 1));
  s.add(std::lgamma(d));
  s.add(-std::lgamma(gt + kappa + 1));
  s.add(gamma + kappa - 1);
  // log(theta^{-theta} (1-theta)^{-(1-theta)} S)
  const double lbase = -detail::xlogx(theta) - detail::xlogx(1 - theta) + log_s;
  s.add(-(gamma + kappa) * lbase);
  return s.value();
}

inline double log_lt_constant(double gt, double gamma, double kappa, double theta, double S) {
  if (!(S > 0)) throw InvalidInput("S must be positive");
  return log_lt_constant_from_log_s(gt, gamma, kappa, theta, std::log(S));
}

inline double lt_constant(double gt, double gamma, double kappa, double theta, double S) {
  return std::exp(log_lt_constant(gt, gamma, kappa, theta, S));
}

/// K_{N,theta(q)} for N = 1, 2 from the 1D constants C_q <= (q+2)^2:
///   N = 1, q > 2:    C_q^{-theta}
///   N = 2, q >= 4:   C_{q-2}^{-(q-2)} 2^theta
///   N = 2, 2<q<4:    K_{2,1/2}^{2-4/q}   (Hoelder between L^2 and L^4)
inline double log_k_interp_from_cq(int N, double q) {
  if (!(q > 2)) throw InvalidInput("k_interp_from_cq requires q > 2");
  const double theta = theta_of(N, q);
  if (N == 1) return -theta * std::log(cq_bound(q));
  if (N == 2) {
    if (q >= 4) return -(q - 2) * std::log(cq_bound(q - 2)) + theta * std::log(2.0);
    return (2 - 4 / q) * log_k_interp_from_cq(2, 4);
  }
  throw InvalidInput("k_interp_from_cq requires N = 1 or 2");
}

/// May underflow to 0 for large q in 2D; use the log form there.
inline double k_interp_from_cq(int N, double q) { return std::exp(log_k_interp_from_cq(N, q)); }

/// The chain of constants for one (N, p, q).
struct ConstantChain {
  int N = 3;
  double p = 2;
  double q = 6;
  std::optional<double> C_q, K, L_N, theta, gamma, kappa, S, gamma_tilde, L_gamma_tilde;
  std::map<std::string, std::string> provenance;
};

/// Best q for the Lieb-Thirring constant at gamma~ (N = 1, 2), by a scan
/// over q followed by golden-section refinement.
inline std::pair<double, double> best_q_for_lt(int N, double gt) {
  if (N != 1 && N != 2) throw InvalidInput("best_q_for_lt requires N = 1 or 2");
  auto logL = [&](double q) {
    const double th = theta_of(N, q);
    const auto gk = gamma_kappa(q, th);
    if (!(gk.gamma < gt)) return std::numeric_limits<double>::infinity();
    return log_lt_constant_from_log_s(gt, gk.gamma, gk.kappa, th, log_k_interp_from_cq(N, q));
  };
  double best_q = 0, best = std::numeric_limits<double>::infinity();
  for (double q = 2.05; q <= 200; q *= 1.01) {
    const double v = logL(q);
    if (v < best) best = v, best_q = q;
  }
  if (!std::isfinite(best)) throw InvalidInput("no admissible q for this gamma~");
  double a = best_q / 1.01, b = best_q * 1.01;
  const double r = 0.5 * (std::sqrt(5.0) - 1);
  for (int it = 0; it < 100; ++it) {
    const double c = b - r * (b - a), d = a + r * (b - a);
    if (logL(c) < logL(d)) b = d; else a = c;
  }
  const double q = 0.5 * (a + b);
  const double v = logL(q);
  return v < best ? std::pair{q, std::exp(v)} : std::pair{best_q, std::exp(best)};
}

/// N >= 3, p = 2: q = 2N/(N-2), C_q = (q+2)^2, K_N, L_N.
/// N >= 3, p != 2: only q is explicit; K_{N,p} needs C_{p,q}.
/// N = 1, 2 (p = 2): q given (or chosen to minimise L_gamma~), theta, K_{N,theta},
/// gamma, kappa, L_gamma~.
inline ConstantChain constant_chain(int N, double p = 2, std::optional<double> q = std::nullopt,
                                    double gamma_tilde = 1) {
  ConstantChain c;
  c.N = N;
  c.p = p;
  if (N >= 3) {
    c.q = sobolev_exponent(N, p);
    c.provenance["q"] = "Np/(N-p)";
    if (p != 2) {
      c.provenance["K"] = "not explicit: depends on the unquantified 1D constant C_{p,q}";
      return c;
    }
    c.C_q = cq_bound(c.q);
    c.provenance["C_q"] = "upper bound (q+2)^2";
    c.K = kn_from_cq(N, *c.C_q);
    c.provenance["K"] = "chain: N * C_q^{-4(N-1)/(N-2)}";
    c.L_N = clr_constant(N, *c.K);
    c.provenance["L_N"] = "chain: e^{N/2-1} K_N^{-N/2}";
    c.theta = 1;
    c.provenance["theta"] = "(N/2)(1-2/q)";
    c.gamma = 0;
    c.kappa = 0.5 * N;
    c.provenance["kappa"] = "q/(q-2) = N/2";
    c.S = c.K;
    c.provenance["S"] = "S = K_N";
    return c;
  }
  if (N != 1 && N != 2) throw InvalidInput("N must be >= 1");
  if (p != 2) throw InvalidInput("for N = 1, 2 only p = 2 is supported");
  if (q) {
    c.q = *q;
    c.provenance["q"] = "given";
  } else {
    c.q = best_q_for_lt(N, gamma_tilde).first;
    c.provenance["q"] = "minimises L_gamma~ over q";
  }
  c.theta = theta_of(N, c.q);
  c.provenance["theta"] = "(N/2)(1-2/q)";
  const double cq_arg = N == 1 ? c.q : std::max(c.q, 4.0) - 2;
  c.C_q = cq_bound(cq_arg);
  c.provenance["C_q"] = N == 1 ? "upper bound (q+2)^2" : "upper bound for C_{q-2}: q^2 (q >= 4; Hoelder below 4)";
  c.K = k_interp_from_cq(N, c.q);
  c.provenance["K"] = N == 1 ? "chain: C_q^{-theta}" : "chain: C_{q-2}^{-(q-2)} 2^theta";
  c.S = c.K;
  c.provenance["S"] = "S = K_{N,theta}";
  const auto gk = gamma_kappa(c.q, *c.theta);
  c.gamma = gk.gamma;
  c.kappa = gk.kappa;
  c.provenance["gamma"] = "q(1-theta)/(q-2)";
  c.provenance["kappa"] = "q theta/(q-2)";
  c.gamma_tilde = gamma_tilde;
  if (gamma_tilde > gk.gamma) {
    c.L_gamma_tilde =
        std::exp(log_lt_constant_from_log_s(gamma_tilde, gk.gamma, gk.kappa, *c.theta, log_k_interp_from_cq(N, c.q)));
    c.provenance["L_gamma~"] = "Lieb-Thirring bound from S, theta, gamma, kappa";
  } else {
    c.provenance["L_gamma~"] = "undefined: gamma~ <= gamma";
  }
  return c;
}

}  // namespace hsm
