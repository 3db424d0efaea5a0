#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "hsm/oned_lab.hpp"

using namespace hsm;

namespace {

// Independent integrals for f = (1 - t^2)^m on (-1, 1).
struct ProfileOracle {
  double sup = 1, grad, hardy, lq;
};

ProfileOracle profile_oracle(int m, double q) {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::tanh_sinh;
  ProfileOracle o;
  o.grad = gauss<double, 30>::integrate(
      [&](double t) {
        const double d = -2.0 * m * t * std::pow(1 - t * t, m - 1);
        return d * d;
      },
      -1.0, 1.0);
  // f^2 / (4 (1-|t|)^2) on (0, 1) is (1-t)^{2m-2} (1+t)^{2m} / 4, doubled by symmetry.
  o.hardy = 0.5 * gauss<double, 30>::integrate(
                      [&](double t) { return std::pow(1 - t, 2 * m - 2) * std::pow(1 + t, 2 * m); }, 0.0, 1.0);
  tanh_sinh<double> ts;
  o.lq = ts.integrate([&](double t) { return std::pow(1 - t * t, m * q); }, -1.0, 1.0);
  return o;
}

}  // namespace

TEST(TestFunction1D, ChebyshevDerivativeMatchesFiniteDifference) {
  const auto f = TestFunction1D::bumps({{-0.7, 0.9, 3, {0.4, -1.1, 0.3, 0.8, -0.2}}, {-1, 1, 2, {1.0, 0.5}}});
  for (double t : {-0.95, -0.5, 0.0, 0.33, 0.88}) {
    const double h = 1e-6;
    const double fd = (f.value(t + h) - f.value(t - h)) / (2 * h);
    EXPECT_NEAR(f.derivative(t), fd, 1e-7 * (1 + std::abs(fd)));
  }
  // T_3(s) = 4s^3 - 3s.
  const auto g = TestFunction1D::bumps({{-1, 1, 1, {0, 0, 0, 1}}});
  const double s = 0.3;
  EXPECT_NEAR(g.value(s), (1 - s * s) * (4 * s * s * s - 3 * s), 1e-15);
  EXPECT_EQ(g.value(1.2), 0.0);
}

TEST(TestFunction1D, SupAndSupport) {
  const auto f = TestFunction1D::bumps({{0.2, 0.6, 2, {-2.0}}});
  const auto [sup, arg] = f.sup_abs();
  EXPECT_NEAR(sup, 2.0, 1e-12);
  EXPECT_NEAR(arg, 0.4, 1e-6);
  EXPECT_EQ(f.support(), (std::pair{0.2, 0.6}));
  EXPECT_THROW(TestFunction1D::bumps({}), InvalidInput);
  EXPECT_THROW(TestFunction1D::samples(0, 1, std::vector<double>(100, 1.0)), InvalidInput);
}

TEST(GradedIntegral, HandlesEndpointSingularities) {
  EXPECT_NEAR(detail::graded_integral(0, 1, [](double t) { return std::log(t); }), -1.0, 1e-12);
  EXPECT_NEAR(detail::graded_integral(0, 1, [](double t) { return 1 / std::sqrt(t * (1 - t)); }), std::numbers::pi,
              1e-7);
}

TEST(Integrals1D, ProfileMatchesOracle) {
  const Domain I = Domain::interval(-1, 1);
  for (int m : {2, 3, 4}) {
    const auto f = TestFunction1D::bumps({{-1, 1, m, {1.0}}});
    for (double q : {2.0, 3.0, 6.5}) {
      const auto o = profile_oracle(m, q);
      const auto in = integrals_1d(f, I, 2, {q});
      EXPECT_NEAR(in.grad_p, o.grad, 1e-12 * o.grad);
      EXPECT_NEAR(in.hardy_p, o.hardy, 1e-12 * o.hardy);
      EXPECT_NEAR(in.lq.at(q), o.lq, 1e-10 * o.lq);
      const double expected = 1 / ((o.grad - o.hardy) * o.lq);
      EXPECT_NEAR(key_ratio(f, q).ratio, expected, 1e-10 * expected);
    }
  }
  // m = 2: grad = 256/105.
  const auto f2 = TestFunction1D::bumps({{-1, 1, 2, {1.0}}});
  EXPECT_NEAR(integrals_1d(f2, I, 2, {2}).grad_p, 256.0 / 105, 1e-13);
}

TEST(KeyRatio, InvariantUnderAffineMaps) {
  const auto f = TestFunction1D::bumps({{-1, 1, 2, {1.0, 0.3, -0.2}}});
  const auto g = TestFunction1D::bumps({{3, 7, 2, {1.0, 0.3, -0.2}}});
  const Domain J = Domain::interval(3, 7);
  for (double q : {2.0, 4.0, 10.0})
    EXPECT_NEAR(keycor_ratio(g, J, q).ratio, key_ratio(f, q).ratio, 1e-10 * key_ratio(f, q).ratio);
}

TEST(KeyRatio, UnionUsesDistanceToNearestComponentEdge) {
  const Domain U = Domain::interval_union({{-3, -1}, {0, 2}});
  const auto f = TestFunction1D::bumps({{-3, -1, 2, {1.0}}, {0, 2, 3, {0.5}}});
  const auto r = keycor_ratios(f, U, {2, 4});
  EXPECT_NEAR(r[0], keycor_ratio(f, U, 2).ratio, 1e-12 * r[0]);
  EXPECT_LE(r[1], cq_bound(4));
  EXPECT_THROW(keycor_ratio(TestFunction1D::bumps({{-1.5, 0.5, 2, {1.0}}}), U, 2), PreconditionViolation);
}

TEST(KeyRatio, TouchingTheBoundaryNeedsOrderTwo) {
  EXPECT_THROW(key_ratio(TestFunction1D::bumps({{-1, 1, 1, {1.0}}}), 2), PreconditionViolation);
  EXPECT_NO_THROW(key_ratio(TestFunction1D::bumps({{-0.9, 0.9, 1, {1.0}}}), 2));
  EXPECT_THROW(key_ratio(TestFunction1D::bumps({{-1, 1, 2, {1.0}}}), 1.5), InvalidInput);
}

TEST(KeyRatio, KeypAtTwoAgrees) {
  const auto corpus = default_corpus(40, 3);
  for (const auto& f : corpus)
    for (double q : {2.0, 4.0}) {
      const double a = key_ratio(f, q).ratio, b = keyp_ratio(f, 2, q).ratio;
      EXPECT_NEAR(a, b, 1e-10 * a);
    }
  const auto f = TestFunction1D::bumps({{-1, 1, 3, {1.0}}});
  for (double p : {2.5, 3.0}) EXPECT_TRUE(std::isfinite(keyp_ratio(f, p, 4).ratio));
  EXPECT_THROW(keyp_ratio(f, 3, 2.5), InvalidInput);
}

TEST(KeyRatio, SecondCorollaryBounded) {
  for (const auto& f : default_corpus(30, 5))
    for (double q : {4.0, 6.0}) EXPECT_LE(keycor2_ratio(f, Domain::interval(-1, 1), q), q * q);
}

TEST(Corpus, DeterministicAndWithinBound) {
  const auto a = default_corpus(60, 9), b = default_corpus(60, 9);
  ASSERT_EQ(a.size(), 60u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].id(), b[i].id());
    EXPECT_EQ(a[i].value(0.123), b[i].value(0.123));
    const auto r = keycor_ratios(a[i], Domain::interval(-1, 1), {2, 3, 4, 6, 10});
    const double qs[] = {2, 3, 4, 6, 10};
    for (int k = 0; k < 5; ++k) EXPECT_LE(r[k], cq_bound(qs[k])) << a[i].id();
  }
  EXPECT_EQ(a[0].id(), "profile_m2");
}

TEST(SampledFunction, ApproximatesSmoothProfile) {
  const int n = 2049;
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    const double t = -0.5 + i / 2048.0;
    v[i] = std::pow(1 - 4 * t * t, 2);
  }
  const auto s = TestFunction1D::samples(-0.5, 0.5, v);
  const auto b = TestFunction1D::bumps({{-0.5, 0.5, 2, {1.0}}});
  EXPECT_NEAR(key_ratio(s, 4).ratio, key_ratio(b, 4).ratio, 1e-4 * key_ratio(b, 4).ratio);
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 1 - std::abs(-1 + i / 1024.0);
  EXPECT_THROW(key_ratio(TestFunction1D::samples(-1, 1, w), 2), PreconditionViolation);
}

TEST(WorstCaseSearch, BoundedAndDeterministic) {
  SearchOptions opt;
  opt.q = 4;
  opt.family_dim = 4;
  opt.restarts = 3;
  opt.iterations = 8;
  opt.seed = 42;
  const auto r1 = worst_case_search(opt);
  opt.threads = 3;
  const auto r2 = worst_case_search(opt);
  EXPECT_EQ(r1.ratio, r2.ratio);
  EXPECT_EQ(r1.coeffs, r2.coeffs);
  EXPECT_LE(r1.ratio, cq_bound(4));
  // The search never decreases from the starting profile.
  EXPECT_GE(r1.ratio, key_ratio(TestFunction1D::bumps({{-1, 1, 2, {1.0}}}), 4).ratio);
}

TEST(WorstCaseSearch, LogGradientMatchesFiniteDifference) {
  const int M = 4;
  const auto nodes = detail::family_nodes(M);
  Eigen::VectorXd c(M);
  c << 1.0, 0.2, -0.3, 0.1;
  const auto g = detail::family_log_gradient(nodes, c, 2, 4);
  for (int k = 0; k < M; ++k) {
    const double h = 1e-5;
    Eigen::VectorXd cp = c, cm = c;
    cp[k] += h;
    cm[k] -= h;
    auto lr = [&](const Eigen::VectorXd& v) {
      return std::log(detail::family_ratio(std::vector<double>(v.data(), v.data() + M), 2, 4));
    };
    EXPECT_NEAR(g[k], (lr(cp) - lr(cm)) / (2 * h), 1e-4 * (1 + std::abs(g[k])));
  }
}

TEST(GagliardoNirenberg, MatchesTripleSumAndBoxEquality) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  const int n = 6;
  const double h = 0.25;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Eigen::MatrixXd> f(3, Eigen::MatrixXd(n, n));
    for (auto& A : f)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = u(rng);
    double brute = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) brute += f[0](j, k) * f[1](i, k) * f[2](i, j);
    brute *= h * h * h;
    const auto r = gn_product_check(f, h);
    EXPECT_NEAR(r.lhs, brute, 1e-12 * brute);
    EXPECT_LE(r.lhs, r.rhs);
  }
  // Indicators of a box a x b x c.
  std::vector<Eigen::MatrixXd> box(3, Eigen::MatrixXd::Zero(n, n));
  box[0].block(0, 0, 2, 3).setOnes();  // (x2, x3)
  box[1].block(0, 0, 4, 3).setOnes();  // (x1, x3)
  box[2].block(0, 0, 4, 2).setOnes();  // (x1, x2)
  const auto r = gn_product_check(box, h);
  EXPECT_NEAR(r.lhs, r.rhs, 1e-14);
  EXPECT_NEAR(r.lhs, 4 * 2 * 3 * h * h * h, 1e-14);
  const auto two = gn_product_check({Eigen::VectorXd::Constant(5, 2.0), Eigen::VectorXd::Constant(5, 3.0)}, 0.1);
  EXPECT_NEAR(two.lhs, two.rhs, 1e-15);
  EXPECT_THROW(gn_product_check({Eigen::MatrixXd::Ones(2, 2)}, 1), InvalidInput);
}
