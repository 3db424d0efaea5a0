#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hsm/constants.hpp"
#include "hsm/corpus.hpp"
#include "hsm/forms.hpp"
#include "hsm/operators.hpp"

using namespace hsm;

namespace {

GridFunction random_function(const GridDomainPtr& gd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXd x(gd->unknowns());
  for (auto& v : x) v = g(rng);
  return GridFunction::from_unknowns(gd, x);
}

double hat(const Vec3& x, int dim) {
  double v = 1;
  for (int j = 0; j < dim; ++j) v *= std::max(0.0, 1 - std::abs(x[j]));
  return v;
}

const FormParams kEuclid{2, 0, WeightKind::euclidean};

}  // namespace

TEST(Grid, CoversBoxWithGhostLayer) {
  const auto gd = GridDomain::make(Domain::interval(-1, 1), 0.25);
  const Grid& g = gd->grid();
  EXPECT_EQ(g.counts[0], 8 + 3);
  EXPECT_DOUBLE_EQ(g.point(0)[0], -1.25);
  EXPECT_TRUE(g.on_ghost_layer(0));
  EXPECT_TRUE(g.on_ghost_layer(10));
  // Nodes -0.75 ... 0.75 are active; +-1 are outside the open interval.
  EXPECT_EQ(gd->unknowns(), 7u);
  EXPECT_NEAR(gd->measure(), 7 * 0.25, 1e-15);
  EXPECT_THROW(GridDomain(Domain::interval(-1, 1), 0), InvalidInput);
  EXPECT_THROW(GridDomain(Domain::box(2, Vec3(0, 0, 0), Vec3(kInf, 1, 0)), 0.1), InvalidInput);
}

TEST(GridFunction, RejectsValuesOffTheActiveSet) {
  const auto gd = GridDomain::make(Domain::interval(-1, 1), 0.25);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(gd->grid().size());
  v[0] = 1;
  EXPECT_THROW(GridFunction(gd, v), InvalidInput);
  v[0] = 0;
  v[5] = std::nan("");
  EXPECT_THROW(GridFunction(gd, v), InvalidInput);
}

TEST(Forms, ZeroFunction) {
  const auto gd = GridDomain::make(Domain::interval(-1, 1), 1.0 / 64);
  const auto w = weight_field(gd, WeightKind::euclidean);
  const GridFunction u(gd);
  EXPECT_EQ(gradient_power_integral(u, 2), 0.0);
  EXPECT_EQ(lq_norm(u, 3), 0.0);
  EXPECT_EQ(hsm_form(u, w, kEuclid), 0.0);
  EXPECT_THROW(hsm_quotient(u, w, kEuclid, 2), InvalidInput);
}

TEST(Forms, HatFunctionOneDimension) {
  const double h = 1.0 / 1024;
  const auto gd = GridDomain::make(Domain::interval(-1, 1), h);
  const auto u = GridFunction::sample(gd, [](const Vec3& x) { return hat(x, 1); });
  EXPECT_NEAR(gradient_power_integral(u, 2), 2.0, 1e-12);
  // u/dist = 1 at every active node: H = (1/4) h (2/h - 1).
  const auto w = weight_field(gd, WeightKind::euclidean);
  EXPECT_NEAR(hardy_integral(u, w, kEuclid), 0.5 - h / 4, 1e-12);
  const double form = hsm_form(u, w, kEuclid);
  EXPECT_GE(form, 0);
  EXPECT_NEAR(form, 1.5, 2 * h);
  // In 1D the Davies weight is the distance.
  const auto wd = weight_field(gd, WeightKind::davies);
  EXPECT_NEAR(hsm_form(u, wd, {}), form, 1e-12);
  EXPECT_EQ(hsm_form(u, w, {2, 0, WeightKind::none}), gradient_power_integral(u, 2));
}

TEST(Forms, TensorHatIsSeparable) {
  const double h = 1.0 / 64;
  const auto gd = GridDomain::make(Domain::box(2, Vec3(-1, -1, 0), Vec3(1, 1, 0)), h);
  const auto u = GridFunction::sample(gd, [](const Vec3& x) { return hat(x, 2); });
  double S = 0;  // h sum_j (1 - |y_j|)^2
  for (int j = -64; j <= 64; ++j) S += h * std::pow(1 - std::abs(j * h), 2);
  EXPECT_NEAR(gradient_power_integral(u, 2), 2 * 2 * S, 1e-12);
  EXPECT_NEAR(gradient_power_integral(u, 2), 8.0 / 3.0, 1e-3);
}

TEST(Forms, LqNorms) {
  const double h = 1.0 / 512;
  const auto gd = GridDomain::make(Domain::interval(-1, 1), h);
  const auto u = GridFunction::sample(gd, [](const Vec3& x) { return std::pow(1 - x[0] * x[0], 2); });
  EXPECT_NEAR(lq_norm(u, 2), std::sqrt(256.0 / 315), 1e-6);
  const auto gd2 = GridDomain::make(Domain::box(2, Vec3(0, 0, 0), Vec3(1, 1, 0)), 1.0 / 16);
  const auto plateau = GridFunction::sample(gd2, [](const Vec3&) { return 1.0; });
  const double m = gd2->unknowns() * gd2->grid().cell_volume();
  for (double q : {1.0, 2.0, 5.0}) EXPECT_NEAR(lq_norm(plateau, q), std::pow(m, 1 / q), 1e-14);
}

TEST(Forms, LaplacianMatrixReproducesGradientEnergy) {
  for (int dim : {1, 2, 3}) {
    const Domain d = dim == 1 ? Domain::interval(0, 1) : Domain::ball(dim, Vec3::Zero(), 1);
    const auto gd = GridDomain::make(d, dim == 3 ? 0.2 : 0.05);
    const auto u = random_function(gd, dim);
    const Eigen::VectorXd x = u.unknowns();
    const double lhs = x.dot(laplacian_matrix(*gd) * x) * gd->grid().cell_volume();
    EXPECT_NEAR(lhs, gradient_power_integral(u, 2), 1e-10 * lhs);
  }
}

TEST(Forms, QuotientScaleInvariance) {
  const auto gd = GridDomain::make(Domain::ball(3, Vec3::Zero(), 1), 0.125);
  const auto w = weight_field(gd, WeightKind::davies);
  const auto u = random_function(gd, 3);
  for (double c : {-3.0, 0.01, 7.5}) {
    const double a = hsm_quotient(u, w, {}, 6), b = hsm_quotient(u.scaled(c), w, {}, 6);
    EXPECT_NEAR(a, b, 1e-12 * std::abs(a));
  }
  EXPECT_GE(hsm_quotient(u, w, {2, 0, WeightKind::none}, 6), 0);
}

TEST(Forms, GradientMatchesFiniteDifferences) {
  const auto gd = GridDomain::make(Domain::polygon({Vec2(0, 0), Vec2(1, 0), Vec2(0.4, 0.9)}), 1.0 / 16);
  const auto u = random_function(gd, 17);
  struct Case { FormParams params; double q; Objective obj; };
  const auto w2 = weight_field(gd, WeightKind::davies, 2);
  const auto w3 = weight_field(gd, WeightKind::davies, 3);
  for (const auto& c : {Case{{2, 0, WeightKind::davies}, 4, Objective::hsm_quotient},
                        Case{{2, 0.1, WeightKind::davies}, 2.5, Objective::hsm_quotient},
                        Case{{3, 0, WeightKind::davies}, 5, Objective::hsm_quotient},
                        Case{{2, 0, WeightKind::davies}, 2, Objective::hardy_ratio}}) {
    const auto& w = c.params.p == 3 ? w3 : w2;
    const auto r = quotient_with_gradient(u, w, c.params, c.q, c.obj);
    const Eigen::VectorXd x = u.unknowns();
    auto value = [&](const Eigen::VectorXd& y) {
      return quotient_with_gradient(GridFunction::from_unknowns(gd, y), w, c.params, c.q, c.obj).value;
    };
    for (Eigen::Index k = 0; k < x.size(); k += 3) {
      const double h = 1e-6 * std::max(1.0, std::abs(x[k]));
      Eigen::VectorXd xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      const double fd = (value(xp) - value(xm)) / (2 * h);
      EXPECT_NEAR(r.gradient[k], fd, 1e-5 * std::max(std::abs(fd), 1e-3 * r.gradient.cwiseAbs().maxCoeff()))
          << "p=" << c.params.p << " k=" << k;
    }
  }
}

TEST(Forms, InterpolationQuotient) {
  EXPECT_EQ(interpolation_theta(2, 4), 0.5);
  EXPECT_EQ(interpolation_theta(1, 2), 0.0);
  const auto make_u = [](double h) {
    const auto gd = GridDomain::make(Domain::interval(-1, 1), h);
    return std::pair{GridFunction::sample(gd, [](const Vec3& x) { return std::pow(1 - x[0] * x[0], 3); }),
                     weight_field(gd, WeightKind::euclidean)};
  };
  const auto [u, w] = make_u(1.0 / 128);
  EXPECT_NEAR(interpolation_quotient(u, w, kEuclid, 2), 1.0, 1e-14);
  const double a = interpolation_quotient(u, w, kEuclid, 4);
  const auto [u2, w2] = make_u(1.0 / 256);
  const double b = interpolation_quotient(u2, w2, kEuclid, 4);
  EXPECT_GT(a, 0);
  EXPECT_LT(std::abs(a - b), 0.01 * b);
  EXPECT_THROW(interpolation_quotient(u, w, {3, 0, WeightKind::euclidean}, 4), InvalidInput);
}

TEST(Forms, InterpolationHoelderConsistency) {
  // ||u||_q <= ||u||_2^{1-theta} ||u||_6^theta, so the interpolation quotient at
  // q dominates the Sobolev-exponent quotient raised to theta.
  const auto gd = GridDomain::make(Domain::ball(3, Vec3::Zero(), 1), 0.1);
  const auto w = weight_field(gd, WeightKind::davies);
  for (const auto& f : grid_corpus(gd->domain(), 8, 4)) {
    const auto u = f.sample(gd);
    if (lq_norm(u, 2) == 0) continue;  // bump fell between the nodes
    const double s = interpolation_quotient(u, w, {}, 6);
    for (double q : {2.5, 3.0, 4.0, 5.0}) {
      const double th = interpolation_theta(3, q);
      EXPECT_GE(interpolation_quotient(u, w, {}, q), std::pow(s, th) * (1 - 1e-12)) << f.id << " " << q;
    }
  }
}

TEST(Forms, HhlCheck) {
  const auto gd = GridDomain::make(Domain::ball(3, Vec3::Zero(), 1), 0.1);
  const auto w = weight_field(gd, WeightKind::davies);
  const auto zero = hhl_check(GridFunction(gd), w, 1);
  EXPECT_EQ(zero.lhs, 0);
  EXPECT_EQ(zero.rhs, 0);
  const double K3 = *constant_chain(3).K;
  for (const auto& f : grid_corpus(gd->domain(), 6, 1)) EXPECT_GT(hhl_check(f.sample(gd), w, K3).slack, 0) << f.id;
  const auto gdi = GridDomain::make(Domain::interval(0, 1), 0.1);
  EXPECT_THROW(hhl_check(GridFunction(gdi), weight_field(gdi, WeightKind::euclidean), 1, kEuclid), InvalidInput);
}

TEST(Forms, MissingWeightUnderSupport) {
  const auto gd = GridDomain::make(Domain::interval(-1, 1), 0.125);
  auto w = weight_field(gd, WeightKind::euclidean);
  const auto u = GridFunction::sample(gd, [](const Vec3& x) { return hat(x, 1); });
  w.values[gd->active_nodes()[3]] = std::nan("");
  EXPECT_THROW(hsm_form(u, w, kEuclid), InvalidInput);
  EXPECT_THROW(hsm_form(u, weight_field(gd, WeightKind::euclidean), {}), InvalidInput);  // kind mismatch
}

TEST(Forms, NegativePartShrinksUnderRefinement) {
  // Smooth corpus on the square with euclidean weight: the form is never
  // meaningfully negative, and any negative part shrinks with h.
  const Domain sq = Domain::box(2, Vec3(0, 0, 0), Vec3(1, 1, 0));
  const auto corpus = grid_corpus(sq, 6, 2);
  for (const auto& f : corpus) {
    double prev = -1;
    for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
      const auto gd = GridDomain::make(sq, h);
      const auto u = f.sample(gd);
      const double neg = std::max(0.0, -hsm_form(u, weight_field(gd, WeightKind::euclidean), kEuclid));
      const double scale = std::pow(lq_norm(u, 2), 2);
      EXPECT_LE(neg, 10 * h * scale) << f.id;
      if (prev >= 0 && prev > 0) EXPECT_LE(neg, 0.75 * prev) << f.id;
      prev = neg;
    }
  }
}

TEST(Minimize, TraceMonotoneAndDeterministic) {
  const auto gd = GridDomain::make(Domain::ball(2, Vec3::Zero(), 1), 1.0 / 16);
  const auto w = weight_field(gd, WeightKind::davies);
  const auto init = grid_corpus(gd->domain(), 1)[0].sample(gd);
  MinimizeOptions opt;
  opt.iterations = 40;
  const auto r1 = minimize_quotient(init, w, {}, 4, opt);
  const auto r2 = minimize_quotient(init, w, {}, 4, opt);
  ASSERT_EQ(r1.trace.size(), r2.trace.size());
  for (std::size_t i = 0; i < r1.trace.size(); ++i) EXPECT_EQ(r1.trace[i].quotient, r2.trace[i].quotient);
  for (std::size_t i = 1; i < r1.trace.size(); ++i) EXPECT_LE(r1.trace[i].quotient, r1.trace[i - 1].quotient);
  EXPECT_LT(r1.trace.back().quotient, r1.trace.front().quotient);
  EXPECT_GT(r1.trace.back().quotient, 0);
}

TEST(Minimize, FixedPointRestart) {
  const auto gd = GridDomain::make(Domain::interval(-1, 1), 1.0 / 16);
  const auto w = weight_field(gd, WeightKind::euclidean);
  const auto init = GridFunction::sample(gd, [](const Vec3& x) { return hat(x, 1); });
  MinimizeOptions opt;
  opt.iterations = 5000;
  opt.sobolev_preconditioner = true;
  const auto r1 = minimize_quotient(init, w, kEuclid, 4, opt);
  ASSERT_TRUE(r1.stalled);
  EXPECT_GT(r1.trace.size(), 10u);
  const auto r2 = minimize_quotient(r1.best, w, kEuclid, 4, opt);
  for (const auto& t : r2.trace) EXPECT_NEAR(t.quotient, r1.trace.back().quotient, 1e-12 * r1.trace.back().quotient);
}

TEST(Minimize, Ball3DStaysAboveChainConstant) {
  const auto gd = GridDomain::make(Domain::ball(3, Vec3::Zero(), 1), 0.125);
  const auto w = weight_field(gd, WeightKind::davies);
  const auto init = grid_corpus(gd->domain(), 4)[3].sample(gd);
  MinimizeOptions opt;
  opt.iterations = 30;
  opt.sobolev_preconditioner = true;
  const auto r = minimize_quotient(init, w, {}, 6, opt);
  EXPECT_GE(r.trace.back().quotient, *constant_chain(3).K);
}
