// Gradient descent on t[u] / ||u||_6^2 over the unit ball in R^3, started
// from a radial bump, next to the explicit lower constant K_3.

#include <cstdio>

#include "hsm/hsm.hpp"

int main() {
  using namespace hsm;
  const Domain ball = Domain::ball(3, Vec3::Zero(), 1.0);
  const auto gd = GridDomain::make(ball, 1.0 / 12);
  const WeightField w = weight_field(gd, WeightKind::davies, 2, 4);
  const FormParams params;
  const GridFunction u0 = GridFunction::sample(gd, [](const Vec3& x) {
    const double r2 = x.squaredNorm() / 0.81;
    return r2 < 1 ? (1 - r2) * (1 - r2) : 0.0;
  });
  MinimizeOptions opt;
  opt.iterations = 60;
  opt.sobolev_preconditioner = true;
  const MinimizeResult res = minimize_quotient(u0, w, params, 6, opt);
  std::printf("%6s %22s %12s\n", "iter", "quotient", "step");
  for (const auto& t : res.trace)
    if (t.iteration % 5 == 0 || t.iteration == res.trace.back().iteration)
      std::printf("%6d %22.15g %12.4g\n", t.iteration, t.quotient, t.step);
  const ConstantChain c = constant_chain(3);
  std::printf("unknowns %zu, final quotient %.6g, K_3 = %.6g%s\n", gd->unknowns(), res.trace.back().quotient, *c.K,
              res.stalled ? " (stalled)" : "");
}
