// No L^1 Hardy inequality in one dimension: for u_m(t) = (1 - t^2)^m on
// (-1, 1) the total variation stays 2 while int |u| / dist(t) grows like 2/m,
// so no constant C makes  int |u'| >= C int |u| / dist  hold.
//
// With s = 1 - |t| = e^{-y}:  int u/dist = 2 int_0^inf (e^{-y}(2 - e^{-y}))^m dy.

#include <cmath>
#include <cstdio>

#include "hsm/hsm.hpp"

int main() {
  const auto [x, w] = hsm::gauss_legendre(16);
  auto integrate = [&](auto&& f, double a, double b, int chunks) {
    double s = 0;
    const double len = (b - a) / chunks;
    for (int c = 0; c < chunks; ++c)
      for (std::size_t i = 0; i < x.size(); ++i) s += 0.5 * len * w[i] * f(a + len * (c + 0.5 * (x[i] + 1)));
    return s;
  };
  std::printf("%10s %16s %16s %16s %12s\n", "m", "int |u'|", "int |u|/dist", "ratio", "m * ratio");
  for (double m : {1.0, 0.5, 0.25, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001}) {
    // |u'| on (0, 1) is 2 m t (1 - t^2)^{m-1}; the same substitution, in logs.
    const double tv = 2 * integrate(
                              [&](double y) {
                                const double s = std::exp(-y);
                                return 2 * m * (1 - s) * std::exp(-m * y + (m - 1) * std::log1p(1 - s));
                              },
                              0, 60 / m, 400);
    const double hardy =
        2 * integrate([&](double y) { return std::exp(-m * y + m * std::log1p(1 - std::exp(-y))); }, 0, 60 / m, 400);
    std::printf("%10.4g %16.10f %16.8f %16.8f %12.6f\n", m, tv, hardy, hardy / tv, m * hardy / tv);
  }
}
