#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "hsm/grid.hpp"

namespace hsm {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Dirichlet finite-difference Laplacian on the active nodes: 2N/h^2 on the
/// diagonal, -1/h^2 between active nearest neighbours. u^T L u h^N equals the
/// forward-difference sum of |grad u|^2 h^N.
inline SparseMatrix laplacian_matrix(const GridDomain& gd) {
  const Grid& g = gd.grid();
  const double inv_h2 = 1.0 / (g.h * g.h);
  const auto& act = gd.active_nodes();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(act.size() * (2 * g.dim + 1));
  for (std::size_t k = 0; k < act.size(); ++k) {
    const std::size_t n = act[k];
    trip.emplace_back(k, k, 2.0 * g.dim * inv_h2);
    for (int a = 0; a < g.dim; ++a) {
      const std::size_t s = g.stride(a);
      for (std::size_t m : {n - s, n + s}) {
        const auto u = gd.unknown(m);
        if (u >= 0) trip.emplace_back(k, u, -inv_h2);
      }
    }
  }
  SparseMatrix L(act.size(), act.size());
  L.setFromTriplets(trip.begin(), trip.end());
  return L;
}

}  // namespace hsm
