#pragma once

#include <vector>

namespace blowup {

/// Nodes and weights of a one-dimensional Gauss rule.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `n` nodes on [a, b].
GaussRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Gauss-Jacobi rule for the weight (1 - x)^alpha (1 + x)^beta on [-1, 1].
/// Nodes are ascending. Requires alpha, beta > -1.
GaussRule gauss_jacobi(int n, double alpha, double beta);

}  // namespace blowup
