#include "phdg/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace phdg {

namespace {

void check_exactness(int exactness) {
  if (exactness < 0 || exactness > kMaxQuadratureExactness) {
    throw UnsupportedDegree("quadrature exactness " + std::to_string(exactness) +
                            " outside supported range [0, " +
                            std::to_string(kMaxQuadratureExactness) + "]");
  }
}

// n-point Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) {
        p1 = z;
        p0 = 1.0;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute derivative at the converged node.
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

}  // namespace

QuadratureRule segment_rule(int exactness) {
  check_exactness(exactness);
  const int n = exactness / 2 + 1;
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  QuadratureRule rule;
  rule.exactness = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    rule.points.emplace_back(0.5 * (x[i] + 1.0), 0.0);
    rule.weights.push_back(0.5 * w[i]);
  }
  return rule;
}

QuadratureRule triangle_rule(int exactness) {
  check_exactness(exactness);
  // Under (a,b) -> (a(1-b), b) a degree-d integrand becomes degree d in a and
  // degree d+1 in b (Jacobian 1-b).
  const int n = (exactness + 2) / 2 + ((exactness + 2) % 2);
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  QuadratureRule rule;
  rule.exactness = exactness;
  for (int j = 0; j < n; ++j) {
    const double b = 0.5 * (x[j] + 1.0);
    for (int i = 0; i < n; ++i) {
      const double a = 0.5 * (x[i] + 1.0);
      rule.points.emplace_back(a * (1.0 - b), b);
      rule.weights.push_back(0.25 * w[i] * w[j] * (1.0 - b));
    }
  }
  return rule;
}

}  // namespace phdg
