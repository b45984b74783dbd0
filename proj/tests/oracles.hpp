#pragma once

// Independent reference computations used by the tests. None of these call
// into the library's numerical routines.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

// N! e_N(lambda) by enumerating every index subset (s <= 20).
inline long double subset_chi(const std::vector<double>& lambdas, int n) {
  const int s = static_cast<int>(lambdas.size());
  if (n > s) return 0.0L;
  long double sum = 0.0L;
  for (std::uint32_t mask = 0; mask < (1u << s); ++mask) {
    if (__builtin_popcount(mask) != n) continue;
    long double prod = 1.0L;
    for (int j = 0; j < s; ++j)
      if (mask & (1u << j)) prod *= lambdas[j];
    sum += prod;
  }
  for (int k = 2; k <= n; ++k) sum *= k;
  return sum;
}

// N! e_N(lambda) from the coefficients of prod_j (1 + lambda_j x), long double.
inline std::vector<long double> polynomial_chi(const std::vector<double>& lambdas, int n_max) {
  std::vector<long double> e(n_max + 1, 0.0L);
  e[0] = 1.0L;
  for (double l : lambdas)
    for (int k = n_max; k >= 1; --k) e[k] += l * e[k - 1];
  long double fact = 1.0L;
  for (int k = 1; k <= n_max; ++k) {
    fact *= k;
    e[k] *= fact;
  }
  return e;
}

// Probability that n draws from L equally likely outcomes are all distinct.
inline long double birthday_product(int l, int n) {
  long double p = 1.0L;
  for (int k = 1; k < n; ++k) p *= 1.0L - static_cast<long double>(k) / l;
  return p;
}

// E[sum lambda^2] on the 2-simplex (s = 3) with density proportional to
// weight(l1, l2, l3), by the midpoint rule on an m x m triangular grid.
inline double simplex3_mean_purity(const std::function<double(double, double, double)>& weight, int m = 1500) {
  double num = 0.0, den = 0.0;
  const double h = 1.0 / m;
  for (int i = 0; i < m; ++i)
    for (int j = 0; i + j < m; ++j) {
      // Centroids of the two triangles in each grid cell.
      const double pts[2][2] = {{(i + 1.0 / 3) * h, (j + 1.0 / 3) * h}, {(i + 2.0 / 3) * h, (j + 2.0 / 3) * h}};
      for (int t = 0; t < (i + j + 1 < m ? 2 : 1); ++t) {
        const double a = pts[t][0], b = pts[t][1], c = 1.0 - a - b;
        const double w = weight(a, b, c);
        num += w * (a * a + b * b + c * c);
        den += w;
      }
    }
  return num / den;
}

// Eigenvalue density of the induced measure for square s x s complex
// Gaussian matrices at s = 3: squared Vandermonde determinant.
inline double induced_weight(double a, double b, double c) {
  const double v = (a - b) * (a - c) * (b - c);
  return v * v;
}

// The extremal distribution with S coefficients and purity P, built in long double.
inline std::vector<double> extremal(double p, int s, int sign) {
  const long double r = std::sqrt(std::max(0.0L, static_cast<long double>(s - 1) * (s * static_cast<long double>(p) - 1)));
  const long double l1 = (1.0L + sign * r) / s;
  std::vector<double> out(s, static_cast<double>((1.0L - l1) / (s - 1)));
  out[0] = static_cast<double>(l1);
  return out;
}

// Taylor series of U_N(P) in sqrt P: 1 - sum_{k>=2} (-1)^k N (N-1)^(k-2) P^(k/2), summed to k_max.
inline long double upper_series(long double p, int n, int k_max) {
  long double sum = 0.0L;
  const long double q = std::sqrt(p);
  long double term = n * p;  // k = 2
  for (int k = 2; k <= k_max; ++k) {
    sum += (k % 2 == 0 ? 1 : -1) * term;
    term *= (n - 1) * q;
  }
  return 1.0L - sum;
}

}  // namespace oracle
