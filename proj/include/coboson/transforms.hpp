#pragma once

#include <cstddef>

#include "coboson/schmidt.hpp"

namespace coboson {

/// Three positions (1-based, strictly increasing) in a distribution's
/// canonical order, with the invariants K1 = sum and K2 = sum of squares.
class TripleSelection {
 public:
  TripleSelection(const SchmidtDistribution& d, std::size_t j1, std::size_t j2, std::size_t j3);

  std::size_t j1() const noexcept { return j1_; }
  std::size_t j2() const noexcept { return j2_; }
  std::size_t j3() const noexcept { return j3_; }
  double k1() const noexcept { return k1_; }
  double k2() const noexcept { return k2_; }

 private:
  std::size_t j1_, j2_, j3_;
  double k1_, k2_;
};

struct Triple {
  double first = 0.0, second = 0.0, third = 0.0;
  double product() const noexcept { return first * second * third; }
};

// Peaking map on (K1, K2): j1 <- (K1 + R)/3, j2 = j3 <- (2 K1 - R)/6,
// R = sqrt(6 K2 - 2 K1^2).
Triple gamma_peaked_values(double k1, double k2);
// Uniforming map: minus branch when K1^2 >= 2 K2, otherwise
// (0, (K1 + sqrt(2 K2 - K1^2))/2, (K1 - sqrt(2 K2 - K1^2))/2).
Triple gamma_uniform_values(double k1, double k2);

/// Applies the map to the selected triple, leaves every other coefficient as
/// is and re-canonicalizes.
SchmidtDistribution gamma_peaked(const SchmidtDistribution& d, const TripleSelection& t);
SchmidtDistribution gamma_uniform(const SchmidtDistribution& d, const TripleSelection& t);

struct ProductBounds {
  double lower = 0.0;  // product after the uniforming map
  double value = 0.0;  // lambda_j1 lambda_j2 lambda_j3
  double upper = 0.0;  // product after the peaking map
  bool holds(double tol = 1e-15) const noexcept { return lower <= value + tol && value <= upper + tol; }
};

ProductBounds triple_product_bounds(const SchmidtDistribution& d, const TripleSelection& t);

struct MonotonicityCheck {
  double r_u = 0.0;
  double r = 0.0;
  double r_p = 0.0;
  bool ok = false;
};

inline constexpr double kMonotonicityTol = 1e-12;

/// chi_{n+1}/chi_n before and after each map; ok iff r_u <= r <= r_p within tol.
MonotonicityCheck ratio_monotonicity_check(const SchmidtDistribution& d, const TripleSelection& t,
                                           int n, double tol = kMonotonicityTol);

enum class Direction { Uniform, Peaked };

struct IterationResult {
  SchmidtDistribution distribution;
  int iterations = 0;
  double last_change = 0.0;
  bool converged = false;
};

/// Repeatedly applies one map until the largest coefficient change drops below
/// tol. Peaking acts on (largest, second largest, smallest); uniforming on
/// (largest, second smallest nonzero, smallest nonzero). The result is
/// returned even when max_iters is exhausted, with converged = false.
IterationResult iterate_to_extremal(const SchmidtDistribution& d, Direction direction,
                                    int max_iters = 100000, double tol = 1e-15);

}  // namespace coboson
