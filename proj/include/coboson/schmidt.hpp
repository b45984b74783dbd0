#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace coboson {

inline constexpr double kDefaultNormTol = 1e-12;
inline constexpr double kDefaultConstraintTol = 1e-12;
inline constexpr double kDefaultCeilTol = 1e-9;

struct DistributionOptions {
  double norm_tol = kDefaultNormTol;
  // Coefficients strictly below this floor are removed. Zero disables dropping.
  double drop_below = 0.0;
  // Rescale to unit sum before the normalization check. Off by default: input
  // is never modified silently.
  bool renormalize = false;
};

/// Squared Schmidt coefficients of a two-fermion state, kept sorted in
/// non-increasing order. Immutable once constructed; every transform in the
/// library returns a fresh object.
class SchmidtDistribution {
 public:
  std::span<const double> lambdas() const noexcept { return lambdas_; }
  std::size_t s() const noexcept { return lambdas_.size(); }
  double operator[](std::size_t i) const noexcept { return lambdas_[i]; }
  double largest() const noexcept { return lambdas_.front(); }
  std::size_t nonzero_count() const noexcept;

  friend bool operator==(const SchmidtDistribution&, const SchmidtDistribution&) = default;

 private:
  friend SchmidtDistribution make_distribution(std::span<const double>, const DistributionOptions&);
  explicit SchmidtDistribution(std::vector<double> sorted) : lambdas_(std::move(sorted)) {}

  std::vector<double> lambdas_;
};

/// Validates and canonicalizes raw coefficients.
///
/// Entries in [-norm_tol, 0) are clipped to zero. Throws EmptyInput,
/// NegativeCoefficient or NotNormalized.
SchmidtDistribution make_distribution(std::span<const double> raw,
                                      const DistributionOptions& options = {});

inline SchmidtDistribution make_distribution(std::initializer_list<double> raw,
                                             const DistributionOptions& options = {}) {
  return make_distribution(std::span<const double>(raw.begin(), raw.size()), options);
}

/// Power sums M(1..m_max). Each M(k) is accumulated in double-double
/// arithmetic; `values()` holds the rounded leading part and `residuals()` the
/// trailing part, so consumers that need more than 53 bits can recover them.
class PowerSums {
 public:
  PowerSums() = default;
  // Plain double values, e.g. read from user input. Residuals are zero.
  explicit PowerSums(std::vector<double> values);
  PowerSums(std::vector<double> values, std::vector<double> residuals);

  int m_max() const noexcept { return static_cast<int>(values_.size()); }
  // 1-based: M(1) is at(1).
  double at(int k) const { return values_.at(static_cast<std::size_t>(k - 1)); }
  double residual(int k) const { return residuals_.at(static_cast<std::size_t>(k - 1)); }
  double purity() const { return at(2); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> residuals() const noexcept { return residuals_; }
  // True when residuals carry the low-order part of each M(k).
  bool extended() const noexcept { return extended_; }

 private:
  std::vector<double> values_;
  std::vector<double> residuals_;
  bool extended_ = false;
};

PowerSums power_sums(const SchmidtDistribution& d, int m_max);

/// Checks M(1)=1, 0<M(k)<=1, monotone decrease and the Hölder/Jensen sandwich
/// M(k-1)^((k-1)/(k-2)) <= M(k) <= M(k-1)^(k/(k-1)) for k>=3.
bool satisfies_moment_constraints(const PowerSums& ps, double tol = kDefaultConstraintTol,
                                  double norm_tol = kDefaultNormTol);

double purity(const SchmidtDistribution& d);

// Natural-log Rényi entropy of order m >= 2.
double renyi_entropy(const SchmidtDistribution& d, int m);

/// L = ceil(1/P), snapping to an integer when 1/P lies within ceil_tol of one.
int min_schmidt_number(double p, double ceil_tol = kDefaultCeilTol);

enum class Branch { Plus, Minus };

/// Distribution with S-1 equal coefficients and purity P:
/// lambda_1 = (1 ± sqrt((S-1)(S P - 1)))/S, the rest (1 - lambda_1)/(S-1).
SchmidtDistribution extremal_distribution(double p, int s, Branch branch);

// Minus branch at S = L: the fewest Schmidt modes compatible with P.
SchmidtDistribution uniform_distribution(double p);

// Plus branch: one dominant coefficient, tending to sqrt(P) as S grows.
SchmidtDistribution peaked_distribution(double p, int s);

double total_variation(const SchmidtDistribution& a, const SchmidtDistribution& b);

namespace detail {
// sqrt((S-1)(S P - 1)) with rounding-level negatives (and P within ceil_tol
// below 1/S) snapped to zero. Shared by the extremal distributions and the
// closed-form ratios so that both agree bit-for-bit at P = 1/S.
double extremal_radical(double p, int s);
}  // namespace detail

}  // namespace coboson
