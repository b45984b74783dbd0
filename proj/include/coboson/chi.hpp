#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "coboson/schmidt.hpp"

namespace coboson {

enum class ChiMethod { Dp, Newton, Brute };

std::string_view to_string(ChiMethod method);

/// chi_0 .. chi_{n_max}, the coboson normalization factors N! e_N(lambda),
/// together with their natural logarithms. log_chi is -inf exactly where chi
/// is an exact zero; it stays finite (and accurate) where chi underflows.
struct NormalizationSequence {
  int n_max = 0;
  std::vector<double> chi;
  std::vector<double> log_chi;
  ChiMethod method = ChiMethod::Dp;

  // Newton recursion only: decimal digits lost beyond double precision,
  // estimated by rerunning the recursion with the power sums perturbed at
  // their input precision, and whether that exceeds the 6-digit budget.
  // Values inside that noise are reported as exact zeros.
  double digits_lost = 0.0;
  bool stability_warning = false;
};

inline constexpr double kUnderflowFloor = 1e-300;
inline constexpr double kStabilityDigits = 6.0;

/// All-positive prefix recurrence chi_k <- chi_k + k lambda_j chi_{k-1} over the
/// coefficients in canonical order. Every entry carries its own binary
/// exponent, so chi values far below the double range keep full relative
/// accuracy in log_chi. Entries with k > s are exact zeros.
NormalizationSequence chi_dp(const SchmidtDistribution& d, int n_max);

struct DivideConquerOptions {
  std::size_t chunk = 1 << 14;
  unsigned workers = 1;
};

/// Same quantity via chunked evaluation: each chunk's normalized sequence is
/// computed independently, and chunks are combined pairwise in a fixed tree
/// by the binomial mixture chi(A+B)_n = sum_k Binom(n,k;p) chi(A)_k chi(B)_{n-k},
/// p = mass(A)/mass(A+B). Chunks run on up to `workers` threads; the
/// combination order does not depend on the worker count.
NormalizationSequence chi_divide_conquer(const SchmidtDistribution& d, int n_max,
                                         const DivideConquerOptions& options = {});

/// Power-sum recursion chi_N = (N-1)! sum_m (-1)^(1+m)/(N-m)! M(m) chi_{N-m}.
/// The alternating sum is evaluated in 113-bit binary floating point; the
/// result is rounded to double. Throws InsufficientPowerSums if
/// ps.m_max() < n_max.
NormalizationSequence chi_newton(const PowerSums& ps, int n_max);

// Largest relative deviation of chi_newton from chi_dp over 0..n_max,
// expressed as decimal digits lost beyond double epsilon.
double newton_digits_lost_vs_dp(const SchmidtDistribution& d, int n_max);

inline constexpr double kBruteForceLimit = 1e7;

/// Direct enumeration of every index subset. Throws TooLarge when
/// binomial(s, k) exceeds 1e7 for any k <= n_max.
NormalizationSequence chi_bruteforce(const SchmidtDistribution& d, int n_max);

enum class BirthdayMode { Enumerate, MonteCarlo };

struct BirthdayEstimate {
  double probability = 0.0;
  double standard_error = 0.0;  // zero for enumeration
  std::uint64_t trials = 0;
};

inline constexpr double kBirthdayEnumerationLimit = 1e8;

/// Probability that n independent draws from lambda are pairwise distinct.
/// Enumeration sums over all s^n ordered assignments (TooLarge past 1e8).
BirthdayEstimate birthday_probability(const SchmidtDistribution& d, int n, BirthdayMode mode,
                                      std::uint64_t trials = 0, std::uint64_t seed = 0);

/// chi_{n+1}/chi_n, formed in the log domain. Throws VanishingDenominator
/// when n > s or chi_n is zero.
double chi_ratio(const SchmidtDistribution& d, int n, ChiMethod method = ChiMethod::Dp);

// <N|[c, c^dagger]|N> = 2 chi_{N+1}/chi_N - 1.
double commutator_expectation(const SchmidtDistribution& d, int n);

// (1 - sqrt P)^(n-1) (1 + (n-1) sqrt P): infinite-S peaked state.
double chi_peaked_closed(double p, int n);

// L!/((L-n)! L^n) as prod_{k<n} (1 - k/L); zero for n > L.
double chi_uniform_closed(int l, int n);
double log_chi_uniform_closed(int l, int n);

/// Closed-form chi_{n+1}/chi_n of the peaked distribution with S coefficients.
double ratio_peaked(double p, int s, int n);

/// Closed-form chi_{n+1}/chi_n of the uniform distribution, L = ceil(1/P).
double ratio_uniform(double p, int n);

namespace detail {
// Shared evaluation of both closed forms for a given sign of the radical.
double extremal_ratio(double p, int s, int n, double sign);
// chi_dp on explicit coefficients, no validation. Used for unnormalized chunks.
void scaled_prefix_chi(const double* lambdas, std::size_t count, int n_max,
                       std::vector<double>& mantissa, std::vector<long long>& exponent);
}  // namespace detail

}  // namespace coboson
