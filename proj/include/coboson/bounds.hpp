#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coboson/schmidt.hpp"

namespace coboson {

inline constexpr double kChainTol = 1e-12;

// 1 - P N / (1 + (N-1) sqrt P): the tight, S-independent upper bound.
double upper_bound_u(double p, int n);

// N -> infinity limit of upper_bound_u.
double asymptotic_upper(double p);

struct ChainLink {
  std::string name;
  double slack = 0.0;  // upper side minus lower side; negative means violated
};

/// Every member of the ordered chain
///   1 - N P <= ratio_uniform <= chi_{N+1}/chi_N <= ratio_peaked(S) <= U_N(P) <= 1 - P
/// for one (P, N), with the optional members present when S or a distribution
/// was supplied.
struct BoundsReport {
  double p = 0.0;
  int n = 0;
  std::optional<int> s;
  int l = 0;
  double lower_loose = 0.0;          // 1 - N P, unclamped
  double lower_loose_clamped = 0.0;  // max(0, 1 - N P)
  double lower_tight = 0.0;          // zero once N >= L
  std::optional<double> ratio;
  std::optional<double> upper_finite_s;  // zero once N >= S
  double upper_tight = 0.0;
  double upper_loose = 0.0;
  bool chain_ok = false;
  std::vector<ChainLink> slacks;
};

/// Builds the report. When `d` is given its purity must equal P within 1e-9
/// (PurityMismatch otherwise) and S defaults to d.s().
BoundsReport bounds_chain(double p, int n, std::optional<int> s = std::nullopt,
                          const SchmidtDistribution* d = nullptr, double chain_tol = kChainTol);

// Lower bound of the chain for (P, N): ratio_uniform where N < L, else 0.
double tight_lower_bound(double p, int n);
// Finite-S upper bound: ratio_peaked where N < S, else 0.
double finite_s_upper_bound(double p, int s, int n);

struct SeriesEstimate {
  double value = 0.0;
  // N^3 |M(4) + 2 P^3 - 2 P M(3)|, present when M(4) is available.
  std::optional<double> error_scale;
};

/// Small-(N P) expansion 1 - N P + N^2 (M(3) - P^2). Needs M(1..3).
SeriesEstimate series_expansion_ratio(const PowerSums& ps, int n);

struct ExpansionResult {
  double value = 0.0;
  bool outside_convergence_radius = false;  // P >= 1/(N-1)^2
};

/// Truncated expansion of U_N(P) in powers of sqrt P. order 2 keeps terms
/// through P^{3/2}; order 3 adds the P^2 term.
ExpansionResult upper_bound_expansion(double p, int n, int order = 2);

struct DeviationRow {
  int n = 0;
  double p = 0.0;
  double dev_lower_loose = 0.0;  // N P
  double dev_lower_tight = 0.0;  // 1 - tight lower bound
  double dev_upper_tight = 0.0;  // 1 - U_N(P)
  double dev_upper_loose = 0.0;  // P
};

// 200 log-spaced points over [1e-9, 1].
std::vector<double> default_p_grid();
std::vector<double> log_spaced(double lo, double hi, int count);

/// Deviations 1 - bound for every (n, P), rows ordered by n then P.
std::vector<DeviationRow> deviation_curves(const std::vector<int>& n_list,
                                           const std::vector<double>& p_grid,
                                           unsigned workers = 1);

}  // namespace coboson
