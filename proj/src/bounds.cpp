#include "coboson/bounds.hpp"

#include <cmath>
#include <sstream>

#include "coboson/chi.hpp"
#include "coboson/error.hpp"
#include "parallel.hpp"

namespace coboson {

namespace {

void check_purity(double p) {
  if (!(p > 0.0) || p > 1.0) throw Error(ErrorKind::InvalidArgument, "purity must lie in (0, 1]");
}

void check_n(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be positive");
}

}  // namespace

double upper_bound_u(double p, int n) {
  check_purity(p);
  check_n(n);
  return 1.0 - p * n / (1.0 + (n - 1) * std::sqrt(p));
}

double asymptotic_upper(double p) {
  check_purity(p);
  return 1.0 - std::sqrt(p);
}

double tight_lower_bound(double p, int n) {
  check_purity(p);
  check_n(n);
  const int l = min_schmidt_number(p);
  // The uniform state has only L modes, so chi_{N+1} = 0 for N >= L.
  if (n >= l) return 0.0;
  const double closed = detail::extremal_ratio(p, l, n, -1.0);
  // P within ceil_tol below 1/L is treated as 1/L; there the closed form
  // undershoots the loose bound by O(1/L - P), and the loose bound is still valid.
  if (l * p < 1.0) return std::max(closed, 1.0 - n * p);
  return closed;
}

double finite_s_upper_bound(double p, int s, int n) {
  check_purity(p);
  check_n(n);
  if (n >= s) return 0.0;
  // Same snapped regime as tight_lower_bound; S = L there and both bounds coincide.
  if (s * p < 1.0) return tight_lower_bound(p, n);
  return ratio_peaked(p, s, n);
}

BoundsReport bounds_chain(double p, int n, std::optional<int> s, const SchmidtDistribution* d,
                          double chain_tol) {
  check_purity(p);
  check_n(n);
  if (d != nullptr) {
    const double actual = purity(*d);
    if (std::abs(actual - p) > 1e-9) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "distribution has purity " << actual << ", expected " << p;
      throw Error(ErrorKind::PurityMismatch, msg.str());
    }
    const int ds = static_cast<int>(d->s());
    if (s && *s != ds) {
      std::ostringstream msg;
      msg << "S = " << *s << " does not match the distribution's " << ds << " coefficients";
      throw Error(ErrorKind::PurityMismatch, msg.str());
    }
    s = ds;
  }
  if (s && std::fma(static_cast<double>(*s), p, -1.0) < -kDefaultCeilTol) {
    std::ostringstream msg;
    msg << "S = " << *s << " cannot carry purity " << p;
    throw Error(ErrorKind::InfeasiblePurity, msg.str());
  }

  BoundsReport report;
  report.p = p;
  report.n = n;
  report.s = s;
  report.l = min_schmidt_number(p);
  report.lower_loose = 1.0 - n * p;
  report.lower_loose_clamped = std::max(0.0, report.lower_loose);
  report.lower_tight = tight_lower_bound(p, n);
  report.upper_tight = upper_bound_u(p, n);
  report.upper_loose = 1.0 - p;
  if (s) report.upper_finite_s = finite_s_upper_bound(p, *s, n);
  if (d != nullptr) report.ratio = chi_ratio(*d, n);

  auto& links = report.slacks;
  links.push_back({"lower_loose<=lower_tight", report.lower_tight - report.lower_loose});
  if (report.ratio) {
    links.push_back({"lower_tight<=ratio", *report.ratio - report.lower_tight});
    if (report.upper_finite_s)
      links.push_back({"ratio<=upper_finite_s", *report.upper_finite_s - *report.ratio});
    else
      links.push_back({"ratio<=upper_tight", report.upper_tight - *report.ratio});
  } else if (report.upper_finite_s) {
    links.push_back({"lower_tight<=upper_finite_s", *report.upper_finite_s - report.lower_tight});
  } else {
    links.push_back({"lower_tight<=upper_tight", report.upper_tight - report.lower_tight});
  }
  if (report.upper_finite_s)
    links.push_back({"upper_finite_s<=upper_tight", report.upper_tight - *report.upper_finite_s});
  links.push_back({"upper_tight<=upper_loose", report.upper_loose - report.upper_tight});

  report.chain_ok = true;
  for (const auto& link : links)
    if (!(link.slack >= -chain_tol)) report.chain_ok = false;
  return report;
}

SeriesEstimate series_expansion_ratio(const PowerSums& ps, int n) {
  check_n(n);
  if (ps.m_max() < 3) throw Error(ErrorKind::InsufficientPowerSums, "series expansion needs M(1..3)");
  const double p = ps.at(2);
  const double m3 = ps.at(3);
  const double big_n = n;
  SeriesEstimate out;
  out.value = 1.0 - big_n * p + big_n * big_n * (m3 - p * p);
  if (ps.m_max() >= 4)
    out.error_scale = big_n * big_n * big_n * std::abs(ps.at(4) + 2.0 * p * p * p - 2.0 * p * m3);
  return out;
}

ExpansionResult upper_bound_expansion(double p, int n, int order) {
  check_purity(p);
  check_n(n);
  if (order != 2 && order != 3) throw Error(ErrorKind::InvalidArgument, "order must be 2 or 3");
  // U_N(P) = 1 - sum_{k>=2} (-1)^k N (N-1)^(k-2) P^(k/2)
  const double big_n = n;
  const double root = std::sqrt(p);
  const int last = order + 1;
  double value = 1.0;
  for (int k = 2; k <= last; ++k) {
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    value -= sign * big_n * std::pow(big_n - 1.0, k - 2) * std::pow(root, k);
  }
  ExpansionResult out;
  out.value = value;
  out.outside_convergence_radius = n >= 2 && p * (big_n - 1.0) * (big_n - 1.0) >= 1.0;
  return out;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1)
    throw Error(ErrorKind::InvalidArgument, "log_spaced needs 0 < lo <= hi and count >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> default_p_grid() { return log_spaced(1e-9, 1.0, 200); }

std::vector<DeviationRow> deviation_curves(const std::vector<int>& n_list,
                                           const std::vector<double>& p_grid, unsigned workers) {
  for (double p : p_grid) check_purity(p);
  for (int n : n_list) check_n(n);
  std::vector<DeviationRow> rows(n_list.size() * p_grid.size());
  detail::parallel_for(rows.size(), workers, [&](std::size_t i) {
    const int n = n_list[i / p_grid.size()];
    const double p = p_grid[i % p_grid.size()];
    DeviationRow& row = rows[i];
    row.n = n;
    row.p = p;
    row.dev_lower_loose = n * p;
    row.dev_lower_tight = 1.0 - tight_lower_bound(p, n);
    row.dev_upper_tight = p * n / (1.0 + (n - 1) * std::sqrt(p));
    row.dev_upper_loose = p;
  });
  return rows;
}

}  // namespace coboson
