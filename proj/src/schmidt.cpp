#include "coboson/schmidt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "coboson/error.hpp"
#include "double_double.hpp"

namespace coboson {

std::size_t SchmidtDistribution::nonzero_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(lambdas_.begin(), lambdas_.end(), [](double x) { return x > 0.0; }));
}

SchmidtDistribution make_distribution(std::span<const double> raw, const DistributionOptions& options) {
  if (raw.empty()) throw Error(ErrorKind::EmptyInput, "no coefficients given");

  std::vector<double> values;
  values.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double x = raw[i];
    if (!std::isfinite(x) || x < -options.norm_tol) {
      std::ostringstream msg;
      msg << "coefficient " << i << " is " << x;
      throw Error(ErrorKind::NegativeCoefficient, msg.str());
    }
    const double clipped = std::max(x, 0.0);
    if (options.drop_below > 0.0 && clipped < options.drop_below) continue;
    values.push_back(clipped);
  }
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "every coefficient fell below the floor");

  std::sort(values.begin(), values.end(), std::greater<>());

  // Ascending summation order for the check; the tail is the small end.
  detail::DoubleDouble sum;
  for (auto it = values.rbegin(); it != values.rend(); ++it) sum = sum + detail::DoubleDouble{*it, 0.0};

  if (options.renormalize) {
    if (!(sum.hi > 0.0)) throw Error(ErrorKind::NotNormalized, "cannot renormalize a zero vector");
    for (double& x : values) x /= sum.hi;
    sum = {};
    for (auto it = values.rbegin(); it != values.rend(); ++it) sum = sum + detail::DoubleDouble{*it, 0.0};
  }

  const double deviation = std::abs((sum.hi - 1.0) + sum.lo);
  if (deviation > options.norm_tol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "coefficients sum to " << sum.hi << " (tolerance " << options.norm_tol << ")";
    throw Error(ErrorKind::NotNormalized, msg.str());
  }
  return SchmidtDistribution(std::move(values));
}

PowerSums::PowerSums(std::vector<double> values)
    : values_(std::move(values)), residuals_(values_.size(), 0.0) {}

PowerSums::PowerSums(std::vector<double> values, std::vector<double> residuals)
    : values_(std::move(values)), residuals_(std::move(residuals)), extended_(true) {
  if (values_.size() != residuals_.size())
    throw Error(ErrorKind::InvalidArgument, "power-sum values and residuals differ in length");
}

PowerSums power_sums(const SchmidtDistribution& d, int m_max) {
  if (m_max < 1) throw Error(ErrorKind::InvalidArgument, "m_max must be at least 1");
  const auto k_count = static_cast<std::size_t>(m_max);
  std::vector<detail::DoubleDouble> acc(k_count);

  // Descending order, as stored. Each power is carried in double-double so the
  // accumulated M(k) stays accurate well past 53 bits.
  for (double lambda : d.lambdas()) {
    if (lambda == 0.0) break;
    detail::DoubleDouble power{lambda, 0.0};
    for (std::size_t k = 0; k < k_count; ++k) {
      if (k > 0) power = power * lambda;
      if (power.hi == 0.0) break;
      acc[k] = acc[k] + power;
    }
  }

  std::vector<double> values(k_count);
  std::vector<double> residuals(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    values[k] = acc[k].hi;
    residuals[k] = acc[k].lo;
  }
  return PowerSums(std::move(values), std::move(residuals));
}

bool satisfies_moment_constraints(const PowerSums& ps, double tol, double norm_tol) {
  if (ps.m_max() < 1) return false;
  if (std::abs(ps.at(1) - 1.0) > norm_tol) return false;
  for (int k = 1; k <= ps.m_max(); ++k) {
    const double m = ps.at(k);
    if (!(m > 0.0) || m > 1.0 + tol) return false;
    if (k >= 2 && m > ps.at(k - 1) + tol) return false;
    if (k >= 3) {
      const double prev = ps.at(k - 1);
      const double lower = std::pow(prev, static_cast<double>(k - 1) / (k - 2));
      const double upper = std::pow(prev, static_cast<double>(k) / (k - 1));
      if (m < lower - tol || m > upper + tol) return false;
    }
  }
  return true;
}

double purity(const SchmidtDistribution& d) { return power_sums(d, 2).at(2); }

double renyi_entropy(const SchmidtDistribution& d, int m) {
  if (m < 2) throw Error(ErrorKind::InvalidArgument, "Renyi order must be at least 2");
  const double moment = power_sums(d, m).at(m);
  // A pure state gives log(1) = 0; keep the sign clean.
  const double h = std::log(moment) / (1.0 - m);
  return h == 0.0 ? 0.0 : h;
}

int min_schmidt_number(double p, double ceil_tol) {
  if (!(p > 0.0) || p > 1.0) throw Error(ErrorKind::InvalidArgument, "purity must lie in (0, 1]");
  const double inv = 1.0 / p;
  const double nearest = std::round(inv);
  if (std::abs(inv - nearest) <= ceil_tol) return static_cast<int>(nearest);
  return static_cast<int>(std::ceil(inv));
}

namespace detail {

double extremal_radical(double p, int s) {
  if (s < 1) throw Error(ErrorKind::InvalidArgument, "Schmidt number must be positive");
  if (!(p > 0.0) || p > 1.0) throw Error(ErrorKind::InvalidArgument, "purity must lie in (0, 1]");
  const double excess = std::fma(static_cast<double>(s), p, -1.0);  // S P - 1
  if (excess < -kDefaultCeilTol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "S*P = " << s * p << " < 1 for S = " << s << ", P = " << p;
    throw Error(ErrorKind::InfeasiblePurity, msg.str());
  }
  // Rounding noise around S P = 1 must not produce a spurious sqrt(eps) radical.
  if (excess <= 8.0 * std::numeric_limits<double>::epsilon()) return 0.0;
  return std::sqrt(static_cast<double>(s - 1) * excess);
}

}  // namespace detail

SchmidtDistribution extremal_distribution(double p, int s, Branch branch) {
  const double radical = detail::extremal_radical(p, s);
  if (s == 1) return make_distribution({1.0});
  if (branch == Branch::Minus && radical > 1.0) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "(S-1)(S P-1) = " << radical * radical << " > 1 for S = " << s << ", P = " << p;
    throw Error(ErrorKind::MinusBranchInfeasible, msg.str());
  }
  const double sign = branch == Branch::Plus ? 1.0 : -1.0;
  const double first = (1.0 + sign * radical) / s;
  const double rest = (1.0 - first) / (s - 1);
  std::vector<double> values(static_cast<std::size_t>(s), rest);
  values.front() = first;
  return make_distribution(values);
}

SchmidtDistribution uniform_distribution(double p) {
  return extremal_distribution(p, min_schmidt_number(p), Branch::Minus);
}

SchmidtDistribution peaked_distribution(double p, int s) {
  if (s < min_schmidt_number(p)) {
    std::ostringstream msg;
    msg << "S = " << s << " is below L = " << min_schmidt_number(p);
    throw Error(ErrorKind::InfeasiblePurity, msg.str());
  }
  return extremal_distribution(p, s, Branch::Plus);
}

double total_variation(const SchmidtDistribution& a, const SchmidtDistribution& b) {
  const std::size_t n = std::max(a.s(), b.s());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = i < a.s() ? a[i] : 0.0;
    const double y = i < b.s() ? b[i] : 0.0;
    sum += std::abs(x - y);
  }
  return 0.5 * sum;
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::NegativeCoefficient: return "NegativeCoefficient";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InfeasiblePurity: return "InfeasiblePurity";
    case ErrorKind::MinusBranchInfeasible: return "MinusBranchInfeasible";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::InsufficientPowerSums: return "InsufficientPowerSums";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::VanishingDenominator: return "VanishingDenominator";
    case ErrorKind::PurityMismatch: return "PurityMismatch";
    case ErrorKind::InfeasibleN: return "InfeasibleN";
    case ErrorKind::ChainViolation: return "ChainViolation";
  }
  return "Unknown";
}

bool is_input_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyInput:
    case ErrorKind::NegativeCoefficient:
    case ErrorKind::NotNormalized:
    case ErrorKind::InvalidArgument:
      return true;
    default:
      return false;
  }
}

}  // namespace coboson
