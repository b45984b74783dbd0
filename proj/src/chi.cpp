#include "coboson/chi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "coboson/error.hpp"
#include "coboson/random.hpp"
#include "double_double.hpp"
#include "parallel.hpp"

namespace coboson {

namespace {

using Quad = boost::multiprecision::cpp_bin_float_quad;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kRenormalizeEvery = 16;
// Keeps 2^(E_{k-1} - E_k) and its products with k * lambda inside the double range.
constexpr long long kMaxExponentGap = 960;

void check_n_max(int n_max) {
  if (n_max < 0) throw Error(ErrorKind::InvalidArgument, "n_max must be non-negative");
}

NormalizationSequence from_scaled(const std::vector<double>& mantissa,
                                  const std::vector<long long>& exponent, ChiMethod method) {
  NormalizationSequence seq;
  seq.n_max = static_cast<int>(mantissa.size()) - 1;
  seq.method = method;
  seq.chi.resize(mantissa.size());
  seq.log_chi.resize(mantissa.size());
  for (std::size_t k = 0; k < mantissa.size(); ++k) {
    if (mantissa[k] == 0.0) {
      seq.chi[k] = 0.0;
      seq.log_chi[k] = kNegInf;
      continue;
    }
    const long long e = exponent[k];
    seq.chi[k] = e < -1100 ? 0.0 : std::ldexp(mantissa[k], static_cast<int>(std::max(e, -1100LL)));
    seq.log_chi[k] = std::log(mantissa[k]) + static_cast<double>(e) * std::numbers::ln2;
  }
  return seq;
}

NormalizationSequence from_linear(std::vector<double> chi, ChiMethod method) {
  NormalizationSequence seq;
  seq.n_max = static_cast<int>(chi.size()) - 1;
  seq.method = method;
  seq.log_chi.resize(chi.size());
  for (std::size_t k = 0; k < chi.size(); ++k)
    seq.log_chi[k] = chi[k] > 0.0 ? std::log(chi[k]) : kNegInf;
  seq.chi = std::move(chi);
  return seq;
}

// log k! for k = 0..n.
std::vector<double> log_factorials(int n) {
  std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 2; k <= n; ++k) out[static_cast<std::size_t>(k)] = std::lgamma(k + 1.0);
  return out;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double result = 1.0;
  for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}

}  // namespace

std::string_view to_string(ChiMethod method) {
  switch (method) {
    case ChiMethod::Dp: return "dp";
    case ChiMethod::Newton: return "newton";
    case ChiMethod::Brute: return "brute";
  }
  return "unknown";
}

namespace detail {

void scaled_prefix_chi(const double* lambdas, std::size_t count, int n_max,
                       std::vector<double>& mantissa, std::vector<long long>& exponent) {
  const auto n = static_cast<std::size_t>(n_max);
  mantissa.assign(n + 1, 0.0);
  exponent.assign(n + 1, 0);
  mantissa[0] = 1.0;
  if (n == 0) return;

  // value_k = mantissa[k] * 2^exponent[k]. Within a block the exponents are
  // frozen and weight[k] = k * 2^(exponent[k-1] - exponent[k]) carries the
  // cross-scale factor, so the inner loop is a plain vectorizable update.
  std::vector<double> weight(n + 1, 0.0);
  std::vector<double> next(n + 1, 0.0);
  next[0] = 1.0;

  auto renormalize = [&] {
    for (std::size_t k = 1; k <= n; ++k) {
      if (mantissa[k] == 0.0) {
        exponent[k] = exponent[k - 1];
        continue;
      }
      int e = 0;
      mantissa[k] = std::frexp(mantissa[k], &e);
      exponent[k] += e;
      const long long gap = exponent[k - 1] - exponent[k];
      if (gap > kMaxExponentGap) {
        // The incoming term dwarfs the current value; move it to a scale
        // closer to its predecessor.
        const long long shift = gap - kMaxExponentGap;
        mantissa[k] = std::ldexp(mantissa[k], static_cast<int>(std::max(-shift, -2000LL)));
        exponent[k] += shift;
      }
    }
    for (std::size_t k = 1; k <= n; ++k) {
      const long long gap = exponent[k - 1] - exponent[k];
      weight[k] = static_cast<double>(k) * std::ldexp(1.0, static_cast<int>(std::max(gap, -1100LL)));
    }
  };

  renormalize();
  std::size_t processed = 0;
  while (processed < count) {
    const std::size_t block_end = std::min(count, processed + kRenormalizeEvery);
    for (; processed < block_end; ++processed) {
      const double lambda = lambdas[processed];
      if (lambda == 0.0) continue;
      const std::size_t k_top = std::min(processed + 1, n);
      for (std::size_t k = 1; k <= k_top; ++k)
        next[k] = std::fma(lambda * weight[k], mantissa[k - 1], mantissa[k]);
      std::copy(next.begin() + 1, next.begin() + static_cast<std::ptrdiff_t>(k_top) + 1,
                mantissa.begin() + 1);
    }
    renormalize();
  }
}

double extremal_ratio(double p, int s, int n, double sign) {
  const double radical = extremal_radical(p, s);
  const double big_s = s;
  const double big_n = n;
  const double numerator = (big_s - big_n) * (1.0 - p) * (big_s - 1.0 + sign * big_n * radical);
  const double denominator =
      (big_s - 1.0) * (big_s + big_s * (big_n - 1.0) * p - big_n * (1.0 - sign * radical));
  return numerator / denominator;
}

}  // namespace detail

NormalizationSequence chi_dp(const SchmidtDistribution& d, int n_max) {
  check_n_max(n_max);
  std::vector<double> mantissa;
  std::vector<long long> exponent;
  detail::scaled_prefix_chi(d.lambdas().data(), d.s(), n_max, mantissa, exponent);
  return from_scaled(mantissa, exponent, ChiMethod::Dp);
}

NormalizationSequence chi_divide_conquer(const SchmidtDistribution& d, int n_max,
                                         const DivideConquerOptions& options) {
  check_n_max(n_max);
  const auto n = static_cast<std::size_t>(n_max);
  const std::size_t chunk = std::max<std::size_t>(1, options.chunk);
  const std::size_t chunks = (d.s() + chunk - 1) / chunk;

  // Each part holds the normalized sequence chi(lambda/mass) and the mass.
  struct Part {
    std::vector<double> chi;
    double mass = 0.0;
  };
  std::vector<Part> parts(chunks);
  const auto lambdas = d.lambdas();

  detail::parallel_for(chunks, options.workers, [&](std::size_t c) {
    const std::size_t begin = c * chunk;
    const std::size_t end = std::min(d.s(), begin + chunk);
    detail::DoubleDouble mass;
    for (std::size_t j = end; j-- > begin;) mass = mass + detail::DoubleDouble{lambdas[j], 0.0};
    Part& part = parts[c];
    part.mass = mass.hi;
    part.chi.assign(n + 1, 0.0);
    part.chi[0] = 1.0;
    if (part.mass == 0.0) return;
    std::vector<double> scaled(lambdas.begin() + static_cast<std::ptrdiff_t>(begin),
                               lambdas.begin() + static_cast<std::ptrdiff_t>(end));
    for (double& x : scaled) x /= part.mass;
    std::vector<double> mantissa;
    std::vector<long long> exponent;
    detail::scaled_prefix_chi(scaled.data(), scaled.size(), n_max, mantissa, exponent);
    for (std::size_t k = 0; k <= n; ++k)
      part.chi[k] = exponent[k] < -1100 ? 0.0 : std::ldexp(mantissa[k], static_cast<int>(exponent[k]));
  });

  const std::vector<double> log_fact = log_factorials(n_max);
  auto combine = [&](const Part& a, const Part& b) {
    if (a.mass == 0.0) return b;
    if (b.mass == 0.0) return a;
    Part out;
    out.mass = a.mass + b.mass;
    const double log_p = std::log(a.mass / out.mass);
    const double log_q = std::log(b.mass / out.mass);
    out.chi.assign(n + 1, 0.0);
    for (std::size_t m = 0; m <= n; ++m) {
      double sum = 0.0;
      for (std::size_t k = 0; k <= m; ++k) {
        const double x = a.chi[k] * b.chi[m - k];
        if (x == 0.0) continue;
        const double log_weight = log_fact[m] - log_fact[k] - log_fact[m - k] +
                                  static_cast<double>(k) * log_p +
                                  static_cast<double>(m - k) * log_q;
        sum += std::exp(log_weight) * x;
      }
      out.chi[m] = sum;
    }
    return out;
  };

  // Fixed pairwise tree: the reduction order depends only on the chunk count.
  while (parts.size() > 1) {
    std::vector<Part> merged((parts.size() + 1) / 2);
    detail::parallel_for(merged.size(), options.workers, [&](std::size_t i) {
      merged[i] = 2 * i + 1 < parts.size() ? combine(parts[2 * i], parts[2 * i + 1]) : parts[2 * i];
    });
    parts = std::move(merged);
  }

  NormalizationSequence seq;
  seq.n_max = n_max;
  seq.method = ChiMethod::Dp;
  seq.chi.assign(n + 1, 0.0);
  seq.log_chi.assign(n + 1, kNegInf);
  const double log_mass = std::log(parts.front().mass);
  for (std::size_t k = 0; k <= n; ++k) {
    const double value = parts.front().chi[k];
    if (value <= 0.0) continue;
    seq.log_chi[k] = std::log(value) + static_cast<double>(k) * log_mass;
    seq.chi[k] = std::exp(seq.log_chi[k]);
  }
  seq.chi[0] = 1.0;
  seq.log_chi[0] = 0.0;
  return seq;
}

NormalizationSequence chi_newton(const PowerSums& ps, int n_max) {
  check_n_max(n_max);
  if (ps.m_max() < n_max) {
    std::ostringstream msg;
    msg << "need M(1.." << n_max << "), have M(1.." << ps.m_max() << ")";
    throw Error(ErrorKind::InsufficientPowerSums, msg.str());
  }
  const auto n = static_cast<std::size_t>(n_max);
  std::vector<Quad> moment(n + 1);
  for (int k = 1; k <= n_max; ++k)
    moment[static_cast<std::size_t>(k)] = Quad(ps.at(k)) + Quad(ps.residual(k));

  struct Run {
    std::vector<Quad> chi;
    std::vector<Quad> magnitude;
  };
  const auto recurse = [n](const std::vector<Quad>& m_of) {
    Run r{std::vector<Quad>(n + 1), std::vector<Quad>(n + 1)};
    r.chi[0] = 1;
    for (std::size_t big_n = 1; big_n <= n; ++big_n) {
      // (N-1)!/(N-m)! built up one factor at a time.
      Quad factor = 1;
      Quad sum = 0;
      Quad magnitude = 0;
      for (std::size_t m = 1; m <= big_n; ++m) {
        if (m > 1) factor *= static_cast<double>(big_n - m + 1);
        Quad term = factor * m_of[m] * r.chi[big_n - m];
        magnitude += abs(term);
        if (m % 2 == 0) term = -term;
        sum += term;
      }
      r.chi[big_n] = sum;
      r.magnitude[big_n] = magnitude;
    }
    return r;
  };

  // Error estimate by sensitivity: rerun with every M(m) moved by its input
  // precision (double-double or double) with fixed pseudo-random signs. The
  // smallest subnormal is added because M(m) below the double range is
  // stored as zero.
  const Quad u_in = ps.extended() ? Quad(std::ldexp(1.0, -104)) : Quad(std::ldexp(1.0, -53));
  const Quad u_q = std::ldexp(1.0, -112);
  const Run base = recurse(moment);
  std::vector<Quad> spread(n + 1);
  std::uint64_t bits = 0x9e3779b97f4a7c15ULL;
  for (int pattern = 0; pattern < 3; ++pattern) {
    std::vector<Quad> shifted = moment;
    for (std::size_t m = 1; m <= n; ++m) {
      bits ^= bits << 13;
      bits ^= bits >> 7;
      bits ^= bits << 17;
      const Quad delta = moment[m] * u_in + Quad(std::numeric_limits<double>::denorm_min());
      shifted[m] += (bits >> 11) & 1 ? -delta : delta;
    }
    const Run other = recurse(shifted);
    for (std::size_t k = 1; k <= n; ++k) spread[k] = std::max(spread[k], Quad(abs(other.chi[k] - base.chi[k])));
  }

  std::vector<Quad> chi = base.chi;
  double worst_loss = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const Quad noise = spread[k] + base.magnitude[k] * static_cast<double>(k + 2) * u_q;
    // A result inside its own noise is indistinguishable from zero.
    if (abs(chi[k]) <= 4 * noise) {
      chi[k] = 0;
      continue;
    }
    const double rel = static_cast<double>(noise / abs(chi[k]));
    worst_loss = std::max(worst_loss, std::log10(rel / std::numeric_limits<double>::epsilon()));
  }

  std::vector<double> out(n + 1);
  for (std::size_t k = 0; k <= n; ++k) out[k] = static_cast<double>(chi[k]);
  NormalizationSequence seq = from_linear(std::move(out), ChiMethod::Newton);
  seq.digits_lost = std::max(0.0, worst_loss);
  seq.stability_warning = seq.digits_lost > kStabilityDigits;
  return seq;
}

double newton_digits_lost_vs_dp(const SchmidtDistribution& d, int n_max) {
  const NormalizationSequence reference = chi_dp(d, n_max);
  const NormalizationSequence newton = chi_newton(power_sums(d, std::max(n_max, 1)), n_max);
  double worst = 0.0;
  for (std::size_t k = 0; k < reference.chi.size(); ++k) {
    const double ref = reference.chi[k];
    if (ref == 0.0) continue;
    worst = std::max(worst, std::abs(newton.chi[k] - ref) / ref);
  }
  const double eps = std::numeric_limits<double>::epsilon();
  return worst <= eps ? 0.0 : std::log10(worst / eps);
}

NormalizationSequence chi_bruteforce(const SchmidtDistribution& d, int n_max) {
  check_n_max(n_max);
  const int s = static_cast<int>(d.s());
  const int top = std::min(n_max, s);
  for (int k = 0; k <= top; ++k) {
    if (binomial(s, k) > kBruteForceLimit) {
      std::ostringstream msg;
      msg << "binomial(" << s << ", " << k << ") exceeds " << kBruteForceLimit;
      throw Error(ErrorKind::TooLarge, msg.str());
    }
  }

  std::vector<detail::DoubleDouble> sums(static_cast<std::size_t>(top) + 1);
  const auto lambdas = d.lambdas();
  // Depth-first walk over every subset of size <= top, carrying the product.
  auto visit = [&](auto&& self, int start, int size, double product) -> void {
    sums[static_cast<std::size_t>(size)] = sums[static_cast<std::size_t>(size)] + detail::DoubleDouble{product, 0.0};
    if (size == top) return;
    for (int j = start; j < s; ++j) self(self, j + 1, size + 1, product * lambdas[static_cast<std::size_t>(j)]);
  };
  visit(visit, 0, 0, 1.0);

  std::vector<double> chi(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int k = 0; k <= top; ++k) {
    detail::DoubleDouble value = sums[static_cast<std::size_t>(k)];
    for (int f = 2; f <= k; ++f) value = value * static_cast<double>(f);
    chi[static_cast<std::size_t>(k)] = value.hi + value.lo;
  }
  return from_linear(std::move(chi), ChiMethod::Brute);
}

BirthdayEstimate birthday_probability(const SchmidtDistribution& d, int n, BirthdayMode mode,
                                      std::uint64_t trials, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be positive");
  const auto lambdas = d.lambdas();
  const std::size_t s = d.s();

  if (mode == BirthdayMode::Enumerate) {
    const double assignments = std::pow(static_cast<double>(s), n);
    if (assignments > kBirthdayEnumerationLimit) {
      std::ostringstream msg;
      msg << s << "^" << n << " assignments exceed " << kBirthdayEnumerationLimit;
      throw Error(ErrorKind::TooLarge, msg.str());
    }
    // Ordered assignments; any repeated index ends the branch with weight 0.
    detail::DoubleDouble total;
    std::vector<char> used(s, 0);
    auto visit = [&](auto&& self, int depth, double product) -> void {
      if (depth == n) {
        total = total + detail::DoubleDouble{product, 0.0};
        return;
      }
      for (std::size_t j = 0; j < s; ++j) {
        if (used[j]) continue;
        used[j] = 1;
        self(self, depth + 1, product * lambdas[j]);
        used[j] = 0;
      }
    };
    visit(visit, 0, 1.0);
    return {total.hi + total.lo, 0.0, 0};
  }

  if (trials == 0) throw Error(ErrorKind::InvalidArgument, "Monte Carlo mode needs trials > 0");
  std::vector<double> cumulative(s);
  double running = 0.0;
  for (std::size_t j = 0; j < s; ++j) cumulative[j] = (running += lambdas[j]);
  Xoshiro256StarStar rng(seed);
  std::vector<std::uint64_t> stamp(s, 0);
  std::uint64_t hits = 0;
  for (std::uint64_t t = 1; t <= trials; ++t) {
    bool distinct = true;
    for (int draw = 0; draw < n; ++draw) {
      const double u = rng.uniform() * running;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), s - 1);
      if (stamp[j] == t) {
        distinct = false;
        break;
      }
      stamp[j] = t;
    }
    hits += distinct ? 1 : 0;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(trials);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), trials};
}

double chi_ratio(const SchmidtDistribution& d, int n, ChiMethod method) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be positive");
  if (static_cast<std::size_t>(n) > d.s()) {
    std::ostringstream msg;
    msg << "chi_" << n << " vanishes for s = " << d.s();
    throw Error(ErrorKind::VanishingDenominator, msg.str());
  }
  NormalizationSequence seq;
  switch (method) {
    case ChiMethod::Dp: seq = chi_dp(d, n + 1); break;
    case ChiMethod::Newton: seq = chi_newton(power_sums(d, n + 1), n + 1); break;
    case ChiMethod::Brute: seq = chi_bruteforce(d, n + 1); break;
  }
  const auto k = static_cast<std::size_t>(n);
  if (!(seq.chi[k] > 0.0) && seq.log_chi[k] == kNegInf) {
    std::ostringstream msg;
    msg << "chi_" << n << " is zero";
    throw Error(ErrorKind::VanishingDenominator, msg.str());
  }
  if (seq.log_chi[k + 1] == kNegInf) return 0.0;
  return std::exp(seq.log_chi[k + 1] - seq.log_chi[k]);
}

double commutator_expectation(const SchmidtDistribution& d, int n) {
  return 2.0 * chi_ratio(d, n) - 1.0;
}

double chi_peaked_closed(double p, int n) {
  if (!(p > 0.0) || p > 1.0) throw Error(ErrorKind::InvalidArgument, "purity must lie in (0, 1]");
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "n must be non-negative");
  if (n == 0) return 1.0;
  const double root = std::sqrt(p);
  return std::pow(1.0 - root, n - 1) * (1.0 + (n - 1) * root);
}

double log_chi_uniform_closed(int l, int n) {
  if (l < 1) throw Error(ErrorKind::InvalidArgument, "L must be positive");
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "n must be non-negative");
  if (n > l) return kNegInf;
  double sum = 0.0;
  for (int k = 1; k < n; ++k) sum += std::log1p(-static_cast<double>(k) / l);
  return sum;
}

double chi_uniform_closed(int l, int n) {
  if (l < 1) throw Error(ErrorKind::InvalidArgument, "L must be positive");
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "n must be non-negative");
  if (n > l) return 0.0;
  // Running product with the binary exponent split off to dodge underflow.
  double mantissa = 1.0;
  long long exponent = 0;
  for (int k = 1; k < n; ++k) {
    mantissa *= static_cast<double>(l - k) / l;
    int e = 0;
    mantissa = std::frexp(mantissa, &e);
    exponent += e;
  }
  return exponent < -1100 ? 0.0 : std::ldexp(mantissa, static_cast<int>(exponent));
}

double ratio_peaked(double p, int s, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be positive");
  if (s < 1 || !(p > 0.0) || p > 1.0 || std::fma(static_cast<double>(s), p, -1.0) < -kDefaultCeilTol) {
    std::ostringstream msg;
    msg << "need S*P >= 1, got S = " << s << ", P = " << p;
    throw Error(ErrorKind::Infeasible, msg.str());
  }
  if (n >= s) {
    std::ostringstream msg;
    msg << "need n < S, got n = " << n << ", S = " << s;
    throw Error(ErrorKind::Infeasible, msg.str());
  }
  return detail::extremal_ratio(p, s, n, 1.0);
}

double ratio_uniform(double p, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be positive");
  const int l = min_schmidt_number(p);
  if (n >= l) {
    std::ostringstream msg;
    msg << "need n < L, got n = " << n << ", L = " << l;
    throw Error(ErrorKind::Infeasible, msg.str());
  }
  return detail::extremal_ratio(p, l, n, -1.0);
}

}  // namespace coboson
