#include "coboson/verify.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "coboson/bounds.hpp"
#include "coboson/chi.hpp"
#include "coboson/error.hpp"
#include "coboson/random.hpp"
#include "coboson/sampling.hpp"
#include "coboson/transforms.hpp"

namespace coboson {

namespace {

class Cases {
 public:
  Cases(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}

  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(rng_.uniform() * (hi - lo + 1));
  }

  double uniform() { return rng_.uniform(); }

  // Alternates the two measures so both shapes of spectra are covered.
  SchmidtDistribution distribution(int s) {
    flip_ = !flip_;
    return sample_spectrum({s, flip_ ? Measure::Flat : Measure::Induced, 0, 0}, rng_);
  }

 private:
  Xoshiro256StarStar rng_;
  bool flip_ = false;
};

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

struct Tracker {
  double worst = 0.0;
  std::string where;
  bool ok = true;

  void observe(double deviation, double limit, const std::string& context) {
    if (deviation > worst || std::isnan(deviation)) {
      worst = deviation;
      where = context;
    }
    if (!(deviation <= limit)) ok = false;
  }

  CheckResult result(std::string module, std::string name) const {
    std::ostringstream detail;
    detail.precision(3);
    detail << "worst " << worst;
    if (!where.empty()) detail << " at " << where;
    return {std::move(module), std::move(name), ok, detail.str()};
  }
};

std::string ctx(const char* a, double x, const char* b, double y) {
  std::ostringstream out;
  out.precision(10);
  out << a << '=' << x << ' ' << b << '=' << y;
  return out.str();
}

// schmidt

CheckResult extremal_round_trip() {
  Tracker t;
  for (int s = 2; s <= 40; ++s)
    for (int i = 0; i <= 50; ++i) {
      const double p = std::min(1.0, 1.0 / s + (1.0 - 1.0 / s) * i / 50.0);
      t.observe(std::abs(purity(extremal_distribution(p, s, Branch::Plus)) - p), 1e-12, ctx("P", p, "S", s));
      try {
        t.observe(std::abs(purity(extremal_distribution(p, s, Branch::Minus)) - p), 1e-12, ctx("P", p, "S", s));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::MinusBranchInfeasible) throw;
      }
    }
  return t.result("schmidt", "extremal purity round trip");
}

CheckResult moment_sandwich(Cases& cases, int n) {
  int failures = 0;
  for (int i = 0; i < n; ++i) {
    const int s = cases.uniform_int(1, 30);
    if (!satisfies_moment_constraints(power_sums(cases.distribution(s), 8))) ++failures;
    const double p = 1.0 / s + (1.0 - 1.0 / s) * cases.uniform();
    if (!satisfies_moment_constraints(power_sums(peaked_distribution(p, s), 8))) ++failures;
    if (!satisfies_moment_constraints(power_sums(uniform_distribution(p), 8))) ++failures;
  }
  return {"schmidt", "power sums satisfy the moment sandwich", failures == 0,
          std::to_string(failures) + " failures"};
}

CheckResult peaked_monotone_in_s() {
  bool ok = true;
  std::string detail;
  for (double p : {0.05, 0.25, 0.5, 0.9}) {
    double prev = 0.0;
    for (int s = min_schmidt_number(p); s <= 4096; s = s < 64 ? s + 1 : s * 2) {
      const double l1 = peaked_distribution(p, s).largest();
      if (l1 < prev) {
        ok = false;
        detail = ctx("P", p, "S", s);
      }
      prev = l1;
    }
    const double far = peaked_distribution(p, 1000000).largest();
    if (std::abs(far - std::sqrt(p)) > 1e-3) {
      ok = false;
      detail = ctx("P", p, "lambda1", far);
    }
  }
  return {"schmidt", "peaked lambda1 increases with S towards sqrt P", ok, detail};
}

CheckResult make_distribution_idempotent(Cases& cases, int n) {
  int failures = 0;
  for (int i = 0; i < n; ++i) {
    const SchmidtDistribution d = cases.distribution(cases.uniform_int(1, 30));
    if (!(make_distribution(d.lambdas()) == d)) ++failures;
  }
  return {"schmidt", "make_distribution is idempotent", failures == 0, std::to_string(failures) + " failures"};
}

// chi

CheckResult three_way_agreement(Cases& cases, int n) {
  Tracker t;
  for (int i = 0; i < n; ++i) {
    const int s = cases.uniform_int(1, 8);
    const SchmidtDistribution d = cases.distribution(s);
    const auto dp = chi_dp(d, s);
    const auto nw = chi_newton(power_sums(d, s), s);
    const auto bf = chi_bruteforce(d, s);
    for (int k = 0; k <= s; ++k) {
      t.observe(rel_diff(dp.chi[k], nw.chi[k]), 1e-10, ctx("s", s, "N", k));
      t.observe(rel_diff(dp.chi[k], bf.chi[k]), 1e-10, ctx("s", s, "N", k));
    }
  }
  return t.result("chi", "dp, newton and brute force agree");
}

CheckResult birthday_matches_dp(Cases& cases, int n) {
  Tracker t;
  for (int i = 0; i < n; ++i) {
    const int s = cases.uniform_int(1, 6);
    const SchmidtDistribution d = cases.distribution(s);
    const auto dp = chi_dp(d, 4);
    for (int k = 1; k <= 4; ++k)
      t.observe(std::abs(birthday_probability(d, k, BirthdayMode::Enumerate).probability - dp.chi[k]), 1e-12,
                ctx("s", s, "N", k));
  }
  return t.result("chi", "birthday enumeration equals chi_dp");
}

CheckResult ratio_non_increasing(Cases& cases, int n) {
  Tracker t;
  for (int i = 0; i < n; ++i) {
    const int s = cases.uniform_int(2, 40);
    const auto seq = chi_dp(cases.distribution(s), s);
    double prev = 1.0;  // chi_1 / chi_0
    for (int k = 1; k < s; ++k) {
      const double r = std::exp(seq.log_chi[k + 1] - seq.log_chi[k]);
      t.observe(r - prev, 1e-12, ctx("s", s, "N", k));
      prev = r;
    }
  }
  return t.result("chi", "chi_{N+1}/chi_N is non-increasing in N");
}

CheckResult chi2_identity(Cases& cases, int n) {
  Tracker t;
  for (int i = 0; i < n; ++i) {
    const int s = cases.uniform_int(1, 50);
    const SchmidtDistribution d = cases.distribution(s);
    t.observe(std::abs(chi_dp(d, 2).chi[2] - (1.0 - purity(d))), 1e-14, ctx("s", s, "P", purity(d)));
  }
  return t.result("chi", "chi_2 = 1 - P");
}

CheckResult uniform_closed_matches_dp() {
  Tracker t;
  for (int l = 1; l <= 400; l += (l < 20 ? 1 : 17)) {
    const auto seq = chi_dp(make_distribution(std::vector<double>(l, 1.0 / l)), l);
    for (int k = 0; k <= l; ++k) t.observe(std::abs(seq.chi[k] - chi_uniform_closed(l, k)), 1e-12, ctx("L", l, "N", k));
  }
  return t.result("chi", "uniform closed form equals chi_dp");
}

CheckResult uniform_decays_faster() {
  Tracker t;
  for (int l = 1; l <= 200; l += (l < 20 ? 1 : 9))
    for (int k = 0; k <= l + 2; ++k)
      t.observe(chi_uniform_closed(l, k) - chi_peaked_closed(1.0 / l, k), 1e-15, ctx("L", l, "N", k));
  return t.result("chi", "uniform chi decays faster than peaked chi");
}

// bounds

CheckResult chain_property(Cases& cases, int n) {
  int failures = 0;
  std::string detail;
  for (int s = 3; s <= 5; ++s)
    for (int k = 2; k <= 3; ++k)
      for (int i = 0; i < n; ++i) {
        const SchmidtDistribution d = cases.distribution(s);
        const BoundsReport r = bounds_chain(purity(d), k, std::nullopt, &d);
        if (!r.chain_ok) {
          ++failures;
          detail = ctx("S", s, "P", r.p);
        }
      }
  return {"bounds", "random states satisfy the bound chain", failures == 0,
          std::to_string(failures) + " violations " + detail};
}

CheckResult saturation() {
  Tracker t;
  for (int s = 3; s <= 50; ++s)
    for (int k = 1; k < s; ++k) {
      const double p = 1.0 / s;
      t.observe(std::abs(chi_ratio(uniform_distribution(p), k) - (1.0 - k * p)), 1e-12, ctx("S", s, "N", k));
      const double q = p + (1.0 - p) * 0.37;
      t.observe(std::abs(chi_ratio(peaked_distribution(q, s), k) - finite_s_upper_bound(q, s, k)), 1e-12,
                ctx("S", s, "N", k));
    }
  return t.result("bounds", "extremal states saturate their bounds");
}

CheckResult factor_gap() {
  Tracker t;
  for (int k : {2, 5, 10}) {
    const double p = (1.0 / k) * (1.0 - 1e-6);
    const double ratio = tight_lower_bound(p, k) / (1.0 - k * p);
    t.observe(std::abs(ratio / ((1.0 + k) / 2.0) - 1.0), 0.01, ctx("N", k, "ratio", ratio));
  }
  return t.result("bounds", "tight and loose lower bounds differ by (1+N)/2 near P = 1/N");
}

CheckResult upper_bound_monotone() {
  Tracker t;
  const auto grid = log_spaced(1e-6, 1.0, 200);
  for (int k = 1; k <= 50; ++k)
    for (std::size_t i = 1; i < grid.size(); ++i) {
      t.observe(upper_bound_u(grid[i], k) - upper_bound_u(grid[i - 1], k), 0.0, ctx("N", k, "P", grid[i]));
      t.observe(upper_bound_u(grid[i], k + 1) - upper_bound_u(grid[i], k), 0.0, ctx("N", k, "P", grid[i]));
    }
  return t.result("bounds", "U_N(P) decreases in P and N");
}

CheckResult merging_at_fractional_p() {
  Tracker t;
  for (int s = 2; s <= 60; ++s)
    for (int k = 1; k < s; ++k) {
      const double p = 1.0 / s;
      t.observe(std::abs(finite_s_upper_bound(p, s, k) - tight_lower_bound(p, k)), 0.0, ctx("S", s, "N", k));
    }
  return t.result("bounds", "finite-S upper and tight lower bounds merge at P = 1/S");
}

// transforms

struct TransformCase {
  SchmidtDistribution d;
  TripleSelection triple;
};

TransformCase random_triple(Cases& cases) {
  const int s = cases.uniform_int(3, 12);
  SchmidtDistribution d = cases.distribution(s);
  std::size_t j[3];
  do {
    for (auto& x : j) x = static_cast<std::size_t>(cases.uniform_int(1, s));
    std::sort(j, j + 3);
  } while (j[0] == j[1] || j[1] == j[2]);
  TripleSelection t(d, j[0], j[1], j[2]);
  return {std::move(d), t};
}

CheckResult k_invariance(Cases& cases, int n) {
  Tracker t;
  for (int i = 0; i < n; ++i) {
    const auto [d, triple] = random_triple(cases);
    const PowerSums before = power_sums(d, 2);
    for (const auto& out : {gamma_peaked(d, triple), gamma_uniform(d, triple)}) {
      const PowerSums after = power_sums(out, 2);
      t.observe(std::abs(after.at(1) - before.at(1)), 1e-13, ctx("s", d.s(), "case", i));
      t.observe(std::abs(after.at(2) - before.at(2)), 1e-13, ctx("s", d.s(), "case", i));
    }
  }
  return t.result("transforms", "both maps preserve M(1) and M(2)");
}

CheckResult m3_moves(Cases& cases, int n) {
  Tracker t;
  for (int i = 0; i < n; ++i) {
    const auto [d, triple] = random_triple(cases);
    const double m3 = power_sums(d, 3).at(3);
    t.observe(m3 - power_sums(gamma_peaked(d, triple), 3).at(3), 1e-15, ctx("s", d.s(), "case", i));
    t.observe(power_sums(gamma_uniform(d, triple), 3).at(3) - m3, 1e-15, ctx("s", d.s(), "case", i));
  }
  return t.result("transforms", "peaking raises M(3), uniforming lowers it");
}

CheckResult product_sandwich(Cases& cases, int n) {
  Tracker t;
  for (int i = 0; i < n; ++i) {
    const auto [d, triple] = random_triple(cases);
    const ProductBounds b = triple_product_bounds(d, triple);
    t.observe(std::max(b.lower - b.value, b.value - b.upper), 1e-15, ctx("s", d.s(), "case", i));
  }
  return t.result("transforms", "triple product lies between the mapped products");
}

CheckResult chi_ordering(Cases& cases, int n) {
  Tracker t;
  for (int i = 0; i < n; ++i) {
    const auto [d, triple] = random_triple(cases);
    const int s = static_cast<int>(d.s());
    const auto mid = chi_dp(d, s);
    const auto lo = chi_dp(gamma_uniform(d, triple), s);
    const auto hi = chi_dp(gamma_peaked(d, triple), s);
    for (int k = 0; k <= s; ++k) {
      t.observe(lo.chi[k] - mid.chi[k], 1e-12, ctx("s", s, "N", k));
      t.observe(mid.chi[k] - hi.chi[k], 1e-12, ctx("s", s, "N", k));
    }
    for (int k = 2; k <= std::min(3, s - 1); ++k) {
      const MonotonicityCheck m = ratio_monotonicity_check(d, triple, k);
      t.observe(std::max(m.r_u - m.r, m.r - m.r_p), kMonotonicityTol, ctx("s", s, "N", k));
    }
  }
  return t.result("transforms", "maps order chi_N and the ratio");
}

CheckResult fixed_points(Cases& cases, int n) {
  Tracker fixed;
  int moved = 0;
  for (int i = 0; i < n; ++i) {
    const SchmidtDistribution d = cases.distribution(3);
    const TripleSelection all(d, 1, 2, 3);
    const SchmidtDistribution p = gamma_peaked(d, all);
    const SchmidtDistribution u = gamma_uniform(d, all);
    fixed.observe(total_variation(gamma_peaked(p, TripleSelection(p, 1, 2, 3)), p), 1e-13, ctx("case", i, "map", 1));
    fixed.observe(total_variation(gamma_uniform(u, TripleSelection(u, 1, 2, 3)), u), 1e-13, ctx("case", i, "map", 0));
    // A generic spectrum has three distinct values, so neither map leaves it alone.
    if (total_variation(p, d) > 1e-9 && total_variation(u, d) > 1e-9) ++moved;
  }
  CheckResult r = fixed.result("transforms", "extremal triples are the only fixed points");
  r.passed = r.passed && moved == n;
  r.detail += ", " + std::to_string(moved) + "/" + std::to_string(n) + " generic states moved";
  return r;
}

}  // namespace

std::vector<CheckResult> run_invariant_suite(const VerifyOptions& options) {
  const int n = std::max(1, options.cases);
  std::uint64_t stream = 0;
  auto cases = [&] { return Cases(options.seed, ++stream); };
  const std::vector<std::pair<const char*, std::function<CheckResult()>>> checks = {
      {"extremal_round_trip", [] { return extremal_round_trip(); }},
      {"moment_sandwich", [&, c = cases()]() mutable { return moment_sandwich(c, n); }},
      {"peaked_monotone_in_s", [] { return peaked_monotone_in_s(); }},
      {"make_distribution_idempotent", [&, c = cases()]() mutable { return make_distribution_idempotent(c, n); }},
      {"three_way_agreement", [&, c = cases()]() mutable { return three_way_agreement(c, n); }},
      {"birthday_matches_dp", [&, c = cases()]() mutable { return birthday_matches_dp(c, n); }},
      {"ratio_non_increasing", [&, c = cases()]() mutable { return ratio_non_increasing(c, n); }},
      {"chi2_identity", [&, c = cases()]() mutable { return chi2_identity(c, n); }},
      {"uniform_closed_matches_dp", [] { return uniform_closed_matches_dp(); }},
      {"uniform_decays_faster", [] { return uniform_decays_faster(); }},
      {"chain_property", [&, c = cases()]() mutable { return chain_property(c, n); }},
      {"saturation", [] { return saturation(); }},
      {"factor_gap", [] { return factor_gap(); }},
      {"upper_bound_monotone", [] { return upper_bound_monotone(); }},
      {"merging_at_fractional_p", [] { return merging_at_fractional_p(); }},
      {"k_invariance", [&, c = cases()]() mutable { return k_invariance(c, n); }},
      {"m3_moves", [&, c = cases()]() mutable { return m3_moves(c, n); }},
      {"product_sandwich", [&, c = cases()]() mutable { return product_sandwich(c, n); }},
      {"chi_ordering", [&, c = cases()]() mutable { return chi_ordering(c, n); }},
      {"fixed_points", [&, c = cases()]() mutable { return fixed_points(c, n); }},
  };
  std::vector<CheckResult> results;
  results.reserve(checks.size());
  for (const auto& [id, check] : checks) {
    try {
      results.push_back(check());
    } catch (const std::exception& e) {
      results.push_back({"error", id, false, std::string("threw: ") + e.what()});
    }
  }
  return results;
}

}  // namespace coboson
