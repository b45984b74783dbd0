#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "coboson/chi.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace coboson;
using testutil::error_kind;
using testutil::rel;

TEST_SUITE("chi") {

TEST_CASE("chi_dp small cases") {
  const auto third = chi_dp(make_distribution({1.0 / 3, 1.0 / 3, 1.0 / 3}), 3);
  CHECK(third.chi.size() == 4);
  CHECK(third.chi[0] == 1.0);
  CHECK(third.chi[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(third.chi[2] == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(third.chi[3] == doctest::Approx(2.0 / 9).epsilon(1e-15));
  CHECK(third.method == ChiMethod::Dp);

  CHECK(chi_dp(make_distribution({0.7, 0.2, 0.1}), 1).chi[1] == doctest::Approx(1.0).epsilon(1e-15));

  const auto blocked = chi_dp(make_distribution({0.5, 0.5}), 3);
  CHECK(blocked.chi[3] == 0.0);
  CHECK(blocked.log_chi[3] == -std::numeric_limits<double>::infinity());
}

TEST_CASE("chi_dp matches the polynomial oracle") {
  testutil::RandomCases cases(5);
  for (int i = 0; i < 200; ++i) {
    const auto d = cases.next(1, 40);
    const int n = static_cast<int>(d.s());
    const auto got = chi_dp(d, n + 2);
    const auto want = oracle::polynomial_chi(testutil::values(d), n + 2);
    for (int k = 0; k <= n + 2; ++k) CHECK(rel(got.chi[k], static_cast<double>(want[k])) <= 1e-12);
  }
}

TEST_CASE("log domain keeps full accuracy below the underflow floor") {
  const int l = 2000;
  const auto seq = chi_dp(make_distribution(std::vector<double>(l, 1.0 / l)), l);
  CHECK(seq.chi[l] < kUnderflowFloor);
  for (int k : {10, 500, 1000, 1900, 2000})
    CHECK(rel(seq.log_chi[k], log_chi_uniform_closed(l, k)) <= 1e-12);
}

TEST_CASE("chi_newton") {
  const auto seq = chi_newton(PowerSums({1.0, 1.0 / 3, 1.0 / 9, 1.0 / 27}), 3);
  CHECK(seq.chi[2] == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(seq.chi[3] == doctest::Approx(2.0 / 9).epsilon(1e-15));
  CHECK(seq.method == ChiMethod::Newton);

  const auto ps = PowerSums({1.0, 0.37, 0.2, 0.15});
  CHECK(chi_newton(ps, 2).chi[2] == doctest::Approx(1.0 - 0.37).epsilon(1e-15));

  const auto pure = chi_newton(PowerSums(std::vector<double>(8, 1.0)), 8);
  for (int k = 2; k <= 8; ++k) CHECK(std::abs(pure.chi[k]) <= 1e-15);

  CHECK(error_kind([] { chi_newton(PowerSums({1.0, 0.5}), 3); }) == ErrorKind::InsufficientPowerSums);
}

TEST_CASE("chi_newton flags cancellation") {
  // Many equal small coefficients and N close to L: chi_N is tiny next to
  // the alternating terms, and high power sums fall below the double range.
  const int l = 200;
  const auto d = make_distribution(std::vector<double>(l, 1.0 / l));
  const auto seq = chi_newton(power_sums(d, 190), 190);
  CHECK(seq.digits_lost > kStabilityDigits);
  CHECK(seq.stability_warning);
  CHECK(newton_digits_lost_vs_dp(d, 190) > kStabilityDigits);

  // Moderate N stays accurate and is not flagged.
  const auto moderate = chi_newton(power_sums(d, 120), 120);
  CHECK_FALSE(moderate.stability_warning);
  CHECK(newton_digits_lost_vs_dp(d, 120) < 2.0);
  const auto mild = chi_newton(power_sums(make_distribution({0.5, 0.3, 0.2}), 3), 3);
  CHECK_FALSE(mild.stability_warning);
}

TEST_CASE("brute force") {
  const auto d = make_distribution({0.5, 0.3, 0.2});
  const auto seq = chi_bruteforce(d, 3);
  CHECK(seq.chi[2] == doctest::Approx(0.62).epsilon(1e-15));
  CHECK(seq.chi[3] == doctest::Approx(0.18).epsilon(1e-15));
  CHECK(chi_bruteforce(make_distribution(std::vector<double>(4, 0.25)), 2).chi[2] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(error_kind([] { chi_bruteforce(make_distribution(std::vector<double>(100, 0.01)), 10); }) ==
        ErrorKind::TooLarge);
}

TEST_CASE("three algorithms agree for s <= 8") {
  testutil::RandomCases cases(11);
  for (int i = 0; i < 300; ++i) {
    const auto d = cases.next(1, 8);
    const int s = static_cast<int>(d.s());
    const auto dp = chi_dp(d, s);
    const auto nw = chi_newton(power_sums(d, s), s);
    const auto bf = chi_bruteforce(d, s);
    for (int k = 0; k <= s; ++k) {
      const double want = static_cast<double>(oracle::subset_chi(testutil::values(d), k));
      CHECK(rel(dp.chi[k], want) <= 1e-10);
      CHECK(rel(nw.chi[k], want) <= 1e-10);
      CHECK(rel(bf.chi[k], want) <= 1e-10);
    }
  }
}

TEST_CASE("divide and conquer matches the sequential recurrence") {
  testutil::RandomCases cases(3);
  const auto d = cases.next(5000);
  const auto dp = chi_dp(d, 300);
  const auto one = chi_divide_conquer(d, 300, {97, 1});
  const auto many = chi_divide_conquer(d, 300, {97, 4});
  for (int k = 0; k <= 300; ++k) {
    CHECK(std::abs(dp.log_chi[k] - one.log_chi[k]) <= 1e-10);
    CHECK(one.chi[k] == many.chi[k]);
    CHECK(one.log_chi[k] == many.log_chi[k]);
  }
  // Chunks larger than s and n beyond s.
  const auto small = make_distribution({0.6, 0.3, 0.1});
  const auto whole = chi_divide_conquer(small, 5);
  for (int k = 0; k <= 5; ++k) CHECK(rel(whole.chi[k], chi_dp(small, 5).chi[k]) <= 1e-14);
}

TEST_CASE("birthday problem") {
  const auto year = make_distribution(std::vector<double>(365, 1.0 / 365));
  CHECK(rel(chi_dp(year, 23).chi[23], static_cast<double>(oracle::birthday_product(365, 23))) <= 1e-12);
  CHECK(chi_dp(year, 23).chi[23] == doctest::Approx(0.4927).epsilon(1e-4));
  CHECK(error_kind([&] { birthday_probability(year, 23, BirthdayMode::Enumerate); }) == ErrorKind::TooLarge);

  const auto d = make_distribution({0.5, 0.3, 0.2});
  CHECK(birthday_probability(d, 1, BirthdayMode::Enumerate).probability == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(birthday_probability(make_distribution({0.5, 0.5}), 2, BirthdayMode::Enumerate).probability ==
        doctest::Approx(0.5).epsilon(1e-15));

  testutil::RandomCases cases(2);
  for (int i = 0; i < 100; ++i) {
    const auto r = cases.next(1, 6);
    for (int n = 1; n <= 4; ++n)
      CHECK(std::abs(birthday_probability(r, n, BirthdayMode::Enumerate).probability - chi_dp(r, n).chi[n]) <= 1e-12);
  }
}

TEST_CASE("Monte Carlo birthday estimate") {
  const auto d = make_distribution({0.4, 0.3, 0.2, 0.1});
  const auto est = birthday_probability(d, 3, BirthdayMode::MonteCarlo, 200000, 9);
  CHECK(est.trials == 200000);
  CHECK(est.standard_error > 0.0);
  CHECK(std::abs(est.probability - chi_dp(d, 3).chi[3]) <= 4.0 * est.standard_error);
  const auto again = birthday_probability(d, 3, BirthdayMode::MonteCarlo, 200000, 9);
  CHECK(again.probability == est.probability);
  CHECK(error_kind([&] { birthday_probability(d, 3, BirthdayMode::MonteCarlo, 0, 9); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("chi_ratio") {
  const auto third = make_distribution({1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(chi_ratio(third, 2) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(chi_ratio(make_distribution({0.5, 0.5}), 2) == 0.0);
  CHECK(chi_ratio(make_distribution({0.5, 0.3, 0.2}), 1) == doctest::Approx(0.62).epsilon(1e-15));
  CHECK(chi_ratio(make_distribution({0.5, 0.3, 0.2}), 2, ChiMethod::Newton) ==
        doctest::Approx(0.18 / 0.62).epsilon(1e-13));
  CHECK(error_kind([] { chi_ratio(make_distribution({0.5, 0.5}), 3); }) == ErrorKind::VanishingDenominator);

  // Ratios stay finite where chi_N itself has underflowed.
  const int l = 3000;
  const auto wide = make_distribution(std::vector<double>(l, 1.0 / l));
  CHECK(chi_ratio(wide, 2500) == doctest::Approx(1.0 - 2500.0 / l).epsilon(1e-10));
}

TEST_CASE("Newton-Maclaurin: the ratio decreases with N") {
  testutil::RandomCases cases(21);
  for (int i = 0; i < 200; ++i) {
    const auto d = cases.next(2, 60);
    const int s = static_cast<int>(d.s());
    const auto seq = chi_dp(d, s);
    for (int k = 1; k + 1 <= s; ++k)
      CHECK(seq.log_chi[k + 1] - seq.log_chi[k] <= seq.log_chi[k] - seq.log_chi[k - 1] + 1e-12);
  }
}

TEST_CASE("chi_2 = 1 - P") {
  testutil::RandomCases cases(1);
  for (int i = 0; i < 1000; ++i) {
    const auto d = cases.next(1, 50);
    CHECK(std::abs(chi_dp(d, 2).chi[2] - (1.0 - purity(d))) <= 1e-14);
  }
}

TEST_CASE("commutator expectation") {
  const auto wide = make_distribution(std::vector<double>(1000000, 1e-6));
  // Rounding in a million-term accumulation sits near 1e-11.
  CHECK(commutator_expectation(wide, 1) == doctest::Approx(1.0 - 2e-6).epsilon(1e-10));
  CHECK(commutator_expectation(make_distribution({1.0 / 3, 1.0 / 3, 1.0 / 3}), 2) ==
        doctest::Approx(-1.0 / 3).epsilon(1e-14));
  CHECK(commutator_expectation(make_distribution({1.0}), 1) == -1.0);
}

TEST_CASE("closed forms") {
  CHECK(chi_peaked_closed(0.25, 2) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(chi_peaked_closed(0.37, 1) == 1.0);
  CHECK(chi_peaked_closed(0.25, 3) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(chi_dp(peaked_distribution(0.25, 1000000), 3).chi[3] - 0.5) <= 1e-4);

  CHECK(rel(chi_uniform_closed(365, 23), static_cast<double>(oracle::birthday_product(365, 23))) <= 1e-13);
  CHECK(chi_uniform_closed(3, 3) == doctest::Approx(2.0 / 9).epsilon(1e-15));
  CHECK(chi_uniform_closed(5, 6) == 0.0);

  for (int l = 1; l <= 400; l += 13) {
    const auto seq = chi_dp(make_distribution(std::vector<double>(l, 1.0 / l)), l + 1);
    for (int k = 0; k <= l + 1; ++k) CHECK(std::abs(seq.chi[k] - chi_uniform_closed(l, k)) <= 1e-12);
  }
  for (int l = 1; l <= 100; ++l)
    for (int k = 0; k <= l + 1; ++k) CHECK(chi_uniform_closed(l, k) <= chi_peaked_closed(1.0 / l, k) + 1e-15);
}

TEST_CASE("closed-form ratios of the extremal states") {
  CHECK(ratio_peaked(0.5, 2, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(ratio_peaked(0.2, 16, 2) - chi_ratio(peaked_distribution(0.2, 16), 2)) <= 1e-12);
  const double limit = 1.0 - 0.04 * 5 / (1.0 + 4 * 0.2);
  CHECK(std::abs(ratio_peaked(0.04, 100000000, 5) - limit) <= 1e-6);

  CHECK(ratio_uniform(1.0 / 3, 2) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(std::abs(ratio_uniform(0.3, 2) - chi_ratio(uniform_distribution(0.3), 2)) <= 1e-12);
  CHECK(ratio_uniform(0.25, 3) == doctest::Approx(0.25).epsilon(1e-14));

  CHECK(error_kind([] { ratio_uniform(0.25, 4); }) == ErrorKind::Infeasible);
  CHECK(error_kind([] { ratio_peaked(0.2, 4, 1); }) == ErrorKind::Infeasible);
  CHECK(error_kind([] { ratio_peaked(0.2, 5, 5); }) == ErrorKind::Infeasible);

  // Against the chi of explicitly built states.
  for (int s = 3; s <= 14; ++s)
    for (int n = 1; n < s; ++n)
      for (double t : {0.0, 0.2, 0.7}) {
        const double p = 1.0 / s + (1.0 - 1.0 / s) * t;
        const auto lam = oracle::extremal(p, s, +1);
        const double want = static_cast<double>(oracle::subset_chi(lam, n + 1) / oracle::subset_chi(lam, n));
        CHECK(std::abs(ratio_peaked(p, s, n) - want) <= 1e-12);
      }
}

}  // TEST_SUITE
