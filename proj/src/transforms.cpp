#include "coboson/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "coboson/chi.hpp"
#include "coboson/error.hpp"

namespace coboson {

TripleSelection::TripleSelection(const SchmidtDistribution& d, std::size_t j1, std::size_t j2,
                                 std::size_t j3)
    : j1_(j1), j2_(j2), j3_(j3) {
  if (!(1 <= j1 && j1 < j2 && j2 < j3 && j3 <= d.s())) {
    std::ostringstream msg;
    msg << "triple (" << j1 << ", " << j2 << ", " << j3 << ") is not strictly increasing within 1.."
        << d.s();
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
  const double a = d[j1 - 1], b = d[j2 - 1], c = d[j3 - 1];
  k1_ = a + b + c;
  k2_ = a * a + b * b + c * c;
}

Triple gamma_peaked_values(double k1, double k2) {
  const double root = std::sqrt(std::max(0.0, 6.0 * k2 - 2.0 * k1 * k1));
  const double rest = (2.0 * k1 - root) / 6.0;
  return {(k1 + root) / 3.0, rest, rest};
}

Triple gamma_uniform_values(double k1, double k2) {
  if (k1 * k1 >= 2.0 * k2) {
    const double root = std::sqrt(std::max(0.0, 6.0 * k2 - 2.0 * k1 * k1));
    const double rest = (2.0 * k1 + root) / 6.0;
    return {std::max(0.0, (k1 - root) / 3.0), rest, rest};
  }
  const double root = std::sqrt(std::max(0.0, 2.0 * k2 - k1 * k1));
  return {0.0, (k1 + root) / 2.0, (k1 - root) / 2.0};
}

namespace {

SchmidtDistribution replace_triple(const SchmidtDistribution& d, const TripleSelection& t, Triple v) {
  std::vector<double> values(d.lambdas().begin(), d.lambdas().end());
  values[t.j1() - 1] = v.first;
  values[t.j2() - 1] = v.second;
  values[t.j3() - 1] = v.third;
  return make_distribution(values);
}

}  // namespace

SchmidtDistribution gamma_peaked(const SchmidtDistribution& d, const TripleSelection& t) {
  return replace_triple(d, t, gamma_peaked_values(t.k1(), t.k2()));
}

SchmidtDistribution gamma_uniform(const SchmidtDistribution& d, const TripleSelection& t) {
  return replace_triple(d, t, gamma_uniform_values(t.k1(), t.k2()));
}

ProductBounds triple_product_bounds(const SchmidtDistribution& d, const TripleSelection& t) {
  ProductBounds out;
  out.value = d[t.j1() - 1] * d[t.j2() - 1] * d[t.j3() - 1];
  out.lower = gamma_uniform_values(t.k1(), t.k2()).product();
  out.upper = gamma_peaked_values(t.k1(), t.k2()).product();
  return out;
}

MonotonicityCheck ratio_monotonicity_check(const SchmidtDistribution& d, const TripleSelection& t,
                                           int n, double tol) {
  MonotonicityCheck out;
  out.r = chi_ratio(d, n);
  out.r_u = chi_ratio(gamma_uniform(d, t), n);
  out.r_p = chi_ratio(gamma_peaked(d, t), n);
  out.ok = out.r_u <= out.r + tol && out.r <= out.r_p + tol;
  return out;
}

IterationResult iterate_to_extremal(const SchmidtDistribution& d, Direction direction, int max_iters,
                                    double tol) {
  IterationResult result{d, 0, 0.0, false};
  if (d.s() < 3) {
    result.converged = true;
    return result;
  }
  while (result.iterations < max_iters) {
    const SchmidtDistribution& current = result.distribution;
    std::size_t j1 = 1, j2 = 2, j3 = current.s();
    if (direction == Direction::Uniform) {
      // Zeros are already at their final value; work on the nonzero block.
      const std::size_t m = current.nonzero_count();
      if (m < 3) {
        result.converged = true;
        return result;
      }
      j2 = m - 1;
      j3 = m;
    }
    const TripleSelection triple(current, j1, j2, j3);
    SchmidtDistribution next =
        direction == Direction::Peaked ? gamma_peaked(current, triple) : gamma_uniform(current, triple);
    double change = 0.0;
    for (std::size_t i = 0; i < next.s(); ++i) change = std::max(change, std::abs(next[i] - current[i]));
    result.distribution = std::move(next);
    result.last_change = change;
    ++result.iterations;
    if (change < tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace coboson
