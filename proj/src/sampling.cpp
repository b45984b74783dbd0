#include "coboson/sampling.hpp"

#include <Eigen/Dense>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "coboson/error.hpp"
#include "parallel.hpp"

namespace coboson {

std::string_view to_string(Measure measure) {
  switch (measure) {
    case Measure::Induced: return "induced";
    case Measure::Flat: return "flat";
  }
  return "unknown";
}

namespace {

std::vector<double> normalized(std::vector<double> values) {
  double sum = 0.0;
  for (double& x : values) {
    x = std::max(x, 0.0);
    sum += x;
  }
  for (double& x : values) x /= sum;
  return values;
}

std::vector<double> induced_spectrum(int s, Xoshiro256StarStar& rng) {
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd g(s, s);
  for (int j = 0; j < s; ++j)
    for (int i = 0; i < s; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = {re, im};
    }
  // Squared singular values of G are the eigenvalues of G G^dagger.
  const Eigen::MatrixXcd w = g * g.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(w, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = solver.eigenvalues();
  return normalized(std::vector<double>(ev.data(), ev.data() + ev.size()));
}

std::vector<double> flat_spectrum(int s, Xoshiro256StarStar& rng) {
  boost::random::exponential_distribution<double> exponential(1.0);
  std::vector<double> values(static_cast<std::size_t>(s));
  for (double& x : values) x = exponential(rng);
  return normalized(std::move(values));
}

}  // namespace

SchmidtDistribution sample_spectrum(const SamplerConfig& cfg, Xoshiro256StarStar& rng) {
  if (cfg.s < 1) throw Error(ErrorKind::InvalidArgument, "Schmidt number must be positive");
  if (cfg.s == 1) return make_distribution({1.0});
  const std::vector<double> values =
      cfg.measure == Measure::Induced ? induced_spectrum(cfg.s, rng) : flat_spectrum(cfg.s, rng);
  return make_distribution(values);
}

SchmidtDistribution sample_spectrum(const SamplerConfig& cfg) {
  Xoshiro256StarStar rng(cfg.seed, cfg.stream_id);
  return sample_spectrum(cfg, rng);
}

std::vector<SchmidtDistribution> sample_batch(const SamplerConfig& cfg, std::size_t count,
                                              unsigned workers) {
  if (count == 0) throw Error(ErrorKind::InvalidArgument, "count must be at least 1");
  if (cfg.s < 1) throw Error(ErrorKind::InvalidArgument, "Schmidt number must be positive");
  const std::size_t chunks = (count + kSamplesPerStream - 1) / kSamplesPerStream;
  std::vector<std::vector<SchmidtDistribution>> parts(chunks);
  detail::parallel_for(chunks, workers, [&](std::size_t c) {
    auto& part = parts[c];
    for_each_sample_in_chunk(cfg, c, count,
                             [&](std::size_t, SchmidtDistribution d) { part.push_back(std::move(d)); });
  });
  std::vector<SchmidtDistribution> out;
  out.reserve(count);
  for (auto& part : parts)
    for (auto& d : part) out.push_back(std::move(d));
  return out;
}

double induced_mean_purity(int s) { return 2.0 * s / (static_cast<double>(s) * s + 1.0); }

double flat_mean_purity(int s) { return 2.0 / (s + 1.0); }

}  // namespace coboson
