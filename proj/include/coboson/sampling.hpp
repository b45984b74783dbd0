#pragma once

#include <algorithm>
#include <cstdint>
#include <string_view>
#include <vector>

#include "coboson/random.hpp"
#include "coboson/schmidt.hpp"

namespace coboson {

enum class Measure {
  Induced,  // spectrum of G G^dagger / tr, G an s x s standard complex Gaussian matrix
  Flat,     // uniform on the probability simplex
};

std::string_view to_string(Measure measure);

struct SamplerConfig {
  int s = 1;
  Measure measure = Measure::Induced;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

// Samples in one chunk share a generator stream; chunk c of a batch uses
// stream_id + c. The chunk size is part of the reproducibility contract.
inline constexpr std::size_t kSamplesPerStream = 4096;

/// Draws one spectrum from `rng`.
SchmidtDistribution sample_spectrum(const SamplerConfig& cfg, Xoshiro256StarStar& rng);

/// First spectrum of the configured stream.
SchmidtDistribution sample_spectrum(const SamplerConfig& cfg);

/// `count` spectra. Output depends only on cfg and count, never on `workers`.
std::vector<SchmidtDistribution> sample_batch(const SamplerConfig& cfg, std::size_t count,
                                              unsigned workers = 1);

/// Calls fn(index, spectrum) for every sample of a batch in chunk order on
/// one thread; the streaming counterpart of sample_batch for [begin, end) chunks.
template <class Fn>
void for_each_sample_in_chunk(const SamplerConfig& cfg, std::size_t chunk, std::size_t count, Fn&& fn) {
  Xoshiro256StarStar rng(cfg.seed, cfg.stream_id + chunk);
  const std::size_t begin = chunk * kSamplesPerStream;
  const std::size_t end = std::min(count, begin + kSamplesPerStream);
  for (std::size_t i = begin; i < end; ++i) fn(i, sample_spectrum(cfg, rng));
}

// Closed-form mean purity of each measure, for reference.
double induced_mean_purity(int s);  // 2s/(s^2 + 1)
double flat_mean_purity(int s);     // 2/(s + 1)

}  // namespace coboson
