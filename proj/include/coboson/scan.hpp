#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "coboson/sampling.hpp"

namespace coboson {

struct GridGeometry {
  int x_bins = 1000;
  int y_bins = 1000;
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;

  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;
};

// Points this close outside a range edge are binned into the edge bin; they
// arise from rounding, e.g. a purity of 1/s computed one ulp low.
inline constexpr double kGridEdgeTol = 1e-12;

/// Raw 2D histogram with an overflow tally. Grids with identical geometry
/// merge by elementwise addition.
class Grid2D {
 public:
  Grid2D() : Grid2D(GridGeometry{}) {}
  explicit Grid2D(const GridGeometry& geometry);

  const GridGeometry& geometry() const noexcept { return geometry_; }
  std::uint64_t count(int xi, int yi) const;
  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t overflow() const noexcept { return overflow_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

  // Returns false (and bumps the overflow tally) for out-of-range points.
  bool add(double x, double y);
  void merge(const Grid2D& other);

  std::optional<std::pair<int, int>> bin_of(double x, double y) const;
  double x_center(int xi) const;
  double y_center(int yi) const;

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  GridGeometry geometry_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
  std::uint64_t overflow_ = 0;
};

// Default geometry for a scan at Schmidt number s: P in [1/s, 1], ratio in [0, 1].
GridGeometry default_scan_geometry(int s, int bins = 1000);

struct ScanResult {
  Grid2D grid;
  std::uint64_t samples = 0;
  // Exact (unbinned) purity moments, summed chunk by chunk in chunk order.
  double sum_p = 0.0;
  double sum_p2 = 0.0;

  double mean_p() const { return samples ? sum_p / static_cast<double>(samples) : 0.0; }
  double stderr_p() const;
};

/// Samples `samples` spectra, bins (purity, chi_{n+1}/chi_n) and checks each
/// point against the full bound chain. A violation is a hard error
/// (ChainViolation). Requires n < cfg.s (InfeasibleN). Counts are identical for
/// every worker count.
ScanResult scan_random_states(const SamplerConfig& cfg, int n, std::uint64_t samples,
                              const GridGeometry& geometry, unsigned workers = 1);

/// One shard of a scan: the samples of chunks [chunk_begin, chunk_end) of a
/// `samples`-long stream. Merging the shards of a partition of the chunk range
/// reproduces scan_random_states exactly.
ScanResult scan_shard(const SamplerConfig& cfg, int n, std::uint64_t samples,
                      const GridGeometry& geometry, std::size_t chunk_begin, std::size_t chunk_end);

std::size_t scan_chunk_count(std::uint64_t samples);

// Adds grids and moments; the moments are added in argument order.
void merge_into(ScanResult& into, const ScanResult& shard);

struct OverlayRow {
  double p = 0.0;
  double lower_loose = 0.0;
  double lower_tight = 0.0;
  double upper_tight = 0.0;
  double upper_loose = 0.0;
  // One entry per requested S; empty where S P < 1.
  std::vector<std::optional<double>> upper_finite_s;
};

std::vector<OverlayRow> bound_overlay(const std::vector<double>& p_grid, int n,
                                      const std::vector<int>& s_list);

}  // namespace coboson
