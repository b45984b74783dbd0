#include "coboson/scan.hpp"

#include <cmath>
#include <sstream>

#include "coboson/bounds.hpp"
#include "coboson/chi.hpp"
#include "coboson/error.hpp"
#include "parallel.hpp"

namespace coboson {

Grid2D::Grid2D(const GridGeometry& geometry) : geometry_(geometry) {
  if (geometry.x_bins < 1 || geometry.y_bins < 1)
    throw Error(ErrorKind::InvalidArgument, "grid needs at least one bin per axis");
  if (!(geometry.x_min < geometry.x_max) || !(geometry.y_min < geometry.y_max))
    throw Error(ErrorKind::InvalidArgument, "grid ranges must be non-empty");
  counts_.assign(static_cast<std::size_t>(geometry.x_bins) * static_cast<std::size_t>(geometry.y_bins), 0);
}

std::uint64_t Grid2D::count(int xi, int yi) const {
  if (xi < 0 || yi < 0 || xi >= geometry_.x_bins || yi >= geometry_.y_bins)
    throw Error(ErrorKind::InvalidArgument, "bin index out of range");
  return counts_[static_cast<std::size_t>(xi) * geometry_.y_bins + yi];
}

namespace {

std::optional<int> axis_bin(double v, double lo, double hi, int bins) {
  if (!std::isfinite(v) || v < lo - kGridEdgeTol || v > hi + kGridEdgeTol) return std::nullopt;
  const double t = (v - lo) / (hi - lo) * bins;
  const int i = static_cast<int>(std::floor(t));
  return std::clamp(i, 0, bins - 1);
}

}  // namespace

std::optional<std::pair<int, int>> Grid2D::bin_of(double x, double y) const {
  const auto xi = axis_bin(x, geometry_.x_min, geometry_.x_max, geometry_.x_bins);
  const auto yi = axis_bin(y, geometry_.y_min, geometry_.y_max, geometry_.y_bins);
  if (!xi || !yi) return std::nullopt;
  return std::pair{*xi, *yi};
}

bool Grid2D::add(double x, double y) {
  const auto bin = bin_of(x, y);
  if (!bin) {
    ++overflow_;
    return false;
  }
  ++counts_[static_cast<std::size_t>(bin->first) * geometry_.y_bins + bin->second];
  ++total_;
  return true;
}

void Grid2D::merge(const Grid2D& other) {
  if (!(other.geometry_ == geometry_))
    throw Error(ErrorKind::InvalidArgument, "cannot merge grids with different geometry");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
  overflow_ += other.overflow_;
}

double Grid2D::x_center(int xi) const {
  return geometry_.x_min + (xi + 0.5) * (geometry_.x_max - geometry_.x_min) / geometry_.x_bins;
}

double Grid2D::y_center(int yi) const {
  return geometry_.y_min + (yi + 0.5) * (geometry_.y_max - geometry_.y_min) / geometry_.y_bins;
}

GridGeometry default_scan_geometry(int s, int bins) {
  if (s < 2) throw Error(ErrorKind::InvalidArgument, "scan needs s >= 2");
  return {bins, bins, 1.0 / s, 1.0, 0.0, 1.0};
}

double ScanResult::stderr_p() const {
  if (samples < 2) return 0.0;
  const double m = static_cast<double>(samples);
  const double mean = sum_p / m;
  const double var = std::max(0.0, (sum_p2 - m * mean * mean) / (m - 1.0));
  return std::sqrt(var / m);
}

std::size_t scan_chunk_count(std::uint64_t samples) {
  return static_cast<std::size_t>((samples + kSamplesPerStream - 1) / kSamplesPerStream);
}

void merge_into(ScanResult& into, const ScanResult& shard) {
  into.grid.merge(shard.grid);
  into.samples += shard.samples;
  into.sum_p += shard.sum_p;
  into.sum_p2 += shard.sum_p2;
}

namespace {

void check_scan_args(const SamplerConfig& cfg, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be positive");
  if (n >= cfg.s) {
    std::ostringstream msg;
    msg << "scan needs n < s, got n=" << n << ", s=" << cfg.s;
    throw Error(ErrorKind::InfeasibleN, msg.str());
  }
}

struct ChunkMoments {
  std::uint64_t samples = 0;
  double sum_p = 0.0;
  double sum_p2 = 0.0;
};

// Accumulates one chunk into `grid`; returns that chunk's purity moments.
ChunkMoments scan_chunk(const SamplerConfig& cfg, int n, std::uint64_t samples, std::size_t chunk,
                        Grid2D& grid) {
  ChunkMoments m;
  for_each_sample_in_chunk(cfg, chunk, samples, [&](std::size_t index, const SchmidtDistribution& d) {
    const double p = purity(d);
    const BoundsReport report = bounds_chain(p, n, std::nullopt, &d);
    if (!report.chain_ok) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "bound chain violated by sample " << index << " (P=" << p << ", ratio=" << *report.ratio << "):";
      for (const auto& link : report.slacks)
        if (link.slack < -kChainTol) msg << ' ' << link.name << " slack " << link.slack;
      throw Error(ErrorKind::ChainViolation, msg.str());
    }
    grid.add(p, *report.ratio);
    ++m.samples;
    m.sum_p += p;
    m.sum_p2 += p * p;
  });
  return m;
}

ScanResult run_chunks(const SamplerConfig& cfg, int n, std::uint64_t samples, const GridGeometry& geometry,
                      std::size_t chunk_begin, std::size_t chunk_end, unsigned workers) {
  const std::size_t chunks = chunk_end - chunk_begin;
  const std::size_t threads = std::max<std::size_t>(1, std::min<std::size_t>(std::max(1u, workers), chunks));
  std::vector<Grid2D> grids(threads, Grid2D(geometry));
  std::vector<ChunkMoments> moments(chunks);
  detail::parallel_ranges(chunks, static_cast<unsigned>(threads),
                          [&](std::size_t worker, std::size_t begin, std::size_t end) {
                            for (std::size_t c = begin; c < end; ++c)
                              moments[c] = scan_chunk(cfg, n, samples, chunk_begin + c, grids[worker]);
                          });
  ScanResult result{Grid2D(geometry), 0, 0.0, 0.0};
  for (const auto& g : grids) result.grid.merge(g);
  for (const auto& m : moments) {
    result.samples += m.samples;
    result.sum_p += m.sum_p;
    result.sum_p2 += m.sum_p2;
  }
  return result;
}

}  // namespace

ScanResult scan_shard(const SamplerConfig& cfg, int n, std::uint64_t samples, const GridGeometry& geometry,
                      std::size_t chunk_begin, std::size_t chunk_end) {
  check_scan_args(cfg, n);
  chunk_end = std::min(chunk_end, scan_chunk_count(samples));
  if (chunk_begin > chunk_end) chunk_begin = chunk_end;
  return run_chunks(cfg, n, samples, geometry, chunk_begin, chunk_end, 1);
}

ScanResult scan_random_states(const SamplerConfig& cfg, int n, std::uint64_t samples,
                              const GridGeometry& geometry, unsigned workers) {
  check_scan_args(cfg, n);
  return run_chunks(cfg, n, samples, geometry, 0, scan_chunk_count(samples), workers);
}

std::vector<OverlayRow> bound_overlay(const std::vector<double>& p_grid, int n,
                                      const std::vector<int>& s_list) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be positive");
  std::vector<OverlayRow> rows;
  rows.reserve(p_grid.size());
  for (double p : p_grid) {
    if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "P must lie in (0, 1]");
    OverlayRow row;
    row.p = p;
    row.lower_loose = 1.0 - n * p;
    row.lower_tight = tight_lower_bound(p, n);
    row.upper_tight = upper_bound_u(p, n);
    row.upper_loose = 1.0 - p;
    for (int s : s_list) {
      if (s < 1) throw Error(ErrorKind::InvalidArgument, "S must be positive");
      if (s * p < 1.0 - kDefaultCeilTol)
        row.upper_finite_s.push_back(std::nullopt);
      else
        row.upper_finite_s.push_back(finite_s_upper_bound(p, s, n));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace coboson
