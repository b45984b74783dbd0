#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coboson/bounds.hpp"
#include "coboson/scan.hpp"
#include "coboson/schmidt.hpp"

namespace coboson {

// Shortest round-trip-safe text for a double (17 significant digits);
// non-finite values print as "nan", "inf" or "-inf".
std::string format_real(double x);

/// Parses raw coefficients from text: one value per line or comma/whitespace
/// separated, '#' starts a comment. Throws InvalidArgument on a malformed token.
std::vector<double> parse_coefficients(std::string_view text);

SchmidtDistribution read_distribution_file(const std::string& path,
                                           const DistributionOptions& opts = {});

// One coefficient per line, 17 significant digits; parse_coefficients reads it back exactly.
void write_distribution(std::ostream& out, const SchmidtDistribution& d);

using Metadata = std::vector<std::pair<std::string, std::string>>;

// Writes "# key=value" lines.
void write_metadata(std::ostream& out, const Metadata& meta);

void write_grid_csv(std::ostream& out, const Grid2D& grid);
void write_deviation_csv(std::ostream& out, const std::vector<DeviationRow>& rows);
void write_overlay_csv(std::ostream& out, const std::vector<OverlayRow>& rows, const std::vector<int>& s_list);

}  // namespace coboson
