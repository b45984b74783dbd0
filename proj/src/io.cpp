#include "coboson/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "coboson/error.hpp"

namespace coboson {

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> parse_coefficients(std::string_view text) {
  std::vector<double> values;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t eol = text.find('\n');
    std::string line(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (const std::size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\t' || c == '\r') c = ' ';
    std::istringstream tokens(line);
    std::string token;
    while (tokens >> token) {
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(token.c_str(), &end);
      if (end != token.c_str() + token.size() || errno == ERANGE || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << "line " << line_no << ": cannot parse '" << token << "' as a real number";
        throw Error(ErrorKind::InvalidArgument, msg.str());
      }
      values.push_back(v);
    }
  }
  return values;
}

SchmidtDistribution read_distribution_file(const std::string& path, const DistributionOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return make_distribution(parse_coefficients(buf.str()), opts);
}

void write_distribution(std::ostream& out, const SchmidtDistribution& d) {
  for (double x : d.lambdas()) out << format_real(x) << '\n';
}

void write_metadata(std::ostream& out, const Metadata& meta) {
  for (const auto& [key, value] : meta) out << "# " << key << '=' << value << '\n';
}

void write_grid_csv(std::ostream& out, const Grid2D& grid) {
  const GridGeometry& g = grid.geometry();
  out << "# x_bins=" << g.x_bins << ", y_bins=" << g.y_bins << ", x_range=[" << format_real(g.x_min) << ','
      << format_real(g.x_max) << "], y_range=[" << format_real(g.y_min) << ',' << format_real(g.y_max)
      << "], total=" << grid.total() << ", overflow=" << grid.overflow() << '\n';
  out << "xi,yi,count\n";
  for (int xi = 0; xi < g.x_bins; ++xi)
    for (int yi = 0; yi < g.y_bins; ++yi) {
      const std::uint64_t c = grid.counts()[static_cast<std::size_t>(xi) * g.y_bins + yi];
      if (c) out << xi << ',' << yi << ',' << c << '\n';
    }
}

void write_deviation_csv(std::ostream& out, const std::vector<DeviationRow>& rows) {
  out << "n,p,dev_lower_loose,dev_lower_tight,dev_upper_tight,dev_upper_loose\n";
  for (const auto& r : rows)
    out << r.n << ',' << format_real(r.p) << ',' << format_real(r.dev_lower_loose) << ','
        << format_real(r.dev_lower_tight) << ',' << format_real(r.dev_upper_tight) << ','
        << format_real(r.dev_upper_loose) << '\n';
}

void write_overlay_csv(std::ostream& out, const std::vector<OverlayRow>& rows, const std::vector<int>& s_list) {
  out << "p,lower_loose,lower_tight,upper_tight,upper_loose";
  for (int s : s_list) out << ",upper_finite_s_" << s;
  out << '\n';
  for (const auto& r : rows) {
    out << format_real(r.p) << ',' << format_real(r.lower_loose) << ',' << format_real(r.lower_tight) << ','
        << format_real(r.upper_tight) << ',' << format_real(r.upper_loose);
    for (const auto& v : r.upper_finite_s) out << ',' << (v ? format_real(*v) : std::string("nan"));
    out << '\n';
  }
}

}  // namespace coboson
