#include "cli_app.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "coboson/bounds.hpp"
#include "coboson/chi.hpp"
#include "coboson/error.hpp"
#include "coboson/io.hpp"
#include "coboson/sampling.hpp"
#include "coboson/scan.hpp"
#include "coboson/transforms.hpp"
#include "coboson/verify.hpp"
#include "coboson/version.hpp"

namespace coboson::cli {

using nlohmann::ordered_json;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("COBOSON_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw Error(ErrorKind::InvalidArgument, "COBOSON_SEED must be an unsigned integer");
    return v;
  }
  return 0;
}

unsigned hardware_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

struct DistInput {
  std::string inline_values;
  std::string file;
  int uniform = 0;
  bool renormalize = false;
  double drop_below = 0.0;

  void add_to(CLI::App* app) {
    app->add_option("--dist", inline_values, "Schmidt coefficients, comma separated");
    app->add_option("--file", file, "file with one coefficient per line");
    app->add_option("--uniform", uniform, "uniform distribution over L coefficients")->check(CLI::PositiveNumber);
    app->add_flag("--renormalize", renormalize, "rescale inputs to unit sum");
    app->add_option("--drop-below", drop_below, "discard coefficients below this value");
  }

  bool given() const { return !inline_values.empty() || !file.empty() || uniform > 0; }

  SchmidtDistribution load() const {
    const int sources = !inline_values.empty() + !file.empty() + (uniform > 0);
    if (sources != 1)
      throw Error(ErrorKind::InvalidArgument, "give exactly one of --dist, --file, --uniform");
    DistributionOptions opts;
    opts.renormalize = renormalize;
    opts.drop_below = drop_below;
    if (uniform > 0) return make_distribution(std::vector<double>(uniform, 1.0 / uniform), opts);
    if (!file.empty()) return read_distribution_file(file, opts);
    return make_distribution(parse_coefficients(inline_values), opts);
  }

  void describe(Metadata& meta) const {
    if (!inline_values.empty()) meta.emplace_back("dist", inline_values);
    if (!file.empty()) meta.emplace_back("file", file);
    if (uniform > 0) meta.emplace_back("uniform", std::to_string(uniform));
    if (renormalize) meta.emplace_back("renormalize", "true");
    if (drop_below > 0) meta.emplace_back("drop_below", format_real(drop_below));
  }
};

Measure parse_measure(const std::string& name) {
  if (name == "induced") return Measure::Induced;
  if (name == "flat") return Measure::Flat;
  throw Error(ErrorKind::InvalidArgument, "unknown measure '" + name + "'");
}

ordered_json json_metadata(const Metadata& meta) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : meta) j[k] = v;
  return j;
}

ordered_json real_or_null(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

ordered_json real_array(const std::vector<double>& xs) {
  ordered_json a = ordered_json::array();
  for (double x : xs) a.push_back(real_or_null(x));
  return a;
}

ordered_json lambdas_json(const SchmidtDistribution& d) {
  return real_array(std::vector<double>(d.lambdas().begin(), d.lambdas().end()));
}

template <class T>
ordered_json optional_json(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  for (double v : parse_coefficients(text)) {
    if (v != std::floor(v) || v < 1 || v > 1e9)
      throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be positive integers");
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw Error(ErrorKind::InvalidArgument, std::string(what) + " is empty");
  return out;
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(const std::vector<std::string>& args);

 private:
  // Destination for the command's primary output.
  std::ostream& sink() {
    if (output_.empty()) return out_;
    if (!file_) {
      file_ = std::make_unique<std::ofstream>(output_);
      if (!*file_) throw Error(ErrorKind::InvalidArgument, "cannot write '" + output_ + "'");
    }
    return *file_;
  }

  Metadata base_metadata(const std::string& command) const {
    return {{"tool", "coboson"}, {"version", kVersion}, {"command", command}};
  }

  void emit_json(const std::string& command, Metadata meta, ordered_json body) {
    ordered_json doc;
    Metadata full = base_metadata(command);
    full.insert(full.end(), meta.begin(), meta.end());
    doc["metadata"] = json_metadata(full);
    for (auto& [k, v] : body.items()) doc[k] = v;
    sink() << doc.dump(2) << '\n';
  }

  void emit_csv_header(const std::string& command, const Metadata& meta) {
    Metadata full = base_metadata(command);
    full.insert(full.end(), meta.begin(), meta.end());
    write_metadata(sink(), full);
  }

  int cmd_chi();
  int cmd_ratio();
  int cmd_bounds();
  int cmd_extremal();
  int cmd_birthday();
  int cmd_sample();
  int cmd_scan();
  int cmd_curves();
  int cmd_overlay();
  int cmd_transform();
  int cmd_verify();

  std::ostream& out_;
  std::ostream& err_;
  std::unique_ptr<std::ofstream> file_;

  // Shared option storage; each subcommand binds the subset it uses.
  std::string output_;
  unsigned workers_ = hardware_workers();
  std::uint64_t seed_ = 0;
  DistInput dist_;
  int n_ = 0;
  int s_ = 0;
  double p_ = 0.0;
  std::string method_ = "dp";
  std::string kind_;
  std::string mode_ = "enumerate";
  std::uint64_t trials_ = 100000;
  std::string measure_ = "induced";
  std::uint64_t count_ = 1;
  std::uint64_t stream_ = 0;
  std::uint64_t samples_ = 1000000;
  int bins_ = 1000;
  int x_bins_ = 0;
  int y_bins_ = 0;
  std::string n_list_ = "2,3,5,10,100";
  std::string s_list_ = "3,5,50";
  double p_min_ = 1e-9;
  double p_max_ = 1.0;
  int points_ = 200;
  std::string op_;
  std::string indices_;
  bool iterate_ = false;
  int max_iters_ = 100000;
  int cases_ = 2000;
  int order_ = 0;
};

int Runner::cmd_chi() {
  const SchmidtDistribution d = dist_.load();
  NormalizationSequence seq;
  if (method_ == "dp")
    seq = chi_dp(d, n_);
  else if (method_ == "newton")
    seq = chi_newton(power_sums(d, std::max(n_, 1)), n_);
  else if (method_ == "brute")
    seq = chi_bruteforce(d, n_);
  else if (method_ == "dc")
    seq = chi_divide_conquer(d, n_, {std::size_t{1} << 14, workers_});
  else
    throw Error(ErrorKind::InvalidArgument, "unknown method '" + method_ + "'");
  Metadata meta{{"method", method_}, {"n", std::to_string(n_)}};
  dist_.describe(meta);
  ordered_json body;
  body["n"] = n_;
  body["method"] = std::string(to_string(seq.method));
  body["s"] = d.s();
  body["purity"] = purity(d);
  body["chi_n"] = seq.chi[n_];
  body["chi"] = real_array(seq.chi);
  body["log_chi"] = real_array(seq.log_chi);
  if (method_ == "newton") {
    body["digits_lost"] = seq.digits_lost;
    body["stability_warning"] = seq.stability_warning;
    if (seq.stability_warning)
      err_ << "warning: power-sum recursion lost " << seq.digits_lost << " digits to cancellation\n";
  }
  emit_json("chi", meta, body);
  return 0;
}

int Runner::cmd_ratio() {
  Metadata meta{{"n", std::to_string(n_)}};
  ordered_json body;
  if (dist_.given()) {
    const SchmidtDistribution d = dist_.load();
    dist_.describe(meta);
    const double r = chi_ratio(d, n_);
    body["purity"] = purity(d);
    body["ratio"] = r;
    body["commutator"] = 2.0 * r - 1.0;
  } else {
    if (kind_ != "uniform" && kind_ != "peaked")
      throw Error(ErrorKind::InvalidArgument, "give a distribution or --kind uniform|peaked with --p");
    meta.emplace_back("kind", kind_);
    meta.emplace_back("p", format_real(p_));
    double r;
    if (kind_ == "uniform") {
      r = ratio_uniform(p_, n_);
    } else {
      if (s_ < 1) throw Error(ErrorKind::InvalidArgument, "--kind peaked needs --s");
      meta.emplace_back("s", std::to_string(s_));
      r = ratio_peaked(p_, s_, n_);
    }
    body["purity"] = p_;
    body["ratio"] = r;
    body["commutator"] = 2.0 * r - 1.0;
  }
  emit_json("ratio", meta, body);
  return 0;
}

int Runner::cmd_bounds() {
  Metadata meta{{"n", std::to_string(n_)}};
  std::optional<SchmidtDistribution> d;
  if (dist_.given()) {
    d = dist_.load();
    dist_.describe(meta);
  }
  const double p = d && p_ == 0.0 ? purity(*d) : p_;
  const std::optional<int> s = s_ > 0 ? std::optional<int>(s_) : std::nullopt;
  meta.emplace_back("p", format_real(p));
  if (s) meta.emplace_back("s", std::to_string(*s));
  const BoundsReport r = bounds_chain(p, n_, s, d ? &*d : nullptr);
  ordered_json body;
  body["p"] = r.p;
  body["n"] = r.n;
  body["s"] = optional_json(r.s);
  body["l"] = r.l;
  body["lower_loose"] = r.lower_loose;
  body["lower_loose_clamped"] = r.lower_loose_clamped;
  body["lower_tight"] = r.lower_tight;
  body["ratio"] = optional_json(r.ratio);
  body["upper_finite_s"] = optional_json(r.upper_finite_s);
  body["upper_tight"] = r.upper_tight;
  body["upper_loose"] = r.upper_loose;
  body["chain_ok"] = r.chain_ok;
  ordered_json slacks = ordered_json::array();
  for (const auto& link : r.slacks) slacks.push_back({{"link", link.name}, {"slack", link.slack}});
  body["slacks"] = slacks;
  if (order_ == 2 || order_ == 3) {
    const ExpansionResult e = upper_bound_expansion(p, n_, order_);
    body["upper_tight_expansion"] = {{"order", order_}, {"value", e.value},
                                     {"outside_convergence_radius", e.outside_convergence_radius}};
    if (e.outside_convergence_radius)
      err_ << "warning: P(N-1)^2 >= 1, the expansion of U_N(P) does not converge\n";
  }
  emit_json("bounds", meta, body);
  return r.chain_ok ? 0 : 3;
}

int Runner::cmd_extremal() {
  Metadata meta{{"kind", kind_}, {"p", format_real(p_)}};
  if (kind_ != "uniform" && kind_ != "peaked")
    throw Error(ErrorKind::InvalidArgument, "--kind must be uniform or peaked");
  if (kind_ == "peaked") {
    if (s_ < 1) throw Error(ErrorKind::InvalidArgument, "--kind peaked needs --s");
    meta.emplace_back("s", std::to_string(s_));
  }
  const SchmidtDistribution d = kind_ == "uniform" ? uniform_distribution(p_) : peaked_distribution(p_, s_);
  ordered_json body;
  body["s"] = d.s();
  body["purity"] = purity(d);
  body["lambdas"] = lambdas_json(d);
  emit_json("extremal", meta, body);
  return 0;
}

int Runner::cmd_birthday() {
  Metadata meta{{"n", std::to_string(n_)}, {"mode", mode_}};
  const bool uniform_s = s_ > 0 && !dist_.given();
  if (uniform_s)
    meta.emplace_back("s", std::to_string(s_));
  else
    dist_.describe(meta);
  const SchmidtDistribution d =
      uniform_s ? make_distribution(std::vector<double>(s_, 1.0 / s_)) : dist_.load();
  BirthdayEstimate est;
  if (mode_ == "enumerate") {
    est = birthday_probability(d, n_, BirthdayMode::Enumerate);
  } else if (mode_ == "mc") {
    meta.emplace_back("trials", std::to_string(trials_));
    meta.emplace_back("seed", std::to_string(seed_));
    est = birthday_probability(d, n_, BirthdayMode::MonteCarlo, trials_, seed_);
  } else {
    throw Error(ErrorKind::InvalidArgument, "--mode must be enumerate or mc");
  }
  ordered_json body;
  body["probability"] = est.probability;
  body["standard_error"] = est.standard_error;
  body["trials"] = est.trials;
  emit_json("birthday", meta, body);
  return 0;
}

int Runner::cmd_sample() {
  const SamplerConfig cfg{s_, parse_measure(measure_), seed_, stream_};
  const auto batch = sample_batch(cfg, count_, workers_);
  emit_csv_header("sample", {{"s", std::to_string(s_)},
                             {"measure", measure_},
                             {"count", std::to_string(count_)},
                             {"seed", std::to_string(seed_)},
                             {"stream", std::to_string(stream_)},
                             {"generator", std::string(Xoshiro256StarStar::name)}});
  std::ostream& o = sink();
  o << "index,purity";
  for (int j = 1; j <= s_; ++j) o << ",lambda_" << j;
  o << '\n';
  for (std::size_t i = 0; i < batch.size(); ++i) {
    o << i << ',' << format_real(purity(batch[i]));
    for (double x : batch[i].lambdas()) o << ',' << format_real(x);
    o << '\n';
  }
  return 0;
}

int Runner::cmd_scan() {
  const SamplerConfig cfg{s_, parse_measure(measure_), seed_, stream_};
  if (s_ < 2) throw Error(ErrorKind::InvalidArgument, "--s must be at least 2");
  GridGeometry g = default_scan_geometry(s_, bins_);
  if (x_bins_ > 0) g.x_bins = x_bins_;
  if (y_bins_ > 0) g.y_bins = y_bins_;
  const ScanResult r = scan_random_states(cfg, n_, samples_, g, workers_);
  emit_csv_header("scan", {{"s", std::to_string(s_)},
                           {"n", std::to_string(n_)},
                           {"measure", measure_},
                           {"samples", std::to_string(samples_)},
                           {"seed", std::to_string(seed_)},
                           {"stream", std::to_string(stream_)},
                           {"generator", std::string(Xoshiro256StarStar::name)},
                           {"mean_purity", format_real(r.mean_p())},
                           {"stderr_purity", format_real(r.stderr_p())}});
  write_grid_csv(sink(), r.grid);
  return 0;
}

int Runner::cmd_curves() {
  const std::vector<int> ns = parse_int_list(n_list_, "--n-list");
  if (!(p_min_ > 0.0 && p_min_ < p_max_ && p_max_ <= 1.0) || points_ < 2)
    throw Error(ErrorKind::InvalidArgument, "need 0 < p-min < p-max <= 1 and at least 2 points");
  const auto rows = deviation_curves(ns, log_spaced(p_min_, p_max_, points_), workers_);
  emit_csv_header("curves", {{"n_list", n_list_},
                             {"p_min", format_real(p_min_)},
                             {"p_max", format_real(p_max_)},
                             {"points", std::to_string(points_)}});
  write_deviation_csv(sink(), rows);
  return 0;
}

int Runner::cmd_overlay() {
  const std::vector<int> ss = parse_int_list(s_list_, "--s-list");
  if (!(p_min_ > 0.0 && p_min_ < p_max_ && p_max_ <= 1.0) || points_ < 2)
    throw Error(ErrorKind::InvalidArgument, "need 0 < p-min < p-max <= 1 and at least 2 points");
  // Evenly spaced points plus every P = 1/S inside the range, where the
  // finite-S bound meets the lower bound.
  std::vector<double> grid;
  for (int i = 0; i < points_; ++i) grid.push_back(p_min_ + (p_max_ - p_min_) * i / (points_ - 1));
  for (int s : ss)
    if (1.0 / s >= p_min_ && 1.0 / s <= p_max_) grid.push_back(1.0 / s);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const auto rows = bound_overlay(grid, n_, ss);
  emit_csv_header("overlay", {{"n", std::to_string(n_)},
                              {"s_list", s_list_},
                              {"p_min", format_real(p_min_)},
                              {"p_max", format_real(p_max_)},
                              {"points", std::to_string(points_)}});
  write_overlay_csv(sink(), rows, ss);
  return 0;
}

int Runner::cmd_transform() {
  const SchmidtDistribution d = dist_.load();
  Metadata meta{{"op", op_}};
  dist_.describe(meta);
  if (op_ != "uniform" && op_ != "peaked") throw Error(ErrorKind::InvalidArgument, "--op must be uniform or peaked");
  const Direction dir = op_ == "uniform" ? Direction::Uniform : Direction::Peaked;
  ordered_json body;
  body["input"] = lambdas_json(d);
  if (iterate_) {
    meta.emplace_back("iterate", "true");
    meta.emplace_back("max_iters", std::to_string(max_iters_));
    const IterationResult r = iterate_to_extremal(d, dir, max_iters_);
    body["output"] = lambdas_json(r.distribution);
    body["iterations"] = r.iterations;
    body["last_change"] = r.last_change;
    body["converged"] = r.converged;
    const double p = purity(d);
    const SchmidtDistribution target =
        dir == Direction::Uniform ? uniform_distribution(p) : peaked_distribution(p, static_cast<int>(d.s()));
    body["distance_to_extremal"] = total_variation(r.distribution, target);
  } else {
    const std::vector<int> idx = parse_int_list(indices_, "--indices");
    if (idx.size() != 3) throw Error(ErrorKind::InvalidArgument, "--indices needs three positions");
    meta.emplace_back("indices", indices_);
    const TripleSelection t(d, idx[0], idx[1], idx[2]);
    const SchmidtDistribution out = dir == Direction::Uniform ? gamma_uniform(d, t) : gamma_peaked(d, t);
    const ProductBounds pb = triple_product_bounds(d, t);
    body["output"] = lambdas_json(out);
    body["k1"] = t.k1();
    body["k2"] = t.k2();
    body["product_bounds"] = {{"lower", pb.lower}, {"value", pb.value}, {"upper", pb.upper}, {"holds", pb.holds()}};
  }
  emit_json("transform", meta, body);
  return 0;
}

int Runner::cmd_verify() {
  VerifyOptions opts;
  opts.seed = seed_;
  opts.cases = cases_;
  const auto results = run_invariant_suite(opts);
  std::ostream& o = sink();
  write_metadata(o, {{"tool", "coboson"},
                     {"version", kVersion},
                     {"command", "verify"},
                     {"seed", std::to_string(seed_)},
                     {"cases", std::to_string(cases_)}});
  int failed = 0;
  for (const auto& r : results) {
    o << (r.passed ? "PASS " : "FAIL ") << r.module << ": " << r.name << " (" << r.detail << ")\n";
    failed += !r.passed;
  }
  o << results.size() - failed << '/' << results.size() << " checks passed\n";
  return failed ? 3 : 0;
}

int Runner::run(const std::vector<std::string>& args) {
  seed_ = default_seed();

  CLI::App app{"Composite-boson normalization factors and bounds", "coboson"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto common = [&](CLI::App* sub) {
    sub->add_option("-o,--output", output_, "write the result to this file");
  };
  auto with_n = [&](CLI::App* sub, const char* help) {
    sub->add_option("--n", n_, help)->required()->check(CLI::NonNegativeNumber);
  };

  auto* chi = app.add_subcommand("chi", "chi_0..chi_N of a distribution");
  dist_.add_to(chi);
  with_n(chi, "largest N");
  chi->add_option("--method", method_, "dp, newton, brute or dc")->capture_default_str();
  chi->add_option("--workers", workers_, "threads for the dc method")->check(CLI::PositiveNumber);
  common(chi);

  auto* ratio = app.add_subcommand("ratio", "chi_{N+1}/chi_N");
  dist_.add_to(ratio);
  with_n(ratio, "N");
  ratio->add_option("--kind", kind_, "closed form instead of a distribution: uniform or peaked");
  ratio->add_option("--p", p_, "purity for --kind");
  ratio->add_option("--s", s_, "Schmidt number for --kind peaked");
  common(ratio);

  auto* bounds = app.add_subcommand("bounds", "the bound chain at (P, N)");
  dist_.add_to(bounds);
  with_n(bounds, "N");
  bounds->add_option("--p", p_, "purity (defaults to that of the distribution)");
  bounds->add_option("--s", s_, "Schmidt number for the finite-S bound");
  bounds->add_option("--expansion-order", order_, "also report the 2nd or 3rd order expansion of U_N(P)");
  common(bounds);

  auto* extremal = app.add_subcommand("extremal", "uniform or peaked distribution with purity P");
  extremal->add_option("--kind", kind_, "uniform or peaked")->required();
  extremal->add_option("--p", p_, "purity")->required();
  extremal->add_option("--s", s_, "Schmidt number (peaked)");
  common(extremal);

  auto* birthday = app.add_subcommand("birthday", "probability that N draws are distinct");
  dist_.add_to(birthday);
  birthday->add_option("--s", s_, "uniform distribution over s outcomes");
  with_n(birthday, "number of draws");
  birthday->add_option("--mode", mode_, "enumerate or mc")->capture_default_str();
  birthday->add_option("--trials", trials_, "Monte Carlo trials")->capture_default_str();
  birthday->add_option("--seed", seed_, "seed (default $COBOSON_SEED or 0)");
  common(birthday);

  auto* sample = app.add_subcommand("sample", "random Schmidt spectra");
  sample->add_option("--s", s_, "Schmidt number")->required()->check(CLI::PositiveNumber);
  sample->add_option("--measure", measure_, "induced or flat")->capture_default_str();
  sample->add_option("--count", count_, "number of spectra")->capture_default_str();
  sample->add_option("--seed", seed_, "seed (default $COBOSON_SEED or 0)");
  sample->add_option("--stream", stream_, "first generator stream")->capture_default_str();
  sample->add_option("--workers", workers_, "threads")->check(CLI::PositiveNumber);
  common(sample);

  auto* scan = app.add_subcommand("scan", "histogram of (P, chi_{N+1}/chi_N) over random states");
  scan->add_option("--s", s_, "Schmidt number")->required();
  with_n(scan, "N");
  scan->add_option("--samples", samples_, "number of states")->capture_default_str();
  scan->add_option("--bins", bins_, "bins per axis")->capture_default_str()->check(CLI::PositiveNumber);
  scan->add_option("--x-bins", x_bins_, "purity bins")->check(CLI::PositiveNumber);
  scan->add_option("--y-bins", y_bins_, "ratio bins")->check(CLI::PositiveNumber);
  scan->add_option("--measure", measure_, "induced or flat")->capture_default_str();
  scan->add_option("--seed", seed_, "seed (default $COBOSON_SEED or 0)");
  scan->add_option("--stream", stream_, "first generator stream")->capture_default_str();
  scan->add_option("--workers", workers_, "threads")->check(CLI::PositiveNumber);
  common(scan);

  auto* curves = app.add_subcommand("curves", "deviations 1 - bound on a log grid of P");
  curves->add_option("--n-list", n_list_, "comma separated N values")->capture_default_str();
  curves->add_option("--p-min", p_min_, "smallest P")->capture_default_str();
  curves->add_option("--p-max", p_max_, "largest P")->capture_default_str();
  curves->add_option("--points", points_, "grid points")->capture_default_str();
  curves->add_option("--workers", workers_, "threads")->check(CLI::PositiveNumber);
  common(curves);

  auto* overlay = app.add_subcommand("overlay", "bound curves against P for plotting over a scan");
  with_n(overlay, "N");
  overlay->add_option("--s-list", s_list_, "comma separated S values")->capture_default_str();
  overlay->add_option("--p-min", p_min_, "smallest P");
  overlay->add_option("--p-max", p_max_, "largest P")->capture_default_str();
  overlay->add_option("--points", points_, "grid points");
  common(overlay);

  auto* transform = app.add_subcommand("transform", "apply a three-coefficient map");
  dist_.add_to(transform);
  transform->add_option("--op", op_, "uniform or peaked")->required();
  transform->add_option("--indices", indices_, "j1,j2,j3 (1-based, increasing)");
  transform->add_flag("--iterate", iterate_, "apply repeatedly until the extremal state is reached");
  transform->add_option("--max-iters", max_iters_, "iteration limit")->capture_default_str();
  common(transform);

  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  verify->add_option("--cases", cases_, "random cases per check")->capture_default_str();
  verify->add_option("--seed", seed_, "seed (default $COBOSON_SEED or 0)");
  common(verify);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out_ << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out_ << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out_ << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err_ << "error: " << e.what() << '\n';
    return 2;
  }

  if (overlay->parsed()) {
    if (overlay->count("--p-min") == 0) p_min_ = 1e-3;
    if (overlay->count("--points") == 0) points_ = 1000;
  }

  if (chi->parsed()) return cmd_chi();
  if (ratio->parsed()) return cmd_ratio();
  if (bounds->parsed()) return cmd_bounds();
  if (extremal->parsed()) return cmd_extremal();
  if (birthday->parsed()) return cmd_birthday();
  if (sample->parsed()) return cmd_sample();
  if (scan->parsed()) return cmd_scan();
  if (curves->parsed()) return cmd_curves();
  if (overlay->parsed()) return cmd_overlay();
  if (transform->parsed()) return cmd_transform();
  if (verify->parsed()) return cmd_verify();
  return 2;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    Runner runner(out, err);
    return runner.run(args);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return is_input_error(e.kind()) ? 2 : 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace coboson::cli
