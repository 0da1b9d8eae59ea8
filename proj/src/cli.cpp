#include "ewfrag/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "ewfrag/exact_laws.hpp"
#include "ewfrag/parallel.hpp"
#include "ewfrag/suites.hpp"

namespace ewfrag::cli {
namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string command;
  std::string target;
  std::vector<std::string> argv;  // normalized, see normalize_argv

  int n = 0;
  std::string theta_text = "1";
  std::string phi_text = "1";
  std::vector<std::string> t_text;
  std::uint64_t samples = 0;
  std::uint64_t seed = 42;
  int workers = 1;
  std::string format = "table";
  std::string out;
  std::string method = "closed-form";
  std::string model = "clocks";
  std::string partition;
  int m = 6;
  int a = 2;
  int b = 1;
  std::vector<double> grid{0.5, 2.0};
  std::string permutation = "2,3,4,1";
  double theta_max = 1e5;
  double window = 0.01;
  int count = 10;
  bool halve_equal = false;
  double clock_bias = 1.0;
  double label_bias = 0.0;
  std::string replay_file;

  CLI::App* leaf = nullptr;
  bool given(const std::string& flag) const { return leaf != nullptr && leaf->count(flag) > 0; }
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

double parse_real(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(what + ": not a finite real number: '" + text + "'");
  }
}

// Decimal text ("0.25", "-1.5e-2", "3/4") as an exact rational.
Rational parse_exact(const std::string& text, const std::string& what) {
  if (text.find('/') != std::string::npos) {
    try {
      return parse_rational(text);
    } catch (const std::exception&) {
      throw UsageError(what + ": malformed rational '" + text + "'");
    }
  }
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) negative = text[pos++] == '-';
  boost::multiprecision::cpp_int mantissa = 0;
  int scale = 0;
  bool digits = false;
  bool dot = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa = mantissa * 10 + (c - '0');
      digits = true;
      if (dot) ++scale;
    } else if (c == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  int exponent = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    try {
      std::size_t used = 0;
      exponent = std::stoi(text.substr(pos + 1), &used);
      pos += 1 + used;
    } catch (const std::exception&) {
      throw UsageError(what + ": malformed number '" + text + "'");
    }
  }
  if (!digits || pos != text.size()) throw UsageError(what + ": malformed number '" + text + "'");
  Rational r(mantissa);
  const int shift = exponent - scale;
  boost::multiprecision::cpp_int p10 = 1;
  for (int i = 0; i < std::abs(shift); ++i) p10 *= 10;
  if (shift >= 0) {
    r *= Rational(p10);
  } else {
    r /= Rational(p10);
  }
  return negative ? Rational(-r) : r;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(what + ": malformed integer list '" + text + "'");
    }
  }
  return values;
}

// Drops --out and pins the resolved seed, so the stored argument list
// reproduces the run wherever it is replayed.
std::vector<std::string> normalize_argv(const std::vector<std::string>& args, std::uint64_t seed, bool uses_seed) {
  std::vector<std::string> result;
  bool has_seed = false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    if (a == "--out") {
      ++i;
      continue;
    }
    if (a.rfind("--out=", 0) == 0) continue;
    if (a == "--seed" || a.rfind("--seed=", 0) == 0) has_seed = true;
    result.push_back(a);
  }
  if (uses_seed && !has_seed) {
    result.push_back("--seed");
    result.push_back(std::to_string(seed));
  }
  return result;
}

json config_json(const Options& o) {
  json j{{"command", o.command}, {"target", o.target}, {"argv", o.argv}, {"format", o.format}};
  if (o.command != "exact") j["seed"] = o.seed;
  return j;
}

class Output {
 public:
  explicit Output(const Options& o, std::ostream& fallback) {
    if (o.out.empty()) {
      stream_ = &fallback;
      return;
    }
    file_.open(o.out, std::ios::binary | std::ios::trunc);
    if (!file_) throw UsageError("cannot write output file '" + o.out + "'");
    stream_ = &file_;
    to_file_ = true;
  }
  std::ostream& operator*() { return *stream_; }
  bool to_file() const { return to_file_; }
  void finish() {
    stream_->flush();
    if (!*stream_) throw UsageError("write to output failed");
  }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
  bool to_file_ = false;
};

// Header line for csv always, for table only when writing an artifact file.
void config_header(Output& out, const Options& o) {
  if (o.format == "csv" || (o.format == "table" && out.to_file())) *out << "# config: " << config_json(o).dump() << "\n";
}

// ---- exact ----

json rational_json(const Rational& r) { return {{"rational", rational_to_string(r)}, {"value", to_double(r)}}; }

void emit_rows(Output& out, const Options& o, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows, json body) {
  if (o.format == "json") {
    body["config"] = config_json(o);
    *out << body.dump(2) << "\n";
    return;
  }
  config_header(out, o);
  const char* sep = o.format == "csv" ? "," : "  ";
  if (rows.size() == 1 && header.size() == 2 && o.format == "table") {
    *out << rows[0][1] << "\n";
    return;
  }
  for (std::size_t i = 0; i < header.size(); ++i) *out << (i ? sep : "") << header[i];
  *out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) *out << (i ? sep : "") << (o.format == "csv" ? csv_field(row[i]) : row[i]);
    *out << "\n";
  }
}

int require_n(const Options& o, int fallback = 0) {
  if (o.given("--n")) return o.n;
  if (fallback > 0) return fallback;
  throw UsageError("--n is required");
}

void exact_esf(Output& out, const Options& o) {
  const int n = require_n(o);
  const EwensParams params(n, parse_real(o.theta_text, "--theta"));
  std::vector<std::vector<std::string>> rows;
  json entries = json::array();
  auto add = [&](const std::string& text, double p) {
    rows.push_back({text, fmt17(p)});
    entries.push_back({{"partition", text}, {"probability", p}});
  };
  if (o.target == "esf") {
    if (!o.partition.empty()) {
      const auto pi = SetPartition::parse(o.partition);
      if (pi.n() != n) throw UsageError("--partition is not a partition of [n]");
      add(pi.to_string(), esf_pmf(params, pi));
    } else {
      for (const auto& pi : enumerate_set_partitions(n)) add(pi.to_string(), esf_pmf(params, pi));
    }
  } else {
    if (!o.partition.empty()) {
      const auto pi = OrderedSetPartition::parse(o.partition);
      if (pi.n() != n) throw UsageError("--partition is not a partition of [n]");
      add(pi.to_string(), ordered_esf_pmf(params, pi));
    } else {
      for (const auto& pi : enumerate_ordered_set_partitions(n)) add(pi.to_string(), ordered_esf_pmf(params, pi));
    }
  }
  emit_rows(out, o, {"partition", "probability"}, rows,
            {{"n", n}, {"theta", params.theta}, {"entries", entries}});
}

void exact_first_split(Output& out, const Options& o) {
  const int n = require_n(o);
  const auto method = parse_first_split_method(o.method);
  const auto law = first_split_law(n, method);
  std::vector<std::vector<std::string>> rows;
  json entries = json::array();
  for (int i = 1; i <= n - 1; ++i) {
    const auto k = static_cast<std::size_t>(i - 1);
    const double p = law.probabilities[k];
    json e{{"i", i}, {"probability", p}};
    std::vector<std::string> row{std::to_string(i), fmt17(p)};
    if (method == FirstSplitMethod::ClosedForm) {
      e["exact"] = law.exact[k].to_json();
      row.push_back(law.exact[k].to_string());
    }
    rows.push_back(row);
    entries.push_back(e);
  }
  std::vector<std::string> header{"i", "probability"};
  if (method == FirstSplitMethod::ClosedForm) header.push_back("exact");
  emit_rows(out, o, header, rows, {{"n", n}, {"method", to_string(method)}, {"entries", entries}});
}

void exact_qratio(Output& out, const Options& o) {
  const int n = require_n(o, 3);
  const std::string theta_text = o.given("--theta") ? o.theta_text : "2";
  const std::vector<std::string> ts = o.t_text.empty() ? std::vector<std::string>{"0.25", "0.5"} : o.t_text;
  const Rational theta = parse_exact(theta_text, "--theta");
  const Rational phi = parse_exact(o.phi_text, "--phi");
  std::vector<std::vector<std::string>> rows;
  json entries = json::array();
  for (const auto& t_text : ts) {
    const Rational t = parse_exact(t_text, "--t");
    const Rational q = q_ratio_t<Rational>(n, theta, phi, t);
    const double v = q_ratio(n, to_double(theta), to_double(phi), to_double(t));
    rows.push_back({t_text, rational_to_string(q), fmt17(v)});
    entries.push_back({{"t", t_text}, {"exact", rational_to_string(q)}, {"value", v}});
  }
  emit_rows(out, o, {"t", "exact", "value"}, rows,
            {{"n", n}, {"theta", theta_text}, {"phi", o.phi_text}, {"entries", entries}});
}

void exact_rates(Output& out, const Options& o) {
  const Rational theta = parse_exact(o.theta_text, "--theta");
  const int a = o.a;
  const int b = o.b;
  if (a < 1 || b < 1) throw UsageError("--a and --b must be positive");
  std::vector<std::vector<std::string>> rows;
  json entries = json::array();
  Rational total = 0;
  auto block_rows = [&](int s, int other) {
    if (s < 2) return;
    for (int xi = 1; 2 * xi <= s; ++xi) {
      const int eta = s - xi;
      const Rational rate = split_rate_t<Rational>(theta, s, other, xi, eta, o.halve_equal);
      long long targets = detail::binomial(s, xi);
      if (xi == eta) targets /= 2;
      const Rational hazard = rate * Rational(targets);
      total += hazard;
      rows.push_back({std::to_string(s), std::to_string(xi) + "+" + std::to_string(eta), std::to_string(targets),
                      rational_to_string(rate), fmt17(to_double(rate)), rational_to_string(hazard)});
      entries.push_back({{"block", s}, {"fragments", {xi, eta}}, {"targets", targets},
                         {"rate", rational_json(rate)}, {"type_hazard", rational_json(hazard)}});
    }
  };
  block_rows(a, b);
  block_rows(b, a);
  Rational mixture = 0;
  if (a >= 2) mixture += composition_block_hazard<Rational>(theta, a, b);
  if (b >= 2) mixture += composition_block_hazard<Rational>(theta, b, a);
  json body{{"a", a}, {"b", b}, {"theta", o.theta_text}, {"halve_equal", o.halve_equal}, {"entries", entries},
            {"total", rational_json(total)}, {"composition_mixture", rational_json(mixture)}};
  rows.push_back({"total", "", "", "", fmt17(to_double(total)), rational_to_string(total)});
  rows.push_back({"mixture", "", "", "", fmt17(to_double(mixture)), rational_to_string(mixture)});
  emit_rows(out, o, {"block", "fragments", "targets", "rate", "rate_value", "type_hazard"}, rows, body);
}

void exact_blocks(Output& out, const Options& o) {
  const int n = require_n(o);
  const EwensParams params(n, parse_real(o.theta_text, "--theta"));
  std::vector<std::vector<std::string>> rows;
  json entries = json::array();
  for (int k = 1; k <= n; ++k) {
    const double p = blocks_pmf(params, k);
    const auto s = stirling_first(n, k).str();
    rows.push_back({std::to_string(k), fmt17(p), s});
    entries.push_back({{"k", k}, {"probability", p}, {"stirling", s}});
  }
  emit_rows(out, o, {"k", "probability", "stirling"}, rows, {{"n", n}, {"theta", params.theta}, {"entries", entries}});
}

void exact_gibbs(Output& out, const Options& o) {
  const int n = require_n(o);
  std::vector<std::vector<std::string>> rows;
  json entries = json::array();
  for (int n1 = 1; n1 <= n - 1; ++n1) {
    const Rational p = gibbs_two_block_pmf_exact(n, n1);
    rows.push_back({std::to_string(n1), rational_to_string(p), fmt17(to_double(p))});
    entries.push_back({{"n1", n1}, {"exact", rational_to_string(p)}, {"value", to_double(p)}});
  }
  emit_rows(out, o, {"n1", "exact", "value"}, rows, {{"n", n}, {"entries", entries}});
}

// ---- simulate ----

template <class Trajectory, class StateText>
void write_trajectory(Output& out, const Options& o, std::uint64_t r, const Trajectory& traj, StateText text) {
  if (o.format == "json") {
    json line{{"n", traj.n}, {"seed", o.seed}, {"stream", r}};
    json jumps = json::array();
    for (const auto& j : traj.jumps) jumps.push_back({{"theta", j.theta}, {"state", text(j.state)}});
    line["jumps"] = jumps;
    if (r == 0) line["config"] = config_json(o);
    *out << line.dump() << "\n";
    return;
  }
  for (std::size_t k = 0; k < traj.jumps.size(); ++k) {
    *out << r << ',' << k + 1 << ',' << fmt17(traj.jumps[k].theta) << ',' << csv_field(text(traj.jumps[k].state)) << "\n";
  }
}

void simulate(Output& out, const Options& o) {
  const int n = o.target == "gem" ? 0 : require_n(o);
  const std::uint64_t samples = o.given("--samples") ? o.samples : 1;
  // table falls back to csv for sample dumps
  if (o.format != "json") {
    *out << "# config: " << config_json(o).dump() << "\n";
    *out << (o.target == "gem" ? "replicate,index,weight" : "replicate,jump_index,theta,state") << "\n";
  }
  SamplerOptions sampler;
  if (o.target == "composition") {
    for (std::uint64_t r = 0; r < samples; ++r) {
      write_trajectory(out, o, r, sample_composition_trajectory(n, {o.seed, r}, sampler),
                       [](const BinaryCode& c) { return decode_composition(c).to_string(); });
    }
  } else if (o.target == "partition") {
    for (std::uint64_t r = 0; r < samples; ++r) {
      write_trajectory(out, o, r, sample_partition_trajectory(n, {o.seed, r}, sampler),
                       [](const OrderedSetPartition& p) { return p.to_string(); });
    }
  } else if (o.target == "interval") {
    const double theta = parse_real(o.theta_text, "--theta");
    if (!(theta >= 0.0)) throw UsageError("--theta must be >= 0");
    for (std::uint64_t r = 0; r < samples; ++r) {
      Rng rng({o.seed, r});
      const auto state = sample_partition_via_interval(n, theta, rng).to_string();
      if (o.format == "json") {
        json line{{"n", n}, {"seed", o.seed}, {"stream", r}, {"theta", theta}, {"state", state}};
        if (r == 0) line["config"] = config_json(o);
        *out << line.dump() << "\n";
      } else {
        *out << r << ",0," << fmt17(theta) << ',' << csv_field(state) << "\n";
      }
    }
  } else {
    const double theta = parse_real(o.theta_text, "--theta");
    if (!(theta > 0.0)) throw UsageError("--theta must be positive for gem");
    if (o.count < 1) throw UsageError("--count must be positive");
    for (std::uint64_t r = 0; r < samples; ++r) {
      Rng rng({o.seed, r});
      const auto gem = sample_gem(theta, o.count, rng);
      if (o.format == "json") {
        json line{{"seed", o.seed}, {"stream", r}, {"theta", theta}, {"weights", gem.weights}, {"residual", gem.residual}};
        if (r == 0) line["config"] = config_json(o);
        *out << line.dump() << "\n";
      } else {
        for (std::size_t k = 0; k < gem.weights.size(); ++k) *out << r << ',' << k + 1 << ',' << fmt17(gem.weights[k]) << "\n";
      }
    }
  }
}

// ---- verify ----

std::vector<SuiteReport> run_suites(const Options& o) {
  SuiteConfig cfg;
  cfg.seed = o.seed;
  cfg.workers = o.workers;
  cfg.sampler.clock_bias = o.clock_bias;
  cfg.sampler.label_bias = o.label_bias;
  auto samples = [&](std::uint64_t fallback) { return o.given("--samples") ? o.samples : fallback; };
  auto theta_or = [&](double fallback) { return o.given("--theta") ? parse_real(o.theta_text, "--theta") : fallback; };

  std::vector<SuiteReport> reports;
  const bool all = o.target == "all";
  if (all || o.target == "esf") {
    cfg.samples = samples(200000);
    const int n = require_n(o, 5);
    const double theta = theta_or(1.0);
    if (all) {
      reports.push_back(suite_esf(n, theta, SampleModel::Clocks, cfg));
      reports.push_back(suite_esf(n, theta, SampleModel::Interval, cfg));
    } else {
      reports.push_back(suite_esf(n, theta, parse_sample_model(o.model), cfg));
    }
  }
  if (all || o.target == "cross-model") {
    cfg.samples = samples(200000);
    reports.push_back(suite_cross_model(require_n(o, 5), theta_or(1.0), cfg));
  }
  if (all || o.target == "consistency") {
    cfg.samples = samples(100000);
    reports.push_back(suite_consistency(o.m, require_n(o, 4), o.grid, cfg));
  }
  if (all || o.target == "exchangeability") {
    cfg.samples = samples(100000);
    const int n = require_n(o, 4);
    const auto perm = o.given("--permutation") || n == 4 ? parse_int_list(o.permutation, "--permutation") : [n] {
      std::vector<int> cycle;
      for (int i = 2; i <= n; ++i) cycle.push_back(i);
      cycle.push_back(1);
      return cycle;
    }();
    reports.push_back(suite_exchangeability(n, theta_or(1.0), perm, cfg));
  }
  if (all || o.target == "lemma") {
    cfg.samples = samples(100000);
    reports.push_back(suite_lemma_independence(require_n(o, 5), o.theta_max, cfg));
  }
  if (all || o.target == "first-split") {
    cfg.samples = samples(1000000);
    reports.push_back(suite_first_split(require_n(o, 4), cfg));
  }
  if (all || o.target == "nonmarkov") {
    cfg.samples = samples(100000);
    std::vector<double> ts;
    for (const auto& t : o.t_text.empty() ? std::vector<std::string>{"0.25", "0.5"} : o.t_text) {
      ts.push_back(parse_real(t, "--t"));
    }
    reports.push_back(suite_nonmarkov(require_n(o, 3), theta_or(2.0), parse_real(o.phi_text, "--phi"), ts, cfg));
  }
  if (all || o.target == "rates") {
    cfg.samples = samples(1000000);
    reports.push_back(suite_rates(o.a, o.b, theta_or(1.0), o.window, cfg));
  }
  return reports;
}

bool verify(Output& out, const Options& o) {
  const auto reports = run_suites(o);
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.verdict();
  if (o.format == "json") {
    json suites = json::array();
    for (const auto& r : reports) suites.push_back(r.to_json());
    *out << json{{"config", config_json(o)}, {"suites", suites}, {"verdict", ok ? "pass" : "fail"}}.dump(2) << "\n";
  } else if (o.format == "csv") {
    config_header(out, o);
    *out << "suite,test,kind,statistic,df,p_value,threshold,pass\n";
    for (const auto& r : reports) {
      for (const auto& t : r.tests) {
        *out << csv_field(r.name) << ',' << csv_field(t.name) << ',' << t.kind << ',' << fmt17(t.statistic) << ','
             << (t.df ? std::to_string(*t.df) : "") << ',' << (t.p_value ? fmt17(*t.p_value) : "") << ','
             << fmt17(t.threshold) << ',' << (t.pass ? "true" : "false") << "\n";
      }
    }
  } else {
    config_header(out, o);
    for (const auto& r : reports) *out << r.to_table() << "\n";
    *out << "overall: " << (ok ? "pass" : "fail") << "\n";
  }
  return ok;
}

// ---- parsing ----

void add_common(CLI::App* sub, Options& o, bool sampling) {
  sub->add_option("--n", o.n, "number of labels")->check(CLI::Range(1, 1 << 20));
  sub->add_option("--theta", o.theta_text, "time parameter theta (decimal or p/q)");
  sub->add_option("--format", o.format, "json | csv | table")->check(CLI::IsMember({"json", "csv", "table"}));
  sub->add_option("--out", o.out, "output file (default: stdout)");
  if (sampling) {
    sub->add_option("--samples", o.samples, "number of replicates");
    sub->add_option("--seed", o.seed, "master seed (fallback: EWENS_FRAG_SEED, then 42)");
    sub->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  }
}

CLI::App* leaf(CLI::App* parent, const std::string& name, const std::string& help, Options& o, bool sampling) {
  auto* sub = parent->add_subcommand(name, help);
  add_common(sub, o, sampling);
  return sub;
}

void build(CLI::App& app, Options& o) {
  app.require_subcommand(1);

  auto* exact = app.add_subcommand("exact", "exact laws");
  exact->require_subcommand(1);
  for (const char* name : {"esf", "ordered-esf"}) {
    leaf(exact, name, std::string(name) == "esf" ? "Ewens partition probabilities" : "ordered partition probabilities",
         o, false)
        ->add_option("--partition", o.partition, "single partition, e.g. {1,2|3,4} or (2,3|1)");
  }
  leaf(exact, "first-split", "law of the left block size at the first split", o, false)
      ->add_option("--method", o.method, "closed-form | quadrature")
      ->check(CLI::IsMember({"closed-form", "quadrature"}));
  {
    auto* q = leaf(exact, "qratio", "conditional probabilities behind the non-Markov witness", o, false);
    q->add_option("--phi", o.phi_text, "earlier time phi");
    q->add_option("--t", o.t_text, "first-split thresholds t")->delimiter(',');
  }
  {
    auto* r = leaf(exact, "rates", "two-block split rates and the composition hazard", o, false);
    r->add_option("--a", o.a, "size of the first block");
    r->add_option("--b", o.b, "size of the second block");
    r->add_flag("--halve-equal", o.halve_equal, "halve the rate of an equal-size split");
  }
  leaf(exact, "blocks", "law of the number of blocks", o, false);
  leaf(exact, "gibbs", "two-block Gibbs law at theta = 1", o, false);

  auto* sim = app.add_subcommand("simulate", "sample trajectories");
  sim->require_subcommand(1);
  leaf(sim, "composition", "composition trajectories from independent clocks", o, true);
  leaf(sim, "partition", "ordered partition trajectories", o, true);
  leaf(sim, "interval", "partitions from the interval construction at one theta", o, true);
  leaf(sim, "gem", "GEM stick-breaking weights", o, true)->add_option("--count", o.count, "number of weights");

  auto* ver = app.add_subcommand("verify", "statistical verification suites");
  ver->require_subcommand(1);
  for (const char* name :
       {"esf", "consistency", "exchangeability", "lemma", "first-split", "nonmarkov", "rates", "cross-model", "all"}) {
    auto* v = leaf(ver, name, std::string("suite ") + name, o, true);
    v->add_option("--model", o.model, "clocks | interval")->check(CLI::IsMember({"clocks", "interval"}));
    v->add_option("--m", o.m, "size of the larger process (consistency)");
    v->add_option("--grid", o.grid, "theta grid (consistency)")->delimiter(',');
    v->add_option("--permutation", o.permutation, "relabelling, e.g. 2,3,4,1");
    v->add_option("--theta-max", o.theta_max, "horizon for clock extraction (lemma)");
    v->add_option("--phi", o.phi_text, "earlier time phi (nonmarkov)");
    v->add_option("--t", o.t_text, "first-split thresholds (nonmarkov)")->delimiter(',');
    v->add_option("--a", o.a, "first block size (rates)");
    v->add_option("--b", o.b, "second block size (rates)");
    v->add_option("--window", o.window, "rate window (rates)");
    v->add_option("--clock-bias", o.clock_bias, "divide clocks by this factor (power check)");
    v->add_option("--label-bias", o.label_bias, "probability of identity labels (power check)");
  }

  auto* replay = app.add_subcommand("replay", "re-run the configuration embedded in an output file");
  replay->add_option("file", o.replay_file, "artifact written by this tool")->required();
  replay->add_option("--out", o.out, "output file (default: stdout)");
}

json read_embedded_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const std::string first = text.substr(0, text.find('\n'));
  const std::string prefix = "# config: ";
  try {
    if (first.rfind(prefix, 0) == 0) return json::parse(first.substr(prefix.size()));
    const auto whole = json::parse(text, nullptr, false);
    if (!whole.is_discarded() && whole.contains("config")) return whole["config"];
    const auto line = json::parse(first);
    if (line.contains("config")) return line["config"];
  } catch (const json::exception&) {
  }
  throw UsageError("no embedded config in '" + path + "'");
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth);

int execute(const std::vector<std::string>& args, Options& o, std::ostream& out, std::ostream& err, int depth) {
  if (o.command == "replay") {
    if (depth > 0) throw UsageError("nested replay");
    const json cfg = read_embedded_config(o.replay_file);
    auto argv = cfg.at("argv").get<std::vector<std::string>>();
    if (!o.out.empty()) {
      argv.push_back("--out");
      argv.push_back(o.out);
    }
    return dispatch(argv, out, err, depth + 1);
  }
  const bool sampling = o.command != "exact";
  if (sampling && !o.given("--seed")) {
    if (const char* env = std::getenv("EWENS_FRAG_SEED"); env != nullptr && *env != '\0') {
      try {
        std::size_t used = 0;
        o.seed = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument(env);
      } catch (const std::exception&) {
        throw UsageError(std::string("EWENS_FRAG_SEED is not an unsigned integer: ") + env);
      }
    }
  }
  if (!o.given("--format")) o.format = o.command == "simulate" ? "json" : "table";
  o.argv = normalize_argv(args, o.seed, sampling);

  Output output(o, out);
  bool ok = true;
  if (o.command == "exact") {
    if (o.target == "esf" || o.target == "ordered-esf") exact_esf(output, o);
    else if (o.target == "first-split") exact_first_split(output, o);
    else if (o.target == "qratio") exact_qratio(output, o);
    else if (o.target == "rates") exact_rates(output, o);
    else if (o.target == "blocks") exact_blocks(output, o);
    else exact_gibbs(output, o);
  } else if (o.command == "simulate") {
    simulate(output, o);
  } else {
    ok = verify(output, o);
  }
  output.finish();
  return ok ? kExitOk : kExitFailed;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, int depth) {
  Options o;
  o.workers = default_workers();
  CLI::App app{"Ewens fragmentation process: exact laws, simulation and verification", "ewfrag"};
  build(app, o);
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  auto* cmd = app.get_subcommands().front();
  o.command = cmd->get_name();
  o.leaf = cmd;
  if (o.command != "replay") {
    o.leaf = cmd->get_subcommands().front();
    o.target = o.leaf->get_name();
  }
  try {
    return execute(args, o, out, err, depth);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::overflow_error& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return dispatch(args, out, err, 0);
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace ewfrag::cli
