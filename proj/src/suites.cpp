#include "ewfrag/suites.hpp"

#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "ewfrag/exact_laws.hpp"
#include "ewfrag/parallel.hpp"

namespace ewfrag {
namespace {

// Stream groups inside a suite.
enum StreamTag : std::uint64_t {
  kTagPrimary = 1,
  kTagSecondary = 2,
  kTagTertiary = 3,
};

struct CountsAcc {
  Histogram hist;
  std::vector<std::uint64_t> counts;

  void merge_from(const CountsAcc& other) {
    hist.merge(other.hist);
    if (counts.size() < other.counts.size()) counts.resize(other.counts.size(), 0);
    for (std::size_t i = 0; i < other.counts.size(); ++i) counts[i] += other.counts[i];
  }
  void bump(std::size_t i, std::uint64_t by = 1) {
    if (counts.size() <= i) counts.resize(i + 1, 0);
    counts[i] += by;
  }
};

CountsAcc run_counts(std::uint64_t samples, int workers, const auto& body) {
  return run_replicates<CountsAcc>(samples, workers, body,
                                   [](CountsAcc& total, const CountsAcc& part) { total.merge_from(part); });
}

void require_samples(const SuiteConfig& config) {
  if (config.samples == 0) throw std::invalid_argument("suite: sample count must be positive");
}

nlohmann::json base_params(const SuiteConfig& config) {
  return {{"samples", config.samples}, {"seed", config.seed}};
}

std::uint64_t count_at(const std::vector<std::uint64_t>& v, std::size_t i) { return i < v.size() ? v[i] : 0; }

std::map<std::string, double> esf_law(int n, double theta) {
  std::map<std::string, double> law;
  const EwensParams params(n, theta);
  for (const auto& p : enumerate_set_partitions(n)) law[p.to_string()] = esf_pmf(params, p);
  return law;
}

// Digit marginal records, counts[j-1] = replicates with digit j on.
void add_digit_records(SuiteReport& report, const std::vector<std::uint64_t>& counts, int n, double theta,
                       std::uint64_t samples, const std::string& prefix) {
  for (int j = 2; j <= n; ++j) {
    const double p = digit_prob(j, theta);
    const auto hits = count_at(counts, static_cast<std::size_t>(j - 1));
    report.tests.push_back(z_record(prefix + "digit " + std::to_string(j) + " marginal",
                                    static_cast<double>(hits) / static_cast<double>(samples), p,
                                    binomial_z(hits, samples, p)));
  }
}

bool is_identity(const std::vector<int>& perm) {
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] != static_cast<int>(i) + 1) return false;
  }
  return true;
}

std::string shape_key(std::vector<int> sizes) {
  std::sort(sizes.begin(), sizes.end());
  std::string key;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i) key += ',';
    key += std::to_string(sizes[i]);
  }
  return key;
}

}  // namespace

std::string to_string(SampleModel m) { return m == SampleModel::Clocks ? "clocks" : "interval"; }

SampleModel parse_sample_model(const std::string& text) {
  if (text == "clocks") return SampleModel::Clocks;
  if (text == "interval") return SampleModel::Interval;
  throw std::invalid_argument("unknown model: " + text);
}

SuiteReport suite_esf(int n, double theta, SampleModel model, const SuiteConfig& config) {
  if (n < 1 || n > kSuiteMaxN) throw std::invalid_argument("suite_esf: n must be in [1, 8]");
  if (!(theta >= 0.0)) throw std::invalid_argument("suite_esf: theta must be >= 0");
  require_samples(config);

  SuiteReport report;
  report.name = "esf";
  report.params = base_params(config);
  report.params["n"] = n;
  report.params["theta"] = theta;
  report.params["model"] = to_string(model);

  const std::uint64_t group = derive_seed(config.seed, kTagPrimary);
  auto acc = run_counts(config.samples, config.workers, [&](std::uint64_t r, CountsAcc& a) {
    Rng rng({group, r});
    if (model == SampleModel::Clocks) {
      const auto clocks = sample_clocks(n, rng, config.sampler);
      const auto labels = sample_labels(n, rng, config.sampler);
      const auto code = composition_at(clocks, theta);
      a.hist.add(partition_from_labels(code, labels).unordered().to_string());
      for (int j = 2; j <= n; ++j) {
        if (code.digit(j)) a.bump(static_cast<std::size_t>(j - 1));
      }
    } else {
      const auto state = sample_interval_state(n, theta, rng);
      a.hist.add(state.partition.to_string());
      for (int j = 2; j <= n; ++j) {
        if (state.composition.digit(j)) a.bump(static_cast<std::size_t>(j - 1));
      }
    }
  });

  report.tests.push_back(chi_square_record("partition law vs Ewens formula", chi_square_gof(acc.hist, esf_law(n, theta))));
  add_digit_records(report, acc.counts, n, theta, config.samples, "");
  return report;
}

SuiteReport suite_cross_model(int n, double theta, const SuiteConfig& config) {
  if (n < 1 || n > kSuiteMaxN) throw std::invalid_argument("suite_cross_model: n must be in [1, 8]");
  require_samples(config);
  SuiteReport report;
  report.name = "cross-model";
  report.params = base_params(config);
  report.params["n"] = n;
  report.params["theta"] = theta;

  const std::uint64_t clock_group = derive_seed(config.seed, kTagPrimary);
  const std::uint64_t interval_group = derive_seed(config.seed, kTagSecondary);
  auto clocks_acc = run_counts(config.samples, config.workers, [&](std::uint64_t r, CountsAcc& a) {
    Rng rng({clock_group, r});
    const auto clocks = sample_clocks(n, rng, config.sampler);
    const auto labels = sample_labels(n, rng, config.sampler);
    a.hist.add(partition_at(clocks, labels, theta).to_string());
  });
  auto interval_acc = run_counts(config.samples, config.workers, [&](std::uint64_t r, CountsAcc& a) {
    Rng rng({interval_group, r});
    a.hist.add(sample_partition_via_interval(n, theta, rng).to_string());
  });
  report.tests.push_back(
      chi_square_record("clock model vs interval model", chi_square_two_sample(clocks_acc.hist, interval_acc.hist)));
  return report;
}

SuiteReport suite_consistency(int m, int n, const std::vector<double>& theta_grid, const SuiteConfig& config) {
  if (n < 1 || n >= m || m > kSuiteMaxN) throw std::invalid_argument("suite_consistency: need 1 <= n < m <= 8");
  if (theta_grid.empty()) throw std::invalid_argument("suite_consistency: empty theta grid");
  for (double t : theta_grid) {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("suite_consistency: grid values must lie in (0, inf)");
  }
  require_samples(config);

  SuiteReport report;
  report.name = "consistency";
  report.params = base_params(config);
  report.params["m"] = m;
  report.params["n"] = n;
  report.params["theta_grid"] = theta_grid;

  auto joint_key = [&](const ClockVector& clocks, std::span<const int> labels, std::span<const int> subset) {
    std::string key;
    for (std::size_t g = 0; g < theta_grid.size(); ++g) {
      if (g) key += ';';
      key += restrict_partition(partition_at(clocks, labels, theta_grid[g]), subset).to_string();
    }
    return key;
  };

  const std::uint64_t subset_group = derive_seed(config.seed, kTagPrimary);
  const std::uint64_t direct_group = derive_seed(config.seed, kTagSecondary);
  const std::uint64_t segment_group = derive_seed(config.seed, kTagTertiary);

  auto restricted = run_counts(config.samples, config.workers, [&](std::uint64_t r, CountsAcc& a) {
    Rng rng({subset_group, r});
    const auto clocks = sample_clocks(m, rng, config.sampler);
    const auto labels = sample_labels(m, rng, config.sampler);
    const auto subset = rng.subset(m, n);
    a.hist.add(joint_key(clocks, labels, subset));
  });
  std::vector<int> identity_n(static_cast<std::size_t>(n));
  std::iota(identity_n.begin(), identity_n.end(), 1);
  auto direct = run_counts(config.samples, config.workers, [&](std::uint64_t r, CountsAcc& a) {
    Rng rng({direct_group, r});
    const auto clocks = sample_clocks(n, rng, config.sampler);
    const auto labels = sample_labels(n, rng, config.sampler);
    a.hist.add(joint_key(clocks, labels, identity_n));
  });
  auto segment = run_counts(config.samples, config.workers, [&](std::uint64_t r, CountsAcc& a) {
    Rng rng({segment_group, r});
    const auto clocks = sample_clocks(m, rng, config.sampler);
    const auto labels = sample_labels(m, rng, config.sampler);
    a.hist.add(joint_key(clocks, labels, identity_n));
  });

  report.tests.push_back(chi_square_record("random-subset restriction vs direct n-process",
                                           chi_square_two_sample(restricted.hist, direct.hist)));
  report.tests.push_back(chi_square_record("random-subset vs initial-segment restriction",
                                           chi_square_two_sample(restricted.hist, segment.hist)));
  return report;
}

SuiteReport suite_exchangeability(int n, double theta, const std::vector<int>& permutation, const SuiteConfig& config) {
  if (n < 1 || static_cast<int>(permutation.size()) != n || !is_permutation_of_n(permutation)) {
    throw std::invalid_argument("suite_exchangeability: permutation must be a permutation of [n]");
  }
  require_samples(config);
  SuiteReport report;
  report.name = "exchangeability";
  report.params = base_params(config);
  report.params["n"] = n;
  report.params["theta"] = theta;
  report.params["permutation"] = permutation;

  const std::uint64_t plain_group = derive_seed(config.seed, kTagPrimary);
  const std::uint64_t relabel_group = derive_seed(config.seed, kTagSecondary);
  auto sample = [&](std::uint64_t group, bool relabel) {
    return run_counts(config.samples, config.workers, [&, group, relabel](std::uint64_t r, CountsAcc& a) {
      Rng rng({group, r});
      const auto clocks = sample_clocks(n, rng, config.sampler);
      const auto labels = sample_labels(n, rng, config.sampler);
      auto pi = partition_at(clocks, labels, theta);
      a.hist.add(relabel ? pi.relabel(permutation).to_string() : pi.to_string());
    });
  };
  auto plain = sample(plain_group, false);
  // Identity relabelling compares the sample with itself.
  auto relabelled = is_identity(permutation) ? plain : sample(relabel_group, true);
  report.tests.push_back(
      chi_square_record("partition law vs relabelled law", chi_square_two_sample(plain.hist, relabelled.hist)));
  return report;
}

SuiteReport suite_lemma_independence(int n, double theta_max, const SuiteConfig& config) {
  if (n < 2 || n > kSuiteMaxN) throw std::invalid_argument("suite_lemma_independence: n must be in [2, 8]");
  if (!(theta_max > 0.0)) throw std::invalid_argument("suite_lemma_independence: theta_max must be positive");
  require_samples(config);
  if (config.samples < 100) throw std::invalid_argument("suite_lemma_independence: need at least 100 samples");

  SuiteReport report;
  report.name = "lemma";
  report.params = base_params(config);
  report.params["n"] = n;
  report.params["theta_max"] = theta_max;

  const std::uint64_t group = derive_seed(config.seed, kTagPrimary);
  const auto samples = static_cast<std::size_t>(config.samples);
  // times[(j-1) * samples + r]; replicate r writes only its own slots.
  std::vector<double> times(static_cast<std::size_t>(n) * samples);
  struct CensorAcc {
    std::uint64_t censored = 0;
    double max_first = 0.0;
  };
  auto censor = run_replicates<CensorAcc>(
      config.samples, config.workers,
      [&](std::uint64_t r, CensorAcc& a) {
        Rng rng({group, r});
        const auto clocks = extract_clocks_from_interval(n, theta_max, rng);
        for (int j = 1; j <= n; ++j) times[static_cast<std::size_t>(j - 1) * samples + r] = clocks.time(j);
        if (clocks.any_censored()) ++a.censored;
        a.max_first = std::max(a.max_first, std::abs(clocks.time(1)));
      },
      [](CensorAcc& total, const CensorAcc& part) {
        total.censored += part.censored;
        total.max_first = std::max(total.max_first, part.max_first);
      });

  const double censored_fraction = static_cast<double>(censor.censored) / static_cast<double>(config.samples);
  report.tests.push_back(config_record(
      "censoring below 0.1% of replicates", censored_fraction <= kMaxCensoredFraction,
      std::to_string(censor.censored) + " of " + std::to_string(config.samples) + " replicates censored at theta_max"));
  report.tests.push_back(exact_record("Theta_{n,1} identically 0", censor.max_first, 0.0, 0.0));

  for (int j = 2; j <= n; ++j) {
    std::vector<double> column(times.begin() + static_cast<std::ptrdiff_t>((j - 1) * samples),
                               times.begin() + static_cast<std::ptrdiff_t>(j * samples));
    std::sort(column.begin(), column.end());
    report.tests.push_back(ks_record("Theta_{n," + std::to_string(j) + "} marginal",
                                     ks_test(column, [j](double x) { return digit_prob(j, x); })));
  }

  auto quartile = [](int j, double x) {
    // Quartile boundaries of the CDF x/(x+j-1): (j-1) q / (1-q).
    int q = 0;
    for (double level : {0.25, 0.5, 0.75}) {
      if (x > (j - 1) * level / (1.0 - level)) ++q;
    }
    return q;
  };
  std::map<std::string, double> uniform16;
  for (int q1 = 0; q1 < 4; ++q1) {
    for (int q2 = 0; q2 < 4; ++q2) uniform16[std::to_string(q1) + std::to_string(q2)] = 1.0 / 16.0;
  }
  for (int j = 2; j <= n; ++j) {
    for (int k = j + 1; k <= n; ++k) {
      Histogram table;
      for (std::size_t r = 0; r < samples; ++r) {
        const int qj = quartile(j, times[static_cast<std::size_t>(j - 1) * samples + r]);
        const int qk = quartile(k, times[static_cast<std::size_t>(k - 1) * samples + r]);
        table.add(std::to_string(qj) + std::to_string(qk));
      }
      report.tests.push_back(chi_square_record(
          "quartile independence (" + std::to_string(j) + "," + std::to_string(k) + ")",
          chi_square_gof(table, uniform16)));
    }
  }
  return report;
}

SuiteReport suite_first_split(int n, const SuiteConfig& config) {
  if (n < 2 || n > kSuiteMaxN) throw std::invalid_argument("suite_first_split: n must be in [2, 8]");
  require_samples(config);
  SuiteReport report;
  report.name = "first-split";
  report.params = base_params(config);
  report.params["n"] = n;

  constexpr double kGibbsTheta = 1.0;
  const std::uint64_t group = derive_seed(config.seed, kTagPrimary);
  struct SplitAcc {
    CountsAcc sizes;       // counts[i-1]: first split at left size i
    Histogram at_split;    // partition right after the first split
    Histogram two_blocks;  // Pi_{n,1} given exactly two blocks
    void merge_from(const SplitAcc& o) {
      sizes.merge_from(o.sizes);
      at_split.merge(o.at_split);
      two_blocks.merge(o.two_blocks);
    }
  };
  auto acc = run_replicates<SplitAcc>(
      config.samples, config.workers,
      [&](std::uint64_t r, SplitAcc& a) {
        Rng rng({group, r});
        const auto clocks = sample_clocks(n, rng, config.sampler);
        const auto labels = sample_labels(n, rng, config.sampler);
        const int digit = first_jump_digit(clocks);
        a.sizes.bump(static_cast<std::size_t>(digit - 2));
        a.sizes.hist.add(std::to_string(digit - 1));
        a.at_split.add(partition_at(clocks, labels, clocks.time(digit)).to_string());
        const auto at_gibbs = partition_at(clocks, labels, kGibbsTheta);
        if (at_gibbs.num_blocks() == 2) a.two_blocks.add(at_gibbs.to_string());
      },
      [](SplitAcc& total, const SplitAcc& part) { total.merge_from(part); });

  const auto method = n <= 8 ? FirstSplitMethod::ClosedForm : FirstSplitMethod::Quadrature;
  const auto law = first_split_law(n, method);
  std::map<std::string, double> size_law;
  for (int i = 1; i <= n - 1; ++i) size_law[std::to_string(i)] = law.probabilities[static_cast<std::size_t>(i - 1)];
  report.tests.push_back(chi_square_record("left block size at first split", chi_square_gof(acc.sizes.hist, size_law)));
  for (int i = 1; i <= n - 1; ++i) {
    const auto hits = acc.sizes.hist.count(std::to_string(i));
    const double p = law.probabilities[static_cast<std::size_t>(i - 1)];
    report.tests.push_back(z_record("P(I_n = " + std::to_string(i) + ")",
                                    static_cast<double>(hits) / static_cast<double>(config.samples), p,
                                    binomial_z(hits, config.samples, p)));
  }

  // Partition created by the first split: shape law from I_n, uniform (Gibbs)
  // inside each shape.
  std::map<std::string, double> shape_prob;
  for (int i = 1; i <= n - 1; ++i) {
    shape_prob[shape_key({i, n - i})] += law.probabilities[static_cast<std::size_t>(i - 1)];
  }
  std::map<std::string, double> gibbs_shape_mass;
  std::vector<SetPartition> two_block;
  for (const auto& p : enumerate_set_partitions(n)) {
    if (p.num_blocks() != 2) continue;
    two_block.push_back(p);
    gibbs_shape_mass[shape_key(p.block_sizes())] += gibbs_two_block_pmf(n, p.block_sizes()[0]);
  }
  std::map<std::string, double> split_law;
  std::map<std::string, double> gibbs_law;
  for (const auto& p : two_block) {
    const auto key = shape_key(p.block_sizes());
    const double g = gibbs_two_block_pmf(n, p.block_sizes()[0]);
    split_law[p.to_string()] = shape_prob[key] * g / gibbs_shape_mass[key];
    gibbs_law[p.to_string()] = g;
  }
  report.tests.push_back(chi_square_record("first-split partition: Gibbs conditional on shape",
                                           chi_square_gof(acc.at_split, split_law)));
  if (acc.two_blocks.total() > 0) {
    report.tests.push_back(chi_square_record("two-block Ewens partition at theta=1 vs Gibbs law",
                                             chi_square_gof(acc.two_blocks, gibbs_law)));
  }
  if (n >= 4) {
    double tv = 0.0;
    for (const auto& [key, mass] : gibbs_shape_mass) tv += std::abs(mass - shape_prob[key]);
    report.tests.push_back(separation_record("first-split shape law differs from Gibbs shape law", 0.5 * tv, 1e-6));
  }
  return report;
}

SuiteReport suite_nonmarkov(int n, double theta, double phi, const std::vector<double>& t_list,
                            const SuiteConfig& config) {
  if (n < 3 || n > kSuiteMaxN) throw std::invalid_argument("suite_nonmarkov: n must be in [3, 8]");
  if (t_list.empty()) throw std::invalid_argument("suite_nonmarkov: empty t list");
  for (double t : t_list) {
    if (!(0.0 < t && t < phi && phi < theta)) throw std::invalid_argument("suite_nonmarkov: need 0 < t < phi < theta");
  }
  require_samples(config);
  SuiteReport report;
  report.name = "nonmarkov";
  report.params = base_params(config);
  report.params["n"] = n;
  report.params["theta"] = theta;
  report.params["phi"] = phi;
  report.params["t"] = t_list;

  std::vector<Block> lambda_blocks{{1}, {}};
  for (int i = 2; i <= n; ++i) lambda_blocks[1].push_back(i);
  const SetPartition lambda(n, lambda_blocks);

  const std::uint64_t group = derive_seed(config.seed, kTagPrimary);
  // counts[2k] = conditioning hits for t_k, counts[2k+1] = successes.
  auto acc = run_counts(config.samples, config.workers, [&](std::uint64_t r, CountsAcc& a) {
    Rng rng({group, r});
    const auto clocks = sample_clocks(n, rng, config.sampler);
    const auto labels = sample_labels(n, rng, config.sampler);
    if (partition_at(clocks, labels, phi) != lambda) return;
    const bool stays = partition_at(clocks, labels, theta) == lambda;
    const double first = clocks.time(first_jump_digit(clocks));
    for (std::size_t k = 0; k < t_list.size(); ++k) {
      if (first < t_list[k]) {
        a.bump(2 * k);
        if (stays) a.bump(2 * k + 1);
      }
    }
  });

  std::vector<double> exact;
  for (std::size_t k = 0; k < t_list.size(); ++k) {
    const double t = t_list[k];
    const double q = q_ratio(n, theta, phi, t);
    exact.push_back(q);
    const auto hits = count_at(acc.counts, 2 * k);
    const auto stays = count_at(acc.counts, 2 * k + 1);
    const std::string label = "Q(t=" + std::to_string(t) + ")";
    if (hits < kMinConditioningHits) {
      report.tests.push_back(config_record(label + " conditioning sample size", false,
                                           "only " + std::to_string(hits) + " conditioning hits (< 500); increase --samples"));
      continue;
    }
    report.tests.push_back(z_record(label, static_cast<double>(stays) / static_cast<double>(hits), q,
                                    binomial_z(stays, hits, q)));
  }
  if (exact.size() >= 2) {
    const auto [lo, hi] = std::minmax_element(exact.begin(), exact.end());
    report.tests.push_back(separation_record("exact Q(t) varies with t (non-Markov witness)", *hi - *lo, 1e-6));
  }
  return report;
}

SuiteReport suite_rates(int a, int b, double theta, double window, const SuiteConfig& config) {
  if (a < 1 || b < 1 || a + b > kSuiteMaxN) throw std::invalid_argument("suite_rates: need a, b >= 1 and a + b <= 8");
  if (!(theta > 0.0)) throw std::invalid_argument("suite_rates: theta must be positive");
  require_samples(config);
  const int n = a + b;

  // Type hazards: split of a block of size s (the other has size n - s) into {xi, eta}.
  std::map<std::string, double> type_rate;
  auto add_block_types = [&](int s, int other) {
    for (int xi = 1; 2 * xi <= s; ++xi) {
      const int eta = s - xi;
      long long targets = detail::binomial(s, xi);
      if (xi == eta) targets /= 2;
      type_rate[std::to_string(s) + ":" + std::to_string(xi) + "+" + std::to_string(eta)] +=
          static_cast<double>(targets) * split_rate(theta, s, other, xi, eta);
    }
  };
  if (a >= 2) add_block_types(a, b);
  if (b >= 2) add_block_types(b, a);
  double total_rate = 0.0;
  for (const auto& [key, r] : type_rate) total_rate += r;
  const double mixture_total = (a >= 2 ? composition_block_hazard(theta, a, b) : 0.0) +
                               (b >= 2 ? composition_block_hazard(theta, b, a) : 0.0);

  if (!(window > 0.0) || window * mixture_total >= kMaxWindowMass) {
    throw std::invalid_argument("suite_rates: window must satisfy window * total hazard < 0.05");
  }

  SuiteReport report;
  report.name = "rates";
  report.params = base_params(config);
  report.params["a"] = a;
  report.params["b"] = b;
  report.params["theta"] = theta;
  report.params["window"] = window;

  const std::vector<int> comp_parts{a, b};
  const BinaryCode comp_code = encode_composition(Composition(comp_parts));
  const std::string shape = shape_key({a, b});

  const std::uint64_t group = derive_seed(config.seed, kTagPrimary);
  // counts: [0] partition-state hits, [1] exits, [2] composition-state hits,
  // [2 + j] digit j flipped within the window.
  auto acc = run_counts(config.samples, config.workers, [&](std::uint64_t r, CountsAcc& acc_) {
    Rng rng({group, r});
    const auto clocks = sample_clocks(n, rng, config.sampler);
    const auto labels = sample_labels(n, rng, config.sampler);
    const auto code = composition_at(clocks, theta);
    if (code == comp_code) {
      acc_.bump(2);
      for (int j = 2; j <= n; ++j) {
        if (!code.digit(j) && clocks.time(j) <= theta + window) acc_.bump(static_cast<std::size_t>(2 + j));
      }
    }
    const auto before = partition_from_labels(code, labels).unordered();
    if (before.num_blocks() != 2 || shape_key(before.block_sizes()) != shape) return;
    acc_.bump(0);
    const auto after = partition_at(clocks, labels, theta + window);
    if (after == before) return;
    acc_.bump(1);
    if (after.num_blocks() != 3) return;
    // Identify which block split and into which sizes.
    for (const auto& block : before.blocks()) {
      std::vector<int> pieces;
      for (const auto& fragment : after.blocks()) {
        if (std::binary_search(block.begin(), block.end(), fragment.front())) pieces.push_back(static_cast<int>(fragment.size()));
      }
      if (pieces.size() == 2) {
        std::sort(pieces.begin(), pieces.end());
        acc_.hist.add(std::to_string(block.size()) + ":" + std::to_string(pieces[0]) + "+" + std::to_string(pieces[1]));
      }
    }
  });

  const auto state_hits = count_at(acc.counts, 0);
  if (state_hits < kMinConditioningHits) {
    report.tests.push_back(config_record("two-block state sample size", false,
                                         "only " + std::to_string(state_hits) + " replicates in the state; increase --samples"));
    return report;
  }
  const double denom = static_cast<double>(state_hits) * window;
  for (const auto& [key, rate] : type_rate) {
    const auto hits = acc.hist.count(key);
    report.tests.push_back(z_record("hazard " + key, static_cast<double>(hits) / denom, rate,
                                    binomial_z(hits, state_hits, rate * window)));
  }
  const auto exits = count_at(acc.counts, 1);
  report.tests.push_back(z_record("total exit hazard vs composition mixture", static_cast<double>(exits) / denom,
                                  mixture_total, binomial_z(exits, state_hits, mixture_total * window)));
  report.tests.push_back(exact_record("sum of split rates equals composition mixture hazard", total_rate, mixture_total, 1e-12));

  const auto comp_hits = count_at(acc.counts, 2);
  if (comp_hits >= kMinConditioningHits) {
    for (int j = 2; j <= n; ++j) {
      if (comp_code.digit(j)) continue;
      const double rate = 1.0 / (theta + j - 1);
      const auto flips = count_at(acc.counts, static_cast<std::size_t>(2 + j));
      report.tests.push_back(z_record("composition " + comp_code.to_string() + " digit " + std::to_string(j) + " hazard",
                                      static_cast<double>(flips) / (static_cast<double>(comp_hits) * window), rate,
                                      binomial_z(flips, comp_hits, rate * window)));
    }
  }

  // First-order window bias: the window probability is h*w + (h' - h*H) w^2/2.
  const double h = 1e-4;
  double worst = 0.0;
  for (const auto& [key, rate] : type_rate) {
    (void)key;
    const double slope = std::abs(total_split_rate(theta + h, a, b) - total_split_rate(theta - h, a, b)) / (2 * h);
    worst = std::max(worst, 0.5 * window * (slope / rate + mixture_total));
  }
  report.notes.push_back("first-order relative window bias bound " + std::to_string(worst));
  return report;
}

TrajectorySummary summarize_composition_trajectories(int n, std::uint64_t count, std::uint64_t seed, int workers) {
  const std::uint64_t group = derive_seed(seed, kTagPrimary);
  return run_replicates<TrajectorySummary>(
      count, workers,
      [&](std::uint64_t r, TrajectorySummary& s) {
        const auto traj = sample_composition_trajectory(n, {group, r});
        ++s.trajectories;
        s.jumps += traj.jumps.size();
        if (!traj.jumps.empty()) {
          s.jump_time_sum += traj.jumps.back().theta;
          const auto& first = traj.jumps.front().state;
          for (int j = 2; j <= n; ++j) {
            if (first.digit(j)) {
              if (s.first_digit.size() < static_cast<std::size_t>(n - 1)) s.first_digit.resize(static_cast<std::size_t>(n - 1), 0);
              ++s.first_digit[static_cast<std::size_t>(j - 2)];
              break;
            }
          }
        }
        s.states_at_one.add(traj.state_at(1.0).to_string());
      },
      [](TrajectorySummary& total, const TrajectorySummary& part) {
        total.trajectories += part.trajectories;
        total.jumps += part.jumps;
        total.jump_time_sum += part.jump_time_sum;
        total.states_at_one.merge(part.states_at_one);
        if (total.first_digit.size() < part.first_digit.size()) total.first_digit.resize(part.first_digit.size(), 0);
        for (std::size_t i = 0; i < part.first_digit.size(); ++i) total.first_digit[i] += part.first_digit[i];
      });
}

}  // namespace ewfrag
