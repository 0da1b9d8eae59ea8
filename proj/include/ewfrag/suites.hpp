#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ewfrag/report.hpp"
#include "ewfrag/sampler.hpp"

namespace ewfrag {

enum class SampleModel { Clocks, Interval };
std::string to_string(SampleModel m);
SampleModel parse_sample_model(const std::string& text);

// Shared run settings. Every suite is a deterministic function of its
// parameters and these settings; `workers` only changes wall time.
struct SuiteConfig {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 42;
  int workers = 1;
  SamplerOptions sampler;  // non-default only in power checks
};

inline constexpr int kSuiteMaxN = 8;

// Sampled partitions at theta against the Ewens formula (chi-square over all
// partitions of [n]) plus the digit marginals P(X_{n,j}(theta) = 1).
SuiteReport suite_esf(int n, double theta, SampleModel model, const SuiteConfig& config);

// Clock model against interval model at one theta, two-sample chi-square.
SuiteReport suite_cross_model(int n, double theta, const SuiteConfig& config);

// Restriction of m-trajectories to a uniform n-subset against direct
// n-trajectories, jointly over the theta grid. Also compares random-subset
// with initial-segment restriction.
SuiteReport suite_consistency(int m, int n, const std::vector<double>& theta_grid, const SuiteConfig& config);

// Histogram of Pi_{n,theta} against the histogram of its image under `permutation`.
SuiteReport suite_exchangeability(int n, double theta, const std::vector<int>& permutation, const SuiteConfig& config);

inline constexpr double kMaxCensoredFraction = 1e-3;

// Clocks extracted from the interval construction: KS marginals and
// quartile-pair independence tables.
SuiteReport suite_lemma_independence(int n, double theta_max, const SuiteConfig& config);

// Law of the left block size at the first split, and the two-block Gibbs law.
SuiteReport suite_first_split(int n, const SuiteConfig& config);

inline constexpr std::uint64_t kMinConditioningHits = 500;

// Conditional frequencies P(Pi_theta = lambda | Pi_phi = lambda, first split < t)
// against the exact Q(t), lambda = {{1},{2..n}}.
SuiteReport suite_nonmarkov(int n, double theta, double phi, const std::vector<double>& t_list,
                            const SuiteConfig& config);

inline constexpr double kMaxWindowMass = 0.05;

// Windowed jump hazards out of two-block states with sizes {a, b} at theta,
// against split_rate, and composition digit hazards 1/(theta + j - 1).
SuiteReport suite_rates(int a, int b, double theta, double window, const SuiteConfig& config);

// Throughput probe: generates composition trajectories at n and summarizes
// the final-jump-time mean and the state histogram at theta = 1.
struct TrajectorySummary {
  std::uint64_t trajectories = 0;
  std::uint64_t jumps = 0;
  Histogram states_at_one;
  std::vector<std::uint64_t> first_digit;  // index j - 2
  double jump_time_sum = 0.0;
  friend bool operator==(const TrajectorySummary&, const TrajectorySummary&) = default;
};
TrajectorySummary summarize_composition_trajectories(int n, std::uint64_t count, std::uint64_t seed, int workers);

}  // namespace ewfrag
