#include "ewfrag/sampler.hpp"

#include <cmath>
#include <numeric>

namespace ewfrag {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDegenerateTheta = 1e-8;

// Number of sorted points strictly below x.
std::size_t rank_below(std::span<const double> sorted_points, double x) {
  return static_cast<std::size_t>(std::lower_bound(sorted_points.begin(), sorted_points.end(), x) -
                                  sorted_points.begin());
}

std::vector<double> sorted_uniforms(int n, Rng& rng) {
  std::vector<double> u(static_cast<std::size_t>(n));
  for (auto& x : u) x = rng.uniform();
  std::sort(u.begin(), u.end());
  return u;
}

}  // namespace

double clock_from_uniform(int j, double u) {
  if (j < 1) throw std::invalid_argument("clock index must be >= 1");
  if (j == 1) return 0.0;
  return (j - 1) * u / (1.0 - u);
}

double sample_clock(int j, Rng& rng) { return j == 1 ? 0.0 : clock_from_uniform(j, rng.uniform()); }

ClockVector sample_clocks(int n, Rng& rng, const SamplerOptions& options) {
  if (n < 1) throw std::invalid_argument("sample_clocks: n must be positive");
  ClockVector clocks;
  clocks.n = n;
  clocks.times.resize(static_cast<std::size_t>(n));
  clocks.times[0] = 0.0;
  for (int j = 2; j <= n; ++j) {
    clocks.times[static_cast<std::size_t>(j - 1)] = sample_clock(j, rng) / options.clock_bias;
  }
  return clocks;
}

BinaryCode composition_at(const ClockVector& clocks, double theta) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(clocks.n), 0);
  bits[0] = 1;
  for (int j = 2; j <= clocks.n; ++j) {
    if (clocks.time(j) <= theta) bits[static_cast<std::size_t>(j - 1)] = 1;
  }
  return BinaryCode(std::move(bits));
}

SetPartition partition_at(const ClockVector& clocks, std::span<const int> labels, double theta) {
  return partition_from_labels(composition_at(clocks, theta), labels).unordered();
}

int first_jump_digit(const ClockVector& clocks) {
  int best = 0;
  double best_time = kInf;
  for (int j = 2; j <= clocks.n; ++j) {
    if (clocks.time(j) < best_time) {
      best_time = clocks.time(j);
      best = j;
    }
  }
  return best;
}

CompositionTrajectory composition_trajectory_from_clocks(const ClockVector& clocks) {
  CompositionTrajectory traj{clocks.n, BinaryCode::single_block(clocks.n), {}};

  std::vector<int> order;
  for (int j = 2; j <= clocks.n; ++j) {
    if (std::isfinite(clocks.time(j))) order.push_back(j);
  }
  // Ties (probability zero) flip together, lower digit first.
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return clocks.time(a) < clocks.time(b); });

  BinaryCode state = traj.initial;
  for (std::size_t k = 0; k < order.size(); ++k) {
    state.set_digit(order[k]);
    const double t = clocks.time(order[k]);
    if (k + 1 < order.size() && clocks.time(order[k + 1]) == t) continue;
    traj.jumps.push_back({t, state});
  }
  return traj;
}

CompositionTrajectory sample_composition_trajectory(int n, SeededStream stream, const SamplerOptions& options) {
  Rng rng(stream);
  return composition_trajectory_from_clocks(sample_clocks(n, rng, options));
}

std::vector<int> sample_labels(int n, Rng& rng, const SamplerOptions& options) {
  if (options.label_bias > 0.0 && rng.uniform() < options.label_bias) {
    std::vector<int> identity(static_cast<std::size_t>(n));
    std::iota(identity.begin(), identity.end(), 1);
    return identity;
  }
  return rng.permutation(n);
}

PartitionTrajectory partition_trajectory_from(const ClockVector& clocks, std::span<const int> labels) {
  const auto comp = composition_trajectory_from_clocks(clocks);
  PartitionTrajectory traj{clocks.n, partition_from_labels(comp.initial, labels), {}};
  traj.jumps.reserve(comp.jumps.size());
  for (const auto& jump : comp.jumps) {
    traj.jumps.push_back({jump.theta, partition_from_labels(jump.state, labels)});
  }
  return traj;
}

PartitionTrajectory sample_partition_trajectory(int n, SeededStream stream, const SamplerOptions& options) {
  Rng rng(stream);
  const auto clocks = sample_clocks(n, rng, options);
  const auto labels = sample_labels(n, rng, options);
  return partition_trajectory_from(clocks, labels);
}

double sample_beta_theta_one(double theta, Rng& rng) {
  if (theta < kDegenerateTheta) return 0.0;
  return std::pow(rng.uniform(), 1.0 / theta);
}

GemWeights sample_gem(double theta, int count, Rng& rng) {
  if (!(theta > 0.0)) throw std::invalid_argument("sample_gem: theta must be positive (use degenerate_gem for 0)");
  if (count < 1) throw std::invalid_argument("sample_gem: count must be positive");
  GemWeights gem;
  gem.theta = theta;
  gem.factors.reserve(static_cast<std::size_t>(count));
  gem.weights.reserve(static_cast<std::size_t>(count));
  double stick = 1.0;
  for (int j = 0; j < count; ++j) {
    const double w = sample_beta_theta_one(theta, rng);
    gem.factors.push_back(w);
    gem.weights.push_back((1.0 - w) * stick);
    stick *= w;
  }
  gem.residual = stick;
  return gem;
}

GemWeights degenerate_gem(int count) {
  if (count < 1) throw std::invalid_argument("degenerate_gem: count must be positive");
  GemWeights gem;
  gem.factors.assign(static_cast<std::size_t>(count), 0.0);
  gem.weights.assign(static_cast<std::size_t>(count), 0.0);
  gem.weights[0] = 1.0;
  gem.residual = 0.0;
  return gem;
}

std::vector<double> CutPointProcess::active_positions(double theta) const {
  if (theta > theta_max) throw std::invalid_argument("active_positions: theta exceeds theta_max");
  std::vector<double> out;
  for (const auto& p : points) {
    if (p.activation <= theta) out.push_back(p.position);
  }
  return out;
}

CutPointProcess sample_cut_points(double theta_max, double floor, Rng& rng) {
  if (!(floor > 0.0 && floor < 1.0)) throw std::invalid_argument("sample_cut_points: floor must lie in (0, 1)");
  if (!(theta_max >= 0.0) || !std::isfinite(theta_max)) {
    throw std::invalid_argument("sample_cut_points: theta_max must be finite and >= 0");
  }
  CutPointProcess process;
  process.theta_max = theta_max;
  process.floor = floor;
  if (theta_max < kDegenerateTheta) return process;
  double y = 1.0;
  while (true) {
    y *= sample_beta_theta_one(theta_max, rng);
    if (y < floor) break;
    process.points.push_back({y, theta_max * rng.uniform()});
  }
  return process;
}

IntervalSample sample_interval_state(int n, double theta, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_partition_via_interval: n must be positive");
  if (!(theta >= 0.0)) throw std::invalid_argument("sample_partition_via_interval: theta must be >= 0");

  std::vector<double> u(static_cast<std::size_t>(n));
  for (auto& x : u) x = rng.uniform();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return u[static_cast<std::size_t>(a)] < u[static_cast<std::size_t>(b)]; });
  std::vector<double> sorted(static_cast<std::size_t>(n));
  for (std::size_t r = 0; r < sorted.size(); ++r) sorted[r] = u[static_cast<std::size_t>(order[r])];

  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n), 0);
  bits[0] = 1;
  if (theta >= kDegenerateTheta) {
    // Cuts below the least sample point separate nothing, so stop there.
    double y = 1.0;
    while (true) {
      y *= sample_beta_theta_one(theta, rng);
      if (y < sorted[0]) break;
      const std::size_t r = rank_below(sorted, y);
      if (r < sorted.size()) bits[r] = 1;
    }
  }

  std::vector<Block> blocks;
  for (std::size_t r = 0; r < sorted.size(); ++r) {
    if (bits[r]) blocks.emplace_back();
    blocks.back().push_back(order[r] + 1);
  }
  return {SetPartition(n, std::move(blocks)), BinaryCode(std::move(bits))};
}

SetPartition sample_partition_via_interval(int n, double theta, Rng& rng) {
  return sample_interval_state(n, theta, rng).partition;
}

ClockVector clocks_from_cut_points(std::span<const double> sorted_points, const CutPointProcess& process) {
  if (sorted_points.empty()) throw std::invalid_argument("clocks_from_cut_points: no sample points");
  if (!std::is_sorted(sorted_points.begin(), sorted_points.end())) {
    throw std::invalid_argument("clocks_from_cut_points: sample points must be sorted");
  }
  if (process.floor > sorted_points.front()) {
    throw std::invalid_argument("clocks_from_cut_points: process floor lies above the least sample point");
  }
  ClockVector clocks;
  clocks.n = static_cast<int>(sorted_points.size());
  clocks.horizon = process.theta_max;
  clocks.times.assign(sorted_points.size(), kInf);
  clocks.censored.assign(sorted_points.size(), 1);
  clocks.times[0] = 0.0;
  clocks.censored[0] = 0;
  for (const auto& p : process.points) {
    if (p.position <= sorted_points.front()) continue;
    const std::size_t r = rank_below(sorted_points, p.position);
    if (r >= sorted_points.size()) continue;
    if (p.activation < clocks.times[r]) {
      clocks.times[r] = p.activation;
      clocks.censored[r] = 0;
    }
  }
  return clocks;
}

ClockVector extract_clocks_from_interval(int n, double theta_max, Rng& rng, ExtractionMethod method) {
  if (n < 1) throw std::invalid_argument("extract_clocks_from_interval: n must be positive");
  if (!(theta_max > 0.0) || !std::isfinite(theta_max)) {
    throw std::invalid_argument("extract_clocks_from_interval: theta_max must be positive and finite");
  }
  const auto sorted = sorted_uniforms(n, rng);

  if (method == ExtractionMethod::StickBreaking) {
    return clocks_from_cut_points(sorted, sample_cut_points(theta_max, sorted[0], rng));
  }

  ClockVector clocks;
  clocks.n = n;
  clocks.horizon = theta_max;
  clocks.times.assign(static_cast<std::size_t>(n), kInf);
  clocks.censored.assign(static_cast<std::size_t>(n), 1);
  clocks.times[0] = 0.0;
  clocks.censored[0] = 0;

  // Points of the quadrant process with position in (U_min, 1) arrive in
  // activation order at rate log(1/U_min); positions have density 1/t.
  const double span = -std::log(sorted[0]);
  int open_gaps = n - 1;
  double activation = 0.0;
  while (open_gaps > 0) {
    activation += -std::log(rng.uniform()) / span;
    if (activation > theta_max) break;
    const double position = std::exp(-span * rng.uniform());
    const std::size_t r = rank_below(sorted, position);
    if (r == 0 || r >= sorted.size() || !clocks.censored[r]) continue;
    clocks.times[r] = activation;
    clocks.censored[r] = 0;
    --open_gaps;
  }
  return clocks;
}

}  // namespace ewfrag
