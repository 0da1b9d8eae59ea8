#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "ewfrag/composition.hpp"
#include "ewfrag/random.hpp"
#include "ewfrag/set_partition.hpp"

namespace ewfrag {

// Activation times Theta_1..Theta_n of the composition digits. Theta_1 = 0.
// `censored[j-1]` marks clocks only known to exceed `horizon` (interval
// extraction); censored entries hold +infinity.
struct ClockVector {
  int n = 0;
  std::vector<double> times;
  std::vector<std::uint8_t> censored;
  double horizon = std::numeric_limits<double>::infinity();

  double time(int j) const { return times[static_cast<std::size_t>(j - 1)]; }
  bool is_censored(int j) const { return !censored.empty() && censored[static_cast<std::size_t>(j - 1)] != 0; }
  bool any_censored() const { return std::find(censored.begin(), censored.end(), 1) != censored.end(); }
};

template <class State>
struct Jump {
  double theta = 0.0;
  State state;
};

// A right-continuous refining path theta -> state, stored as its jumps.
template <class State>
struct RefinementTrajectory {
  int n = 0;
  State initial;
  std::vector<Jump<State>> jumps;

  // State after the last jump with time <= theta.
  const State& state_at(double theta) const {
    auto it = std::upper_bound(jumps.begin(), jumps.end(), theta,
                               [](double t, const Jump<State>& j) { return t < j.theta; });
    if (it == jumps.begin()) return initial;
    return std::prev(it)->state;
  }
  const State& final_state() const { return jumps.empty() ? initial : jumps.back().state; }
  // Time of the first jump, +inf when there is none.
  double first_jump() const {
    return jumps.empty() ? std::numeric_limits<double>::infinity() : jumps.front().theta;
  }
};

using CompositionTrajectory = RefinementTrajectory<BinaryCode>;
using PartitionTrajectory = RefinementTrajectory<OrderedSetPartition>;

// Knobs that deliberately break the construction; used only for power checks.
struct SamplerOptions {
  // Clocks are divided by this factor, so digit j is on at theta with
  // probability b*theta/(b*theta + j - 1) instead of the Ewens value.
  double clock_bias = 1.0;
  // With this probability the ball labels are the identity instead of a
  // uniform permutation.
  double label_bias = 0.0;
};

// Inverse-CDF draw: (j-1) u / (1-u); 0 for j = 1.
double clock_from_uniform(int j, double u);
double sample_clock(int j, Rng& rng);
ClockVector sample_clocks(int n, Rng& rng, const SamplerOptions& options = {});

// Composition (as a binary code) switched on by the clocks at theta.
BinaryCode composition_at(const ClockVector& clocks, double theta);
// Partition of the labelled balls at theta, without building a trajectory.
SetPartition partition_at(const ClockVector& clocks, std::span<const int> labels, double theta);
// Digit position (2..n) of the first jump; 0 when n = 1.
int first_jump_digit(const ClockVector& clocks);

CompositionTrajectory composition_trajectory_from_clocks(const ClockVector& clocks);
CompositionTrajectory sample_composition_trajectory(int n, SeededStream stream, const SamplerOptions& options = {});

PartitionTrajectory partition_trajectory_from(const ClockVector& clocks, std::span<const int> labels);
PartitionTrajectory sample_partition_trajectory(int n, SeededStream stream, const SamplerOptions& options = {});

// Ball labels for the partition process, honouring `label_bias`.
std::vector<int> sample_labels(int n, Rng& rng, const SamplerOptions& options = {});

struct GemWeights {
  double theta = 0.0;
  std::vector<double> factors;  // W_1..W_count, i.i.d. Beta(theta, 1)
  std::vector<double> weights;  // P_j = (1 - W_j) W_1...W_{j-1}
  double residual = 1.0;        // W_1...W_count
};

// Beta(theta, 1) via u^{1/theta}; theta below 1e-8 returns 0 (point mass).
double sample_beta_theta_one(double theta, Rng& rng);
GemWeights sample_gem(double theta, int count, Rng& rng);
// theta = 0: all mass on the first interval.
GemWeights degenerate_gem(int count);

struct CutPoint {
  double position = 0.0;    // in (0, 1)
  double activation = 0.0;  // in (0, theta_max]; the point belongs to Z_theta iff activation <= theta
};

// Cut points of Z_{theta_max} above a floor, in decreasing position.
struct CutPointProcess {
  double theta_max = 0.0;
  double floor = 0.0;
  std::vector<CutPoint> points;

  // Positions of Z_theta above the floor, decreasing. Requires theta <= theta_max.
  std::vector<double> active_positions(double theta) const;
};

// Stick-breaking Y_j = W_1...W_j with W ~ Beta(theta_max, 1), stopping at the
// first Y_j below `floor`; each point gets an independent activation uniform
// on (0, theta_max]. theta_max = 0 gives the empty process.
CutPointProcess sample_cut_points(double theta_max, double floor, Rng& rng);

struct IntervalSample {
  SetPartition partition;
  // Block sizes ordered by the least sample point of each interval (X_{n,j} digits).
  BinaryCode composition;
};

// Uniform sample points grouped by the component intervals of [0,1] minus Z_theta.
IntervalSample sample_interval_state(int n, double theta, Rng& rng);
SetPartition sample_partition_via_interval(int n, double theta, Rng& rng);

// Theta_{n,j} read off a given cut-point process: the least activation among
// cut points lying between the (j-1)-th and j-th smallest sample points.
// `sorted_points` must be increasing. Gaps with no point are censored at
// process.theta_max.
ClockVector clocks_from_cut_points(std::span<const double> sorted_points, const CutPointProcess& process);

enum class ExtractionMethod {
  // Same Poisson process generated in increasing activation, stopping once
  // every gap has its first point or theta_max is passed.
  ActivationOrder,
  // Full stick-breaking process down to the least sample point.
  StickBreaking,
};

ClockVector extract_clocks_from_interval(int n, double theta_max, Rng& rng,
                                         ExtractionMethod method = ExtractionMethod::ActivationOrder);

}  // namespace ewfrag
