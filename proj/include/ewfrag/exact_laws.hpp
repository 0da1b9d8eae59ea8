#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ewfrag/log_rational.hpp"
#include "ewfrag/set_partition.hpp"

namespace ewfrag {

struct EwensParams {
  int n = 1;
  double theta = 1.0;

  EwensParams(int n_, double theta_);
};

// Rising factorial x(x+1)...(x+m-1); 1 for m = 0.
double pochhammer(double x, int m);

// Ewens sampling formula. theta = 0 is the point mass on the single block.
double esf_pmf(const EwensParams& params, const SetPartition& pi);

// Law of the interval-ordered partition.
double ordered_esf_pmf(const EwensParams& params, const OrderedSetPartition& pistar);

// P(digit j of the composition is 1 at theta) = theta / (theta + j - 1), with 0/0 = 1.
double digit_prob(int j, double theta);

// Unsigned Stirling number of the first kind |s(n,k)|, exact for n <= 64.
const boost::multiprecision::cpp_int& stirling_first(int n, int k);
inline constexpr int kStirlingMaxN = 64;

// Probability that the Ewens partition of [n] has exactly k blocks.
double blocks_pmf(const EwensParams& params, int k);

enum class FirstSplitMethod { Quadrature, ClosedForm };
std::string to_string(FirstSplitMethod m);
FirstSplitMethod parse_first_split_method(const std::string& text);

// P(first split leaves a left block of size i), i in [1, n-1].
double first_split_pmf(int n, int i, FirstSplitMethod method);
// Exact partial-fraction evaluation of the first-split integral.
LogRational first_split_closed_form(int n, int i);
// Adaptive Gauss-Kronrod on theta = t/(1-t), t in (0,1).
double first_split_quadrature(int n, int i, double tolerance = 1e-13);

struct FirstSplitLaw {
  int n = 0;
  FirstSplitMethod method = FirstSplitMethod::Quadrature;
  std::vector<double> probabilities;   // index i-1 holds P(I_n = i)
  std::vector<LogRational> exact;      // filled for the closed-form method
};
FirstSplitLaw first_split_law(int n, FirstSplitMethod method);

// Two-block Gibbs law: probability of one specific partition of [n] into
// blocks of sizes n1 and n-n1, weights (n1-1)!(n2-1)!.
double gibbs_two_block_pmf(int n, int n1);
Rational gibbs_two_block_pmf_exact(int n, int n1);

namespace detail {

template <class T>
T clock_cdf(int j, const T& x) {
  if (j == 1) return T(1);
  return x / (x + T(j - 1));
}

inline long long binomial(int a, int k) {
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (a - k + i) / i;
  return r;
}

}  // namespace detail

// Jump rate of the partition process from a two-block state with block
// sizes {a, b} to one specific refinement splitting the a-block into label
// sets of sizes xi and eta. `halve_equal` applies the optional halving when
// xi == eta; the default conserves the composition hazard.
template <class T>
T split_rate_t(const T& theta, int a, int b, int xi, int eta, bool halve_equal = false) {
  if (!(theta > T(0))) throw std::invalid_argument("split_rate: theta must be positive");
  if (a < 2 || b < 1 || xi < 1 || eta < 1) throw std::invalid_argument("split_rate: sizes must be positive");
  if (xi + eta != a) throw std::invalid_argument("split_rate: xi + eta must equal a");
  const T wa = T(b) / T(a + b);  // composition (a, b): the a-block comes first
  const T wb = T(a) / T(a + b);  // composition (b, a)
  T rate = wa * (T(1) / (theta + T(xi)) + T(1) / (theta + T(eta))) +
           wb * (T(1) / (theta + T(xi + b)) + T(1) / (theta + T(eta + b)));
  rate /= T(detail::binomial(a, xi));
  if (halve_equal && xi == eta) rate /= T(2);
  return rate;
}

inline double split_rate(double theta, int a, int b, int xi, int eta, bool halve_equal = false) {
  return split_rate_t<double>(theta, a, b, xi, eta, halve_equal);
}

// Total hazard that the a-block of a two-block state {a, b} splits, computed
// at the composition level: average over the two block orders of the sum of
// 1/(theta + j - 1) over the zero digits j inside the a-block.
template <class T>
T composition_block_hazard(const T& theta, int a, int b) {
  T first = T(0);   // code 1 0^{a-1} 1 0^{b-1}: a-block digits 2..a
  for (int j = 2; j <= a; ++j) first += T(1) / (theta + T(j - 1));
  T second = T(0);  // code 1 0^{b-1} 1 0^{a-1}: a-block digits b+2..a+b
  for (int j = b + 2; j <= a + b; ++j) second += T(1) / (theta + T(j - 1));
  return T(b) / T(a + b) * first + T(a) / T(a + b) * second;
}

// Sum of split_rate over every distinct unordered fragmentation of the a-block.
template <class T>
T total_split_rate(const T& theta, int a, int b, bool halve_equal = false) {
  T sum = T(0);
  for (int xi = 1; 2 * xi <= a; ++xi) {
    const int eta = a - xi;
    long long targets = detail::binomial(a, xi);
    if (xi == eta) targets /= 2;
    sum += T(targets) * split_rate_t<T>(theta, a, b, xi, eta, halve_equal);
  }
  return sum;
}

// P(Pi_{n,psi} = {{1},{2..n}}, first split before t), from the independent clocks.
template <class T>
T first_split_joint_prob_t(int n, const T& psi, const T& t) {
  if (n < 3) throw std::invalid_argument("first_split_joint_prob: n must be at least 3");
  if (!(t > T(0)) || !(t < psi)) throw std::invalid_argument("first_split_joint_prob: need 0 < t < psi");
  using detail::clock_cdf;
  T head = clock_cdf<T>(2, t) * (T(1) - clock_cdf<T>(n, psi)) +
           clock_cdf<T>(n, t) * (T(1) - clock_cdf<T>(2, psi));
  T rest = T(1);
  for (int j = 3; j <= n - 1; ++j) rest *= T(1) - clock_cdf<T>(j, psi);
  return head * rest / T(n);
}

inline double first_split_joint_prob(int n, double psi, double t) {
  return first_split_joint_prob_t<double>(n, psi, t);
}

// Q(t) = P(Pi_theta = lambda | Pi_phi = lambda, first split before t).
// theta == phi is accepted and returns 1.
template <class T>
T q_ratio_t(int n, const T& theta, const T& phi, const T& t) {
  if (!(T(0) < t) || !(t < phi) || theta < phi) {
    throw std::invalid_argument("q_ratio: need 0 < t < phi <= theta");
  }
  return first_split_joint_prob_t<T>(n, theta, t) / first_split_joint_prob_t<T>(n, phi, t);
}

inline double q_ratio(int n, double theta, double phi, double t) { return q_ratio_t<double>(n, theta, phi, t); }

}  // namespace ewfrag
