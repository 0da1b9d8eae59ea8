#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>

namespace ewfrag {

// Counts keyed by canonical state text.
class Histogram {
 public:
  void add(const std::string& key, std::uint64_t count = 1);
  void merge(const Histogram& other);

  const std::map<std::string, std::uint64_t>& counts() const { return counts_; }
  std::uint64_t total() const { return total_; }
  std::uint64_t count(const std::string& key) const;
  double frequency(const std::string& key) const;

  friend bool operator==(const Histogram&, const Histogram&) = default;

 private:
  std::map<std::string, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

struct ChiSquareResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  int pooled_cells = 0;  // cells merged into the pooled bucket
};

inline constexpr double kMinExpectedCount = 5.0;

// Upper tail of the chi-square distribution, P(X >= x) with df degrees of freedom.
double chi_square_sf(double x, int df);

// Pearson goodness of fit against `expected` probabilities (must sum to 1
// within 1e-9). Cells with expected count below 5 are pooled into one
// bucket; observed keys missing from `expected` are an error.
ChiSquareResult chi_square_gof(const Histogram& observed, const std::map<std::string, double>& expected);

// Two-sample chi-square homogeneity test on the union of cells. Cells whose
// expected count in either sample is below 5 are pooled.
ChiSquareResult chi_square_two_sample(const Histogram& a, const Histogram& b);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_sf(double lambda);

// One-sample two-sided Kolmogorov-Smirnov test. `sorted_samples` must be
// non-decreasing with at least 100 entries (+inf entries are allowed and
// contribute cdf = 1).
KsResult ks_test(std::span<const double> sorted_samples, const std::function<double(double)>& cdf);

// Binomial z-score of `hits` out of `trials` against probability p.
double binomial_z(std::uint64_t hits, std::uint64_t trials, double p);

}  // namespace ewfrag
