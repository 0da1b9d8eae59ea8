#include "ewfrag/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace ewfrag {

void Histogram::add(const std::string& key, std::uint64_t count) {
  counts_[key] += count;
  total_ += count;
}

void Histogram::merge(const Histogram& other) {
  for (const auto& [key, c] : other.counts_) counts_[key] += c;
  total_ += other.total_;
}

std::uint64_t Histogram::count(const std::string& key) const {
  auto it = counts_.find(key);
  return it == counts_.end() ? 0 : it->second;
}

double Histogram::frequency(const std::string& key) const {
  return total_ == 0 ? 0.0 : static_cast<double>(count(key)) / static_cast<double>(total_);
}

double chi_square_sf(double x, int df) {
  if (df < 1) throw std::invalid_argument("chi_square_sf: df must be positive");
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

ChiSquareResult chi_square_gof(const Histogram& observed, const std::map<std::string, double>& expected) {
  if (observed.total() == 0) throw std::invalid_argument("chi_square_gof: empty histogram");
  double mass = 0.0;
  for (const auto& [key, p] : expected) {
    if (p < 0.0) throw std::invalid_argument("chi_square_gof: negative probability");
    mass += p;
  }
  if (std::abs(mass - 1.0) > 1e-9) throw std::invalid_argument("chi_square_gof: expected probabilities must sum to 1");
  for (const auto& [key, c] : observed.counts()) {
    if (c > 0 && !expected.contains(key)) throw std::invalid_argument("chi_square_gof: observed cell outside support: " + key);
  }

  const double total = static_cast<double>(observed.total());
  ChiSquareResult result;
  double pooled_obs = 0.0;
  double pooled_exp = 0.0;
  int cells = 0;
  for (const auto& [key, p] : expected) {
    const double e = p * total;
    const double o = static_cast<double>(observed.count(key));
    if (e < kMinExpectedCount) {
      pooled_obs += o;
      pooled_exp += e;
      ++result.pooled_cells;
      continue;
    }
    result.statistic += (o - e) * (o - e) / e;
    ++cells;
  }
  if (pooled_exp > 0.0) {
    result.statistic += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++cells;
  }
  result.df = cells - 1;
  result.p_value = result.df >= 1 ? chi_square_sf(result.statistic, result.df) : 1.0;
  return result;
}

ChiSquareResult chi_square_two_sample(const Histogram& a, const Histogram& b) {
  if (a.total() == 0 || b.total() == 0) throw std::invalid_argument("chi_square_two_sample: empty histogram");
  const double na = static_cast<double>(a.total());
  const double nb = static_cast<double>(b.total());
  const double n = na + nb;

  std::map<std::string, std::pair<double, double>> cells;
  for (const auto& [key, c] : a.counts()) cells[key].first += static_cast<double>(c);
  for (const auto& [key, c] : b.counts()) cells[key].second += static_cast<double>(c);

  ChiSquareResult result;
  auto add_cell = [&](double oa, double ob) {
    const double row = oa + ob;
    const double ea = row * na / n;
    const double eb = row * nb / n;
    result.statistic += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  };
  double pooled_a = 0.0;
  double pooled_b = 0.0;
  int used = 0;
  for (const auto& [key, counts] : cells) {
    const double row = counts.first + counts.second;
    if (std::min(row * na / n, row * nb / n) < kMinExpectedCount) {
      pooled_a += counts.first;
      pooled_b += counts.second;
      ++result.pooled_cells;
      continue;
    }
    add_cell(counts.first, counts.second);
    ++used;
  }
  if (pooled_a + pooled_b > 0.0) {
    add_cell(pooled_a, pooled_b);
    ++used;
  }
  result.df = used - 1;
  result.p_value = result.df >= 1 ? chi_square_sf(result.statistic, result.df) : 1.0;
  return result;
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;  // series converges slowly; Q > 1 - 1e-20 here
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> sorted_samples, const std::function<double(double)>& cdf) {
  if (sorted_samples.size() < 100) throw std::invalid_argument("ks_test: need at least 100 samples");
  if (!std::is_sorted(sorted_samples.begin(), sorted_samples.end())) {
    throw std::invalid_argument("ks_test: samples must be sorted");
  }
  const double n = static_cast<double>(sorted_samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted_samples.size(); ++i) {
    const double x = sorted_samples[i];
    const double f = std::isinf(x) && x > 0 ? 1.0 : cdf(x);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, kolmogorov_sf(std::sqrt(n) * d)};
}

double binomial_z(std::uint64_t hits, std::uint64_t trials, double p) {
  if (trials == 0) throw std::invalid_argument("binomial_z: no trials");
  const double n = static_cast<double>(trials);
  const double sd = std::sqrt(n * p * (1.0 - p));
  const double diff = static_cast<double>(hits) - n * p;
  if (sd == 0.0) return diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  return diff / sd;
}

}  // namespace ewfrag
