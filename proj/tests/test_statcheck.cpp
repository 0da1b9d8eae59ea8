#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ewfrag/report.hpp"
#include "ewfrag/stats.hpp"
#include "ewfrag/suites.hpp"

using namespace ewfrag;

namespace {

// Regularized upper incomplete gamma Q(a, x): power series for x < a + 1,
// Lentz continued fraction otherwise.
long double gamma_q_oracle(long double a, long double x) {
  if (x <= 0) return 1.0L;
  const long double log_prefix = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1) {
    long double term = 1.0L / a;
    long double sum = term;
    for (int k = 1; k < 100000; ++k) {
      term *= x / (a + k);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-21L) break;
    }
    return 1.0L - sum * std::exp(log_prefix);
  }
  const long double tiny = 1e-4000L;
  long double b = x + 1 - a;
  long double c = 1 / tiny;
  long double d = 1 / b;
  long double h = d;
  for (int i = 1; i < 100000; ++i) {
    const long double an = -i * (i - a);
    b += 2;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    const long double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1) < 1e-21L) break;
  }
  return std::exp(log_prefix) * h;
}

// Kolmogorov survival via the theta-function form of the CDF.
double kolmogorov_sf_oracle(double lambda) {
  const double pi = std::numbers::pi;
  double s = 0.0;
  for (int k = 1; k <= 50; ++k) s += std::exp(-(2 * k - 1) * (2 * k - 1) * pi * pi / (8 * lambda * lambda));
  return 1.0 - std::sqrt(2 * pi) / lambda * s;
}

Histogram make_hist(const std::map<std::string, std::uint64_t>& counts) {
  Histogram h;
  for (const auto& [k, c] : counts) h.add(k, c);
  return h;
}

}  // namespace

TEST_CASE("chi-square survival matches the incomplete-gamma oracle to 1e-10") {
  for (int df : {1, 2, 3, 5, 10, 15, 30, 51, 100}) {
    for (double x : {0.01, 0.5, 1.0, 2.5, 5.0, 10.0, 20.0, 40.0, 80.0, 150.0}) {
      const double expected = static_cast<double>(gamma_q_oracle(df / 2.0L, x / 2.0L));
      CHECK(std::abs(chi_square_sf(x, df) - expected) <= 1e-10);
    }
  }
  CHECK(std::abs(chi_square_sf(3.841, 1) - 0.05) < 1e-4);
}

TEST_CASE("chi-square goodness of fit") {
  const std::map<std::string, double> half{{"a", 0.5}, {"b", 0.5}};
  auto exact = chi_square_gof(make_hist({{"a", 50}, {"b", 50}}), half);
  CHECK(exact.statistic == 0.0);
  CHECK(exact.p_value == doctest::Approx(1.0));
  CHECK(exact.df == 1);

  auto skewed = chi_square_gof(make_hist({{"a", 70}, {"b", 30}}), half);
  CHECK(skewed.statistic == doctest::Approx(16.0));
  CHECK(std::abs(skewed.p_value - 6.334e-5) < 1e-7);

  CHECK_THROWS_AS(chi_square_gof(Histogram{}, half), std::invalid_argument);
  CHECK_THROWS_AS(chi_square_gof(make_hist({{"a", 1}}), {{"a", 0.5}, {"b", 0.4}}), std::invalid_argument);
  CHECK_THROWS_AS(chi_square_gof(make_hist({{"c", 1}}), half), std::invalid_argument);
}

TEST_CASE("cells with small expected counts are pooled") {
  // Expected counts 96, 2, 2: the two small cells form one pooled bucket.
  const std::map<std::string, double> law{{"a", 0.96}, {"b", 0.02}, {"c", 0.02}};
  const auto r = chi_square_gof(make_hist({{"a", 96}, {"b", 1}, {"c", 3}}), law);
  CHECK(r.pooled_cells == 2);
  CHECK(r.df == 1);
  CHECK(r.statistic == doctest::Approx(0.0));
}

TEST_CASE("single outcome passes trivially") {
  const auto r = chi_square_gof(make_hist({{"x", 10}}), {{"x", 1.0}});
  CHECK(r.df == 0);
  CHECK(r.p_value == 1.0);
}

TEST_CASE("two-sample chi-square") {
  const auto a = make_hist({{"x", 500}, {"y", 300}, {"z", 200}});
  CHECK(chi_square_two_sample(a, a).statistic == 0.0);
  CHECK(chi_square_two_sample(a, a).p_value == doctest::Approx(1.0));
  const auto b = make_hist({{"x", 300}, {"y", 300}, {"z", 400}});
  CHECK(chi_square_two_sample(a, b).p_value < 1e-10);
  CHECK_THROWS_AS(chi_square_two_sample(a, Histogram{}), std::invalid_argument);
}

TEST_CASE("Kolmogorov distribution") {
  for (double lambda : {0.3, 0.5, 0.8, 1.0, 1.358, 2.0, 3.0}) {
    CHECK(std::abs(kolmogorov_sf(lambda) - kolmogorov_sf_oracle(lambda)) < 1e-12);
  }
  CHECK(std::abs(kolmogorov_sf(1.358) - 0.05) < 1e-3);
}

TEST_CASE("KS test") {
  std::vector<double> grid;
  for (int i = 0; i < 1000; ++i) grid.push_back((i + 0.5) / 1000.0);
  auto uniform_cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
  const auto fit = ks_test(grid, uniform_cdf);
  CHECK(fit.statistic == doctest::Approx(0.0005));
  CHECK(fit.p_value > 0.99);

  const std::vector<double> point(200, 0.5);
  const auto degenerate = ks_test(point, uniform_cdf);
  CHECK(degenerate.statistic >= 0.5);
  CHECK(degenerate.p_value < 1e-10);

  std::vector<double> unsorted = grid;
  std::swap(unsorted[3], unsorted[700]);
  CHECK_THROWS_AS(ks_test(unsorted, uniform_cdf), std::invalid_argument);
  const std::vector<double> few(50, 0.5);
  CHECK_THROWS_AS(ks_test(few, uniform_cdf), std::invalid_argument);
}

TEST_CASE("binomial z") {
  CHECK(binomial_z(50, 100, 0.5) == 0.0);
  CHECK(binomial_z(60, 100, 0.5) == doctest::Approx(2.0));
}

TEST_CASE("report json schema and verdict") {
  SuiteReport r;
  r.name = "demo";
  r.tests.push_back(exact_record("a", 1.0, 1.0, 1e-12));
  r.tests.push_back(z_record("b", 0.5, 0.5, 0.1));
  CHECK(r.verdict());
  auto j = r.to_json();
  CHECK(j["name"] == "demo");
  CHECK(j["verdict"] == "pass");
  CHECK(j["tests"].size() == 2);
  CHECK(j.contains("params"));
  r.tests.push_back(config_record("c", false, "too few"));
  CHECK_FALSE(r.verdict());
  CHECK(r.to_json()["verdict"] == "fail");
  CHECK(r.to_table().find("FAIL") != std::string::npos);
}

TEST_CASE("suites are deterministic and independent of worker count") {
  SuiteConfig one;
  one.samples = 30000;
  SuiteConfig many = one;
  many.workers = 4;
  CHECK(suite_esf(4, 1.0, SampleModel::Clocks, one).to_json() == suite_esf(4, 1.0, SampleModel::Clocks, one).to_json());
  CHECK(suite_esf(4, 1.0, SampleModel::Interval, one).to_json() ==
        suite_esf(4, 1.0, SampleModel::Interval, many).to_json());
  CHECK(suite_lemma_independence(4, 1e4, one).to_json() == suite_lemma_independence(4, 1e4, many).to_json());
}

TEST_CASE("trivial suite cases") {
  SuiteConfig cfg;
  cfg.samples = 5000;
  CHECK(suite_esf(1, 1.0, SampleModel::Clocks, cfg).verdict());
  CHECK(suite_esf(1, 1.0, SampleModel::Interval, cfg).verdict());
  CHECK(suite_consistency(2, 1, {0.5, 2.0}, cfg).verdict());
  CHECK(suite_exchangeability(4, 1.0, {1, 2, 3, 4}, cfg).tests.front().statistic == 0.0);
  CHECK(suite_first_split(2, cfg).verdict());
}

TEST_CASE("suite argument validation") {
  SuiteConfig cfg;
  cfg.samples = 1000;
  CHECK_THROWS_AS(suite_esf(9, 1.0, SampleModel::Clocks, cfg), std::invalid_argument);
  CHECK_THROWS_AS(suite_consistency(6, 4, {0.5, 0.0}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(suite_consistency(4, 4, {0.5}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(suite_exchangeability(3, 1.0, {1, 1, 2}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(suite_nonmarkov(3, 1.0, 2.0, {0.5}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(suite_rates(2, 1, 1.0, 0.5, cfg), std::invalid_argument);
}

TEST_CASE("run-configuration gates fail the suite") {
  SuiteConfig cfg;
  cfg.samples = 2000;
  const auto censored = suite_lemma_independence(5, 0.5, cfg);
  CHECK_FALSE(censored.verdict());
  CHECK(censored.tests.front().kind == "config");
  CHECK_FALSE(censored.tests.front().pass);

  const auto rare = suite_nonmarkov(3, 2.0, 1.0, {0.25, 0.5}, cfg);
  CHECK_FALSE(rare.verdict());
  CHECK(rare.tests.front().note.find("increase") != std::string::npos);
}

TEST_CASE("power checks: injected bias is detected") {
  SuiteConfig cfg;
  cfg.samples = 200000;
  cfg.sampler.clock_bias = 1.1;
  CHECK_FALSE(suite_esf(5, 1.0, SampleModel::Clocks, cfg).verdict());

  SuiteConfig labels;
  labels.samples = 100000;
  labels.sampler.label_bias = 0.2;
  CHECK_FALSE(suite_exchangeability(4, 1.0, {2, 3, 4, 1}, labels).verdict());
}

TEST_CASE("null suites pass with shipped seeds") {
  SuiteConfig cfg;
  cfg.samples = 100000;
  CHECK(suite_exchangeability(4, 1.0, {2, 3, 4, 1}, cfg).verdict());
  CHECK(suite_nonmarkov(3, 2.0, 1.0, {0.25, 0.5}, cfg).verdict());
  CHECK(suite_nonmarkov(4, 2.0, 1.0, {0.25, 0.75}, cfg).verdict());
  cfg.samples = 1000000;
  CHECK(suite_first_split(3, cfg).verdict());
  CHECK(suite_rates(2, 1, 1.0, 0.01, cfg).verdict());
  CHECK(suite_rates(2, 2, 1.0, 0.01, cfg).verdict());
}
