// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>

#include "ewfrag/exact_laws.hpp"
#include "ewfrag/suites.hpp"

using namespace ewfrag;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

bool all_kind_pass(const SuiteReport& r, const std::string& kind) {
  for (const auto& t : r.tests) {
    if (t.kind == kind && !t.pass) return false;
  }
  return true;
}

bool named_pass(const SuiteReport& r, const std::string& prefix) {
  bool seen = false;
  for (const auto& t : r.tests) {
    if (t.name.rfind(prefix, 0) != 0) continue;
    seen = true;
    if (!t.pass) return false;
  }
  return seen;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Rational q(long long p, long long d = 1) { return Rational(p) / Rational(d); }

SuiteConfig config(std::uint64_t samples) {
  SuiteConfig cfg;
  cfg.samples = samples;
  cfg.seed = 42;
  cfg.workers = 1;
  return cfg;
}

Outcome esf_normalization() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int n = 1; n <= 8; ++n) {
    const auto parts = enumerate_set_partitions(n);
    for (double theta : {0.1, 0.5, 1.0, 2.0, 10.0}) {
      double total = 0.0;
      for (const auto& pi : parts) total += esf_pmf({n, theta}, pi);
      worst = std::max(worst, std::abs(total - 1.0));
    }
  }
  const double secs = seconds_since(t0);
  o.require(worst <= 1e-12, "max deviation " + fmt("%.3g", worst));
  o.require(secs < 10.0, "took " + fmt("%.2f", secs) + " s");
  o.detail = o.pass ? "max |sum - 1| = " + fmt("%.3g", worst) + ", " + fmt("%.3f", secs) + " s" : o.detail;
  return o;
}

Outcome esf_law() {
  Outcome o;
  const auto t0 = Clock::now();
  std::string ps;
  for (double theta : {1.0, 0.5, 2.0}) {
    const auto r = suite_esf(5, theta, SampleModel::Clocks, config(200000));
    const auto& chi = r.tests.front();
    ps += fmt(" p(%g)=", theta) + fmt("%.4g", chi.p_value.value_or(0));
    o.require(chi.kind == "chi-square" && chi.pass && chi.df == 51, fmt("theta %g chi-square failed", theta));
  }
  const double secs = seconds_since(t0);
  o.require(secs < 30.0, "took " + fmt("%.1f", secs) + " s");
  if (o.pass) o.detail = "52 partitions," + ps + ", " + fmt("%.1f", secs) + " s";
  return o;
}

Outcome cross_model() {
  Outcome o;
  const auto r = suite_cross_model(5, 1.0, config(200000));
  o.require(r.verdict(), "two-sample chi-square failed");
  o.detail += (o.detail.empty() ? "" : "; ") + fmt("p=%.4g", r.tests.front().p_value.value_or(0));
  return o;
}

Outcome first_split() {
  Outcome o;
  const double l2 = std::log(2.0);
  const double l3 = std::log(3.0);
  const double expected[3] = {6 * (-l2 + 0.25 * l3 + 0.5), 6 * (0.5 * l3 - 0.5), 6 * (l2 - 0.75 * l3 + 1.0 / 6)};
  for (int i = 1; i <= 3; ++i) {
    const double v = first_split_closed_form(4, i).value();
    o.require(std::abs(v - expected[i - 1]) <= 1e-12, fmt("closed form i=%g off", i));
  }
  double worst = 0.0;
  for (int n = 2; n <= 8; ++n) {
    for (int i = 1; i <= n - 1; ++i) {
      worst = std::max(worst, std::abs(first_split_quadrature(n, i) - first_split_closed_form(n, i).value()));
    }
  }
  o.require(worst <= 1e-10, "quadrature deviation " + fmt("%.3g", worst));
  const auto r = suite_first_split(4, config(1000000));
  o.require(named_pass(r, "P(I_n = "), "Monte Carlo frequency outside 3 sigma");
  if (o.pass) {
    o.detail = fmt("values %.7f", expected[0]) + fmt(" %.7f", expected[1]) + fmt(" %.7f", expected[2]) +
               ", quadrature max dev " + fmt("%.2g", worst);
  }
  return o;
}

Outcome digit_marginals() {
  Outcome o;
  for (auto model : {SampleModel::Clocks, SampleModel::Interval}) {
    for (double theta : {0.5, 2.0}) {
      const auto r = suite_esf(6, theta, model, config(100000));
      o.require(named_pass(r, "digit "), to_string(model) + fmt(" theta %g digit outside 3 sigma", theta));
    }
  }
  if (o.pass) o.detail = "n=6, 2 models x 2 thetas x 5 digits within 3 sigma";
  return o;
}

Outcome consistency() {
  Outcome o;
  const auto r = suite_consistency(6, 4, {0.5, 2.0}, config(100000));
  o.require(named_pass(r, "random-subset restriction vs direct"), "restriction vs direct failed");
  o.detail += (o.detail.empty() ? "" : "; ") + fmt("p=%.4g", r.tests.front().p_value.value_or(0));
  return o;
}

Outcome lemma() {
  Outcome o;
  const auto r = suite_lemma_independence(5, 1e5, config(100000));
  o.require(all_kind_pass(r, "config"), "censoring above 0.1%");
  o.require(all_kind_pass(r, "ks"), "marginal KS failed");
  o.require(named_pass(r, "quartile independence"), "quartile independence failed");
  if (o.pass) o.detail = "4 KS marginals, 6 quartile tables";
  return o;
}

Outcome nonmarkov() {
  Outcome o;
  const Rational a = q_ratio_t<Rational>(3, q(2), q(1), q(1, 4));
  const Rational b = q_ratio_t<Rational>(3, q(2), q(1), q(1, 2));
  o.require(a == q(37, 51), "Q(1/4) != 37/51");
  o.require(b == q(21, 29), "Q(1/2) != 21/29");
  o.require(std::abs(q_ratio(3, 2, 1, 0.25) - 37.0 / 51) <= 1e-12, "float Q(1/4)");
  o.require(std::abs(q_ratio(3, 2, 1, 0.5) - 21.0 / 29) <= 1e-12, "float Q(1/2)");
  o.require(a != b, "values coincide");
  const auto r3 = suite_nonmarkov(3, 2.0, 1.0, {0.25, 0.5}, config(100000));
  o.require(r3.verdict(), "n=3 Monte Carlo outside 3 sigma");
  const Rational a4 = q_ratio_t<Rational>(4, q(2), q(1), q(1, 4));
  const Rational b4 = q_ratio_t<Rational>(4, q(2), q(1), q(1, 2));
  o.require(a4 != b4, "n=4 values coincide");
  const auto r4 = suite_nonmarkov(4, 2.0, 1.0, {0.25, 0.5}, config(100000));
  o.require(r4.verdict(), "n=4 Monte Carlo outside 3 sigma");
  if (o.pass) o.detail = "37/51 vs 21/29; n=4 " + rational_to_string(a4) + " vs " + rational_to_string(b4);
  return o;
}

Outcome rate_conservation() {
  Outcome o;
  int cases = 0;
  for (const Rational& theta : {q(1, 2), q(1), q(2)}) {
    for (int a = 2; a <= 9; ++a) {
      for (int b = 1; a + b <= 10; ++b) {
        Rational total = 0;
        for (int xi = 1; xi <= a - 1; ++xi) {
          total += split_rate_t<Rational>(theta, a, b, xi, a - xi) * Rational(detail::binomial(a, xi)) / 2;
        }
        Rational first = 0;
        for (int j = 2; j <= a; ++j) first += Rational(1) / (theta + j - 1);
        Rational second = 0;
        for (int j = b + 2; j <= a + b; ++j) second += Rational(1) / (theta + j - 1);
        const Rational mixture = q(b, a + b) * first + q(a, a + b) * second;
        o.require(total == mixture, "mismatch at a=" + std::to_string(a) + " b=" + std::to_string(b));
        ++cases;
      }
    }
  }
  const auto r = suite_rates(2, 1, 1.0, 0.01, config(1000000));
  o.require(named_pass(r, "hazard 2:1+1"), "windowed hazard outside 3 sigma of 7/18");
  if (o.pass) {
    for (const auto& t : r.tests) {
      if (t.name == "hazard 2:1+1") o.detail = std::to_string(cases) + " exact cases; hazard " + fmt("%.4f", t.estimate.value_or(0)) + " vs 0.3889";
    }
  }
  return o;
}

Outcome performance() {
  Outcome o;
  const std::uint64_t count = 1000000;
  auto t0 = Clock::now();
  const auto single = summarize_composition_trajectories(10, count, 42, 1);
  const double t1 = seconds_since(t0);
  t0 = Clock::now();
  const auto eight = summarize_composition_trajectories(10, count, 42, 8);
  const double t8 = seconds_since(t0);
  const double speedup = t1 / t8;
  o.require(single.trajectories == count, "trajectory count");
  o.require(t1 < 60.0, "single worker took " + fmt("%.1f", t1) + " s");
  o.require(single == eight, "aggregates differ between 1 and 8 workers");
  o.require(speedup >= 4.0, "8-worker speedup " + fmt("%.2f", speedup) + "x on " +
                                std::to_string(std::thread::hardware_concurrency()) + " hardware thread(s)");
  o.detail = fmt("1 worker %.1f s", t1) + fmt(", 8 workers %.1f s", t8) + fmt(", speedup %.2fx", speedup) +
             (single == eight ? ", aggregates bit-identical" : "") + (o.pass ? "" : "; " + o.detail);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"ESF normalization", esf_normalization},
      {"partition law vs Ewens formula", esf_law},
      {"interval vs clock model", cross_model},
      {"first-split law n=4", first_split},
      {"digit marginals", digit_marginals},
      {"sampling consistency", consistency},
      {"clock extraction lemma", lemma},
      {"non-Markov witness", nonmarkov},
      {"rate conservation", rate_conservation},
      {"performance and scaling", performance},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2zu %s  %s  (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
