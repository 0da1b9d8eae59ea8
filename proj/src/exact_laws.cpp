#include "ewfrag/exact_laws.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ewfrag {

using boost::multiprecision::cpp_int;

EwensParams::EwensParams(int n_, double theta_) : n(n_), theta(theta_) {
  if (n < 1) throw std::invalid_argument("EwensParams: n must be positive");
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw std::invalid_argument("EwensParams: theta must be finite and >= 0");
}

double pochhammer(double x, int m) {
  if (m < 0) throw std::invalid_argument("pochhammer: m must be non-negative");
  long double r = 1.0L;
  for (int i = 0; i < m; ++i) r *= static_cast<long double>(x) + i;
  return static_cast<double>(r);
}

namespace {

// log of theta^{k-1} / [theta+1]_{n-1}, theta > 0
long double log_ewens_prefactor(int n, int k, double theta) {
  long double lt = std::log(static_cast<long double>(theta));
  long double out = (k - 1) * lt;
  for (int i = 1; i <= n - 1; ++i) out -= std::log(static_cast<long double>(theta) + i);
  return out;
}

// Direct evaluation is used while the terms stay representable.
constexpr int kDirectLimit = 150;

long double factorial_ld(int m) {
  long double r = 1.0L;
  for (int i = 2; i <= m; ++i) r *= i;
  return r;
}

}  // namespace

double esf_pmf(const EwensParams& params, const SetPartition& pi) {
  if (pi.n() != params.n) throw std::invalid_argument("esf_pmf: partition size differs from n");
  const int k = pi.num_blocks();
  if (params.theta == 0.0) return k == 1 ? 1.0 : 0.0;
  if (params.n <= kDirectLimit) {
    long double r = std::pow(static_cast<long double>(params.theta), k - 1);
    for (int size : pi.block_sizes()) r *= factorial_ld(size - 1);
    for (int i = 1; i <= params.n - 1; ++i) r /= static_cast<long double>(params.theta) + i;
    return static_cast<double>(r);
  }
  long double lr = log_ewens_prefactor(params.n, k, params.theta);
  for (int size : pi.block_sizes()) lr += std::lgamma(static_cast<long double>(size));
  return static_cast<double>(std::exp(lr));
}

double ordered_esf_pmf(const EwensParams& params, const OrderedSetPartition& pistar) {
  if (pistar.n() != params.n) throw std::invalid_argument("ordered_esf_pmf: partition size differs from n");
  const int k = pistar.num_blocks();
  if (params.theta == 0.0) return k == 1 ? 1.0 : 0.0;
  int running = 0;
  if (params.n <= kDirectLimit) {
    long double r = std::pow(static_cast<long double>(params.theta), k - 1);
    for (int size : pistar.block_sizes()) {
      running += size;
      r *= factorial_ld(size) / running;
    }
    for (int i = 1; i <= params.n - 1; ++i) r /= static_cast<long double>(params.theta) + i;
    return static_cast<double>(r);
  }
  long double lr = log_ewens_prefactor(params.n, k, params.theta);
  for (int size : pistar.block_sizes()) {
    running += size;
    lr += std::lgamma(static_cast<long double>(size) + 1) - std::log(static_cast<long double>(running));
  }
  return static_cast<double>(std::exp(lr));
}

double digit_prob(int j, double theta) {
  if (j < 1) throw std::invalid_argument("digit_prob: j must be >= 1");
  if (theta < 0.0) throw std::invalid_argument("digit_prob: theta must be >= 0");
  if (j == 1) return 1.0;
  return theta / (theta + (j - 1));
}

namespace {

std::vector<std::vector<cpp_int>> build_stirling_table() {
  std::vector<std::vector<cpp_int>> s(kStirlingMaxN + 1, std::vector<cpp_int>(kStirlingMaxN + 1, 0));
  s[0][0] = 1;
  for (int n = 1; n <= kStirlingMaxN; ++n) {
    for (int k = 1; k <= n; ++k) {
      s[n][k] = s[n - 1][k - 1] + cpp_int(n - 1) * s[n - 1][k];
    }
  }
  return s;
}

}  // namespace

const cpp_int& stirling_first(int n, int k) {
  static const auto table = build_stirling_table();
  if (n < 0 || n > kStirlingMaxN) throw std::overflow_error("stirling_first: n exceeds exact table bound 64");
  if (k < 0 || k > n) throw std::out_of_range("stirling_first: k out of range");
  return table[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

double blocks_pmf(const EwensParams& params, int k) {
  if (k < 1 || k > params.n) throw std::out_of_range("blocks_pmf: k must be in [1, n]");
  if (params.theta == 0.0) return k == 1 ? 1.0 : 0.0;
  const long double s = stirling_first(params.n, k).convert_to<long double>();
  return static_cast<double>(std::exp(std::log(s) + log_ewens_prefactor(params.n, k, params.theta)));
}

std::string to_string(FirstSplitMethod m) {
  return m == FirstSplitMethod::Quadrature ? "quadrature" : "closed-form";
}

FirstSplitMethod parse_first_split_method(const std::string& text) {
  if (text == "quadrature") return FirstSplitMethod::Quadrature;
  if (text == "closed-form") return FirstSplitMethod::ClosedForm;
  throw std::invalid_argument("unknown first-split method: " + text);
}

LogRational first_split_closed_form(int n, int i) {
  if (n < 2) throw std::invalid_argument("first_split: n must be at least 2");
  if (i < 1 || i > n - 1) throw std::out_of_range("first_split: i must be in [1, n-1]");

  // 1 / ((x+i)^2 prod_{l != i} (x+l)) over poles -1..-(n-1), double at -i:
  //   sum_{m != i} A_m/(x+m) + B/(x+i) + C/(x+i)^2.
  // Residues sum to zero, so the integral over (0, inf) is
  //   -sum_m A_m log m - B log i + C/i.
  Rational c(1);
  Rational inv_sum(0);
  for (int l = 1; l <= n - 1; ++l) {
    if (l == i) continue;
    c /= Rational(l - i);
    inv_sum += Rational(1) / Rational(l - i);
  }
  const Rational b = -c * inv_sum;

  LogRational integral(c / Rational(i));
  integral.add_log(i, -b);
  for (int m = 1; m <= n - 1; ++m) {
    if (m == i) continue;
    Rational a = Rational(1) / Rational((i - m) * (i - m));
    for (int l = 1; l <= n - 1; ++l) {
      if (l == i || l == m) continue;
      a /= Rational(l - m);
    }
    integral.add_log(m, -a);
  }

  cpp_int fact = 1;
  for (int m = 2; m <= n - 1; ++m) fact *= m;
  integral *= Rational(fact);
  return integral;
}

double first_split_quadrature(int n, int i, double tolerance) {
  if (n < 2) throw std::invalid_argument("first_split: n must be at least 2");
  if (i < 1 || i > n - 1) throw std::out_of_range("first_split: i must be in [1, n-1]");
  // With theta = t/(1-t) the integrand (n-1)!/((theta+i)[theta+1]_{n-1}) dtheta becomes
  //   (1-t)^{n-2} / (t + i(1-t)) * prod_{m<n} m / (t + m(1-t)).
  auto integrand = [n, i](double t) {
    const double s = 1.0 - t;
    double v = std::pow(s, n - 2) / (t + i * s);
    for (int m = 1; m <= n - 1; ++m) v *= m / (t + m * s);
    return v;
  };
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, 1.0, 20, tolerance,
                                                                         &error);
}

double first_split_pmf(int n, int i, FirstSplitMethod method) {
  if (method == FirstSplitMethod::ClosedForm) return first_split_closed_form(n, i).value();
  return first_split_quadrature(n, i);
}

FirstSplitLaw first_split_law(int n, FirstSplitMethod method) {
  if (n < 2) throw std::invalid_argument("first_split: n must be at least 2");
  FirstSplitLaw law;
  law.n = n;
  law.method = method;
  for (int i = 1; i <= n - 1; ++i) {
    if (method == FirstSplitMethod::ClosedForm) {
      law.exact.push_back(first_split_closed_form(n, i));
      law.probabilities.push_back(law.exact.back().value());
    } else {
      law.probabilities.push_back(first_split_quadrature(n, i));
    }
  }
  return law;
}

Rational gibbs_two_block_pmf_exact(int n, int n1) {
  if (n < 2 || n1 < 1 || n1 > n - 1) throw std::out_of_range("gibbs_two_block_pmf: need 1 <= n1 <= n-1");
  auto fact = [](int m) {
    cpp_int r = 1;
    for (int i = 2; i <= m; ++i) r *= i;
    return r;
  };
  // Normalizer: sum over unordered two-block partitions of (m-1)!(n-m-1)!,
  // i.e. half of sum_m C(n,m)(m-1)!(n-m-1)! = half of sum_m n!/(m(n-m)).
  Rational z(0);
  for (int m = 1; m <= n - 1; ++m) z += Rational(fact(n), cpp_int(m) * (n - m));
  z /= 2;
  return Rational(fact(n1 - 1) * fact(n - n1 - 1)) / z;
}

double gibbs_two_block_pmf(int n, int n1) { return to_double(gibbs_two_block_pmf_exact(n, n1)); }

}  // namespace ewfrag
