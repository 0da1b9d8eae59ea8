#pragma once

#include <map>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

namespace ewfrag {

using Rational = boost::multiprecision::cpp_rational;

// "p/q", or "p" when q = 1.
std::string rational_to_string(const Rational& r);
Rational parse_rational(const std::string& text);
double to_double(const Rational& r);

// Exact value of the form  r0 + sum_k c_k log k  with rational r0, c_k.
// Log terms are kept on primes only (log 4 is stored as 2 log 2) so that
// two equal values have identical representations.
class LogRational {
 public:
  LogRational() = default;
  explicit LogRational(Rational constant) : constant_(std::move(constant)) {}

  const Rational& constant() const { return constant_; }
  const std::map<int, Rational>& logs() const { return logs_; }

  // Adds coeff * log(k), k >= 1.
  void add_log(int k, const Rational& coeff);
  void add_constant(const Rational& c) { constant_ += c; }

  LogRational& operator+=(const LogRational& other);
  LogRational& operator*=(const Rational& factor);
  friend LogRational operator+(LogRational a, const LogRational& b) { return a += b; }
  friend LogRational operator*(LogRational a, const Rational& f) { return a *= f; }

  bool is_rational() const { return logs_.empty(); }
  double value() const;

  nlohmann::json to_json() const;
  static LogRational from_json(const nlohmann::json& j);
  // Human form, e.g. "1/2 - log(2) + 1/4 log(3)".
  std::string to_string() const;

  friend bool operator==(const LogRational&, const LogRational&) = default;

 private:
  Rational constant_{0};
  std::map<int, Rational> logs_;
};

}  // namespace ewfrag
