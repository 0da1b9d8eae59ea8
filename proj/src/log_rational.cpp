#include "ewfrag/log_rational.hpp"

#include <cmath>
#include <stdexcept>

namespace ewfrag {

std::string rational_to_string(const Rational& r) {
  auto num = boost::multiprecision::numerator(r);
  auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational parse_rational(const std::string& text) {
  using boost::multiprecision::cpp_int;
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(cpp_int(text));
    cpp_int num(text.substr(0, slash));
    cpp_int den(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rational(num) / Rational(den);
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("malformed rational: " + text);
  }
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

void LogRational::add_log(int k, const Rational& coeff) {
  if (k < 1) throw std::invalid_argument("log argument must be a positive integer");
  int rest = k;
  for (int p = 2; p * p <= rest; ++p) {
    while (rest % p == 0) {
      logs_[p] += coeff;
      rest /= p;
    }
  }
  if (rest > 1) logs_[rest] += coeff;
  std::erase_if(logs_, [](const auto& kv) { return kv.second == 0; });
}

LogRational& LogRational::operator+=(const LogRational& other) {
  constant_ += other.constant_;
  for (const auto& [k, c] : other.logs_) logs_[k] += c;
  std::erase_if(logs_, [](const auto& kv) { return kv.second == 0; });
  return *this;
}

LogRational& LogRational::operator*=(const Rational& factor) {
  constant_ *= factor;
  for (auto& [k, c] : logs_) c *= factor;
  std::erase_if(logs_, [](const auto& kv) { return kv.second == 0; });
  return *this;
}

double LogRational::value() const {
  long double sum = constant_.convert_to<long double>();
  for (const auto& [k, c] : logs_) {
    sum += c.convert_to<long double>() * std::log(static_cast<long double>(k));
  }
  return static_cast<double>(sum);
}

nlohmann::json LogRational::to_json() const {
  nlohmann::json logs = nlohmann::json::object();
  for (const auto& [k, c] : logs_) logs[std::to_string(k)] = rational_to_string(c);
  return {{"rational", rational_to_string(constant_)}, {"logs", logs}, {"value", value()}};
}

LogRational LogRational::from_json(const nlohmann::json& j) {
  LogRational out(parse_rational(j.at("rational").get<std::string>()));
  for (const auto& [k, c] : j.at("logs").items()) {
    out.add_log(std::stoi(k), parse_rational(c.get<std::string>()));
  }
  return out;
}

std::string LogRational::to_string() const {
  std::string out = rational_to_string(constant_);
  for (const auto& [k, c] : logs_) {
    Rational mag = c < 0 ? Rational(-c) : c;
    out += c < 0 ? " - " : " + ";
    if (mag != 1) out += rational_to_string(mag) + " ";
    out += "log(" + std::to_string(k) + ")";
  }
  return out;
}

}  // namespace ewfrag
