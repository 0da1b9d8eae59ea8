#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ewfrag/stats.hpp"

namespace ewfrag {

struct TestRecord {
  std::string name;
  std::string kind;  // chi-square | ks | z-score | exact | separation | config
  double statistic = 0.0;
  std::optional<int> df;
  std::optional<double> p_value;
  std::optional<double> estimate;
  std::optional<double> expected;
  std::optional<double> deviation;
  double threshold = 0.0;
  bool pass = false;
  std::string note;

  nlohmann::json to_json() const;
};

inline constexpr double kSignificance = 1e-3;
inline constexpr double kSigmaLimit = 3.0;

TestRecord chi_square_record(std::string name, const ChiSquareResult& r, double alpha = kSignificance);
TestRecord ks_record(std::string name, const KsResult& r, double alpha = kSignificance);
// |z| <= limit passes.
TestRecord z_record(std::string name, double estimate, double expected, double z, double limit = kSigmaLimit);
// |value - expected| <= tolerance passes.
TestRecord exact_record(std::string name, double value, double expected, double tolerance);
// difference > minimum passes.
TestRecord separation_record(std::string name, double difference, double minimum);
// Run-configuration gate (sample size, censoring); fails with `note`.
TestRecord config_record(std::string name, bool ok, std::string note);

struct SuiteReport {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
  std::vector<TestRecord> tests;
  std::vector<std::string> notes;

  bool verdict() const;
  nlohmann::json to_json() const;
  std::string to_table() const;
};

}  // namespace ewfrag
