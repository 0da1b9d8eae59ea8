#include "ewfrag/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace ewfrag {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

nlohmann::json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

nlohmann::json TestRecord::to_json() const {
  nlohmann::json j{{"name", name}, {"kind", kind}, {"statistic", number_or_null(statistic)},
                   {"threshold", threshold}, {"pass", pass}};
  if (df) j["df"] = *df;
  if (p_value) j["p_value"] = number_or_null(*p_value);
  if (estimate) j["estimate"] = number_or_null(*estimate);
  if (expected) j["expected"] = number_or_null(*expected);
  if (deviation) j["deviation"] = number_or_null(*deviation);
  if (!note.empty()) j["note"] = note;
  return j;
}

TestRecord chi_square_record(std::string name, const ChiSquareResult& r, double alpha) {
  TestRecord t;
  t.name = std::move(name);
  t.kind = "chi-square";
  t.statistic = r.statistic;
  t.df = r.df;
  t.p_value = r.p_value;
  t.threshold = alpha;
  t.pass = r.p_value > alpha;
  if (r.pooled_cells > 0) t.note = std::to_string(r.pooled_cells) + " cells pooled (expected count < 5)";
  return t;
}

TestRecord ks_record(std::string name, const KsResult& r, double alpha) {
  TestRecord t;
  t.name = std::move(name);
  t.kind = "ks";
  t.statistic = r.statistic;
  t.p_value = r.p_value;
  t.threshold = alpha;
  t.pass = r.p_value > alpha;
  return t;
}

TestRecord z_record(std::string name, double estimate, double expected, double z, double limit) {
  TestRecord t;
  t.name = std::move(name);
  t.kind = "z-score";
  t.statistic = z;
  t.estimate = estimate;
  t.expected = expected;
  t.threshold = limit;
  t.pass = std::abs(z) <= limit;
  return t;
}

TestRecord exact_record(std::string name, double value, double expected, double tolerance) {
  TestRecord t;
  t.name = std::move(name);
  t.kind = "exact";
  t.estimate = value;
  t.expected = expected;
  t.deviation = std::abs(value - expected);
  t.statistic = *t.deviation;
  t.threshold = tolerance;
  t.pass = *t.deviation <= tolerance;
  return t;
}

TestRecord separation_record(std::string name, double difference, double minimum) {
  TestRecord t;
  t.name = std::move(name);
  t.kind = "separation";
  t.statistic = difference;
  t.deviation = difference;
  t.threshold = minimum;
  t.pass = difference > minimum;
  return t;
}

TestRecord config_record(std::string name, bool ok, std::string note) {
  TestRecord t;
  t.name = std::move(name);
  t.kind = "config";
  t.pass = ok;
  t.note = std::move(note);
  return t;
}

bool SuiteReport::verdict() const {
  for (const auto& t : tests) {
    if (!t.pass) return false;
  }
  return true;
}

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json tests_json = nlohmann::json::array();
  for (const auto& t : tests) tests_json.push_back(t.to_json());
  nlohmann::json j{{"name", name}, {"params", params}, {"tests", tests_json}, {"verdict", verdict() ? "pass" : "fail"}};
  if (!notes.empty()) j["notes"] = notes;
  return j;
}

std::string SuiteReport::to_table() const {
  std::ostringstream out;
  out << "suite " << name << "  " << params.dump() << "\n";
  for (const auto& t : tests) {
    out << (t.pass ? "  PASS  " : "  FAIL  ") << t.name << "  [" << t.kind << "] stat=" << fmt(t.statistic);
    if (t.df) out << " df=" << *t.df;
    if (t.p_value) out << " p=" << fmt(*t.p_value);
    if (t.estimate) out << " est=" << fmt(*t.estimate);
    if (t.expected) out << " exp=" << fmt(*t.expected);
    out << " thr=" << fmt(t.threshold);
    if (!t.note.empty()) out << "  (" << t.note << ")";
    out << "\n";
  }
  for (const auto& note : notes) out << "  note: " << note << "\n";
  out << "verdict: " << (verdict() ? "pass" : "fail") << "\n";
  return out.str();
}

}  // namespace ewfrag
