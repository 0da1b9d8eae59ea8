#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ewfrag/cli.hpp"
#include "ewfrag/set_partition.hpp"

using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = ewfrag::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> result;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) result.push_back(line);
  return result;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Splits one CSV line, honouring double-quoted fields.
std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "ewfrag_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("exact esf for one partition") {
  const auto r = run({"exact", "esf", "--n", "4", "--theta", "1", "--partition", "{1,2|3,4}"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("0.04166666666666", 0) == 0);
  CHECK(std::abs(std::stod(r.out) - 1.0 / 24) < 1e-16);
}

TEST_CASE("exact esf lists every partition") {
  const auto r = run({"exact", "esf", "--n", "3", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["entries"].size() == 5);
  CHECK(j["config"]["target"] == "esf");
}

TEST_CASE("exact first-split closed form as json") {
  const auto r = run({"exact", "first-split", "--n", "4", "--method", "closed-form", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  REQUIRE(j["entries"].size() == 3);
  const std::vector<double> expected{0.4890353, 0.2958368, 0.2151278};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& exact = j["entries"][i]["exact"];
    CHECK(exact.contains("rational"));
    CHECK(exact.contains("logs"));
    CHECK(std::abs(exact["value"].get<double>() - expected[i]) < 1e-7);
  }
}

TEST_CASE("exact qratio, rates, gibbs and blocks") {
  auto q = run({"exact", "qratio", "--n", "3", "--theta", "2", "--phi", "1", "--t", "0.25,0.5", "--format", "csv"});
  REQUIRE(q.code == 0);
  CHECK(q.out.find("37/51") != std::string::npos);
  CHECK(q.out.find("21/29") != std::string::npos);
  auto rates = run({"exact", "rates", "--a", "2", "--b", "1", "--theta", "1", "--format", "json"});
  REQUIRE(rates.code == 0);
  const auto jr = json::parse(rates.out);
  CHECK(jr["entries"][0]["rate"]["rational"] == "7/18");
  CHECK(jr["total"]["rational"] == jr["composition_mixture"]["rational"]);
  auto halved = run({"exact", "rates", "--a", "2", "--b", "1", "--halve-equal", "--format", "json"});
  CHECK(json::parse(halved.out)["entries"][0]["rate"]["rational"] == "7/36");
  auto gibbs = run({"exact", "gibbs", "--n", "4"});
  CHECK(gibbs.out.find("2/11") != std::string::npos);
  auto blocks = run({"exact", "blocks", "--n", "3", "--theta", "1", "--format", "json"});
  CHECK(json::parse(blocks.out)["entries"][2]["probability"].get<double>() == doctest::Approx(1.0 / 6));
  CHECK(run({"exact", "ordered-esf", "--n", "2", "--partition", "(1|2)"}).out.rfind("0.25", 0) == 0);
}

TEST_CASE("simulate composition lines") {
  const auto r = run({"simulate", "composition", "--n", "3", "--samples", "2", "--seed", "7"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 2);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    const auto j = json::parse(ls[i]);
    CHECK(j["jumps"].size() == 2);
    CHECK(j["n"] == 3);
    CHECK(j["seed"] == 7);
    CHECK(j["stream"] == i);
    CHECK(j["jumps"][1]["state"] == "1,1,1");
  }
  CHECK(json::parse(ls[0]).contains("config"));
  CHECK_FALSE(json::parse(ls[1]).contains("config"));
}

TEST_CASE("simulate partition with one label") {
  const auto r = run({"simulate", "partition", "--n", "1", "--samples", "1"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 1);
  CHECK(json::parse(ls[0])["jumps"].empty());
}

TEST_CASE("simulate interval csv round-trips through the partition parser") {
  const auto r = run({"simulate", "interval", "--n", "4", "--theta", "1", "--samples", "1000", "--seed", "9", "--format", "csv"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 1002);
  CHECK(ls[0].rfind("# config: ", 0) == 0);
  CHECK(ls[1] == "replicate,jump_index,theta,state");
  for (std::size_t i = 2; i < ls.size(); ++i) {
    const auto fields = csv_split(ls[i]);
    REQUIRE(fields.size() == 4);
    CHECK(std::stoul(fields[0]) == i - 2);
    const auto p = ewfrag::SetPartition::parse(fields[3]);
    CHECK(p.n() == 4);
    CHECK(p.to_string() == fields[3]);
  }
}

TEST_CASE("simulate gem") {
  const auto r = run({"simulate", "gem", "--theta", "2", "--count", "4", "--samples", "3"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 3);
  CHECK(json::parse(ls[0])["weights"].size() == 4);
  CHECK(run({"simulate", "gem", "--theta", "0"}).code == 2);
}

TEST_CASE("simulation is reproducible from the seed") {
  const std::vector<std::string> args{"simulate", "partition", "--n", "5", "--samples", "20", "--seed", "3"};
  CHECK(run(args).out == run(args).out);
  auto with_workers = args;
  with_workers.insert(with_workers.end(), {"--workers", "3"});
  const auto a = lines(run(args).out);
  const auto b = lines(run(with_workers).out);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("verify exit codes") {
  CHECK(run({"verify", "esf", "--n", "5", "--theta", "1", "--samples", "200000", "--seed", "42"}).code == 0);
  const auto failing = run({"verify", "esf", "--n", "5", "--samples", "200000", "--clock-bias", "1.1"});
  CHECK(failing.code == 1);
  CHECK(failing.out.find("overall: fail") != std::string::npos);
  const auto json_run = run({"verify", "nonmarkov", "--samples", "100000", "--format", "json"});
  CHECK(json_run.code == 0);
  const auto j = json::parse(json_run.out);
  CHECK(j["verdict"] == "pass");
  CHECK(j["suites"][0]["name"] == "nonmarkov");
  CHECK(j["suites"][0]["tests"].size() == 3);
}

TEST_CASE("usage errors exit with code 2 and usage text on the error stream") {
  const auto unknown = run({"exact", "esf", "--n", "3", "--bogus"});
  CHECK(unknown.code == 2);
  CHECK(unknown.out.empty());
  CHECK(unknown.err.find("Usage") != std::string::npos);
  CHECK(run({}).code == 2);
  CHECK(run({"exact"}).code == 2);
  CHECK(run({"exact", "esf"}).code == 2);
  CHECK(run({"exact", "esf", "--n", "3", "--theta", "abc"}).code == 2);
  CHECK(run({"exact", "esf", "--n", "3", "--format", "xml"}).code == 2);
  CHECK(run({"exact", "esf", "--n", "3", "--partition", "{1,2}"}).code == 2);
  CHECK(run({"exact", "first-split", "--n", "1"}).code == 2);
  CHECK(run({"verify", "esf", "--n", "9"}).code == 2);
  CHECK(run({"simulate", "composition", "--n", "3", "--out", "/nonexistent-dir/x.jsonl"}).code == 2);
}

TEST_CASE("help exists for every subcommand") {
  const std::vector<std::vector<std::string>> commands{
      {"--help"},
      {"exact", "--help"},
      {"simulate", "--help"},
      {"verify", "--help"},
      {"replay", "--help"},
  };
  for (const auto& c : commands) {
    const auto r = run(c);
    CHECK(r.code == 0);
    CHECK(r.out.find("Usage") != std::string::npos);
  }
  for (const char* t : {"esf", "ordered-esf", "first-split", "qratio", "rates", "blocks", "gibbs"}) {
    CHECK(run({"exact", t, "--help"}).code == 0);
  }
  for (const char* t : {"composition", "partition", "interval", "gem"}) CHECK(run({"simulate", t, "--help"}).code == 0);
  for (const char* t : {"esf", "consistency", "exchangeability", "lemma", "first-split", "nonmarkov", "rates", "cross-model", "all"}) {
    CHECK(run({"verify", t, "--help"}).code == 0);
  }
}

TEST_CASE("seed falls back to the environment") {
  setenv("EWENS_FRAG_SEED", "1234", 1);
  const auto from_env = run({"simulate", "composition", "--n", "3", "--samples", "1"});
  unsetenv("EWENS_FRAG_SEED");
  REQUIRE(from_env.code == 0);
  const auto explicit_seed = run({"simulate", "composition", "--n", "3", "--samples", "1", "--seed", "1234"});
  CHECK(json::parse(from_env.out)["seed"] == 1234);
  CHECK(json::parse(from_env.out)["jumps"] == json::parse(explicit_seed.out)["jumps"]);
  setenv("EWENS_FRAG_SEED", "12x", 1);
  CHECK(run({"simulate", "composition", "--n", "3"}).code == 2);
  unsetenv("EWENS_FRAG_SEED");
}

TEST_CASE("artifacts embed their config and replay byte-for-byte") {
  const std::vector<std::vector<std::string>> runs{
      {"simulate", "partition", "--n", "4", "--samples", "50", "--seed", "11"},
      {"simulate", "interval", "--n", "4", "--theta", "0.5", "--samples", "50", "--format", "csv"},
      {"exact", "first-split", "--n", "5", "--format", "json"},
      {"exact", "esf", "--n", "3", "--theta", "2"},
      {"verify", "exchangeability", "--samples", "20000", "--format", "json"},
  };
  int k = 0;
  for (auto args : runs) {
    const auto first = scratch("artifact" + std::to_string(k) + ".out");
    const auto second = scratch("replayed" + std::to_string(k) + ".out");
    ++k;
    args.insert(args.end(), {"--out", first.string()});
    REQUIRE(run(args).code == 0);
    const auto replay = run({"replay", first.string(), "--out", second.string()});
    REQUIRE(replay.code == 0);
    const auto a = slurp(first);
    CHECK(!a.empty());
    CHECK(a.find("\"argv\"") != std::string::npos);
    CHECK(a == slurp(second));
  }
  CHECK(run({"replay", scratch("missing.out").string()}).code == 2);
}
