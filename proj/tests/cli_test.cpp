#include <doctest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "lucon/cli.hpp"
#include "support.hpp"

using namespace lucon;
using lucon::testing::read_text;
using lucon::testing::TempDir;
using lucon::testing::write_text;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "lucon");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

/// Writes a small mixture sample under `dir` and returns the file prefix.
std::string synth(const TempDir& dir, std::size_t count, const std::string& soft = "posterior") {
  const auto prefix = (dir / "mix").string();
  const auto r = invoke({"synth", "--count", std::to_string(count), "--seed", "3", "--soft", soft,
                         "--out-prefix", prefix});
  REQUIRE(r.code == 0);
  return prefix;
}

}  // namespace

TEST_CASE("parse_epsilon") {
  CHECK(cli::parse_epsilon("8/255") == 8.0 / 255.0);
  CHECK(cli::parse_epsilon("0.5") == 0.5);
  CHECK_THROWS(cli::parse_epsilon("1/0"));
  CHECK_THROWS(cli::parse_epsilon("abc"));
  CHECK_THROWS(cli::parse_epsilon("-1"));
  CHECK(cli::parse_list("0.1,0.2") == std::vector<double>{0.1, 0.2});
}

TEST_CASE("estimate") {
  TempDir dir;
  const auto prefix = synth(dir, 200);
  const std::vector<std::string> base{"estimate", "--points", prefix + ".cpts", "--labels",
                                      prefix + ".labels.csv", "--quiet"};

  auto args = base;
  args.insert(args.end(), {"--alpha", "0.1", "--gamma", "0.2", "--T", "2"});
  auto missing_soft = invoke(args);
  CHECK(missing_soft.code == 2);
  const auto err = nlohmann::json::parse(missing_soft.err);
  CHECK(err["error"] == "config");
  CHECK(err["exit_code"] == 2);

  args = base;
  args.insert(args.end(), {"--alpha", "0.1", "--epsilon", "0", "--T", "2", "--trials", "2"});
  const auto zero = invoke(args);
  REQUIRE(zero.code == 0);
  const auto report = nlohmann::json::parse(zero.out);
  CHECK(report["format_version"] == "lucon-report/1");
  for (const auto& t : report["trials"]) CHECK(t["test_adv_risk"] == t["test_risk"]);

  args = base;
  args.insert(args.end(), {"--softlabels", prefix + ".soft.csv", "--alpha", "0.1", "--gamma",
                           "0.1", "--epsilon", "1/4", "--T", "3", "--metric", "linf"});
  auto one = args;
  one.insert(one.end(), {"--threads", "1"});
  auto three = args;
  three.insert(three.end(), {"--threads", "3", "--mem-cap-mb", "0"});
  const auto a = invoke(one);
  const auto b = invoke(three);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);

  auto file_args = one;
  file_args.insert(file_args.end(), {"--out", (dir / "r.json").string()});
  REQUIRE(invoke(file_args).code == 0);
  CHECK(read_text(dir / "r.json") == a.out);

  args = base;
  args.insert(args.end(), {"--alpha", "0.1", "--gamma", "2", "--softlabels", prefix + ".soft.csv",
                           "--T", "2"});
  const auto infeasible = invoke(args);
  CHECK(infeasible.code == 8);
  CHECK(nlohmann::json::parse(infeasible.err).contains("max_lu"));

  CHECK(invoke({"estimate", "--points", (dir / "none.cpts").string(), "--labels",
                prefix + ".labels.csv"})
            .code == 3);
  CHECK(invoke({"estimate"}).code == 2);
  CHECK(invoke({"bogus"}).code == 2);
}

TEST_CASE("sweep writes one row per default alpha") {
  TempDir dir;
  const auto prefix = synth(dir, 300);
  const auto r = invoke({"sweep", "--points", prefix + ".cpts", "--labels",
                         prefix + ".labels.csv", "--epsilon", "0.1", "--T", "1", "--quiet"});
  REQUIRE(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 16);
}

TEST_CASE("lu-stats") {
  TempDir dir;
  const auto prefix = synth(dir, 100, "onehot");
  const auto r = invoke({"lu-stats", "--labels", prefix + ".labels.csv", "--softlabels",
                         prefix + ".soft.csv", "--per-example", (dir / "lu.csv").string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["count"] == 100);
  CHECK(j["mean"] == 0.0);
  const auto& counts = j["histogram"]["counts"];
  CHECK(counts[0] == 100);
  for (std::size_t i = 1; i < counts.size(); ++i) CHECK(counts[i] == 0);
  CHECK(read_text(dir / "lu.csv").rfind("id,lu\n0,0\n", 0) == 0);
}

TEST_CASE("abstain") {
  TempDir dir;
  write_text(dir / "lu.csv", "id,lu\n0,0.1\n1,0.9\n2,0.2\n3,1.5\n");
  write_text(dir / "pred.csv", "id,clean_correct,robust_correct\n0,1,1\n1,0,0\n2,1,0\n3,0,0\n");
  const auto r = invoke({"abstain", "--lu", (dir / "lu.csv").string(), "--predictions",
                         (dir / "pred.csv").string(), "--tau", "0.7", "--curve",
                         (dir / "curve.csv").string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["abstain"]["retained_count"] == 2);
  CHECK(j["abstain"]["clean_accuracy_retained"] == 1.0);
  const auto curve = read_text(dir / "curve.csv");
  CHECK(std::count(curve.begin(), curve.end(), '\n') == 11);

  const auto empty = invoke({"abstain", "--lu", (dir / "lu.csv").string(), "--predictions",
                             (dir / "pred.csv").string(), "--tau", "0.01"});
  CHECK(empty.code == 10);
  write_text(dir / "pred2.csv", "id,clean_correct,robust_correct\n7,1,1\n");
  CHECK(invoke({"abstain", "--lu", (dir / "lu.csv").string(), "--predictions",
                (dir / "pred2.csv").string()})
            .code == 9);
}

TEST_CASE("gauss-validate defaults pass") {
  const auto r = invoke({"gauss-validate", "--quiet"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["pass"] == true);
}
