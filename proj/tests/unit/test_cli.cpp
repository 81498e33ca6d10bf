#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "nctorus/commands.hpp"
#include "nctorus/problem.hpp"

using namespace nctorus;
using nlohmann::json;

namespace {

const char* kMinimal = R"({"n": 1, "theta": [[0, 0.3], [-0.3, 0]], "J": {"tau": [[0, 1]]}})";

const char* kFree2 = R"({"n": 2, "theta": {"product_blocks": [0.3, 0.7]}, "J": {"tau": [[0, 1], [0.2, 1.3]]},
  "seed": 42, "multiplier": 2, "form": [[0,1,0,0],[-1,0,0,0],[0,0,0,1],[0,0,-1,0]],
  "pushforward": {"rank": 1, "shift": [[0.1, 0.2]]}, "scan": {"samples": 12, "bound": 2}})";

const char* kSplitZero = R"({"n": 2, "theta": {"product_blocks": [0.3, 0.7]},
  "J": {"splittorus": {"tau": [0, 1], "tau_prime": [0.4, 1.1], "w": 0}}})";

}  // namespace

TEST(Cli, ParsesMinimalFile) {
  const auto pf = parse_problem_file(kMinimal);
  EXPECT_EQ(pf.n, 1u);
  ASSERT_TRUE(pf.cs);
  EXPECT_NEAR(pf.cs->J()(0, 0), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ((*pf.theta)(0, 1), 0.3);
}

TEST(Cli, NonSkewThetaNamesEntries) {
  try {
    parse_problem_file(R"({"n": 1, "theta": [[0, 0.3], [0.3, 0]], "J": {"tau": [[0, 1]]}})");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("theta[0][1]"), std::string::npos) << msg;
    EXPECT_NE(msg.find("theta[1][0]"), std::string::npos) << msg;
  }
}

TEST(Cli, MalformedInputIsReported) {
  EXPECT_THROW(parse_problem_file("{\"n\": 1,"), ParseError);
  EXPECT_THROW(parse_problem_file(R"({"n": 1, "theta": [[0, 0.3], [-0.3, 0]], "J": {"tau": [[0, 1]]}, "bogus": 1})"),
               ParseError);
  EXPECT_THROW(parse_problem_file(R"({"n": 1, "theta": [[0, 0.3], [-0.3, 0]], "J": {"tau": [[0, -1]]}})"), Error);
  const auto r = run_text("hodge", "[1, 2", {});
  EXPECT_EQ(r.exit_code, kExitInputError);
  EXPECT_EQ(r.report["error"]["kind"], "input");
  EXPECT_NE(r.report["error"]["message"].get<std::string>().find("line"), std::string::npos);
}

TEST(Cli, RoundTrip) {
  for (const char* text : {kMinimal, kFree2, kSplitZero}) {
    const auto pf = parse_problem_file(text);
    const auto again = parse_problem_file(emit_problem_file(pf));
    EXPECT_TRUE(again == pf);
    EXPECT_EQ(emit_problem_file(again), emit_problem_file(pf));
  }
}

TEST(Cli, CanonicalDump) {
  EXPECT_EQ(canonical_dump(json{{"b", 1}, {"a", -0.0}}), "{\n  \"a\": 0.0,\n  \"b\": 1\n}\n");
  EXPECT_EQ(json_number(0.1 + 0.2).dump(), "0.3");
  EXPECT_TRUE(json_number(std::nan("")).is_null());
}

TEST(Cli, CommandList) {
  const auto& names = command_names();
  for (const char* c : {"index", "hodge", "flatness", "kunneth", "pushforward", "standard1d", "nonalg-scan",
                        "riemann-check", "frobenius", "decompose", "siegel", "splittorus", "ncriemann-bound",
                        "detect-blocks"})
    EXPECT_NE(std::find(names.begin(), names.end(), c), names.end()) << c;
  const auto r = run_text("no-such-command", kMinimal, {});
  EXPECT_EQ(r.exit_code, kExitInputError);
}

TEST(Cli, HodgeOnFreeModule) {
  const auto r = run_text("hodge", kFree2, {});
  ASSERT_EQ(r.exit_code, kExitOk) << r.report.dump();
  EXPECT_EQ(r.report["results"]["dims"], json::array({1, 2, 1}));
  EXPECT_EQ(r.report["results"]["index"], 0);
  EXPECT_EQ(r.report["results"]["stable"], true);
  EXPECT_EQ(r.report["version"]["schema"], kReportSchema);
  EXPECT_EQ(r.report["command"], "hodge");
}

TEST(Cli, RiemannCheckOnProductSplitTorus) {
  const auto r = run_text("riemann-check", kSplitZero, {});
  ASSERT_EQ(r.exit_code, kExitOk) << r.report.dump();
  EXPECT_EQ(r.report["results"]["verdict"], "found");
}

TEST(Cli, MissingSectionIsInputError) {
  const auto r = run_text("frobenius", kMinimal, {});
  EXPECT_EQ(r.exit_code, kExitInputError);
  EXPECT_EQ(r.report["error"]["kind"], "input");
}

TEST(Cli, NonflatConnectionIsReported) {
  const auto r = run_text("hodge", R"({"n": 1, "theta": [[0, 0.3], [-0.3, 0]], "J": {"tau": [[0, 1]]},
    "connection": {"rank": 2, "terms": [{"j": 0, "row": 0, "col": 1, "m": [1, 0], "re": 1, "im": 0},
                                        {"j": 0, "row": 1, "col": 0, "m": [0, 1], "re": 1, "im": 0}]}})",
                          {});
  // n = 1 connections are always flat; the report must be conclusive or an honest gap failure.
  EXPECT_TRUE(r.exit_code == kExitOk || r.exit_code == kExitInconclusive) << r.report.dump();
}

TEST(Cli, DeterministicReports) {
  RunOptions opts;
  opts.seed = 42;
  for (const char* cmd : {"nonalg-scan", "frobenius", "siegel", "ncriemann-bound", "detect-blocks"}) {
    const auto a = run_text(cmd, kFree2, opts), b = run_text(cmd, kFree2, opts);
    EXPECT_EQ(a.exit_code, kExitOk) << cmd << " " << a.report.dump();
    EXPECT_EQ(canonical_dump(a.report), canonical_dump(b.report)) << cmd;
  }
  const auto scan = run_text("nonalg-scan", kFree2, opts);
  EXPECT_EQ(scan.report["results"]["samples"], 12);
}

TEST(Cli, OverridesAreRecorded) {
  RunOptions opts;
  opts.seed = 7;
  opts.truncation = 3;
  const auto r = run_text("index", kFree2, opts);
  ASSERT_EQ(r.exit_code, kExitOk);
  EXPECT_EQ(r.report["seed"], 7);
  EXPECT_EQ(r.report["results"]["index"], 0);
}
