#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gcq/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result gcq_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = gcq::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string prog(const std::string& name) { return std::string(GCQ_PROGRAMS_DIR) + "/" + name + ".gcq"; }

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / ("gcq_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST(Cli, CheckVerdicts) {
  EXPECT_EQ(gcq_run({"check", prog("sensors_all")}).code, 0);
  EXPECT_EQ(gcq_run({"check", prog("sensors_all_any")}).code, 0);
  EXPECT_EQ(gcq_run({"check", prog("sensors_any_all")}).code, 1);
  EXPECT_EQ(gcq_run({"check", prog("linearity_race")}).code, 1);
}

TEST(Cli, CheckJsonSchema) {
  auto r = gcq_run({"check", "--json", prog("sensors_any_all")});
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["ok"], false);
  ASSERT_FALSE(j["failures"].empty());
  EXPECT_EQ(j["failures"][0]["kind"], "capability");
  EXPECT_EQ(j["failures"][0]["code"], "CapabilityUnderivable");
  auto ok = nlohmann::json::parse(gcq_run({"check", "--json", prog("sensors_all")}).out);
  EXPECT_EQ(ok["ok"], true);
  EXPECT_TRUE(ok["failures"].empty());
}

TEST(Cli, ExplainShowsTheSequent) {
  auto plain = gcq_run({"check", prog("sensors_any_all")});
  auto explained = gcq_run({"check", "--explain", prog("sensors_any_all")});
  EXPECT_EQ(plain.out.find("sequent:"), std::string::npos);
  EXPECT_NE(explained.out.find("sequent:"), std::string::npos);
  EXPECT_NE(explained.out.find("|-"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(gcq_run({}).code, 2);
  EXPECT_EQ(gcq_run({"frobnicate"}).code, 2);
  EXPECT_EQ(gcq_run({"check"}).code, 2);
  EXPECT_EQ(gcq_run({"cosim", "--bound", "0", prog("sensors_all")}).code, 2);
  EXPECT_EQ(gcq_run({"run-global", "--policy", "sideways", prog("sensors_all")}).code, 2);
  auto help = gcq_run({"check", "--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("--explain"), std::string::npos);
}

TEST(Cli, SyntaxErrorsReportPosition) {
  auto d = scratch("syntax");
  write(d / "bad.gcq", "choreography {\n  bcast k [all] p[A] . 1 -> ;\n}\n");
  auto r = gcq_run({"check", (d / "bad.gcq").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bad.gcq:2:"), std::string::npos) << r.err;
}

TEST(Cli, StrictRejectsPartialSelection) {
  auto r = gcq_run({"check", "--strict", "--json", prog("sensors_any_all")});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(nlohmann::json::parse(r.out)["failures"][0]["code"], "SelectNotAll");
}

TEST(Cli, RunsAreByteIdenticalForEqualSeeds) {
  for (const char* cmd : {"run-global", "run-net"}) {
    auto a = gcq_run({cmd, "--json", "--policy", "random", "--seed", "9", prog("sensors_23")});
    auto b = gcq_run({cmd, "--json", "--policy", "random", "--seed", "9", prog("sensors_23")});
    EXPECT_EQ(a.code, 0) << cmd;
    EXPECT_EQ(a.out, b.out) << cmd;
  }
  auto a = gcq_run({"cosim", "--json", prog("sensors_relay")});
  EXPECT_EQ(a.out, gcq_run({"cosim", "--json", prog("sensors_relay")}).out);
}

TEST(Cli, ScheduleDrivesTheRun) {
  auto d = scratch("schedule");
  write(d / "only_t2.json", R"({"mode":"script","steps":[{"available":["t0","t1","t2","t3"]},{"available":["t2"]}]})");
  auto r = gcq_run({"run-global", "--json", "--schedule", (d / "only_t2.json").string(), prog("fig2_blocking")});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(nlohmann::json::parse(r.out)["verdict"], "stuck");
  write(d / "broken.json", "{");
  EXPECT_EQ(gcq_run({"run-global", "--schedule", (d / "broken.json").string(), prog("sensors_all")}).code, 2);
}

TEST(Cli, ProjectWritesOneFilePerProcessAndAManifest) {
  auto d = scratch("project");
  auto r = gcq_run({"project", "--out", d.string(), prog("sensors_all")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"t1.epq", "t2.epq", "t3.epq", "temperature.M.epq", "network.epq", "manifest.json"})
    EXPECT_TRUE(fs::exists(d / f)) << f;
  std::ifstream in(d / "manifest.json");
  auto m = nlohmann::json::parse(in);
  EXPECT_EQ(m["processes"].size(), 3U);
  EXPECT_EQ(m["replicated"].size(), 1U);
  EXPECT_EQ(m["replicated"][0]["service"], "temperature");
  // The written network runs to completion.
  EXPECT_EQ(gcq_run({"run-net", (d / "network.epq").string()}).code, 0);
}

TEST(Cli, CosimAndAvailabilityVerdicts) {
  auto d = scratch("cosim");
  EXPECT_EQ(gcq_run({"cosim", "--junit", (d / "r.xml").string(), prog("sensors_all")}).code, 0);
  EXPECT_TRUE(fs::exists(d / "r.xml"));
  EXPECT_EQ(gcq_run({"cosim", prog("sensors_any_all")}).code, 1);
  EXPECT_EQ(gcq_run({"cosim", "--max-states", "2", prog("sensors_23")}).code, 3);
  EXPECT_EQ(gcq_run({"availability", prog("sensors_23")}).code, 0);
  auto stuck = gcq_run({"availability", "--json", prog("fig2_blocking")});
  EXPECT_EQ(stuck.code, 1);
  EXPECT_EQ(nlohmann::json::parse(stuck.out)["verdict"], "stuck-network");
}

TEST(Cli, ColorOnlyWhenRequested) {
  ::unsetenv("QC_COLOR");
  EXPECT_EQ(gcq_run({"check", prog("sensors_all")}).out.find('\033'), std::string::npos);
  ::setenv("QC_COLOR", "always", 1);
  EXPECT_NE(gcq_run({"check", prog("sensors_all")}).out.find('\033'), std::string::npos);
  ::setenv("QC_COLOR", "never", 1);
  EXPECT_EQ(gcq_run({"check", prog("sensors_all")}).out.find('\033'), std::string::npos);
  ::unsetenv("QC_COLOR");
}
