#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "gbh/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "gbhtool");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = gbh::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "gbh_cli_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  fs::remove(p);
  return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) v.push_back(line);
  return v;
}

}  // namespace

TEST_CASE("bound") {
  const Run ok = run({"bound", "--lambda", "0.5", "--rho", "0.000001", "--alpha", "0.05"});
  REQUIRE(ok.code == 0);
  const auto j = nlohmann::json::parse(ok.out);
  CHECK(std::fabs(j["ratio"].get<double>() - 2.013) <= 0.005);
  CHECK(j["in_theorem_domain"] == true);
  CHECK_FALSE(j.contains("a_form"));

  const Run both = run({"bound", "--lambda", "0.3", "--rho", "0.2", "--alpha", "0.05", "--aform"});
  REQUIRE(both.code == 0);
  const auto jb = nlohmann::json::parse(both.out);
  CHECK(jb["a_form"]["total"].get<double>() == doctest::Approx(jb["rho_form"]["total"].get<double>()).epsilon(1e-12));

  const Run bad = run({"bound", "--lambda", "0.6", "--rho", "0.1", "--alpha", "0.05"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("lambda in (0,1/2]") != std::string::npos);

  const Run forced = run({"bound", "--lambda", "0.6", "--rho", "0.1", "--alpha", "0.05", "--force"});
  CHECK(forced.code == 0);
  CHECK(nlohmann::json::parse(forced.out)["in_theorem_domain"] == false);

  const Run small = run({"bound", "--lambda", "0.05", "--rho", "0.149", "--alpha", "0.05"});
  CHECK(nlohmann::json::parse(small.out)["ratio"].get<double>() < 10.0);

  CHECK(run({"bound", "--lambda", "abc", "--rho", "0.1", "--alpha", "0.05"}).code == 2);
  CHECK(run({"bound", "--lambda", "0.3", "--rho", "0.1", "--alpha", "0.05", "--bogus"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
}

TEST_CASE("curve") {
  const fs::path a = scratch("curve_a.csv");
  const fs::path b = scratch("curve_b.csv");
  REQUIRE(run({"curve", "--out", a.string()}).code == 0);
  REQUIRE(run({"curve", "--out", b.string(), "--threads", "3"}).code == 0);
  const std::string text = slurp(a);
  CHECK(text == slurp(b));
  const auto rows = lines(text);
  REQUIRE(rows.size() == 1 + 10 * 67);
  CHECK(rows[0] == "lambda,rho,bound,ratio");
  CHECK(rows[1].rfind("0.05,0.005,", 0) == 0);
  CHECK(rows[67].rfind("0.05,0.335,", 0) == 0);
  CHECK(rows[68].rfind("0.1,0.005,", 0) == 0);
  CHECK(rows.back().rfind("0.5,0.335,", 0) == 0);

  const Run one = run({"curve", "--lambdas", "0.5", "--rhos", "0.000001", "--out", "-"});
  REQUIRE(one.code == 0);
  const auto one_rows = lines(one.out);
  REQUIRE(one_rows.size() == 2);
  CHECK(one_rows[1].rfind("0.5,1e-06,0.1007", 0) == 0);

  const Run past = run({"curve", "--lambdas", "0.5", "--rhos", "0.3,0.35,0.4", "--out", "-"});
  CHECK(past.code == 2);
  CHECK(past.err.find("rho=0.35") != std::string::npos);
  CHECK(past.err.find("rho=0.4") != std::string::npos);

  CHECK(run({"curve", "--out", "/nonexistent-dir/x.csv"}).code == 3);
}

TEST_CASE("simulate") {
  const fs::path cfg = scratch("sim.cfg");
  write(cfg, "# small campaign\nm=40\ngroups=2\nnonnull_counts=0,8\nrho=0.1\nreplications=2000\nseed=3\n");
  const fs::path log = scratch("sim_log.csv");
  const Run one = run({"simulate", "--config", cfg.string(), "--threads", "1", "--log", log.string()});
  const Run eight = run({"simulate", "--config", cfg.string(), "--threads", "8", "--log", log.string()});
  REQUIRE(one.code == 0);
  CHECK(one.out == eight.out);
  const auto j = nlohmann::json::parse(one.out);
  CHECK(j.contains("bound"));
  CHECK_FALSE(j["bound"].is_null());
  CHECK(j["config"]["m"] == 40);
  CHECK(j["metadata"]["config_source"] == "file");
  const auto log_rows = lines(slurp(log));
  REQUIRE(log_rows.size() == 3);
  CHECK(log_rows[0] == "procedure,m,rho,lambda,alpha,reps,fdr_hat,fdr_se,power_hat,power_se,bound");
  CHECK(log_rows[1] == log_rows[2]);

  const Run over = run({"simulate", "--config", cfg.string(), "--rho", "0.25", "--procedure", "bh"});
  REQUIRE(over.code == 0);
  const auto jo = nlohmann::json::parse(over.out);
  CHECK(jo["config"]["rho"] == 0.25);
  CHECK(jo["bound"].is_null());

  const Run bh = run({"simulate", "--rho", "0", "--procedure", "bh", "--replications", "20000"});
  REQUIRE(bh.code == 0);
  const auto jbh = nlohmann::json::parse(bh.out);
  CHECK(std::fabs(jbh["fdr_hat"].get<double>() - 0.05) <= 3.0 * jbh["fdr_se"].get<double>());

  write(cfg, "m=40\nfoo=1\n");
  CHECK(run({"simulate", "--config", cfg.string()}).code == 2);
  CHECK(run({"simulate", "--config", scratch("missing.cfg").string()}).code == 3);
  CHECK(run({"simulate", "--rho", "1.5"}).code == 2);
}

TEST_CASE("adjust") {
  const fs::path in = scratch("adj_in.csv");
  const fs::path out = scratch("adj_out.csv");
  const fs::path again = scratch("adj_again.csv");
  write(in, "pvalue,group\n0.01,a\n0.2,a\n0.6,a\n0.9,a\n");
  REQUIRE(run({"adjust", "--input", in.string(), "--out", out.string(), "--lambda", "0.5", "--alpha", "0.1"}).code ==
          0);
  const auto rows = lines(slurp(out));
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "pvalue,group,weighted_pvalue,rejected");
  CHECK(rows[1] == "0.01,a,0.015,true");
  for (std::size_t i = 2; i < 5; ++i) CHECK(rows[i].substr(rows[i].size() - 5) == "false");

  REQUIRE(run({"adjust", "--input", out.string(), "--out", again.string(), "--lambda", "0.5", "--alpha", "0.1"})
              .code == 0);
  CHECK(slurp(again) == slurp(out));

  write(in, "pvalue,group\n1,a\n1,b\n1,a\n");
  const Run ones = run({"adjust", "--input", in.string()});
  REQUIRE(ones.code == 0);
  CHECK(ones.out.find("true") == std::string::npos);

  write(in, "\xEF\xBB\xBFpvalue,group\n0.001,a\n0.7,b\n0.9,b\n");
  const Run empty_group = run({"adjust", "--input", in.string()});
  REQUIRE(empty_group.code == 0);
  const auto eg = lines(empty_group.out);
  CHECK(eg[2] == "0.7,b,inf,false");
  CHECK(eg[3] == "0.9,b,inf,false");

  write(in, "pvalue,group\n0.01,a\n0.x,a\n");
  const Run bad = run({"adjust", "--input", in.string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 3") != std::string::npos);

  write(in, "pvalue\n0.01\n0.5\n");
  CHECK(run({"adjust", "--input", in.string()}).code == 2);
  CHECK(run({"adjust", "--input", in.string(), "--procedure", "bh"}).code == 0);
  CHECK(run({"adjust", "--input", scratch("nope.csv").string()}).code == 3);
}

TEST_CASE("verify") {
  const fs::path out = scratch("verify.json");
  const Run ints = run({"verify", "--section", "integrals", "--out", out.string()});
  CHECK(ints.code == 0);
  const auto j = nlohmann::json::parse(slurp(out));
  REQUIRE(j.is_array());
  CHECK(j[0]["passed"] == true);
  CHECK(j[0]["max_violation"].get<double>() <= 1e-6);

  const Run mb = run({"verify", "--section", "m_bound", "--out", "-"});
  CHECK(mb.code == 0);
  bool found = false;
  const auto jm = nlohmann::json::parse(mb.out);
  for (const auto& p : jm[0]["points"]) {
    if (p["rho"] == 0.2 && p["x0"] == 2.0) {
      found = p.contains("violation");
    }
  }
  CHECK(found);

  const Run mvt = run({"verify", "--section", "mvt", "--out", "-"});
  CHECK(mvt.code == 0);
  CHECK(nlohmann::json::parse(mvt.out)[0]["max_violation"].get<double>() > 0.0);
  CHECK(mvt.out == run({"verify", "--section", "mvt", "--out", "-"}).out);

  CHECK(run({"verify", "--section", "nonsense"}).code == 2);
}
