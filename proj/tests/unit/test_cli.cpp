#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "cli.hpp"
#include "fragkit/version.hpp"

namespace {

std::string data(const std::string& name) { return std::string(FRAGKIT_TEST_DATA_DIR) + "/" + name; }

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = fragkit::cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, Malthus) {
  const auto r = run({"malthus", "--law", data("stickbreak.json")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0.6180339887\n");
}

TEST(Cli, RhoMoments) {
  const auto r = run({"rho-moments", "--law", data("filippov_2_1.json"), "--kmax", "3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "k,moment\n1,2\n2,6\n3,24\n");
}

TEST(Cli, SeriesAtTimeZero) {
  const auto r = run({"mseries", "--law", data("dirichlet_2term.json"), "--t", "0", "--beta", "3.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc.at("value").get<double>(), 1.0);
}

TEST(Cli, LawInspect) {
  const auto r = run({"law", "inspect", data("filippov_2_1.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("beta_star"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, fragkit::cli::usage_error);
  EXPECT_EQ(run({"frobnicate"}).code, fragkit::cli::usage_error);
  EXPECT_EQ(run({"malthus", "--law", data("missing.json")}).code, fragkit::cli::usage_error);
  const auto bad = run({"malthus", "--law", data("bad_field.json")});
  EXPECT_EQ(bad.code, fragkit::cli::usage_error);
  EXPECT_NE(bad.err.find("gamma"), std::string::npos);
  const auto none = run({"malthus", "--law", data("no_root.json")});
  EXPECT_EQ(none.code, fragkit::cli::usage_error);
  EXPECT_NE(none.err.find("0.7213475"), std::string::npos);
}

TEST(Cli, ValidationFailureExitCode) {
  const auto r = run({"validate", "--law", data("filippov_2_1.json"), "--suite", "cdf", "--replicates", "20",
                      "--t", "2", "--cdf-tol", "1e-6"});
  EXPECT_EQ(r.code, fragkit::cli::validation_failed) << r.err;
}

TEST(Cli, SimulateIsThreadIndependent) {
  std::vector<std::string> base{"simulate", "--law", data("stickbreak.json"), "--tmax", "3", "--snapshots",
                                "1,3", "--replicates", "12", "--seed", "5"};
  auto one = base, four = base;
  one.insert(one.end(), {"--threads", "1"});
  four.insert(four.end(), {"--threads", "4"});
  const auto a = run(one), b = run(four);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("replicate,t,n_particles,M_beta_star,frozen_bound\n", 0), 0u);
}

TEST(Cli, Version) {
  const auto r = run({"--version"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find(std::string(fragkit::build_id())), std::string::npos);
}
