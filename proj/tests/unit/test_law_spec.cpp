#include <gtest/gtest.h>

#include "fragkit/error.hpp"
#include "fragkit/law_spec.hpp"

using namespace fragkit;

TEST(LawSpec, ParsesEveryKind) {
  const char* docs[] = {
      R"({"kind": "binary_uniform"})",
      R"({"kind": "stick_breaking_lossy", "params": {"child_floor": 1e-10}})",
      R"({"kind": "stick_breaking_conservative", "params": {}})",
      R"({"kind": "filippov", "params": {"lambda": 2, "theta": 1}})",
      R"({"kind": "dirichlet_polynomial", "params": {"terms": [{"lambda": 3, "theta": 1}, {"lambda": 1, "theta": 2}]}})",
      R"({"kind": "user_atomic", "params": {"outcomes": [{"probability": 1, "sizes": [0.6, 0.3]}]}})",
      R"({"kind": "user_poisson", "params": {"sigma1": {"type": "power", "theta": 2},
          "sigma2": [{"type": "beta", "mass": 0.5, "a": 1, "b": 2}, {"type": "atom", "location": 0.3, "mass": 0.2}]}})",
      R"({"kind": "log_singular", "params": {"c": 0.4}})",
  };
  for (const char* d : docs) EXPECT_NO_THROW(parse_law_spec(d)) << d;
}

TEST(LawSpec, RoundTripPreservesPhi) {
  const char* docs[] = {
      R"({"kind": "filippov", "params": {"lambda": 2.5, "theta": 0.5}})",
      R"({"kind": "dirichlet_polynomial", "params": {"terms": [{"lambda": 3, "theta": 1}, {"lambda": 1, "theta": 2}]}})",
      R"({"kind": "user_atomic", "params": {"outcomes": [{"probability": 0.5, "sizes": [0.5, 0.3]},
          {"probability": 0.5, "sizes": [0.7, 0.2, 0.1]}]}})",
      R"({"kind": "user_poisson", "params": {"sigma1": {"type": "power", "theta": 1},
          "sigma2": [{"type": "power", "lambda": 1, "theta": 1}]}})",
  };
  for (const char* d : docs) {
    const ReproductionLaw a = parse_law_spec(d);
    const ReproductionLaw b = parse_law_spec(law_spec_json(a));
    EXPECT_EQ(a.kind(), b.kind());
    for (double beta : {0.7, 1.5, 3.0}) EXPECT_DOUBLE_EQ(phi(a, beta), phi(b, beta)) << d;
  }
}

TEST(LawSpec, RejectsUnknownFields) {
  EXPECT_THROW(parse_law_spec(R"({"kind": "filippov", "params": {"lambda": 2, "theta": 1, "x": 0}})"), InvalidLawSpec);
  EXPECT_THROW(parse_law_spec(R"({"kind": "filippov", "params": {"lambda": 2, "theta": 1}, "extra": 1})"),
               InvalidLawSpec);
  EXPECT_THROW(parse_law_spec(R"({"kind": "user_poisson", "params": {"sigma1": {"type": "power", "theta": 1, "q": 1}}})"),
               InvalidLawSpec);
}

TEST(LawSpec, RejectsMalformedDocuments) {
  EXPECT_THROW(parse_law_spec("not json"), InvalidLawSpec);
  EXPECT_THROW(parse_law_spec(R"({"params": {}})"), InvalidLawSpec);
  EXPECT_THROW(parse_law_spec(R"({"kind": "nonsense"})"), InvalidLawSpec);
  EXPECT_THROW(parse_law_spec(R"({"kind": "filippov", "params": {"lambda": "two", "theta": 1}})"), InvalidLawSpec);
  EXPECT_THROW(parse_law_spec(R"({"kind": "filippov", "params": {"theta": 1}})"), InvalidLawSpec);
}

TEST(LawSpec, Overrides) {
  const auto law = parse_law_spec(R"({"kind": "filippov", "params": {"lambda": 2, "theta": 1}, "arithmetic_flag": true})");
  EXPECT_TRUE(law.arithmetic());
  EXPECT_THROW(parse_law_spec(R"({"kind": "binary_uniform", "arithmetic_flag": 1})"), InvalidLawSpec);
  const auto shifted =
      parse_law_spec(R"({"kind": "stick_breaking_lossy", "convergence_abscissa": 0.1})");
  EXPECT_DOUBLE_EQ(shifted.convergence_abscissa(), 0.1);
}

TEST(LawSpec, HelpMentionsEveryKind) {
  const std::string help = law_spec_help();
  for (const char* k : {"binary_uniform", "stick_breaking_lossy", "stick_breaking_conservative", "filippov",
                        "dirichlet_polynomial", "user_atomic", "user_poisson", "log_singular"}) {
    EXPECT_NE(help.find(k), std::string::npos) << k;
  }
}
