#include "dmac/config.hpp"

#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "dmac/error.hpp"

namespace dmac {
namespace {

using nlohmann::json;

std::string Fixture(const std::string& name) {
  return std::string(DMAC_SOURCE_DIR) + "/experiments/" + name;
}

// Parse and return the configuration error message, or "" if none.
std::string ParseError(const std::string& text) {
  try {
    ParseConfig(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfiguration);
    return e.what();
  }
  return "";
}

GTEST_TEST(ConfigTest, EmptyObjectGivesDefaults) {
  const RunConfig c = ParseConfig("{}");
  const LoopConfig defaults;
  EXPECT_TRUE(c.is_surrogate());
  EXPECT_EQ(c.seed, 1u);
  EXPECT_EQ(c.loop.horizon, defaults.horizon);
  EXPECT_EQ(c.loop.hyperparams.lambda, defaults.hyperparams.lambda);
  EXPECT_EQ(c.loop.hyperparams.r_theta_scale, defaults.hyperparams.r_theta_scale);
  EXPECT_EQ(c.actuator.w0, ActuatorConfig{}.w0);
  EXPECT_TRUE(c.sweep.empty());
  EXPECT_EQ(SweepsFor(c).size(), 4u);
}

GTEST_TEST(ConfigTest, BadLambdaNamesKeyAndRange) {
  const std::string msg = ParseError(R"({"loop": {"hyperparams": {"lambda": 1.5}}})");
  EXPECT_NE(msg.find("lambda"), std::string::npos) << msg;
  EXPECT_NE(msg.find("(0, 1]"), std::string::npos) << msg;
  EXPECT_NE(ParseError(R"({"loop": {"hyperparams": {"lambda": 0}}})"), "");
  EXPECT_EQ(ParseError(R"({"loop": {"hyperparams": {"lambda": 1}}})"), "");
}

GTEST_TEST(ConfigTest, UnknownKeysRejectedNotesIgnored) {
  const std::string msg = ParseError(R"({"loop": {"hyperparams": {"lamda": 0.9}}})");
  EXPECT_NE(msg.find("loop.hyperparams.lamda"), std::string::npos) << msg;
  EXPECT_NE(ParseError(R"({"bogus": 1})").find("bogus"), std::string::npos);
  EXPECT_EQ(ParseError(R"({"_note": "x", "loop": {"_note_2": [1, 2]}})"), "");
}

GTEST_TEST(ConfigTest, WrongTypesRejected) {
  EXPECT_NE(ParseError(R"({"loop": {"horizon": "long"}})").find("loop.horizon"),
            std::string::npos);
  EXPECT_NE(ParseError(R"({"loop": {"horizon": 2.5}})"), "");
  EXPECT_NE(ParseError(R"({"seed": -1})"), "");
  EXPECT_NE(ParseError(R"({"name": 3})"), "");
  EXPECT_NE(ParseError(R"({"loop": {"regressor_control": "both"}})"), "");
  EXPECT_NE(ParseError("{not json"), "");
  EXPECT_NE(ParseError(R"({"sweep": [{"parameter": "lambda", "values": []}]})"), "");
  EXPECT_NE(ParseError(R"({"sweep": [{"parameter": "tau", "values": [1]}]})"), "");
}

GTEST_TEST(ConfigTest, PlantNeedsExactlyOneKind) {
  EXPECT_NE(ParseError(R"({"plant": {}})"), "");
  EXPECT_NE(ParseError(R"({"plant": {"surrogate": {}, "lti": {}}})"), "");
  EXPECT_EQ(ParseError(R"({"plant": {"surrogate": {"tau_v": 3}}})"), "");
}

GTEST_TEST(ConfigTest, LtiPlant) {
  const RunConfig c = ParseConfig(R"({"plant": {"lti": {
      "a": [[0.9, 0.1], [0.0, 0.8]], "b": [[0.0], [1.0]],
      "c": [[1.0, 0.0]], "x0": [0.5, -0.5]}}})");
  ASSERT_FALSE(c.is_surrogate());
  const auto& lti = std::get<LtiPlantSpec>(c.plant);
  EXPECT_EQ(lti.a(0, 1), 0.1);
  EXPECT_EQ(lti.b(1, 0), 1.0);
  EXPECT_EQ(lti.c.cols(), 2);
  EXPECT_EQ(lti.x0(1), -0.5);
  EXPECT_NE(ParseError(R"({"plant": {"lti": {
      "a": [[0.9, 0.1], [0.0, 0.8]], "b": [[0.0], [1.0]],
      "c": [[1.0, 0.0]]}}})").find("x0"), std::string::npos);
  EXPECT_NE(ParseError(R"({"plant": {"lti": {
      "a": [[0.9, 0.1]], "b": [[0.0]], "c": [[1.0, 0.0]], "x0": [0, 0]}}})"), "");
  EXPECT_NE(ParseError(R"({"plant": {"lti": {
      "a": [[0.9, 0.1], [0.0]], "b": [[0.0], [1.0]],
      "c": [[1.0, 0.0]], "x0": [0, 0]}}})"), "");
}

GTEST_TEST(ConfigTest, SeedMirrorsLoopSeed) {
  const RunConfig c = ParseConfig(R"({"seed": 42})");
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.loop.seed, 42u);
}

GTEST_TEST(ConfigTest, JsonRoundTripIsStable) {
  for (const char* name : {"fig5.json", "fig6.json", "fig7.json"}) {
    const std::string once = ConfigToJson(LoadConfig(Fixture(name)));
    const std::string twice = ConfigToJson(ParseConfig(once));
    EXPECT_EQ(once, twice) << name;
    EXPECT_NO_THROW(json::parse(once));
  }
  const std::string lti = ConfigToJson(ParseConfig(R"({"plant": {"lti": {
      "a": [[0.5]], "b": [[1.0]], "c": [[2.0]], "x0": [0.25]}}})"));
  EXPECT_EQ(ConfigToJson(ParseConfig(lti)), lti);
}

GTEST_TEST(ConfigTest, Fixtures) {
  const RunConfig fig5 = LoadConfig(Fixture("fig5.json"));
  EXPECT_EQ(fig5.loop.reference.steps().size(), 1u);
  EXPECT_EQ(fig5.loop.reference.At(0), 1000.0);
  EXPECT_EQ(fig5.loop.hyperparams.r_theta_scale, 100.0);
  EXPECT_EQ(fig5.loop.hyperparams.lambda, 0.995);

  const RunConfig fig6 = LoadConfig(Fixture("fig6.json"));
  EXPECT_EQ(fig6.loop.reference.At(199), 1000.0);
  EXPECT_EQ(fig6.loop.reference.At(200), 1200.0);
  EXPECT_EQ(fig6.loop.horizon, 400u);

  const RunConfig fig7 = LoadConfig(Fixture("fig7.json"));
  std::size_t values = 0;
  for (const SweepSpec& s : SweepsFor(fig7)) values += s.values.size();
  EXPECT_EQ(values, 20u);

  EXPECT_THROW(LoadConfig(Fixture("missing.json")), Error);
}

}  // namespace
}  // namespace dmac
