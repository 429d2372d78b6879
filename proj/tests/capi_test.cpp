#include "dmac/dmac.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dmac_capi_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string FirstLine(const fs::path& p) {
  std::ifstream is(p);
  std::string line;
  std::getline(is, line);
  return line;
}

// Small problem so the commands finish quickly.
constexpr const char* kSmall = R"({
  "name": "small",
  "loop": {"horizon": 60},
  "nn": {"dataset": {"samples": 60}, "train": {"max_epochs": 30}}
})";

class Config {
 public:
  explicit Config(const char* json) {
    EXPECT_EQ(dmac_config_parse(json, &ptr_), DMAC_OK) << dmac_last_error();
  }
  ~Config() { dmac_config_free(ptr_); }
  dmac_config* get() const { return ptr_; }

 private:
  dmac_config* ptr_ = nullptr;
};

GTEST_TEST(CApiTest, Version) {
  ASSERT_NE(dmac_version(), nullptr);
  EXPECT_GT(std::string(dmac_version()).size(), 0u);
}

GTEST_TEST(CApiTest, NullArguments) {
  dmac_config* c = nullptr;
  EXPECT_EQ(dmac_config_parse(nullptr, &c), DMAC_ERR_ARGUMENT);
  EXPECT_EQ(dmac_config_parse("{}", nullptr), DMAC_ERR_ARGUMENT);
  EXPECT_EQ(dmac_config_load(nullptr, &c), DMAC_ERR_ARGUMENT);
  EXPECT_EQ(dmac_run(nullptr, nullptr), DMAC_ERR_ARGUMENT);
  EXPECT_EQ(dmac_config_set_seed(nullptr, 3), DMAC_ERR_ARGUMENT);
  EXPECT_EQ(dmac_config_to_json(nullptr, nullptr), DMAC_ERR_ARGUMENT);
  dmac_config_free(nullptr);
  dmac_string_free(nullptr);
}

GTEST_TEST(CApiTest, ParseErrorNamesKey) {
  dmac_config* c = nullptr;
  EXPECT_EQ(dmac_config_parse(R"({"loop": {"hyperparams": {"lambda": 1.5}}})", &c),
            DMAC_ERR_CONFIG);
  EXPECT_EQ(c, nullptr);
  EXPECT_NE(std::string(dmac_last_error()).find("lambda"), std::string::npos);
  EXPECT_EQ(dmac_config_load("/nonexistent/dmac.json", &c), DMAC_ERR_IO);
}

GTEST_TEST(CApiTest, SeedAndJson) {
  Config c("{}");
  EXPECT_EQ(dmac_config_seed(c.get()), 1u);
  ASSERT_EQ(dmac_config_set_seed(c.get(), 77), DMAC_OK);
  EXPECT_EQ(dmac_config_seed(c.get()), 77u);
  char* json = nullptr;
  ASSERT_EQ(dmac_config_to_json(c.get(), &json), DMAC_OK);
  EXPECT_NE(std::string(json).find("77"), std::string::npos);
  Config again(json);
  EXPECT_EQ(dmac_config_seed(again.get()), 77u);
  dmac_string_free(json);
}

GTEST_TEST(CApiTest, FixtureLoads) {
  const char* root = std::getenv("DMAC_SOURCE_DIR");
  if (root == nullptr) GTEST_SKIP() << "DMAC_SOURCE_DIR not set";
  dmac_config* c = nullptr;
  const std::string path = std::string(root) + "/experiments/fig5.json";
  ASSERT_EQ(dmac_config_load(path.c_str(), &c), DMAC_OK) << dmac_last_error();
  dmac_config_free(c);
}

GTEST_TEST(CApiTest, GenDataset) {
  Config c(kSmall);
  const fs::path dir = TempDir("dataset");
  ASSERT_EQ(dmac_config_set_output_dir(c.get(), dir.c_str()), DMAC_OK);
  char* summary = nullptr;
  ASSERT_EQ(dmac_gen_dataset(c.get(), &summary), DMAC_OK) << dmac_last_error();
  EXPECT_NE(std::string(summary).find("60"), std::string::npos);
  dmac_string_free(summary);
  EXPECT_EQ(FirstLine(dir / "dataset.csv"), "V_a,P_a,thrust_N");
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "effective_config.json"));
}

GTEST_TEST(CApiTest, SurrogateRun) {
  Config c(kSmall);
  const fs::path dir = TempDir("run");
  ASSERT_EQ(dmac_config_set_output_dir(c.get(), dir.c_str()), DMAC_OK);
  ASSERT_EQ(dmac_run(c.get(), nullptr), DMAC_OK) << dmac_last_error();
  EXPECT_EQ(FirstLine(dir / "small_log.csv").substr(0, 12), "k,r_N,y_N,z_");
  EXPECT_TRUE(fs::exists(dir / "model.json"));
  EXPECT_TRUE(fs::exists(dir / "history.csv"));
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
}

GTEST_TEST(CApiTest, LtiRunAndSweep) {
  Config c(R"({"name": "lti", "loop": {"horizon": 80},
    "plant": {"lti": {"a": [[0.9, 0.1], [0.0, 0.7]], "b": [[0.0], [1.0]],
                      "c": [[1.0, 0.5]], "x0": [0.0, 0.0]}},
    "sweep": [{"parameter": "r2", "values": [0.1, 1.0]}]})");
  const fs::path dir = TempDir("lti");
  ASSERT_EQ(dmac_config_set_output_dir(c.get(), dir.c_str()), DMAC_OK);
  char* summary = nullptr;
  ASSERT_EQ(dmac_run(c.get(), &summary), DMAC_OK) << dmac_last_error();
  EXPECT_NE(std::string(summary).find("80 steps"), std::string::npos) << summary;
  dmac_string_free(summary);
  EXPECT_FALSE(fs::exists(dir / "model.json"));
  ASSERT_EQ(dmac_sweep(c.get(), 2, nullptr), DMAC_OK) << dmac_last_error();
  EXPECT_TRUE(fs::exists(dir / "lti_summary.csv"));
  EXPECT_TRUE(fs::exists(dir / "r2_1.csv"));
}

}  // namespace
