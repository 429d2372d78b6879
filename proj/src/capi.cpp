#include "dmac/dmac.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "dmac/app.hpp"
#include "dmac/error.hpp"

struct dmac_config {
  dmac::RunConfig config;
};

namespace {

thread_local std::string last_error;

char* CopyString(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p != nullptr) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

dmac_status StatusOf(dmac::ErrorKind kind) {
  switch (kind) {
    case dmac::ErrorKind::kConfiguration:
      return DMAC_ERR_CONFIG;
    case dmac::ErrorKind::kNumerical:
      return DMAC_ERR_NUMERICAL;
    case dmac::ErrorKind::kTraining:
      return DMAC_ERR_TRAINING;
    case dmac::ErrorKind::kIo:
      return DMAC_ERR_IO;
  }
  return DMAC_ERR_INTERNAL;
}

template <typename F>
dmac_status Guard(F&& f) {
  last_error.clear();
  try {
    f();
    return DMAC_OK;
  } catch (const dmac::Error& e) {
    last_error = e.what();
    if (e.step()) last_error += " (step " + std::to_string(*e.step()) + ")";
    return StatusOf(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return DMAC_ERR_INTERNAL;
}

dmac_status BadArgument(const char* what) {
  last_error = what;
  return DMAC_ERR_ARGUMENT;
}

template <typename Cmd>
dmac_status RunCommand(const dmac_config* config, char** summary, Cmd&& cmd) {
  if (config == nullptr) return BadArgument("config is null");
  return Guard([&] {
    const dmac::CommandOutput out = cmd(config->config);
    if (summary != nullptr) *summary = CopyString(out.message);
  });
}

}  // namespace

extern "C" {

const char* dmac_version(void) {
  static const std::string v = dmac::Version();
  return v.c_str();
}

const char* dmac_last_error(void) { return last_error.c_str(); }

dmac_status dmac_config_load(const char* path, dmac_config** out) {
  if (path == nullptr || out == nullptr) return BadArgument("null argument");
  *out = nullptr;
  return Guard([&] { *out = new dmac_config{dmac::LoadConfig(path)}; });
}

dmac_status dmac_config_parse(const char* json, dmac_config** out) {
  if (json == nullptr || out == nullptr) return BadArgument("null argument");
  *out = nullptr;
  return Guard([&] { *out = new dmac_config{dmac::ParseConfig(json)}; });
}

void dmac_config_free(dmac_config* config) { delete config; }

dmac_status dmac_config_set_seed(dmac_config* config,
                                 unsigned long long seed) {
  if (config == nullptr) return BadArgument("config is null");
  config->config.seed = seed;
  config->config.loop.seed = seed;
  return DMAC_OK;
}

dmac_status dmac_config_set_output_dir(dmac_config* config, const char* dir) {
  if (config == nullptr || dir == nullptr || *dir == '\0') {
    return BadArgument("config and a non-empty dir are required");
  }
  config->config.output_dir = dir;
  return DMAC_OK;
}

unsigned long long dmac_config_seed(const dmac_config* config) {
  return config == nullptr ? 0 : config->config.seed;
}

dmac_status dmac_config_to_json(const dmac_config* config, char** out) {
  if (config == nullptr || out == nullptr) return BadArgument("null argument");
  return Guard([&] { *out = CopyString(dmac::ConfigToJson(config->config)); });
}

void dmac_string_free(char* s) { std::free(s); }

dmac_status dmac_gen_dataset(const dmac_config* config, char** summary) {
  return RunCommand(config, summary, dmac::CmdGenDataset);
}

dmac_status dmac_train(const dmac_config* config, char** summary) {
  return RunCommand(config, summary, dmac::CmdTrain);
}

dmac_status dmac_run(const dmac_config* config, char** summary) {
  return RunCommand(config, summary, dmac::CmdRun);
}

dmac_status dmac_sweep(const dmac_config* config, unsigned int workers,
                       char** summary) {
  return RunCommand(config, summary, [workers](const dmac::RunConfig& c) {
    return dmac::CmdSweep(c, workers == 0 ? 1 : workers);
  });
}

}  // extern "C"
