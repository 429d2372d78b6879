#include "dmac/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "dmac/error.hpp"
#include "dmac/format.hpp"

namespace dmac {

std::string ParameterName(SweepParameter p) {
  switch (p) {
    case SweepParameter::kRThetaScale:
      return "r_theta_scale";
    case SweepParameter::kLambda:
      return "lambda";
    case SweepParameter::kR1Scale:
      return "r1_scale";
    case SweepParameter::kR2:
      return "r2";
  }
  return "unknown";
}

SweepParameter ParseSweepParameter(const std::string& name) {
  for (auto p : {SweepParameter::kRThetaScale, SweepParameter::kLambda,
                 SweepParameter::kR1Scale, SweepParameter::kR2}) {
    if (ParameterName(p) == name) return p;
  }
  throw ConfigurationError(
      "sweep.parameter must be one of r_theta_scale, lambda, r1_scale, r2; "
      "got '" + name + "'");
}

LoopConfig WithParameter(const LoopConfig& base, SweepParameter p,
                         double value) {
  LoopConfig c = base;
  switch (p) {
    case SweepParameter::kRThetaScale:
      c.hyperparams.r_theta_scale = value;
      break;
    case SweepParameter::kLambda:
      c.hyperparams.lambda = value;
      break;
    case SweepParameter::kR1Scale:
      c.hyperparams.r1_scale = value;
      break;
    case SweepParameter::kR2:
      c.hyperparams.r2 = value;
      break;
  }
  return c;
}

void SweepSpec::Validate() const {
  if (values.empty()) {
    throw ConfigurationError("sweep.values must not be empty");
  }
  for (double v : values) WithParameter(base, parameter, v).Validate();
}

SweepRecord Summarize(const std::vector<StepRecord>& log, std::size_t horizon,
                      double settle_tolerance) {
  SweepRecord rec;
  rec.finite = log.size() == horizon;
  if (log.empty()) {
    rec.terminal_abs_z = std::numeric_limits<double>::quiet_NaN();
    rec.peak_abs_y = std::numeric_limits<double>::quiet_NaN();
    return rec;
  }
  const std::size_t tail =
      std::max<std::size_t>(1, (log.size() + 9) / 10);
  double sum = 0.0;
  for (std::size_t i = log.size() - tail; i < log.size(); ++i) {
    sum += std::abs(log[i].z);
  }
  rec.terminal_abs_z = sum / static_cast<double>(tail);
  for (const auto& r : log) {
    rec.peak_abs_y = std::max(rec.peak_abs_y, std::abs(r.y));
    if (!std::isfinite(r.y) || !std::isfinite(r.z) || !std::isfinite(r.u)) {
      rec.finite = false;
    }
  }
  // Walk back from the end while the error stays inside the band.
  std::size_t first_inside = log.size();
  while (first_inside > 0) {
    const StepRecord& r = log[first_inside - 1];
    if (!(std::abs(r.z) < settle_tolerance * std::abs(r.r))) break;
    --first_inside;
  }
  if (rec.finite && first_inside < log.size()) {
    rec.settling_step = log[first_inside].k;
  }
  return rec;
}

std::vector<SweepSpec> DefaultSweeps(const LoopConfig& base) {
  return {
      {SweepParameter::kRThetaScale, {1.0, 1e1, 1e2, 1e3, 1e4}, base},
      {SweepParameter::kLambda, {0.9, 0.95, 0.99, 0.995, 0.999}, base},
      {SweepParameter::kR1Scale, {1e-2, 1e-1, 1.0, 1e1, 1e2}, base},
      {SweepParameter::kR2, {1e-2, 1e-1, 1.0, 1e1, 1e2}, base},
  };
}

std::vector<SweepRecord> RunSweep(const SweepSpec& spec, const Plant& plant,
                                  const OutputModel& output,
                                  const std::optional<std::string>& out_dir,
                                  std::size_t workers) {
  spec.Validate();
  if (out_dir) std::filesystem::create_directories(*out_dir);
  std::vector<SweepRecord> records(spec.values.size());

  auto run_one = [&](std::size_t i) {
    const LoopConfig config =
        WithParameter(spec.base, spec.parameter, spec.values[i]);
    const std::string name =
        ParameterName(spec.parameter) + "_" + std::to_string(i) + ".csv";
    std::vector<StepRecord> log;
    std::ofstream os;
    if (out_dir) {
      os.open(std::filesystem::path(*out_dir) / name, std::ios::binary);
      if (!os) throw Error(ErrorKind::kIo, "cannot write " + name);
      os << LogHeader() << '\n';
    }
    try {
      Run(config, plant, output, [&](const StepRecord& r) {
        log.push_back(r);
        if (os.is_open()) WriteLogRow(os, r);
      });
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNumerical) throw;
    }
    SweepRecord rec = Summarize(log, config.horizon);
    rec.parameter = spec.parameter;
    rec.value = spec.values[i];
    if (out_dir) rec.log_file = name;
    records[i] = std::move(rec);
  };

  workers = std::clamp<std::size_t>(workers, 1, spec.values.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < spec.values.size(); ++i) run_one(i);
    return records;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < spec.values.size(); i = next++) {
          run_one(i);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return records;
}

std::string SummaryHeader() {
  return "param,value,terminal_abs_z_N,peak_abs_y_N,settling_step,finite";
}

void WriteSummary(const std::string& path,
                  const std::vector<SweepRecord>& records) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::kIo, "cannot open " + path + " for writing");
  os << SummaryHeader() << '\n';
  for (const auto& r : records) {
    os << ParameterName(r.parameter) << ',' << FormatDouble(r.value) << ','
       << FormatDouble(r.terminal_abs_z) << ',' << FormatDouble(r.peak_abs_y)
       << ','
       << (r.settling_step ? std::to_string(*r.settling_step) : "-1") << ','
       << (r.finite ? 1 : 0) << '\n';
  }
}

}  // namespace dmac
