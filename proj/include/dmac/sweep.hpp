#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dmac/loop.hpp"

namespace dmac {

enum class SweepParameter {
  kRThetaScale,
  kLambda,
  kR1Scale,
  kR2,
};

/// Config-file spelling: r_theta_scale, lambda, r1_scale, r2.
std::string ParameterName(SweepParameter p);
SweepParameter ParseSweepParameter(const std::string& name);

/// One-at-a-time sweep: `parameter` takes each of `values` while every
/// other setting stays at `base`.
struct SweepSpec {
  SweepParameter parameter = SweepParameter::kRThetaScale;
  std::vector<double> values;
  LoopConfig base;

  void Validate() const;
};

/// base with the swept parameter replaced by `value`.
LoopConfig WithParameter(const LoopConfig& base, SweepParameter p,
                         double value);

struct SweepRecord {
  SweepParameter parameter = SweepParameter::kRThetaScale;
  double value = 0.0;
  double terminal_abs_z = 0.0;  // mean |z| over the last 10% of steps, N
  double peak_abs_y = 0.0;      // N
  std::optional<std::size_t> settling_step;  // empty when unsettled
  bool finite = true;
  std::string log_file;  // relative to the sweep output directory
};

/// Metrics of one closed-loop log. A log shorter than `horizon` (an aborted
/// run) is reported as not finite.
SweepRecord Summarize(const std::vector<StepRecord>& log, std::size_t horizon,
                      double settle_tolerance = 0.02);

/// The four default grids over r_theta_scale, lambda, r1_scale and r2.
std::vector<SweepSpec> DefaultSweeps(const LoopConfig& base);

/// Runs every value of `spec` with the base seed. When `out_dir` is set,
/// each run is logged to `<out_dir>/<param>_<index>.csv`. Failed runs are
/// recorded with finite = false; the sweep continues.
std::vector<SweepRecord> RunSweep(const SweepSpec& spec, const Plant& plant,
                                  const OutputModel& output,
                                  const std::optional<std::string>& out_dir,
                                  std::size_t workers = 1);

std::string SummaryHeader();
void WriteSummary(const std::string& path,
                  const std::vector<SweepRecord>& records);

}  // namespace dmac
