// Copyright 2026 The MPRU Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Scaling harness. Three paths are timed per label count n:
//   fit_fast   centroid + rank-one projector + distribution ratio
//   fit_gs     dense Gram-Schmidt projector construction
//   apply      per-sample filter via the rank-one projector (u path)
//   apply_dense per-sample filter computing the full dense P c first
// All timings are medians over repetitions after one discarded warm-up.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mpru/synth.hpp"

namespace mpru::bench {

struct SizeTiming {
  int n = 0;
  double fit_fast_s = 0.0;
  double fit_gs_s = 0.0;
  double apply_per_sample_ns = 0.0;
  double dense_apply_per_sample_ns = 0.0;
};

/// Least-squares fit of log(time) = intercept + slope * log(n).
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;   // 95% two-sided, Student t
  double ci_high = 0.0;
  std::size_t points = 0;
};

/// Throws InvalidArgument for fewer than 2 points or nonpositive values.
SlopeFit loglog_slope(std::span<const double> sizes, std::span<const double> times);

struct Environment {
  std::string cpu;
  std::string build_profile;
  std::string compiler;
  std::optional<std::string> governor;
  bool frequency_scaling_detected = false;
};

/// Best-effort description of the host (reads /proc and /sys on Linux).
Environment describe_environment();

struct RetrainComparison {
  double retrain_s = 0.0;
  double mpru_fit_s = 0.0;
  double mpru_apply_s = 0.0;
  double ratio = 0.0;  // retrain_s / (fit + apply)
};

struct BenchReport {
  std::vector<SizeTiming> timings;
  SlopeFit fit_fast_slope;
  SlopeFit fit_gs_slope;
  SlopeFit apply_slope;
  SlopeFit dense_apply_slope;
  std::optional<RetrainComparison> retrain;
  std::size_t samples = 0;
  int repetitions = 0;
  std::uint64_t seed = 0;
  Environment environment;
};

/// Requires n_list strictly ascending with >= 5 entries, each n >= 3,
/// samples >= 1 and repetitions >= 10; throws InvalidArgument otherwise.
BenchReport measure_scaling(std::span<const int> n_list, std::size_t samples, int repetitions,
                            std::uint64_t seed);

/// Median retraining time of the retained-only model against the median
/// fit + apply_batch time of the filter on the same pretrained predictions.
RetrainComparison compare_with_retraining(const synth::SynthConfig& config, ClassId forget_class,
                                          const synth::TrainerParams& params, int repetitions);

nlohmann::ordered_json report_to_json(const BenchReport& report);

}  // namespace mpru::bench
