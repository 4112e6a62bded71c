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

#include "mpru/bench.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "mpru/filter.hpp"
#include "mpru/projection.hpp"

#ifndef MPRU_BUILD_PROFILE
#define MPRU_BUILD_PROFILE "unknown"
#endif

namespace mpru::bench {

namespace {

using Clock = std::chrono::steady_clock;
using Json = nlohmann::ordered_json;

constexpr double kMinBatchSeconds = 2e-3;
constexpr ClassId kForget = 0;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double hi = v[mid];
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
}

// Median seconds per call. The first call is a discarded warm-up that also
// sizes the inner loop so each repetition lasts at least kMinBatchSeconds.
template <typename F>
double median_seconds(F&& f, int repetitions) {
  auto start = Clock::now();
  f();
  const double once = std::max(seconds_since(start), 1e-9);
  const long inner = std::max(1L, static_cast<long>(std::ceil(kMinBatchSeconds / once)));
  std::vector<double> per_call;
  per_call.reserve(static_cast<std::size_t>(repetitions));
  for (int r = 0; r < repetitions; ++r) {
    start = Clock::now();
    for (long i = 0; i < inner; ++i) f();
    per_call.push_back(seconds_since(start) / static_cast<double>(inner));
  }
  return median(std::move(per_call));
}

// Flat Dirichlet draw.
Eigen::VectorXd random_simplex(synth::CounterRng& rng, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = -std::log(rng.uniform());
  return v / v.sum();
}

double t_quantile_975(std::size_t df) {
  static constexpr std::array<double, 30> table = {
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
      2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
      2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (df == 0) return std::numeric_limits<double>::infinity();
  return df <= table.size() ? table[df - 1] : 1.96;
}

// Dense counterpart of redistribute(): forms the whole projected vector P c.
double dense_apply_sink(const Eigen::MatrixXd& p, const Eigen::MatrixXd& inputs,
                        const Eigen::VectorXd& ratio) {
  const Index n = inputs.rows();
  double sink = 0.0;
  Eigen::VectorXd projected(n);
  Eigen::VectorXd out(n - 1);
  for (Index s = 0; s < inputs.cols(); ++s) {
    const auto c = inputs.col(s);
    const double c_u = c(kForget);
    if (c_u >= 1.0 - kSaturation) {
      sink += ratio[0];
      continue;
    }
    projected.noalias() = p * c;
    const double p_u = std::clamp(projected(kForget), 0.0, 1.0);
    out = c.tail(n - 1);
    out = (c_u * ratio + ((1.0 - p_u) / (1.0 - c_u)) * out) / (c_u + 1.0 - p_u);
    sink += out[0] / out.sum();
  }
  return sink;
}

double fast_apply_sink(const ProjectionOperator<double>& projector, const Eigen::MatrixXd& inputs,
                       const Eigen::VectorXd& ratio) {
  double sink = 0.0;
  for (Index s = 0; s < inputs.cols(); ++s) {
    sink += redistribute(inputs.col(s), kForget, projector, ratio)[0];
  }
  return sink;
}

std::string read_first_line(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  if (in && std::getline(in, line)) return line;
  return {};
}

Json slope_json(const SlopeFit& f) {
  Json j;
  j["slope"] = f.slope;
  j["intercept"] = f.intercept;
  j["std_error"] = f.std_error;
  j["ci95"] = Json::array({f.ci_low, f.ci_high});
  j["points"] = f.points;
  return j;
}

}  // namespace

SlopeFit loglog_slope(std::span<const double> sizes, std::span<const double> times) {
  if (sizes.size() != times.size() || sizes.size() < 2) {
    throw Error(Errc::InvalidArgument, "slope fit needs at least two paired points");
  }
  const auto k = static_cast<Index>(sizes.size());
  Eigen::VectorXd x(k);
  Eigen::VectorXd y(k);
  for (Index i = 0; i < k; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (!(sizes[ui] > 0.0) || !(times[ui] > 0.0)) {
      throw Error(Errc::InvalidArgument, "slope fit needs positive sizes and times");
    }
    x[i] = std::log(sizes[ui]);
    y[i] = std::log(times[ui]);
  }
  const double xm = x.mean();
  const double ym = y.mean();
  const double sxx = (x.array() - xm).square().sum();
  if (!(sxx > 0.0)) throw Error(Errc::InvalidArgument, "slope fit needs distinct sizes");
  SlopeFit fit;
  fit.points = sizes.size();
  fit.slope = ((x.array() - xm) * (y.array() - ym)).sum() / sxx;
  fit.intercept = ym - fit.slope * xm;
  const std::size_t df = sizes.size() - 2;
  if (df > 0) {
    const double rss = (y.array() - fit.intercept - fit.slope * x.array()).square().sum();
    fit.std_error = std::sqrt(rss / static_cast<double>(df) / sxx);
  }
  const double half = df > 0 ? t_quantile_975(df) * fit.std_error : 0.0;
  fit.ci_low = fit.slope - half;
  fit.ci_high = fit.slope + half;
  return fit;
}

Environment describe_environment() {
  Environment env;
  std::ifstream cpuinfo("/proc/cpuinfo");
  std::string line;
  while (std::getline(cpuinfo, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        env.cpu = line.substr(line.find_first_not_of(" \t", colon + 1));
      }
      break;
    }
  }
  if (env.cpu.empty()) env.cpu = "unknown";
  env.build_profile = MPRU_BUILD_PROFILE;
#if defined(__VERSION__)
  env.compiler = __VERSION__;
#else
  env.compiler = "unknown";
#endif
  const std::string governor =
      read_first_line("/sys/devices/system/cpu/cpu0/cpufreq/scaling_governor");
  if (!governor.empty()) {
    env.governor = governor;
    env.frequency_scaling_detected = governor != "performance";
  }
  return env;
}

BenchReport measure_scaling(std::span<const int> n_list, std::size_t samples, int repetitions,
                            std::uint64_t seed) {
  if (n_list.size() < 5) throw Error(Errc::InvalidArgument, "n_list needs at least 5 sizes");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 3) throw Error(Errc::InvalidArgument, "every n must be >= 3");
    if (i > 0 && n_list[i] <= n_list[i - 1]) {
      throw Error(Errc::InvalidArgument, "n_list must be strictly ascending");
    }
  }
  if (samples < 1) throw Error(Errc::InvalidArgument, "samples must be >= 1");
  if (repetitions < 10) throw Error(Errc::InvalidArgument, "repetitions must be >= 10");

  BenchReport report;
  report.samples = samples;
  report.repetitions = repetitions;
  report.seed = seed;
  report.environment = describe_environment();

  volatile double sink = 0.0;
  for (const int n : n_list) {
    synth::CounterRng rng(seed, static_cast<std::uint64_t>(n), 0, 0);
    // Forget-set-like rows: mass concentrated on the forgotten class.
    Eigen::MatrixXd forget_rows(n, static_cast<Index>(samples));
    for (Index s = 0; s < forget_rows.cols(); ++s) {
      Eigen::VectorXd v = 0.3 * random_simplex(rng, n);
      v[kForget] += 0.7;
      forget_rows.col(s) = v;
    }
    Eigen::MatrixXd inputs(n, static_cast<Index>(samples));
    for (Index s = 0; s < inputs.cols(); ++s) inputs.col(s) = random_simplex(rng, n);

    const Eigen::VectorXd centroid = forget_rows.rowwise().mean();
    const auto projector = build_projector(centroid);
    const Eigen::VectorXd ratio = distribution_ratio(centroid, kForget);
    const Eigen::MatrixXd dense = build_projector_gram_schmidt(centroid);

    SizeTiming t;
    t.n = n;
    t.fit_fast_s = median_seconds(
        [&] {
          const Eigen::VectorXd c = forget_rows.rowwise().mean();
          const auto p = build_projector(c);
          const Eigen::VectorXd r = distribution_ratio(c, kForget);
          sink = sink + p.unit_direction()[0] + r[0];
        },
        repetitions);
    t.fit_gs_s = median_seconds(
        [&] { sink = sink + build_projector_gram_schmidt(centroid)(0, 0); }, repetitions);
    const double per_sample = 1e9 / static_cast<double>(samples);
    t.apply_per_sample_ns =
        per_sample *
        median_seconds([&] { sink = sink + fast_apply_sink(projector, inputs, ratio); },
                       repetitions);
    t.dense_apply_per_sample_ns =
        per_sample *
        median_seconds([&] { sink = sink + dense_apply_sink(dense, inputs, ratio); }, repetitions);
    report.timings.push_back(t);
  }

  std::vector<double> sizes;
  std::vector<double> fit_fast;
  std::vector<double> fit_gs;
  std::vector<double> apply;
  std::vector<double> dense_apply;
  for (const auto& t : report.timings) {
    sizes.push_back(t.n);
    fit_fast.push_back(t.fit_fast_s);
    fit_gs.push_back(t.fit_gs_s);
    apply.push_back(t.apply_per_sample_ns);
    dense_apply.push_back(t.dense_apply_per_sample_ns);
  }
  report.fit_fast_slope = loglog_slope(sizes, fit_fast);
  report.fit_gs_slope = loglog_slope(sizes, fit_gs);
  report.apply_slope = loglog_slope(sizes, apply);
  report.dense_apply_slope = loglog_slope(sizes, dense_apply);
  return report;
}

RetrainComparison compare_with_retraining(const synth::SynthConfig& config, ClassId forget_class,
                                          const synth::TrainerParams& params, int repetitions) {
  config.validate();
  if (repetitions < 1) throw Error(Errc::InvalidArgument, "repetitions must be >= 1");
  const ForgetSpec spec{forget_class};
  spec.check(config.n_classes);

  const auto data = synth::generate_blobs(config);
  const auto all = identity_label_space(config.n_classes);
  const auto retained = spec.retained_label_space(config.n_classes);
  const auto pretrained = synth::train_softmax(data.train, all, params);
  const auto preds = synth::predict_set(pretrained, data.test, config.n_classes);

  std::vector<double> retrain_s;
  std::vector<double> fit_s;
  std::vector<double> apply_s;
  for (int r = 0; r < repetitions; ++r) {
    auto start = Clock::now();
    const auto retrained = synth::train_softmax(data.train, retained, params);
    retrain_s.push_back(seconds_since(start));

    start = Clock::now();
    const auto filter = fit(preds, spec);
    fit_s.push_back(seconds_since(start));

    start = Clock::now();
    const auto unlearned = apply_batch(filter, preds, 1);
    apply_s.push_back(seconds_since(start));
    if (unlearned.size() != preds.size() || retrained.weights.size() == 0) {
      throw Error(Errc::InvalidArgument, "benchmark produced an empty result");
    }
  }
  RetrainComparison out;
  out.retrain_s = median(retrain_s);
  out.mpru_fit_s = median(fit_s);
  out.mpru_apply_s = median(apply_s);
  out.ratio = out.retrain_s / std::max(out.mpru_fit_s + out.mpru_apply_s, 1e-12);
  return out;
}

nlohmann::ordered_json report_to_json(const BenchReport& report) {
  Json doc;
  doc["format"] = "mpru-bench";
  doc["version"] = 1;
  doc["samples"] = report.samples;
  doc["repetitions"] = report.repetitions;
  doc["seed"] = report.seed;
  Json timings = Json::array();
  for (const auto& t : report.timings) {
    Json e;
    e["n"] = t.n;
    e["fit_fast_s"] = t.fit_fast_s;
    e["fit_gs_s"] = t.fit_gs_s;
    e["apply_per_sample_ns"] = t.apply_per_sample_ns;
    e["dense_apply_per_sample_ns"] = t.dense_apply_per_sample_ns;
    timings.push_back(std::move(e));
  }
  doc["timings"] = std::move(timings);
  Json slopes;
  slopes["fit_fast"] = slope_json(report.fit_fast_slope);
  slopes["fit_gs"] = slope_json(report.fit_gs_slope);
  slopes["apply"] = slope_json(report.apply_slope);
  slopes["dense_apply"] = slope_json(report.dense_apply_slope);
  doc["slopes"] = std::move(slopes);
  if (report.retrain) {
    Json r;
    r["retrain_s"] = report.retrain->retrain_s;
    r["mpru_fit_s"] = report.retrain->mpru_fit_s;
    r["mpru_apply_s"] = report.retrain->mpru_apply_s;
    r["ratio"] = report.retrain->ratio;
    doc["retrain"] = std::move(r);
  }
  Json env;
  env["cpu"] = report.environment.cpu;
  env["build_profile"] = report.environment.build_profile;
  env["compiler"] = report.environment.compiler;
  env["governor"] = report.environment.governor ? Json(*report.environment.governor) : Json();
  env["frequency_scaling_detected"] = report.environment.frequency_scaling_detected;
  doc["environment"] = std::move(env);
  return doc;
}

}  // namespace mpru::bench
