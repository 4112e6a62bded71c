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

// Desk-scale experiment engine: Gaussian blobs, a linear softmax classifier
// standing in for the pretrained and retrained models, an independent dense
// re-implementation of the filter, and the end-to-end experiment runner.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mpru/core.hpp"
#include "mpru/filter.hpp"
#include "mpru/metrics.hpp"

namespace mpru::synth {

/// Seeds used for every multi-seed experiment series.
inline constexpr std::array<std::uint64_t, 10> kReferenceSeeds = {42,  602, 311, 637, 800,
                                                              543, 969, 122, 336, 93};

struct SynthConfig {
  int n_classes = 6;
  int dim = 20;
  int per_class_train = 500;
  int per_class_test = 200;
  double class_separation = 4.0;  // distance between any two blob centers
  double noise_sigma = 1.0;
  std::uint64_t seed = 42;

  /// Throws InvalidArgument. Requires 3 <= n_classes <= dim so that centers
  /// can sit on orthogonal axes.
  void validate() const;
};

/// Samples as rows.
struct LabeledFeatures {
  Eigen::MatrixXd x;
  std::vector<ClassId> y;
  std::vector<std::string> ids;

  Index size() const noexcept { return x.rows(); }
};

struct SynthDataset {
  int n_classes = 0;
  LabeledFeatures train;
  LabeledFeatures test;
};

/// Deterministic, stateless generator: every draw is a pure function of its
/// key, so sample content does not depend on generation order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);

  std::uint64_t next_u64();
  /// Uniform on (0, 1].
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Row k is class k's center: (separation / sqrt 2) * e_k.
Eigen::MatrixXd blob_centers(const SynthConfig& config);

SynthDataset generate_blobs(const SynthConfig& config);

struct TrainerParams {
  int epochs = 300;
  double learning_rate = 0.5;
  std::uint64_t seed = 0;  // recorded only; training starts from zero weights
};

struct TrainingMeta {
  int epochs = 0;
  double learning_rate = 0.0;
  double final_loss = 0.0;
  std::uint64_t seed = 0;
};

struct TrainedSoftmax {
  Eigen::MatrixXd weights;  // classes x dim
  Eigen::VectorXd bias;
  std::vector<ClassId> label_space;
  TrainingMeta meta;
};

struct LossGradient {
  double loss = 0.0;
  Eigen::MatrixXd grad_weights;
  Eigen::VectorXd grad_bias;
};

/// Row-wise softmax with max subtraction.
Eigen::MatrixXd softmax_rows(const Eigen::Ref<const Eigen::MatrixXd>& logits);

/// Mean multinomial cross-entropy and its gradient; `targets` are column
/// positions in [0, weights.rows()).
LossGradient softmax_loss_gradient(const Eigen::Ref<const Eigen::MatrixXd>& weights,
                                   const Eigen::Ref<const Eigen::VectorXd>& bias,
                                   const Eigen::Ref<const Eigen::MatrixXd>& x,
                                   std::span<const int> targets);

/// Full-batch gradient descent from zero on the rows whose label is in
/// `included_labels`. Throws InvalidArgument for fewer than two labels and
/// NoDataForLabel when a label has no rows.
TrainedSoftmax train_softmax(const LabeledFeatures& data, std::span<const ClassId> included_labels,
                             const TrainerParams& params);

/// softmax(W x + b) per row, as a prediction set over the model's label space.
PredictionSet predict_set(const TrainedSoftmax& model, const LabeledFeatures& data, int n_labels);

/// Dense reference pipeline (Gram-Schmidt projector, explicit loops) used to
/// cross-check filter::fit + apply_batch.
PredictionSet oracle_mpru(const PredictionSet& full_preds, const ForgetSpec& spec);

struct ExperimentRuntimes {
  double pretrain_s = 0.0;
  double retrain_s = 0.0;
  double fit_s = 0.0;
  double apply_s = 0.0;
};

struct ExperimentResult {
  EvaluationReport report;
  FilterModel filter;
  ExperimentRuntimes runtimes;
  PredictionSet pretrained;
  PredictionSet retrained;
  PredictionSet unlearned;
};

/// Trains the full and retained-only models, fits the filter on the full
/// model's test-set predictions, applies it to the whole test set, and
/// evaluates all three against each other.
ExperimentResult run_experiment(const SynthConfig& config, ClassId forget_class,
                                const TrainerParams& params = {});

}  // namespace mpru::synth
