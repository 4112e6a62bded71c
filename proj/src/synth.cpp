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

#include "mpru/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "mpru/projection.hpp"

namespace mpru::synth {

namespace {

constexpr std::uint64_t kTrainSplit = 0;
constexpr std::uint64_t kTestSplit = 1;

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  std::uint64_t s = h ^ (v + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2));
  return splitmix64(s);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string sample_id(const char* split, int cls, int index) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s-c%d-%06d", split, cls, index);
  return buf;
}

LabeledFeatures draw_split(const SynthConfig& config, const Eigen::MatrixXd& centers,
                           std::uint64_t split, int per_class) {
  const char* name = split == kTrainSplit ? "train" : "test";
  LabeledFeatures out;
  const Index rows = static_cast<Index>(config.n_classes) * per_class;
  out.x.resize(rows, config.dim);
  out.y.reserve(static_cast<std::size_t>(rows));
  out.ids.reserve(static_cast<std::size_t>(rows));
  Index row = 0;
  for (int k = 0; k < config.n_classes; ++k) {
    for (int i = 0; i < per_class; ++i, ++row) {
      CounterRng rng(config.seed, static_cast<std::uint64_t>(k), split,
                     static_cast<std::uint64_t>(i));
      for (int d = 0; d < config.dim; ++d) {
        out.x(row, d) = centers(k, d) + config.noise_sigma * rng.normal();
      }
      out.y.push_back(k);
      out.ids.push_back(sample_id(name, k, i));
    }
  }
  return out;
}

}  // namespace

void SynthConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(Errc::InvalidArgument, what); };
  if (n_classes < 3) fail("n_classes must be >= 3");
  if (dim < n_classes) fail("dim must be >= n_classes (centers sit on orthogonal axes)");
  if (per_class_train < 1 || per_class_test < 1) fail("per-class sample counts must be >= 1");
  if (!(class_separation >= 0.0)) fail("class_separation must be >= 0");
  if (!(noise_sigma >= 0.0)) fail("noise_sigma must be >= 0");
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c)
    : state_(mix(mix(mix(mix(0x6A09E667F3BCC909ULL, seed), a), b), c)) {}

std::uint64_t CounterRng::next_u64() { return splitmix64(state_); }

double CounterRng::uniform() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

Eigen::MatrixXd blob_centers(const SynthConfig& config) {
  config.validate();
  Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(config.n_classes, config.dim);
  const double scale = config.class_separation / std::numbers::sqrt2;
  for (int k = 0; k < config.n_classes; ++k) centers(k, k) = scale;
  return centers;
}

SynthDataset generate_blobs(const SynthConfig& config) {
  const Eigen::MatrixXd centers = blob_centers(config);
  return {config.n_classes, draw_split(config, centers, kTrainSplit, config.per_class_train),
          draw_split(config, centers, kTestSplit, config.per_class_test)};
}

Eigen::MatrixXd softmax_rows(const Eigen::Ref<const Eigen::MatrixXd>& logits) {
  Eigen::MatrixXd p = logits.colwise() - logits.rowwise().maxCoeff();
  p = p.array().exp().matrix();
  p.array().colwise() /= p.rowwise().sum().array();
  return p;
}

LossGradient softmax_loss_gradient(const Eigen::Ref<const Eigen::MatrixXd>& weights,
                                   const Eigen::Ref<const Eigen::VectorXd>& bias,
                                   const Eigen::Ref<const Eigen::MatrixXd>& x,
                                   std::span<const int> targets) {
  const Index n = x.rows();
  Eigen::MatrixXd logits = x * weights.transpose();
  logits.rowwise() += bias.transpose();
  const Eigen::VectorXd row_max = logits.rowwise().maxCoeff();
  const Eigen::VectorXd log_norm =
      ((logits.colwise() - row_max).array().exp().rowwise().sum().log()).matrix() + row_max;

  Eigen::MatrixXd delta = softmax_rows(logits);
  double loss = 0.0;
  for (Index i = 0; i < n; ++i) {
    const int t = targets[static_cast<std::size_t>(i)];
    loss += log_norm[i] - logits(i, t);
    delta(i, t) -= 1.0;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  return {loss * inv_n, delta.transpose() * x * inv_n, delta.colwise().sum().transpose() * inv_n};
}

TrainedSoftmax train_softmax(const LabeledFeatures& data, std::span<const ClassId> included_labels,
                             const TrainerParams& params) {
  std::vector<ClassId> labels(included_labels.begin(), included_labels.end());
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  if (labels.size() < 2) throw Error(Errc::InvalidArgument, "training needs at least two labels");
  if (params.epochs < 1 || !(params.learning_rate > 0.0)) {
    throw Error(Errc::InvalidArgument, "epochs and learning rate must be positive");
  }

  std::vector<Index> rows;
  std::vector<int> targets;
  std::vector<std::size_t> per_label(labels.size(), 0);
  for (Index i = 0; i < data.size(); ++i) {
    const auto it = std::lower_bound(labels.begin(), labels.end(), data.y[static_cast<std::size_t>(i)]);
    if (it == labels.end() || *it != data.y[static_cast<std::size_t>(i)]) continue;
    const auto pos = static_cast<std::size_t>(it - labels.begin());
    rows.push_back(i);
    targets.push_back(static_cast<int>(pos));
    ++per_label[pos];
  }
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (per_label[k] == 0) {
      throw Error(Errc::NoDataForLabel, "no training rows for label " + std::to_string(labels[k]));
    }
  }
  const Eigen::MatrixXd x = data.x(rows, Eigen::all);

  const auto k = static_cast<Index>(labels.size());
  TrainedSoftmax model;
  model.weights = Eigen::MatrixXd::Zero(k, data.x.cols());
  model.bias = Eigen::VectorXd::Zero(k);
  model.label_space = labels;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    const LossGradient g = softmax_loss_gradient(model.weights, model.bias, x, targets);
    model.weights -= params.learning_rate * g.grad_weights;
    model.bias -= params.learning_rate * g.grad_bias;
  }
  model.meta = {params.epochs, params.learning_rate,
                softmax_loss_gradient(model.weights, model.bias, x, targets).loss, params.seed};
  return model;
}

PredictionSet predict_set(const TrainedSoftmax& model, const LabeledFeatures& data, int n_labels) {
  if (data.x.cols() != model.weights.cols()) {
    throw Error(Errc::DimensionMismatch, "features have " + std::to_string(data.x.cols()) +
                                             " columns, model expects " +
                                             std::to_string(model.weights.cols()));
  }
  Eigen::MatrixXd logits = data.x * model.weights.transpose();
  logits.rowwise() += model.bias.transpose();
  const Eigen::MatrixXd probs = softmax_rows(logits);
  std::vector<PredictionRecord> records;
  records.reserve(static_cast<std::size_t>(data.size()));
  for (Index i = 0; i < data.size(); ++i) {
    records.push_back({data.ids[static_cast<std::size_t>(i)], data.y[static_cast<std::size_t>(i)],
                       ConfidenceVector::from_nonnegative(probs.row(i).transpose())});
  }
  return PredictionSet(n_labels, model.label_space, std::move(records));
}

PredictionSet oracle_mpru(const PredictionSet& full_preds, const ForgetSpec& spec) {
  const int n = full_preds.n_labels();
  spec.check(n);
  if (full_preds.dim() != n) throw Error(Errc::DimensionMismatch, "oracle needs full predictions");
  const Index j = spec.forget_class;

  // Centroid by naive accumulation over the forget records.
  std::vector<double> sum(static_cast<std::size_t>(n), 0.0);
  std::size_t count = 0;
  for (const auto& rec : full_preds) {
    if (rec.label != spec.forget_class) continue;
    for (Index i = 0; i < n; ++i) sum[static_cast<std::size_t>(i)] += rec.confidence[i];
    ++count;
  }
  if (count == 0) throw Error(Errc::EmptyForgetSet, "no forget-set predictions");
  Eigen::VectorXd centroid(n);
  for (Index i = 0; i < n; ++i) centroid[i] = sum[static_cast<std::size_t>(i)] / static_cast<double>(count);

  const Eigen::MatrixXd projector = build_projector_gram_schmidt(centroid);

  std::vector<double> ratio;
  double ratio_mass = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (i == j) continue;
    ratio.push_back(std::max(centroid[i], 0.0));
    ratio_mass += ratio.back();
  }
  for (double& r : ratio) r = ratio_mass < 1e-12 ? 1.0 / static_cast<double>(n - 1) : r / ratio_mass;

  std::vector<PredictionRecord> out;
  out.reserve(full_preds.size());
  for (const auto& rec : full_preds) {
    const Eigen::VectorXd& c = rec.confidence.values();
    Eigen::VectorXd result(n - 1);
    const double c_u = c[j];
    if (c_u >= 1.0 - kSaturation) {
      for (Index i = 0; i < n - 1; ++i) result[i] = ratio[static_cast<std::size_t>(i)];
    } else {
      double projected = 0.0;
      for (Index k = 0; k < n; ++k) projected += projector(j, k) * c[k];
      projected = std::min(std::max(projected, 0.0), 1.0);
      const double denominator = c_u + 1.0 - projected;
      Index o = 0;
      for (Index i = 0; i < n; ++i) {
        if (i == j) continue;
        result[o] = (c_u * ratio[static_cast<std::size_t>(o)] +
                     (1.0 - projected) / (1.0 - c_u) * c[i]) /
                    denominator;
        ++o;
      }
      double total = 0.0;
      for (Index i = 0; i < n - 1; ++i) total += result[i];
      for (Index i = 0; i < n - 1; ++i) result[i] /= total;
    }
    out.push_back({rec.id, rec.label, ConfidenceVector::from_nonnegative(std::move(result))});
  }
  return PredictionSet(n, spec.retained_label_space(n), std::move(out));
}

ExperimentResult run_experiment(const SynthConfig& config, ClassId forget_class,
                                const TrainerParams& params) {
  config.validate();
  const ForgetSpec spec{forget_class};
  spec.check(config.n_classes);
  const SynthDataset data = generate_blobs(config);
  const std::vector<ClassId> all = identity_label_space(config.n_classes);
  const std::vector<ClassId> retained = spec.retained_label_space(config.n_classes);

  ExperimentRuntimes times;
  auto start = std::chrono::steady_clock::now();
  const TrainedSoftmax pretrained_model = train_softmax(data.train, all, params);
  times.pretrain_s = seconds_since(start);

  start = std::chrono::steady_clock::now();
  const TrainedSoftmax retrained_model = train_softmax(data.train, retained, params);
  times.retrain_s = seconds_since(start);

  PredictionSet pretrained = predict_set(pretrained_model, data.test, config.n_classes);
  PredictionSet retrained = predict_set(retrained_model, data.test, config.n_classes);

  start = std::chrono::steady_clock::now();
  FilterModel filter = fit(pretrained, spec);
  times.fit_s = seconds_since(start);

  start = std::chrono::steady_clock::now();
  PredictionSet unlearned = apply_batch(filter, pretrained);
  times.apply_s = seconds_since(start);

  EvaluationReport report = evaluate(pretrained, retrained, unlearned, spec);
  report.runtimes = {{"pretrain_s", times.pretrain_s},
                     {"retrain_s", times.retrain_s},
                     {"fit_s", times.fit_s},
                     {"apply_s", times.apply_s}};
  return {std::move(report), std::move(filter), times, std::move(pretrained),
          std::move(retrained), std::move(unlearned)};
}

}  // namespace mpru::synth
