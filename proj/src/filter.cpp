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

#include "mpru/filter.hpp"

#include <cmath>
#include <sstream>
#include <thread>

namespace mpru {

namespace {

Index argmax_position(const Eigen::VectorXd& v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

FilterModel::FilterModel(ForgetSpec spec, int n_labels, Centroid centroid,
                         Eigen::VectorXd distribution_ratio, Diagnostics diagnostics)
    : spec_(spec),
      n_(n_labels),
      centroid_(std::move(centroid)),
      projector_(mpru::build_projector(centroid_.values)),
      ratio_(std::move(distribution_ratio)),
      diagnostics_(diagnostics) {
  if (n_ < 2) throw Error(Errc::InvalidArgument, "filter needs at least 2 labels");
  spec_.check(n_);
  if (centroid_.values.size() != n_) {
    throw Error(Errc::DimensionMismatch, "centroid has " +
                                             std::to_string(centroid_.values.size()) +
                                             " entries, expected " + std::to_string(n_));
  }
  if (centroid_.n_samples < 1) throw Error(Errc::InvalidArgument, "centroid has no samples");
  if (ratio_.size() != n_ - 1) {
    throw Error(Errc::DimensionMismatch, "distribution ratio has " +
                                             std::to_string(ratio_.size()) +
                                             " entries, expected " + std::to_string(n_ - 1));
  }
  if (ratio_.minCoeff() < 0.0 || std::abs(ratio_.sum() - 1.0) > 1e-9) {
    throw Error(Errc::InvalidArgument, "distribution ratio is not on the simplex");
  }
  retained_ = spec_.retained_label_space(n_);
}

Centroid compute_centroid(const PredictionSet& forget_preds) {
  if (forget_preds.empty()) throw Error(Errc::EmptyForgetSet, "no forget-set predictions");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(forget_preds.dim());
  for (const auto& rec : forget_preds) sum += rec.confidence.values();
  const auto count = forget_preds.size();
  return {sum / static_cast<double>(count), count};
}

ProjectionOperator<double> build_projector(const Centroid& centroid) {
  return build_projector(centroid.values);
}

Eigen::MatrixXd build_projector_gram_schmidt(const Centroid& centroid) {
  return build_projector_gram_schmidt(centroid.values);
}

Eigen::VectorXd compute_distribution_ratio(const Centroid& centroid, const ForgetSpec& spec) {
  spec.check(static_cast<int>(centroid.values.size()));
  return distribution_ratio(centroid.values, spec.forget_class);
}

Diagnostics diagnose(const PredictionSet& forget_preds, const ForgetSpec& spec) {
  if (forget_preds.empty()) throw Error(Errc::EmptyForgetSet, "no forget-set predictions");
  spec.check(forget_preds.n_labels());
  std::size_t correct = 0;
  double top_sum = 0.0;
  for (const auto& rec : forget_preds) {
    const Index pos = argmax_position(rec.confidence.values());
    if (forget_preds.label_space()[static_cast<std::size_t>(pos)] == spec.forget_class) {
      ++correct;
      top_sum += rec.confidence[pos];
    }
  }
  Diagnostics d;
  d.n_samples = forget_preds.size();
  d.forget_accuracy = static_cast<double>(correct) / static_cast<double>(d.n_samples);
  d.mean_top_confidence = correct == 0 ? 0.0 : top_sum / static_cast<double>(correct);
  d.assumption_met =
      d.forget_accuracy >= kMinForgetAccuracy && d.mean_top_confidence >= kMinTopConfidence;
  return d;
}

FilterModel fit(const PredictionSet& full_preds, const ForgetSpec& spec,
                const FitOptions& options) {
  spec.check(full_preds.n_labels());
  if (full_preds.dim() != full_preds.n_labels()) {
    throw Error(Errc::DimensionMismatch,
                "fit needs full-dimensional predictions (" + std::to_string(full_preds.n_labels()) +
                    " columns), got " + std::to_string(full_preds.dim()));
  }
  const auto split = split_by_forget(full_preds, spec);
  Centroid centroid = compute_centroid(split.forget);
  Eigen::VectorXd ratio = compute_distribution_ratio(centroid, spec);
  const Diagnostics diagnostics = diagnose(split.forget, spec);
  if (options.require_assumptions && !diagnostics.assumption_met) {
    std::ostringstream os;
    os << "forget accuracy " << diagnostics.forget_accuracy << " (need >= "
       << kMinForgetAccuracy << "), mean top confidence " << diagnostics.mean_top_confidence
       << " (need >= " << kMinTopConfidence << ")";
    throw Error(Errc::AssumptionViolated, os.str());
  }
  return FilterModel(spec, full_preds.n_labels(), std::move(centroid), std::move(ratio),
                     diagnostics);
}

Eigen::VectorXd apply(const FilterModel& model, const Eigen::Ref<const Eigen::VectorXd>& c) {
  if (c.size() != model.n()) {
    throw Error(Errc::DimensionMismatch, "expected " + std::to_string(model.n()) +
                                             " entries, got " + std::to_string(c.size()));
  }
  return redistribute(c, model.forget_class(), model.projector(), model.distribution_ratio());
}

ConfidenceVector apply(const FilterModel& model, const ConfidenceVector& c) {
  return ConfidenceVector::from_nonnegative(apply(model, c.values()));
}

PredictionSet apply_batch(const FilterModel& model, const PredictionSet& set, unsigned threads) {
  if (set.dim() != model.n()) {
    throw Error(Errc::DimensionMismatch, "filter expects " + std::to_string(model.n()) +
                                             " columns, set has " + std::to_string(set.dim()));
  }
  if (set.label_space() != model.label_space()) {
    throw Error(Errc::DimensionMismatch, "set label space is not the filter's full label space");
  }
  const std::size_t count = set.size();
  std::vector<Eigen::VectorXd> outputs(count);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) outputs[i] = apply(model, set[i].confidence.values());
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(threads, std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    work(0, count);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(count, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(work, begin, end);
    }
  }

  std::vector<PredictionRecord> records;
  records.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    records.push_back({set[i].id, set[i].label,
                       ConfidenceVector::from_nonnegative(std::move(outputs[i]))});
  }
  return PredictionSet(set.n_labels(), model.retained_label_space(), std::move(records));
}

}  // namespace mpru
