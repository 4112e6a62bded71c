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

#include "mpru/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace mpru {

namespace {

void check_paired(const PredictionSet& a, const PredictionSet& b) {
  if (a.dim() != b.dim()) {
    throw Error(Errc::DimensionMismatch, "paired sets have " + std::to_string(a.dim()) +
                                             " and " + std::to_string(b.dim()) + " columns");
  }
  if (a.size() != b.size()) {
    throw Error(Errc::IdMismatch, "paired sets have " + std::to_string(a.size()) + " and " +
                                      std::to_string(b.size()) + " records");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].id != b[i].id) {
      throw Error(Errc::IdMismatch, "record " + std::to_string(i) + ": '" + a[i].id +
                                        "' vs '" + b[i].id + "'");
    }
  }
}

double mean_of(std::span<const double> values) {
  return values.empty() ? 0.0 : pairwise_sum(values) / static_cast<double>(values.size());
}

Eigen::VectorXd floored(const Eigen::Ref<const Eigen::VectorXd>& v) {
  Eigen::VectorXd out = v.cwiseMax(kKlFloor).cwiseMin(1.0);
  return out / out.sum();
}

}  // namespace

bool EvaluationReport::same_metrics(const EvaluationReport& other) const {
  return forget_class == other.forget_class && n_forget == other.n_forget &&
         n_retain == other.n_retain && accuracy == other.accuracy && kl == other.kl &&
         mse == other.mse && histograms == other.histograms;
}

ClassId argmax_label(const Eigen::Ref<const Eigen::VectorXd>& c,
                     std::span<const ClassId> label_space) {
  if (c.size() == 0 || static_cast<std::size_t>(c.size()) != label_space.size()) {
    throw Error(Errc::DimensionMismatch, "argmax needs a nonempty vector matching its label space");
  }
  Index best = 0;
  for (Index i = 1; i < c.size(); ++i) {
    if (c[i] > c[best]) best = i;
  }
  return label_space[static_cast<std::size_t>(best)];
}

double accuracy(const PredictionSet& set, std::span<const ClassId> restrict_to) {
  std::size_t total = 0;
  std::size_t correct = 0;
  for (const auto& rec : set) {
    if (std::find(restrict_to.begin(), restrict_to.end(), rec.label) == restrict_to.end()) continue;
    ++total;
    if (argmax_label(rec.confidence.values(), set.label_space()) == rec.label) ++correct;
  }
  if (total == 0) throw Error(Errc::EmptyRestriction, "no record has a label in the restriction");
  return static_cast<double>(correct) / static_cast<double>(total);
}

AccuracyDifferences accuracy_differences(double acc_unlearned, double acc_pretrained,
                                         double acc_retrained) {
  return {std::abs(acc_unlearned - acc_pretrained), std::abs(acc_unlearned - acc_retrained)};
}

Eigen::VectorXd align_to_retained(const Eigen::Ref<const Eigen::VectorXd>& c,
                                  const ForgetSpec& spec) {
  const Index n = c.size();
  spec.check(static_cast<int>(n));
  const Index j = spec.forget_class;
  Eigen::VectorXd out(n - 1);
  out << c.head(j), c.tail(n - 1 - j);
  const double mass = out.sum();
  if (mass < 1e-12) {
    out.setConstant(1.0 / static_cast<double>(n - 1));
  } else {
    out /= mass;
  }
  return out;
}

PredictionSet align_to_retained(const PredictionSet& full, const ForgetSpec& spec) {
  if (full.dim() != full.n_labels()) {
    throw Error(Errc::DimensionMismatch, "alignment needs a full-dimensional set");
  }
  std::vector<PredictionRecord> records;
  records.reserve(full.size());
  for (const auto& rec : full) {
    records.push_back({rec.id, rec.label, ConfidenceVector::from_nonnegative(
                                              align_to_retained(rec.confidence.values(), spec))});
  }
  return PredictionSet(full.n_labels(), spec.retained_label_space(full.n_labels()),
                       std::move(records));
}

double kl_per_sample(const Eigen::Ref<const Eigen::VectorXd>& p,
                     const Eigen::Ref<const Eigen::VectorXd>& q) {
  if (p.size() != q.size()) {
    throw Error(Errc::DimensionMismatch, "KL operands have " + std::to_string(p.size()) +
                                             " and " + std::to_string(q.size()) + " entries");
  }
  const Eigen::VectorXd ps = floored(p);
  const Eigen::VectorXd qs = floored(q);
  double kl = 0.0;
  for (Index i = 0; i < ps.size(); ++i) kl += ps[i] * std::log(ps[i] / qs[i]);
  return std::max(kl, 0.0);
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 8;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::vector<double> kl_per_record(const PredictionSet& a, const PredictionSet& b) {
  check_paired(a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = kl_per_sample(a[i].confidence.values(), b[i].confidence.values());
  }
  return out;
}

double mean_kl(const PredictionSet& a, const PredictionSet& b) {
  return mean_of(kl_per_record(a, b));
}

std::vector<double> squared_distances(const PredictionSet& a, const PredictionSet& b) {
  check_paired(a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = (a[i].confidence.values() - b[i].confidence.values()).squaredNorm();
  }
  return out;
}

MSEReport mse_stats(const PredictionSet& a, const PredictionSet& b) {
  const std::vector<double> d = squared_distances(a, b);
  MSEReport r;
  if (d.empty()) return r;
  r.mean = mean_of(d);
  std::vector<double> dev(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) dev[i] = (d[i] - r.mean) * (d[i] - r.mean);
  r.std = std::sqrt(mean_of(dev));
  r.max = *std::max_element(d.begin(), d.end());
  const auto below = std::count_if(d.begin(), d.end(), [&](double x) { return x < r.mean; });
  r.pct_below_mean = 100.0 * static_cast<double>(below) / static_cast<double>(d.size());
  return r;
}

Histogram prediction_histogram(const PredictionSet& set) {
  Histogram h;
  for (ClassId id : set.label_space()) h[id] = 0;
  for (const auto& rec : set) ++h[argmax_label(rec.confidence.values(), set.label_space())];
  return h;
}

bool check_statistical_closeness(const KLReport& kl, double delta_r, double delta_u) {
  return kl.retain_kl_mean <= delta_r && kl.forget_kl_mean <= delta_u;
}

EvaluationReport evaluate(const PredictionSet& pretrained, const PredictionSet& retrained,
                          const PredictionSet& unlearned, const ForgetSpec& spec) {
  const int n = pretrained.n_labels();
  spec.check(n);
  if (pretrained.dim() != n) {
    throw Error(Errc::DimensionMismatch, "pretrained predictions must cover all labels");
  }
  const std::vector<ClassId> retained_ids = spec.retained_label_space(n);
  if (retrained.label_space() != retained_ids || unlearned.label_space() != retained_ids) {
    throw Error(Errc::DimensionMismatch,
                "retrained and unlearned predictions must cover the retained labels");
  }
  check_paired(retrained, unlearned);
  const PredictionSet aligned = align_to_retained(pretrained, spec);
  check_paired(aligned, unlearned);

  const auto pre = split_by_forget(aligned, spec);
  const auto ret = split_by_forget(retrained, spec);
  const auto unl = split_by_forget(unlearned, spec);

  EvaluationReport r;
  r.forget_class = spec.forget_class;
  r.n_forget = unl.forget.size();
  r.n_retain = unl.retain.size();

  const std::vector<ClassId> forget_ids{spec.forget_class};
  r.accuracy.pretrained_retain_accuracy = accuracy(pretrained, retained_ids);
  r.accuracy.retrained_retain_accuracy = accuracy(retrained, retained_ids);
  r.accuracy.retain_accuracy = accuracy(unlearned, retained_ids);
  r.accuracy.forget_accuracy = unl.forget.empty() ? 0.0 : accuracy(unlearned, forget_ids);
  const auto eps = accuracy_differences(r.accuracy.retain_accuracy,
                                        r.accuracy.pretrained_retain_accuracy,
                                        r.accuracy.retrained_retain_accuracy);
  r.accuracy.epsilon_p = eps.epsilon_p;
  r.accuracy.epsilon_r = eps.epsilon_r;

  auto pair = [](std::string name, std::string direction, const ForgetSplit& first,
                 const ForgetSplit& second) {
    return KLReport{std::move(name), std::move(direction), mean_kl(first.retain, second.retain),
                    mean_kl(first.forget, second.forget)};
  };
  r.kl.push_back(pair("pretrained-mpru", "mpru||pretrained", unl, pre));
  r.kl.push_back(pair("pretrained-retrain", "retrain||pretrained", ret, pre));
  r.kl.push_back(pair("retrain-mpru", "mpru||retrain", unl, ret));

  r.mse = mse_stats(unl.forget, ret.forget);

  r.histograms["mpru"] = prediction_histogram(unl.forget);
  r.histograms["retrain"] = prediction_histogram(ret.forget);
  r.histograms["pretrained"] = prediction_histogram(pre.forget);
  return r;
}

}  // namespace mpru
