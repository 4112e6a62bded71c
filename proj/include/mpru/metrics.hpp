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

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mpru/core.hpp"

namespace mpru {

/// Per-entry floor applied before taking logarithms in KL.
inline constexpr double kKlFloor = 1e-12;

struct AccuracyReport {
  double pretrained_retain_accuracy = 0.0;
  double retrained_retain_accuracy = 0.0;
  double retain_accuracy = 0.0;   // unlearned model on the retain set
  double forget_accuracy = 0.0;   // unlearned model on the forget set
  double epsilon_p = 0.0;
  double epsilon_r = 0.0;

  friend bool operator==(const AccuracyReport&, const AccuracyReport&) = default;
};

/// Mean KL in nats over the retain and forget sets for one pair of models.
/// `direction` records the argument order, e.g. "mpru||retrain".
struct KLReport {
  std::string pair_name;
  std::string direction;
  double retain_kl_mean = 0.0;
  double forget_kl_mean = 0.0;

  friend bool operator==(const KLReport&, const KLReport&) = default;
};

/// Distribution of per-sample squared L2 distances. Std is the population
/// value; pct_below_mean counts samples strictly below the mean.
struct MSEReport {
  double mean = 0.0;
  double std = 0.0;
  double max = 0.0;
  double pct_below_mean = 0.0;

  friend bool operator==(const MSEReport&, const MSEReport&) = default;
};

using Histogram = std::map<ClassId, std::size_t>;

struct EvaluationReport {
  ClassId forget_class = 0;
  std::size_t n_forget = 0;
  std::size_t n_retain = 0;
  AccuracyReport accuracy;
  std::vector<KLReport> kl;          // pretrained-mpru, pretrained-retrain, retrain-mpru
  MSEReport mse;                     // mpru vs retrain on the forget set
  std::map<std::string, Histogram> histograms;  // forget-set argmax counts per model
  std::map<std::string, double> runtimes;       // seconds per pipeline stage

  /// Equality ignoring runtimes.
  bool same_metrics(const EvaluationReport& other) const;
};

/// Original id at the largest entry; the lowest position wins ties.
ClassId argmax_label(const Eigen::Ref<const Eigen::VectorXd>& c,
                     std::span<const ClassId> label_space);

/// Fraction of records whose true label is in `restrict_to` and whose argmax
/// equals it. Throws EmptyRestriction when no record qualifies.
double accuracy(const PredictionSet& set, std::span<const ClassId> restrict_to);

struct AccuracyDifferences {
  double epsilon_p = 0.0;
  double epsilon_r = 0.0;
};

AccuracyDifferences accuracy_differences(double acc_unlearned, double acc_pretrained,
                                         double acc_retrained);

/// Drops entry `spec.forget_class` and L1-renormalizes; uniform when nothing remains.
Eigen::VectorXd align_to_retained(const Eigen::Ref<const Eigen::VectorXd>& c,
                                  const ForgetSpec& spec);
PredictionSet align_to_retained(const PredictionSet& full, const ForgetSpec& spec);

double kl_per_sample(const Eigen::Ref<const Eigen::VectorXd>& p,
                     const Eigen::Ref<const Eigen::VectorXd>& q);

/// Fixed-shape pairwise summation; the result depends only on the input order.
double pairwise_sum(std::span<const double> values);

/// Per-record KL(a || b). Records must carry the same ids in the same order.
std::vector<double> kl_per_record(const PredictionSet& a, const PredictionSet& b);
double mean_kl(const PredictionSet& a, const PredictionSet& b);

std::vector<double> squared_distances(const PredictionSet& a, const PredictionSet& b);
MSEReport mse_stats(const PredictionSet& a, const PredictionSet& b);

/// Argmax counts; every id in the set's label space is present (possibly 0).
Histogram prediction_histogram(const PredictionSet& set);

bool check_statistical_closeness(const KLReport& kl, double delta_r, double delta_u);

/// Assembles the full report from the three models' outputs over the same
/// records. `pretrained` is full-dimensional; the other two are over the
/// retained label space.
EvaluationReport evaluate(const PredictionSet& pretrained, const PredictionSet& retrained,
                          const PredictionSet& unlearned, const ForgetSpec& spec);

}  // namespace mpru
