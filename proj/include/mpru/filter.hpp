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

#include <algorithm>
#include <cstddef>
#include <vector>

#include "mpru/core.hpp"
#include "mpru/projection.hpp"

namespace mpru {

/// Thresholds on the pretrained model's behaviour over the forget set.
inline constexpr double kMinForgetAccuracy = 0.8;
inline constexpr double kMinTopConfidence = 0.7;

/// Inputs whose forget-class mass is at least 1 - kSaturation take the limit branch.
inline constexpr double kSaturation = 1e-9;

/// Mean pretrained confidence vector over the forget set.
struct Centroid {
  Eigen::VectorXd values;
  std::size_t n_samples = 0;

  friend bool operator==(const Centroid& a, const Centroid& b) {
    return a.n_samples == b.n_samples && a.values.size() == b.values.size() &&
           a.values == b.values;
  }
};

struct Diagnostics {
  double forget_accuracy = 0.0;
  double mean_top_confidence = 0.0;
  std::size_t n_samples = 0;
  bool assumption_met = false;

  friend bool operator==(const Diagnostics&, const Diagnostics&) = default;
};

/// Share of the forgotten class's probability mass assigned to each retained
/// class: the retained sub-vector of `centroid` with negatives clamped to 0,
/// L1-normalized, or uniform when that sub-vector is numerically zero.
template <typename Derived>
Vector<typename Derived::Scalar> distribution_ratio(const Eigen::MatrixBase<Derived>& centroid,
                                                    Index forget) {
  using Scalar = typename Derived::Scalar;
  const Index n = centroid.size();
  Vector<Scalar> ratio(n - 1);
  ratio << centroid.head(forget), centroid.tail(n - 1 - forget);
  ratio = ratio.cwiseMax(Scalar(0));
  const Scalar mass = ratio.sum();
  if (mass < Scalar(1e-12)) {
    ratio.setConstant(Scalar(1) / Scalar(n - 1));
  } else {
    ratio /= mass;
  }
  return ratio;
}

/// Project-then-redistribute for a single confidence vector over the full
/// label space. Returns the (n-1)-vector over retained classes, renormalized.
///
///   out = (c_u * ratio + (1 - p_u) / (1 - c_u) * c_r) / (c_u + 1 - p_u)
///
/// where c_u = c[forget], c_r = c without that entry and p_u = (P c)[forget]
/// clamped into [0,1]. For c_u >= 1 - kSaturation the result is `ratio`.
template <typename DerivedC, typename DerivedR>
Vector<typename DerivedC::Scalar> redistribute(
    const Eigen::MatrixBase<DerivedC>& c, Index forget,
    const ProjectionOperator<typename DerivedC::Scalar>& projector,
    const Eigen::MatrixBase<DerivedR>& ratio) {
  using Scalar = typename DerivedC::Scalar;
  const Index n = c.size();
  const Scalar c_u = c(forget);
  if (c_u >= Scalar(1) - Scalar(kSaturation)) return Vector<Scalar>(ratio);

  const Scalar p_u = std::clamp(projector.coordinate(c, forget), Scalar(0), Scalar(1));
  const Scalar reduction = (Scalar(1) - p_u) / (Scalar(1) - c_u);
  const Scalar denominator = c_u + Scalar(1) - p_u;

  Vector<Scalar> out(n - 1);
  out << c.head(forget), c.tail(n - 1 - forget);
  out = (c_u * ratio + reduction * out) / denominator;
  return out / out.sum();
}

/// Fitted unlearning filter for one forgotten class. Immutable; safe to share
/// across threads calling apply().
class FilterModel {
 public:
  /// Assembles a model from its persisted parts; the projector is derived
  /// from the centroid. Throws InvalidArgument when the parts disagree.
  FilterModel(ForgetSpec spec, int n_labels, Centroid centroid,
              Eigen::VectorXd distribution_ratio, Diagnostics diagnostics);

  ClassId forget_class() const noexcept { return spec_.forget_class; }
  const ForgetSpec& spec() const noexcept { return spec_; }
  int n() const noexcept { return n_; }
  std::vector<ClassId> label_space() const { return identity_label_space(n_); }
  const std::vector<ClassId>& retained_label_space() const noexcept { return retained_; }
  const Centroid& centroid() const noexcept { return centroid_; }
  const ProjectionOperator<double>& projector() const noexcept { return projector_; }
  const Eigen::VectorXd& distribution_ratio() const noexcept { return ratio_; }
  const Diagnostics& diagnostics() const noexcept { return diagnostics_; }

  friend bool operator==(const FilterModel& a, const FilterModel& b) {
    return a.spec_.forget_class == b.spec_.forget_class && a.n_ == b.n_ &&
           a.centroid_ == b.centroid_ && a.ratio_ == b.ratio_ &&
           a.projector_.unit_direction() == b.projector_.unit_direction() &&
           a.diagnostics_ == b.diagnostics_ && a.retained_ == b.retained_;
  }

 private:
  ForgetSpec spec_;
  int n_;
  Centroid centroid_;
  ProjectionOperator<double> projector_;
  Eigen::VectorXd ratio_;
  Diagnostics diagnostics_;
  std::vector<ClassId> retained_;
};

/// Entrywise mean of the forget-set predictions. Throws EmptyForgetSet.
Centroid compute_centroid(const PredictionSet& forget_preds);

ProjectionOperator<double> build_projector(const Centroid& centroid);

/// Dense reference projector via Gram-Schmidt (test oracle and benchmark only).
Eigen::MatrixXd build_projector_gram_schmidt(const Centroid& centroid);

Eigen::VectorXd compute_distribution_ratio(const Centroid& centroid, const ForgetSpec& spec);

/// Forget accuracy (argmax == j, lowest index wins ties) and the mean top
/// confidence over the correctly predicted forget records.
Diagnostics diagnose(const PredictionSet& forget_preds, const ForgetSpec& spec);

struct FitOptions {
  /// Throw AssumptionViolated instead of recording the failed check.
  bool require_assumptions = false;
};

/// split -> centroid -> projector -> distribution ratio -> diagnostics.
FilterModel fit(const PredictionSet& full_preds, const ForgetSpec& spec,
                const FitOptions& options = {});

ConfidenceVector apply(const FilterModel& model, const ConfidenceVector& c);
Eigen::VectorXd apply(const FilterModel& model, const Eigen::Ref<const Eigen::VectorXd>& c);

/// Maps apply() over every record; ids, labels, and order are preserved.
/// `threads` == 0 picks the hardware concurrency, 1 runs sequentially. The
/// output is bit-identical for any thread count.
PredictionSet apply_batch(const FilterModel& model, const PredictionSet& set,
                          unsigned threads = 1);

}  // namespace mpru
