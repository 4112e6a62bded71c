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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mpru/error.hpp"

namespace mpru {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

/// Class ids are 0-based and always refer to the original (pretrained) label space.
using ClassId = int;

/// Accepted |sum - 1| for probabilities arriving from outside (float32 exporters).
inline constexpr double kIngestTolerance = 1e-6;
/// Accepted |sum - 1| for any simplex vector produced internally.
inline constexpr double kSimplexTolerance = 1e-12;

/// A point on the probability simplex. Immutable once constructed; the only
/// ways in are validate_confidence() for external data and from_nonnegative()
/// for vectors computed internally.
class ConfidenceVector {
 public:
  /// Divides a nonnegative vector by its sum unless that sum is already within
  /// kSimplexTolerance of 1 and no entry exceeds 1. Throws InvalidArgument on a negative or
  /// non-finite entry or a zero sum.
  static ConfidenceVector from_nonnegative(Eigen::VectorXd values);

  const Eigen::VectorXd& values() const noexcept { return values_; }
  Index size() const noexcept { return values_.size(); }
  double operator[](Index i) const { return values_[i]; }

  friend bool operator==(const ConfidenceVector& a, const ConfidenceVector& b) {
    return a.values_.size() == b.values_.size() && a.values_ == b.values_;
  }

 private:
  explicit ConfidenceVector(Eigen::VectorXd values) : values_(std::move(values)) {}

  Eigen::VectorXd values_;
};

/// Checks entries lie in [0,1] and sum to 1 within `tolerance`, then
/// renormalizes as ConfidenceVector::from_nonnegative does.
ConfidenceVector validate_confidence(std::span<const double> entries,
                                     double tolerance = kIngestTolerance);
ConfidenceVector validate_confidence(const Eigen::Ref<const Eigen::VectorXd>& entries,
                                     double tolerance = kIngestTolerance);

struct PredictionRecord {
  std::string id;
  ClassId label = 0;
  ConfidenceVector confidence;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

std::vector<ClassId> identity_label_space(int n_labels);

/// Ordered model outputs over a fixed label space.
///
/// `n_labels` is the size of the original label space and bounds the true
/// labels; `label_space` lists the original ids the confidence columns refer
/// to (strictly ascending). Pretrained outputs use the identity space; outputs
/// of an unlearned or retrained model use the retained ids.
class PredictionSet {
 public:
  PredictionSet() = default;
  PredictionSet(int n_labels, std::vector<ClassId> label_space,
                std::vector<PredictionRecord> records = {});

  /// Identity label space 0..n_labels-1.
  static PredictionSet full(int n_labels, std::vector<PredictionRecord> records = {});

  int n_labels() const noexcept { return n_labels_; }
  const std::vector<ClassId>& label_space() const noexcept { return label_space_; }
  Index dim() const noexcept { return static_cast<Index>(label_space_.size()); }

  const std::vector<PredictionRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const PredictionRecord& operator[](std::size_t i) const { return records_[i]; }
  auto begin() const noexcept { return records_.begin(); }
  auto end() const noexcept { return records_.end(); }

  /// Copy of this set holding only `records` (same label bookkeeping).
  PredictionSet with_records(std::vector<PredictionRecord> records) const;

  friend bool operator==(const PredictionSet&, const PredictionSet&) = default;

 private:
  int n_labels_ = 0;
  std::vector<ClassId> label_space_;
  std::vector<PredictionRecord> records_;
};

struct ForgetSpec {
  ClassId forget_class = 0;

  /// Throws ForgetClassOutOfRange unless 0 <= forget_class < n_labels.
  void check(int n_labels) const;

  /// Every original id except forget_class, ascending.
  std::vector<ClassId> retained_label_space(int n_labels) const;
};

struct ForgetSplit {
  PredictionSet forget;
  PredictionSet retain;
};

/// Partitions by true label; record order is preserved in both parts.
ForgetSplit split_by_forget(const PredictionSet& set, const ForgetSpec& spec);

}  // namespace mpru
