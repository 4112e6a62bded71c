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

#include "mpru/core.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace mpru {

namespace {

std::string describe(Index i, double v) {
  std::ostringstream os;
  os.precision(17);
  os << "index " << i << " value " << v;
  return os.str();
}

}  // namespace

ConfidenceVector ConfidenceVector::from_nonnegative(Eigen::VectorXd values) {
  if (values.size() == 0) throw Error(Errc::EmptyInput, "confidence vector is empty");
  for (Index i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      throw Error(Errc::InvalidArgument, "simplex entry must be finite and >= 0 at " +
                                             describe(i, values[i]));
    }
  }
  const double total = values.sum();
  if (!(total > 0.0)) throw Error(Errc::InvalidArgument, "simplex vector sums to zero");
  // Already-normalized input is kept bit-for-bit so that serialization round-trips.
  if (std::abs(total - 1.0) > kSimplexTolerance || values.maxCoeff() > 1.0) values /= total;
  return ConfidenceVector(std::move(values));
}

ConfidenceVector validate_confidence(const Eigen::Ref<const Eigen::VectorXd>& entries,
                                     double tolerance) {
  if (entries.size() == 0) throw Error(Errc::EmptyInput, "confidence vector is empty");
  for (Index i = 0; i < entries.size(); ++i) {
    const double e = entries[i];
    if (std::isnan(e) || e < 0.0) throw Error(Errc::NegativeEntry, describe(i, e));
    if (e > 1.0) throw Error(Errc::EntryAboveOne, describe(i, e));
  }
  const double total = entries.sum();
  if (!(std::abs(total - 1.0) <= tolerance)) {
    std::ostringstream os;
    os.precision(17);
    os << "sum " << total << " differs from 1 by more than " << tolerance;
    throw Error(Errc::SumOutOfTolerance, os.str());
  }
  return ConfidenceVector::from_nonnegative(entries);
}

ConfidenceVector validate_confidence(std::span<const double> entries, double tolerance) {
  return validate_confidence(
      Eigen::Map<const Eigen::VectorXd>(entries.data(), static_cast<Index>(entries.size())),
      tolerance);
}

std::vector<ClassId> identity_label_space(int n_labels) {
  std::vector<ClassId> ids(static_cast<std::size_t>(std::max(n_labels, 0)));
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

PredictionSet::PredictionSet(int n_labels, std::vector<ClassId> label_space,
                             std::vector<PredictionRecord> records)
    : n_labels_(n_labels), label_space_(std::move(label_space)), records_(std::move(records)) {
  if (n_labels_ < 1) throw Error(Errc::InvalidArgument, "n_labels must be >= 1");
  if (label_space_.empty()) throw Error(Errc::InvalidArgument, "label space is empty");
  for (std::size_t i = 0; i < label_space_.size(); ++i) {
    const ClassId id = label_space_[i];
    if (id < 0 || id >= n_labels_) {
      throw Error(Errc::InvalidArgument,
                  "label space id " + std::to_string(id) + " outside [0, n_labels)");
    }
    if (i > 0 && label_space_[i - 1] >= id) {
      throw Error(Errc::InvalidArgument, "label space must be strictly ascending");
    }
  }
  std::unordered_set<std::string> seen;
  seen.reserve(records_.size());
  for (std::size_t r = 0; r < records_.size(); ++r) {
    const auto& rec = records_[r];
    if (rec.confidence.size() != dim()) {
      throw Error(Errc::InconsistentDimensions,
                  "record " + std::to_string(r) + " ('" + rec.id + "') has " +
                      std::to_string(rec.confidence.size()) + " entries, expected " +
                      std::to_string(dim()));
    }
    if (rec.label < 0 || rec.label >= n_labels_) {
      throw Error(Errc::InvalidArgument, "record '" + rec.id + "' label " +
                                             std::to_string(rec.label) +
                                             " outside [0, " + std::to_string(n_labels_) + ")");
    }
    if (!seen.insert(rec.id).second) {
      throw Error(Errc::InvalidArgument, "duplicate record id '" + rec.id + "'");
    }
  }
}

PredictionSet PredictionSet::full(int n_labels, std::vector<PredictionRecord> records) {
  return PredictionSet(n_labels, identity_label_space(n_labels), std::move(records));
}

PredictionSet PredictionSet::with_records(std::vector<PredictionRecord> records) const {
  return PredictionSet(n_labels_, label_space_, std::move(records));
}

void ForgetSpec::check(int n_labels) const {
  if (forget_class < 0 || forget_class >= n_labels) {
    throw Error(Errc::ForgetClassOutOfRange,
                "forget class " + std::to_string(forget_class) + " outside [0, " +
                    std::to_string(n_labels) + ")");
  }
}

std::vector<ClassId> ForgetSpec::retained_label_space(int n_labels) const {
  check(n_labels);
  std::vector<ClassId> ids;
  ids.reserve(static_cast<std::size_t>(n_labels - 1));
  for (ClassId k = 0; k < n_labels; ++k) {
    if (k != forget_class) ids.push_back(k);
  }
  return ids;
}

ForgetSplit split_by_forget(const PredictionSet& set, const ForgetSpec& spec) {
  spec.check(set.n_labels());
  std::vector<PredictionRecord> forget;
  std::vector<PredictionRecord> retain;
  for (const auto& rec : set) {
    (rec.label == spec.forget_class ? forget : retain).push_back(rec);
  }
  return {set.with_records(std::move(forget)), set.with_records(std::move(retain))};
}

}  // namespace mpru
