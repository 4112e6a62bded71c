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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mpru/metrics.hpp"
#include "test_util.hpp"

namespace mpru {
namespace {

using testing::conf;
using testing::rec;
using testing::vec;

TEST(Argmax, UniqueTieAndSingleton) {
  EXPECT_EQ(argmax_label(vec({0.2, 0.5, 0.3}), std::vector<ClassId>{0, 1, 2}), 1);
  EXPECT_EQ(argmax_label(vec({0.5, 0.5}), std::vector<ClassId>{0, 2}), 0);
  EXPECT_EQ(argmax_label(vec({1.0}), std::vector<ClassId>{7}), 7);
}

TEST(Accuracy, AllCorrectAndForgottenClass) {
  const auto full = PredictionSet::full(3, {rec("a", 0, {0.8, 0.1, 0.1}), rec("b", 1, {0.1, 0.8, 0.1})});
  EXPECT_EQ(accuracy(full, std::vector<ClassId>{0, 1}), 1.0);
  const PredictionSet reduced(3, {0, 1}, {rec("c", 2, {0.4, 0.6})});
  EXPECT_EQ(accuracy(reduced, std::vector<ClassId>{2}), 0.0);
  try {
    accuracy(full, std::vector<ClassId>{2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyRestriction);
  }
}

TEST(AccuracyDifferences, PublishedRows) {
  const auto a = accuracy_differences(0.9364, 0.9310, 0.9224);
  EXPECT_NEAR(a.epsilon_p, 0.0054, 1e-12);
  EXPECT_NEAR(a.epsilon_r, 0.0140, 1e-12);
  const auto b = accuracy_differences(0.7358, 0.7347, 0.7325);
  EXPECT_NEAR(b.epsilon_p, 0.0010, 1e-3);
  EXPECT_NEAR(b.epsilon_p, 0.0011, 1e-12);
  EXPECT_NEAR(b.epsilon_r, 0.0033, 1e-12);
  const auto c = accuracy_differences(0.5, 0.5, 0.5);
  EXPECT_EQ(c.epsilon_p, 0.0);
  EXPECT_EQ(c.epsilon_r, 0.0);
}

TEST(AlignToRetained, Examples) {
  EXPECT_EQ(align_to_retained(vec({0.2, 0.8, 0}), ForgetSpec{2}), vec({0.2, 0.8}));
  EXPECT_EQ(align_to_retained(vec({0.25, 0.25, 0.5}), ForgetSpec{2}), vec({0.5, 0.5}));
  EXPECT_EQ(align_to_retained(vec({0, 0, 1}), ForgetSpec{2}), vec({0.5, 0.5}));
}

TEST(AlignToRetained, SetVersionUsesRetainedSpace) {
  const auto full = PredictionSet::full(3, {rec("a", 1, {0.25, 0.25, 0.5})});
  const auto aligned = align_to_retained(full, ForgetSpec{0});
  EXPECT_EQ(aligned.label_space(), (std::vector<ClassId>{1, 2}));
  EXPECT_NEAR(aligned[0].confidence[0], 1.0 / 3.0, 1e-15);
}

TEST(KL, IdentityAndClosedForms) {
  EXPECT_EQ(kl_per_sample(vec({0.3, 0.7}), vec({0.3, 0.7})), 0.0);
  const double expected = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
  EXPECT_NEAR(kl_per_sample(vec({0.5, 0.5}), vec({0.25, 0.75})), expected, 1e-15);
  EXPECT_NEAR(kl_per_sample(vec({0.5, 0.5}), vec({0.25, 0.75})), 0.143841, 1e-6);
  EXPECT_NEAR(kl_per_sample(vec({1, 0}), vec({0.5, 0.5})), std::log(2.0), 1e-9);
}

// KL((a, 1-a) || uniform) = ln 2 - H(a), increasing in a on [0.5, 1].
double binary_with_kl(double target) {
  double lo = 0.5;
  double hi = 1.0 - 1e-15;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double kl = std::log(2.0) + mid * std::log(mid) + (1 - mid) * std::log(1 - mid);
    (kl < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST(MeanKL, IdentityAndMeanOfTwo) {
  const auto a = PredictionSet::full(2, {rec("x", 0, {0.3, 0.7}), rec("y", 1, {0.6, 0.4})});
  EXPECT_EQ(mean_kl(a, a), 0.0);
  const double p1 = binary_with_kl(0.1);
  const double p2 = binary_with_kl(0.3);
  const auto p = PredictionSet::full(2, {{"x", 0, conf({p1, 1 - p1})}, {"y", 0, conf({p2, 1 - p2})}});
  const auto q = PredictionSet::full(2, {rec("x", 0, {0.5, 0.5}), rec("y", 0, {0.5, 0.5})});
  EXPECT_NEAR(mean_kl(p, q), 0.2, 1e-9);
}

TEST(MeanKL, RejectsMispairedSets) {
  const auto a = PredictionSet::full(2, {rec("x", 0, {0.3, 0.7})});
  const auto b = PredictionSet::full(2, {rec("z", 0, {0.3, 0.7})});
  try {
    mean_kl(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::IdMismatch);
  }
}

TEST(PairwiseSum, MatchesNaiveOnRandomData) {
  synth::CounterRng rng(1, 0, 0, 0);
  std::vector<double> v(12345);
  for (auto& x : v) x = rng.uniform();
  const double naive = std::accumulate(v.begin(), v.end(), 0.0);
  EXPECT_NEAR(pairwise_sum(v), naive, 1e-12 * naive);
  EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
}

TEST(MSE, IdenticalAndSinglePair) {
  const auto a = PredictionSet::full(2, {rec("x", 0, {0.5, 0.5}), rec("y", 0, {0.1, 0.9})});
  const auto s = mse_stats(a, a);
  EXPECT_EQ(s.mean, 0.0);
  EXPECT_EQ(s.std, 0.0);
  EXPECT_EQ(s.max, 0.0);
  EXPECT_EQ(s.pct_below_mean, 0.0);
  const auto p = PredictionSet::full(2, {rec("x", 0, {0.5, 0.5})});
  const auto q = PredictionSet::full(2, {rec("x", 0, {0.3, 0.7})});
  const auto t = mse_stats(p, q);
  EXPECT_NEAR(t.mean, 0.08, 1e-15);
  EXPECT_EQ(t.mean, t.max);
  EXPECT_EQ(t.std, 0.0);
}

TEST(MSE, PopulationStdAndStrictBelowMean) {
  const auto a = PredictionSet::full(2, {rec("1", 0, {1, 0}), rec("2", 0, {1, 0}), rec("3", 0, {1, 0})});
  const auto b = PredictionSet::full(2, {rec("1", 0, {1, 0}), rec("2", 0, {1, 0}), rec("3", 0, {0, 1})});
  const auto s = mse_stats(a, b);  // distances 0, 0, 2
  EXPECT_NEAR(s.mean, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.std, std::sqrt(8.0 / 9.0), 1e-15);
  EXPECT_EQ(s.max, 2.0);
  EXPECT_NEAR(s.pct_below_mean, 200.0 / 3.0, 1e-12);
}

TEST(Histogram, EmptyAndConcentrated) {
  const PredictionSet empty(6, {1, 5});
  const auto h = prediction_histogram(empty);
  EXPECT_EQ(h, (Histogram{{1, 0}, {5, 0}}));
  const PredictionSet s(6, {1, 5}, {rec("a", 0, {0.1, 0.9}), rec("b", 0, {0.2, 0.8}), rec("c", 0, {0.3, 0.7})});
  EXPECT_EQ(prediction_histogram(s), (Histogram{{1, 0}, {5, 3}}));
}

TEST(Closeness, Examples) {
  EXPECT_TRUE(check_statistical_closeness({"", "", 0.2051, 0.7853}, 0.3595, 1.2823));
  EXPECT_FALSE(check_statistical_closeness({"", "", 0.5, 0.5}, 0.4, 1.0));
  EXPECT_TRUE(check_statistical_closeness({"", "", 0.0, 0.0}, 0.0, 0.0));
}

TEST(Evaluate, SelfComparisonGivesZeroDivergence) {
  const auto pre = PredictionSet::full(
      3, {rec("a", 0, {0.8, 0.1, 0.1}), rec("b", 2, {0.1, 0.1, 0.8}), rec("c", 1, {0.1, 0.7, 0.2})});
  const PredictionSet mpru(3, {0, 1}, {rec("a", 0, {0.9, 0.1}), rec("b", 2, {0.4, 0.6}), rec("c", 1, {0.2, 0.8})});
  const auto r = evaluate(pre, mpru, mpru, ForgetSpec{2});
  EXPECT_EQ(r.kl[2].pair_name, "retrain-mpru");
  EXPECT_EQ(r.kl[2].retain_kl_mean, 0.0);
  EXPECT_EQ(r.kl[2].forget_kl_mean, 0.0);
  EXPECT_EQ(r.mse.mean, 0.0);
  EXPECT_EQ(r.accuracy.forget_accuracy, 0.0);
  EXPECT_EQ(r.n_forget, 1u);
  EXPECT_EQ(r.n_retain, 2u);
  EXPECT_EQ(r.accuracy.epsilon_r, 0.0);
}

TEST(Evaluate, RejectsIdMismatch) {
  const auto pre = PredictionSet::full(3, {rec("a", 0, {0.8, 0.1, 0.1})});
  const PredictionSet x(3, {0, 1}, {rec("a", 0, {0.9, 0.1})});
  const PredictionSet y(3, {0, 1}, {rec("b", 0, {0.9, 0.1})});
  try {
    evaluate(pre, x, y, ForgetSpec{2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::IdMismatch);
  }
}

class SynthMetrics : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    result_ = new synth::ExperimentResult(synth::run_experiment(synth::SynthConfig{}, 0));
  }
  static void TearDownTestSuite() { delete result_; }
  static synth::ExperimentResult* result_;
};
synth::ExperimentResult* SynthMetrics::result_ = nullptr;

TEST_F(SynthMetrics, MeanKLIsOrderInsensitiveWithinRounding) {
  const auto per = kl_per_record(result_->unlearned, result_->retrained);
  const double naive = std::accumulate(per.begin(), per.end(), 0.0) / static_cast<double>(per.size());
  EXPECT_NEAR(mean_kl(result_->unlearned, result_->retrained), naive, 1e-12);
}

TEST_F(SynthMetrics, PctBelowMeanMatchesSortOracle) {
  const ForgetSpec spec{0};
  const auto u = split_by_forget(result_->unlearned, spec).forget;
  const auto r = split_by_forget(result_->retrained, spec).forget;
  auto d = squared_distances(u, r);
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
  std::sort(d.begin(), d.end());
  const auto below = std::lower_bound(d.begin(), d.end(), mean) - d.begin();
  const auto stats = mse_stats(u, r);
  EXPECT_NEAR(stats.pct_below_mean, 100.0 * static_cast<double>(below) / static_cast<double>(d.size()), 1e-9);
  EXPECT_GE(stats.pct_below_mean, 50.0);
  EXPECT_LE(stats.pct_below_mean, 100.0);
}

TEST_F(SynthMetrics, HistogramsConserveForgetMass) {
  for (const auto& [name, h] : result_->report.histograms) {
    std::size_t total = 0;
    for (const auto& [id, count] : h) total += count;
    EXPECT_EQ(total, result_->report.n_forget) << name;
  }
  EXPECT_EQ(result_->report.histograms.count("mpru"), 1u);
  EXPECT_EQ(result_->report.histograms.count("retrain"), 1u);
}

}  // namespace
}  // namespace mpru
