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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mpru/bench.hpp"
#include "mpru/filter.hpp"
#include "mpru/io.hpp"
#include "mpru/metrics.hpp"
#include "mpru/projection.hpp"
#include "mpru/synth.hpp"

namespace {

using namespace mpru;
using synth::CounterRng;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

Eigen::VectorXd random_simplex(CounterRng& rng, Index n) {
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = -std::log(rng.uniform());
  return v / v.sum();
}

int below(CounterRng& rng, int bound) {
  return static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(bound));
}

// Random simplex vector with occasional exact zeros, one-hots and saturation.
Eigen::VectorXd awkward_simplex(CounterRng& rng, Index n, Index forget) {
  switch (below(rng, 6)) {
    case 0: return Eigen::VectorXd::Unit(n, forget);
    case 1: return Eigen::VectorXd::Unit(n, below(rng, static_cast<int>(n)));
    case 2: {
      if (n == 1) return Eigen::VectorXd::Ones(1);
      Eigen::VectorXd v = random_simplex(rng, n);
      v[forget] = 0.0;
      return v / v.sum();
    }
    case 3: {
      Eigen::VectorXd v = 1e-12 * random_simplex(rng, n);
      v[forget] += 1.0;
      return v / v.sum();
    }
    default: return random_simplex(rng, n);
  }
}

FilterModel random_filter(CounterRng& rng, int n, ClassId forget) {
  const ForgetSpec spec{forget};
  const Centroid c{awkward_simplex(rng, n, forget), static_cast<std::size_t>(1 + below(rng, 500))};
  const double acc = rng.uniform();
  const double conf = rng.uniform();
  return FilterModel(spec, n, c, compute_distribution_ratio(c, spec),
                     Diagnostics{acc, conf, c.n_samples, acc >= 0.8 && conf >= 0.7});
}

Outcome simplex_closure() {
  Outcome o;
  CounterRng rng(1, 1, 0, 0);
  int bad = 0;
  double worst = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const int n = 3 + below(rng, 62);
    const ClassId j = below(rng, n);
    const auto model = random_filter(rng, n, j);
    const Eigen::VectorXd out = apply(model, awkward_simplex(rng, n, j));
    const double err = std::abs(out.sum() - 1.0);
    worst = std::max(worst, err);
    if (!(out.minCoeff() >= 0.0) || !(err <= 1e-12)) ++bad;
  }
  o.require(bad == 0, std::to_string(bad) + " outputs off the simplex");
  char buf[64];
  std::snprintf(buf, sizeof buf, "max |sum-1| %.2e", worst);
  if (o.pass) o.detail = buf;
  return o;
}

Outcome projector_algebra() {
  Outcome o;
  CounterRng rng(2, 2, 0, 0);
  double sym = 0, idem = 0, null = 0, trace = 0, agree = 0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 3 + below(rng, 62);
    Eigen::VectorXd c = random_simplex(rng, n);
    if (t % 10 == 0) c = awkward_simplex(rng, n, below(rng, n));
    const auto op = build_projector(c);
    const Eigen::VectorXd& u = op.unit_direction();
    const Eigen::MatrixXd p = op.dense();
    const Eigen::MatrixXd gs = build_projector_gram_schmidt(c);
    for (const Eigen::MatrixXd* m : {&p, &gs}) {
      sym = std::max(sym, (*m - m->transpose()).cwiseAbs().maxCoeff());
      idem = std::max(idem, (*m * *m - *m).cwiseAbs().maxCoeff());
      null = std::max(null, (*m * u).cwiseAbs().maxCoeff());
      trace = std::max(trace, std::abs(m->trace() - (n - 1)));
    }
    agree = std::max(agree, (p - gs).cwiseAbs().maxCoeff());
  }
  o.require(sym <= 1e-12, "asymmetry " + std::to_string(sym));
  o.require(idem <= 1e-10, "idempotence error " + std::to_string(idem));
  o.require(null <= 1e-10, "|Pu| " + std::to_string(null));
  o.require(trace <= 1e-9, "trace error " + std::to_string(trace));
  o.require(agree <= 1e-8, "fast vs Gram-Schmidt " + std::to_string(agree));
  char buf[160];
  std::snprintf(buf, sizeof buf, "sym %.1e, |P^2-P| %.1e, |Pu| %.1e, trace %.1e, fast-vs-GS %.1e",
                sym, idem, null, trace, agree);
  if (o.pass) o.detail = buf;
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  CounterRng rng(3, 3, 0, 0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int n = 3 + below(rng, 8);
    const ClassId j = below(rng, n);
    const int records = 1 + below(rng, 1000);
    std::vector<PredictionRecord> recs;
    for (int r = 0; r < records; ++r) {
      const ClassId label = r == 0 ? j : below(rng, n);
      Eigen::VectorXd v = awkward_simplex(rng, n, j);
      if (label == j && below(rng, 2) == 0) v = 0.3 * v + 0.7 * Eigen::VectorXd::Unit(n, j);
      recs.push_back({std::to_string(r), label, ConfidenceVector::from_nonnegative(v)});
    }
    const auto set = PredictionSet::full(n, std::move(recs));
    const auto fast = apply_batch(fit(set, ForgetSpec{j}), set);
    const auto slow = synth::oracle_mpru(set, ForgetSpec{j});
    for (std::size_t i = 0; i < fast.size(); ++i) {
      worst = std::max(
          worst, (fast[i].confidence.values() - slow[i].confidence.values()).cwiseAbs().maxCoeff());
    }
  }
  o.require(worst <= 1e-10, "max deviation " + std::to_string(worst));

  const auto worked = PredictionSet::full(
      3, {{"f", 2, ConfidenceVector::from_nonnegative(Eigen::Vector3d(0.1, 0.1, 0.8))},
          {"x", 0, ConfidenceVector::from_nonnegative(Eigen::Vector3d(0.3, 0.5, 0.2))}});
  const auto a = apply_batch(fit(worked, ForgetSpec{2}), worked)[1].confidence;
  const auto b = synth::oracle_mpru(worked, ForgetSpec{2})[1].confidence;
  const bool ok = std::abs(a[0] - 0.3958333333333333) <= 1e-12 &&
                  std::abs(a[1] - 0.6041666666666667) <= 1e-12 &&
                  (a.values() - b.values()).cwiseAbs().maxCoeff() <= 1e-10;
  o.require(ok, "worked example off");
  char buf[96];
  std::snprintf(buf, sizeof buf, "max deviation %.1e; worked example (%.6f, %.6f)", worst, a[0],
                a[1]);
  if (o.pass) o.detail = buf;
  return o;
}

// Counts are per forget class across the seed list; the worst class decides.
Outcome desk_scale() {
  Outcome o;
  const int classes = synth::SynthConfig{}.n_classes;
  int forget_nonzero = 0;
  int worst_eps = 10, worst_kl = 10, worst_mse = 10;
  double kl_mpru = 0, kl_pre = 0, pct = 0;
  for (ClassId j = 0; j < classes; ++j) {
    int eps_ok = 0, kl_ok = 0, mse_ok = 0;
    for (const auto seed : synth::kReferenceSeeds) {
      synth::SynthConfig config;
      config.seed = seed;
      const auto r = synth::run_experiment(config, j).report;
      forget_nonzero += r.accuracy.forget_accuracy != 0.0;
      eps_ok += r.accuracy.epsilon_r <= 0.05 && r.accuracy.epsilon_p <= 0.05;
      const double a = r.kl[2].forget_kl_mean;  // retrain-mpru
      const double b = r.kl[1].forget_kl_mean;  // pretrained(aligned)-retrain
      kl_ok += a < b;
      kl_mpru += a;
      kl_pre += b;
      mse_ok += r.mse.pct_below_mean >= 60.0;
      pct += r.mse.pct_below_mean;
    }
    worst_eps = std::min(worst_eps, eps_ok);
    worst_kl = std::min(worst_kl, kl_ok);
    worst_mse = std::min(worst_mse, mse_ok);
  }
  const double runs = classes * 10.0;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "forget acc nonzero in %d/%d runs; eps<=0.05 worst class %d/10; "
                "KL(retrain-mpru) < KL(pretrained-retrain) worst class %d/10 (means %.4f vs %.4f); "
                "pct_below_mean>=60 worst class %d/10 (mean %.1f%%)",
                forget_nonzero, static_cast<int>(runs), worst_eps, worst_kl, kl_mpru / runs,
                kl_pre / runs, worst_mse, pct / runs);
  o.require(forget_nonzero == 0, "forget accuracy");
  o.require(worst_eps >= 9, "accuracy gaps");
  o.require(worst_kl >= 8, "forget-set KL ordering");
  o.require(worst_mse >= 8, "MSE concentration");
  o.detail += (o.detail.empty() ? "" : " | ") + std::string(buf);
  return o;
}

Outcome metric_units() {
  Outcome o;
  const Eigen::Vector2d p(0.5, 0.5);
  o.require(kl_per_sample(p, p) == 0.0, "KL(p,p)");
  o.require(std::abs(kl_per_sample(p, Eigen::Vector2d(0.25, 0.75)) - 0.143841) <= 1e-6,
            "KL closed form");
  const auto a = PredictionSet::full(
      2, {{"x", 0, ConfidenceVector::from_nonnegative(Eigen::Vector2d(0.5, 0.5))}});
  const auto b = PredictionSet::full(
      2, {{"x", 0, ConfidenceVector::from_nonnegative(Eigen::Vector2d(0.3, 0.7))}});
  const auto mse = mse_stats(a, b);
  o.require(std::abs(mse.mean - 0.08) <= 1e-15, "MSE 0.08");
  const auto d = accuracy_differences(0.9364, 0.9310, 0.9224);
  o.require(std::abs(d.epsilon_p - 0.0054) <= 1e-12 && std::abs(d.epsilon_r - 0.0140) <= 1e-12,
            "accuracy differences");
  char buf[128];
  std::snprintf(buf, sizeof buf, "MSE %.17g, eps (%.4f, %.4f)", mse.mean, d.epsilon_p,
                d.epsilon_r);
  if (o.pass) o.detail = buf;
  return o;
}

Outcome scaling() {
  Outcome o;
  const std::vector<int> ns = {16, 32, 64, 128, 256};
  const auto r = bench::measure_scaling(ns, 1000, 10, 42);
  const auto cmp = bench::compare_with_retraining(synth::SynthConfig{}, 0, {}, 3);
  o.require(r.apply_slope.slope <= 1.3, "u-vector apply slope");
  o.require(r.dense_apply_slope.slope >= 1.6 && r.dense_apply_slope.slope <= 2.4,
            "dense apply slope");
  o.require(r.fit_gs_slope.slope >= 2.5 && r.fit_gs_slope.slope <= 3.5, "Gram-Schmidt fit slope");
  o.require(cmp.ratio >= 100.0, "retrain ratio");
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "apply %.2f, dense apply %.2f, GS fit %.2f, retrain/(fit+apply) %.0fx",
                r.apply_slope.slope, r.dense_apply_slope.slope, r.fit_gs_slope.slope, cmp.ratio);
  o.detail += (o.detail.empty() ? "" : " | ") + std::string(buf);
  return o;
}

std::string random_id(CounterRng& rng, int i, bool csv_safe) {
  static const std::string plain = "abcXYZ019-_.:/ ";
  static const std::vector<std::string> fancy = {"\"", "\\", "\xc3\xa9", "\xe6\x97\xa5", "\t", ","};
  std::string id = std::to_string(i) + "_";
  const int len = below(rng, 8);
  for (int k = 0; k < len; ++k) {
    if (!csv_safe && below(rng, 4) == 0) {
      id += fancy[static_cast<std::size_t>(below(rng, static_cast<int>(fancy.size())))];
    } else {
      id += plain[static_cast<std::size_t>(below(rng, static_cast<int>(plain.size())))];
    }
  }
  return id;
}

PredictionSet random_set(CounterRng& rng, bool csv_safe) {
  const int n_labels = 2 + below(rng, 12);
  std::vector<ClassId> space;
  for (ClassId k = 0; k < n_labels; ++k) {
    if (below(rng, 3) != 0) space.push_back(k);
  }
  if (space.empty()) space.push_back(n_labels - 1);
  // CSV carries no label count; it is recovered from the widest column.
  if (csv_safe) space.back() = n_labels - 1;
  const int records = below(rng, 20);
  std::vector<PredictionRecord> recs;
  for (int r = 0; r < records; ++r) {
    Eigen::VectorXd v = awkward_simplex(rng, static_cast<Index>(space.size()), 0);
    if (below(rng, 3) == 0) v *= 1.0 + (rng.uniform() - 0.5) * 1e-13;  // not exactly normalized
    recs.push_back({random_id(rng, r, csv_safe), below(rng, n_labels),
                    ConfidenceVector::from_nonnegative(v)});
  }
  return PredictionSet(n_labels, space, std::move(recs));
}

Outcome round_trips() {
  Outcome o;
  CounterRng rng(7, 7, 0, 0);
  int jsonl_bad = 0, csv_bad = 0, filter_bad = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto js = random_set(rng, false);
    std::stringstream a;
    io::write_predictions(js, a, io::PredictionFormat::Jsonl);
    jsonl_bad += !(io::read_predictions(a, io::PredictionFormat::Jsonl) == js);

    const auto cs = random_set(rng, true);
    std::stringstream b;
    io::write_predictions(cs, b, io::PredictionFormat::Csv);
    csv_bad += !(io::read_predictions(b, io::PredictionFormat::Csv) == cs);

    const int n = 2 + below(rng, 30);
    const auto f = random_filter(rng, n, below(rng, n));
    const std::string text = io::filter_to_string(f);
    const auto back = io::filter_from_string(text);
    filter_bad += !(back == f) || io::filter_to_string(back) != text;
  }
  o.require(jsonl_bad == 0, std::to_string(jsonl_bad) + " JSONL mismatches");
  o.require(csv_bad == 0, std::to_string(csv_bad) + " CSV mismatches");
  o.require(filter_bad == 0, std::to_string(filter_bad) + " filter mismatches");
  if (o.pass) o.detail = "1000 JSONL sets, 1000 CSV sets, 1000 filters bit-exact";
  return o;
}

struct Criterion {
  const char* name;
  double limit_s;
  std::function<Outcome()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"simplex closure (10k pairs, n in 3..64)", 5.0, simplex_closure},
      {"projector algebra (1k centroids)", 10.0, projector_algebra},
      {"oracle equivalence (100 instances)", 30.0, oracle_equivalence},
      {"desk-scale experiment (10 seeds x 6 classes)", 300.0, desk_scale},
      {"metric unit values", 1.0, metric_units},
      {"scaling slopes and retrain ratio", 120.0, scaling},
      {"round-trip laws (1k objects)", 10.0, round_trips},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (s > c.limit_s) {
      o.pass = false;
      o.detail += " | over time limit " + std::to_string(c.limit_s) + "s";
    }
    failed += !o.pass;
    std::printf("%s  %s [%.2fs] %s\n", o.pass ? "PASS" : "FAIL", c.name, s, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
