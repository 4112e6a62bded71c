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

// mpru: fit / apply / eval / synth / bench.
// Exit codes: 0 ok, 1 I/O, 2 validation or usage, 3 assumption check failed.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mpru/bench.hpp"
#include "mpru/filter.hpp"
#include "mpru/io.hpp"
#include "mpru/metrics.hpp"
#include "mpru/synth.hpp"

namespace {

using namespace mpru;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;
constexpr int kExitAssumption = 3;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::IoError: return kExitIo;
    case Errc::AssumptionViolated: return kExitAssumption;
    default: return kExitValidation;
  }
}

void print_diagnostics(const Diagnostics& d) {
  std::cerr << "forget_accuracy=" << d.forget_accuracy
            << " mean_top_confidence=" << d.mean_top_confidence << " n_samples=" << d.n_samples
            << " assumption_met=" << (d.assumption_met ? "true" : "false") << '\n';
}

struct FitArgs {
  std::string input;
  std::string out = "-";
  int forget_class = 0;
  bool require_assumptions = false;
};

int run_fit(const FitArgs& a) {
  const auto preds = io::read_predictions(a.input);
  const auto model = fit(preds, ForgetSpec{a.forget_class}, {a.require_assumptions});
  print_diagnostics(model.diagnostics());
  io::save_filter(model, a.out);
  return kExitOk;
}

struct ApplyArgs {
  std::string filter;
  std::string input = "-";
  std::string out = "-";
  bool stream = false;
  unsigned threads = 0;
};

// One JSONL record per input line, flushed as soon as it is filtered. Bad
// lines are reported on stderr and skipped.
int run_stream(const FilterModel& model, std::istream& in, std::ostream& out) {
  const io::PredictionHeader expected{model.n(), model.label_space()};
  io::PredictionWriter writer(out, io::PredictionFormat::Jsonl,
                              {model.n(), model.retained_label_space()}, true);
  std::string line;
  std::size_t line_no = 0;
  std::size_t errors = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      if (first) {
        first = false;
        if (auto header = io::parse_header_line(line)) {
          if (!(*header == expected)) {
            throw Error(Errc::DimensionMismatch,
                        "input header does not match the filter's " + std::to_string(model.n()) +
                            "-label space");
          }
          continue;
        }
      }
      const auto record = io::parse_record_line(line, expected, line_no);
      writer.write({record.id, record.label, apply(model, record.confidence)});
    } catch (const Error& e) {
      if (e.code() == Errc::IoError) throw;
      ++errors;
      io::Json err;
      err["line"] = line_no;
      err["error"] = to_string(e.code());
      err["message"] = e.what();
      std::cerr << err.dump() << '\n' << std::flush;
    }
  }
  std::cerr << "records=" << writer.count() << " errors=" << errors << '\n';
  return kExitOk;
}

int run_apply(const ApplyArgs& a) {
  const auto model = io::load_filter(a.filter);
  if (a.stream) {
    if (a.input == "-" && a.out == "-") return run_stream(model, std::cin, std::cout);
    std::ifstream file_in;
    std::ofstream file_out;
    if (a.input != "-") {
      file_in.open(a.input);
      if (!file_in) throw Error(Errc::IoError, "cannot open '" + a.input + "'");
    }
    if (a.out != "-") {
      file_out.open(a.out, std::ios::binary);
      if (!file_out) throw Error(Errc::IoError, "cannot open '" + a.out + "' for writing");
    }
    return run_stream(model, a.input == "-" ? std::cin : file_in,
                      a.out == "-" ? std::cout : static_cast<std::ostream&>(file_out));
  }
  const auto preds = io::read_predictions(a.input);
  io::write_predictions(apply_batch(model, preds, a.threads), a.out);
  return kExitOk;
}

struct EvalArgs {
  std::string unlearned;
  std::string retrained;
  std::string pretrained;
  std::string out = "-";
  int forget_class = 0;
};

int run_eval(const EvalArgs& a) {
  const auto unlearned = io::read_predictions(a.unlearned);
  const auto retrained = io::read_predictions(a.retrained);
  const auto pretrained = io::read_predictions(a.pretrained);
  const auto start = std::chrono::steady_clock::now();
  auto report = evaluate(pretrained, retrained, unlearned, ForgetSpec{a.forget_class});
  report.runtimes["eval_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_text(a.out, io::canonical_dump(io::report_to_json(report)));
  return kExitOk;
}

struct SynthArgs {
  synth::SynthConfig config;
  synth::TrainerParams params;
  std::string config_path;
  std::string out_dir;
  int forget_class = 0;
};

int run_synth(SynthArgs a, const CLI::App& cmd) {
  if (!a.config_path.empty()) {
    // File values first, then any flag given explicitly on the command line.
    const SynthArgs flags = a;
    a.config = {};
    a.params = {};
    io::Json doc;
    try {
      doc = io::Json::parse(io::read_text(a.config_path));
    } catch (const io::Json::parse_error& e) {
      throw Error(Errc::SchemaError, e.what());
    }
    io::synth_config_from_json(doc, a.config, a.params);
    auto given = [&](const char* name) { return cmd.count(name) > 0; };
    if (given("--classes")) a.config.n_classes = flags.config.n_classes;
    if (given("--dim")) a.config.dim = flags.config.dim;
    if (given("--per-class")) a.config.per_class_train = flags.config.per_class_train;
    if (given("--per-class-test")) a.config.per_class_test = flags.config.per_class_test;
    if (given("--separation")) a.config.class_separation = flags.config.class_separation;
    if (given("--sigma")) a.config.noise_sigma = flags.config.noise_sigma;
    if (given("--seed")) a.config.seed = flags.config.seed;
    if (given("--epochs")) a.params.epochs = flags.params.epochs;
    if (given("--lr")) a.params.learning_rate = flags.params.learning_rate;
  }
  a.config.validate();
  ForgetSpec{a.forget_class}.check(a.config.n_classes);

  std::error_code ec;
  fs::create_directories(a.out_dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create '" + a.out_dir + "': " + ec.message());

  const auto result = synth::run_experiment(a.config, a.forget_class, a.params);
  const fs::path dir(a.out_dir);
  io::write_predictions(result.pretrained, dir / "pretrained.jsonl");
  io::write_predictions(result.retrained, dir / "retrained.jsonl");
  io::write_predictions(result.unlearned, dir / "unlearned.jsonl");
  io::save_filter(result.filter, dir / "filter.json");
  io::write_text(dir / "report.json", io::canonical_dump(io::report_to_json(result.report)));
  print_diagnostics(result.filter.diagnostics());
  return kExitOk;
}

struct BenchArgs {
  std::vector<int> n_list = {8, 16, 32, 64, 128};
  std::size_t samples = 1000;
  int repetitions = 10;
  std::uint64_t seed = 42;
  bool with_retrain = false;
  std::string out = "-";
};

int run_bench(const BenchArgs& a) {
  auto report = bench::measure_scaling(a.n_list, a.samples, a.repetitions, a.seed);
  if (a.with_retrain) {
    report.retrain = bench::compare_with_retraining(synth::SynthConfig{}, 0, {}, 3);
  }
  io::write_text(a.out, io::canonical_dump(bench::report_to_json(report)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Post-hoc class unlearning filter"};
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a filter from pretrained predictions");
  fit_cmd->add_option("--input", fit_args.input, "Pretrained predictions (JSONL/CSV, - for stdin)")
      ->required();
  fit_cmd->add_option("--forget-class", fit_args.forget_class, "Class id to unlearn")->required();
  fit_cmd->add_option("--out", fit_args.out, "Filter artifact path");
  fit_cmd->add_flag("--require-assumptions", fit_args.require_assumptions,
                    "Fail with exit 3 when the pretrained model is not confident on the class");

  ApplyArgs apply_args;
  auto* apply_cmd = app.add_subcommand("apply", "Filter predictions through a fitted filter");
  apply_cmd->add_option("--filter", apply_args.filter, "Filter artifact")->required();
  apply_cmd->add_option("--input", apply_args.input, "Predictions to filter");
  apply_cmd->add_option("--out", apply_args.out, "Output predictions");
  apply_cmd->add_flag("--stream", apply_args.stream, "Filter line by line, flushing each record");
  apply_cmd->add_option("--threads", apply_args.threads, "Batch worker threads (0 = all cores)");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Compare unlearned, retrained and pretrained outputs");
  eval_cmd->add_option("--unlearned", eval_args.unlearned)->required();
  eval_cmd->add_option("--retrained", eval_args.retrained)->required();
  eval_cmd->add_option("--pretrained", eval_args.pretrained)->required();
  eval_cmd->add_option("--forget-class", eval_args.forget_class)->required();
  eval_cmd->add_option("--out", eval_args.out, "Report path");

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Run the synthetic end-to-end experiment");
  synth_cmd->add_option("--classes", synth_args.config.n_classes);
  synth_cmd->add_option("--dim", synth_args.config.dim);
  synth_cmd->add_option("--per-class", synth_args.config.per_class_train, "Training rows per class");
  synth_cmd->add_option("--per-class-test", synth_args.config.per_class_test);
  synth_cmd->add_option("--separation", synth_args.config.class_separation);
  synth_cmd->add_option("--sigma", synth_args.config.noise_sigma);
  synth_cmd->add_option("--seed", synth_args.config.seed);
  synth_cmd->add_option("--epochs", synth_args.params.epochs);
  synth_cmd->add_option("--lr", synth_args.params.learning_rate);
  synth_cmd->add_option("--forget-class", synth_args.forget_class);
  synth_cmd->add_option("--config", synth_args.config_path, "JSON config; flags override it");
  synth_cmd->add_option("--out-dir", synth_args.out_dir)->required();

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Measure scaling in the label count");
  bench_cmd->add_option("--n-list", bench_args.n_list, "Label counts, comma separated")
      ->delimiter(',');
  bench_cmd->add_option("--samples", bench_args.samples);
  bench_cmd->add_option("--reps", bench_args.repetitions);
  bench_cmd->add_option("--seed", bench_args.seed);
  bench_cmd->add_flag("--with-retrain", bench_args.with_retrain,
                      "Also time synthetic retraining against fit + apply");
  bench_cmd->add_option("--out", bench_args.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*fit_cmd) return run_fit(fit_args);
    if (*apply_cmd) return run_apply(apply_args);
    if (*eval_cmd) return run_eval(eval_args);
    if (*synth_cmd) return run_synth(synth_args, *synth_cmd);
    if (*bench_cmd) return run_bench(bench_args);
  } catch (const Error& e) {
    std::cerr << "mpru: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "mpru: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitValidation;
}
