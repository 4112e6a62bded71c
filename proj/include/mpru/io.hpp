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

// Interchange formats.
//
// Predictions (JSONL), one object per line, optionally preceded by a header:
//   {"format":"mpru-preds","version":1,"n_labels":6,"label_space":[0,1,2,3,4,5]}
//   {"id":"test-c0-000000","label":0,"probs":[0.91,0.02,...]}
// Without a header the label space is the identity over the first record's
// width. Floats are written in shortest round-trip form.
//
// Predictions (CSV): header `id,label,p<id>,...` where <id> is the original
// class id of each column, so 0..k-1 for full-width outputs.
//
// Filter artifacts, reports and bench reports are canonical JSON documents:
// fixed key order, two-space indent, floats with 17 significant digits.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mpru/core.hpp"
#include "mpru/filter.hpp"
#include "mpru/metrics.hpp"
#include "mpru/synth.hpp"

namespace mpru::io {

using Json = nlohmann::ordered_json;

enum class PredictionFormat { Jsonl, Csv };

/// Parses "jsonl" or "csv"; throws InvalidArgument otherwise.
PredictionFormat parse_format(std::string_view name);
/// Picks CSV for a ".csv" extension, JSONL otherwise.
PredictionFormat format_for_path(const std::filesystem::path& path);

struct PredictionHeader {
  int n_labels = 0;
  std::vector<ClassId> label_space;

  friend bool operator==(const PredictionHeader&, const PredictionHeader&) = default;
};

std::string format_double_shortest(double value);
std::string format_double_17(double value);

std::string format_header_line(const PredictionHeader& header);
std::string format_record_line(const PredictionRecord& record);

/// A header line is a JSON object whose "format" is "mpru-preds"; anything
/// else yields nullopt. Throws ParseError/VersionMismatch for a malformed header.
std::optional<PredictionHeader> parse_header_line(std::string_view line);

/// Parses and validates one record line against `header`. Errors are
/// ParseError (syntax or schema), ValidationError (probabilities), or
/// InconsistentDimensions (width), with `line_number` in the message.
PredictionRecord parse_record_line(std::string_view line, const PredictionHeader& header,
                                   std::size_t line_number);

PredictionSet read_predictions(std::istream& in, PredictionFormat format);
PredictionSet read_predictions(const std::filesystem::path& path);

void write_predictions(const PredictionSet& set, std::ostream& out, PredictionFormat format);
void write_predictions(const PredictionSet& set, const std::filesystem::path& path);

/// Incremental writer: emits the header on construction and one line per
/// record, holding nothing beyond the current line.
class PredictionWriter {
 public:
  PredictionWriter(std::ostream& out, PredictionFormat format, PredictionHeader header,
                   bool flush_each = false);

  void write(const PredictionRecord& record);
  std::size_t count() const noexcept { return count_; }

 private:
  std::ostream& out_;
  PredictionFormat format_;
  PredictionHeader header_;
  bool flush_each_;
  std::size_t count_ = 0;
};

/// Key-ordered, 17-digit JSON text with a trailing newline.
std::string canonical_dump(const Json& doc);

Json filter_to_json(const FilterModel& model);
/// Throws VersionMismatch or SchemaError.
FilterModel filter_from_json(const Json& doc);
std::string filter_to_string(const FilterModel& model);
FilterModel filter_from_string(std::string_view text);
void save_filter(const FilterModel& model, const std::filesystem::path& path);
FilterModel load_filter(const std::filesystem::path& path);

Json report_to_json(const EvaluationReport& report);

Json synth_config_to_json(const synth::SynthConfig& config, const synth::TrainerParams& params);
/// Missing keys keep their defaults; unknown keys are a SchemaError.
void synth_config_from_json(const Json& doc, synth::SynthConfig& config,
                            synth::TrainerParams& params);

/// Whole-file helpers; "-" means standard input / output.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace mpru::io
