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

#include "mpru/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace mpru::io {

namespace {

constexpr std::string_view kPredsFormat = "mpru-preds";
constexpr std::string_view kFilterFormat = "mpru-filter";
constexpr std::string_view kReportFormat = "mpru-report";
constexpr int kVersion = 1;

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

[[noreturn]] void schema_error(const std::string& what) { throw Error(Errc::SchemaError, what); }

// --- canonical JSON ---------------------------------------------------------

bool is_scalar(const Json& v) { return !v.is_object() && !v.is_array(); }

void dump_scalar(const Json& v, std::string& out) {
  if (v.is_number_float()) {
    out += format_double_17(v.get<double>());
  } else {
    out += v.dump();
  }
}

void dump_value(const Json& v, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  if (v.is_object()) {
    if (v.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (!first) out += ",\n";
      first = false;
      out += pad;
      out += Json(it.key()).dump();
      out += ": ";
      dump_value(it.value(), depth + 1, out);
    }
    out += "\n" + close_pad + "}";
  } else if (v.is_array()) {
    if (v.empty()) {
      out += "[]";
      return;
    }
    if (std::all_of(v.begin(), v.end(), is_scalar)) {
      out += "[";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        dump_scalar(v[i], out);
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ",\n";
      out += pad;
      dump_value(v[i], depth + 1, out);
    }
    out += "\n" + close_pad + "]";
  } else {
    dump_scalar(v, out);
  }
}

// --- schema helpers ---------------------------------------------------------

const Json& require(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) schema_error(std::string("missing key '") + key + "'");
  return doc.at(key);
}

int require_int(const Json& doc, const char* key) {
  const Json& v = require(doc, key);
  if (!v.is_number_integer()) schema_error(std::string("'") + key + "' must be an integer");
  return v.get<int>();
}

double require_number(const Json& doc, const char* key) {
  const Json& v = require(doc, key);
  if (!v.is_number()) schema_error(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::vector<ClassId> require_ids(const Json& doc, const char* key) {
  const Json& v = require(doc, key);
  if (!v.is_array()) schema_error(std::string("'") + key + "' must be an array");
  std::vector<ClassId> ids;
  for (const auto& e : v) {
    if (!e.is_number_integer()) schema_error(std::string("'") + key + "' must hold integers");
    ids.push_back(e.get<ClassId>());
  }
  return ids;
}

Eigen::VectorXd require_vector(const Json& doc, const char* key) {
  const Json& v = require(doc, key);
  if (!v.is_array()) schema_error(std::string("'") + key + "' must be an array");
  Eigen::VectorXd out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) schema_error(std::string("'") + key + "' must hold numbers");
    out[static_cast<Index>(i)] = v[i].get<double>();
  }
  return out;
}

Json to_array(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json to_array(const std::vector<ClassId>& ids) {
  Json a = Json::array();
  for (ClassId id : ids) a.push_back(id);
  return a;
}

// --- CSV --------------------------------------------------------------------

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename T>
bool parse_number(std::string_view text, T& value) {
  const auto* end = text.data() + text.size();
  const auto result = std::from_chars(text.data(), end, value);
  return result.ec == std::errc() && result.ptr == end;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

PredictionSet read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error(Errc::ParseError, "CSV input is empty");
  ++line_no;
  const auto header = split_csv(strip_cr(line));
  if (header.size() < 3 || header[0] != "id" || header[1] != "label") {
    throw Error(Errc::ParseError, at_line(1) + "expected header 'id,label,p<id>,...'");
  }
  std::vector<ClassId> label_space;
  for (std::size_t i = 2; i < header.size(); ++i) {
    ClassId id = 0;
    if (header[i].size() < 2 || header[i][0] != 'p' || !parse_number(header[i].substr(1), id)) {
      throw Error(Errc::ParseError, at_line(1) + "bad probability column '" +
                                        std::string(header[i]) + "'");
    }
    label_space.push_back(id);
  }

  std::vector<PredictionRecord> records;
  ClassId max_id = label_space.empty() ? 0 : *std::max_element(label_space.begin(), label_space.end());
  std::vector<double> probs(label_space.size());
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = strip_cr(line);
    if (text.empty()) continue;
    const auto fields = split_csv(text);
    if (fields.size() != header.size()) {
      throw Error(Errc::InconsistentDimensions, at_line(line_no) + "expected " +
                                                    std::to_string(header.size()) + " fields, got " +
                                                    std::to_string(fields.size()));
    }
    ClassId label = 0;
    if (!parse_number(fields[1], label)) {
      throw Error(Errc::ParseError, at_line(line_no) + "bad label '" + std::string(fields[1]) + "'");
    }
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (!parse_number(fields[i + 2], probs[i])) {
        throw Error(Errc::ParseError, at_line(line_no) + "bad probability '" +
                                          std::string(fields[i + 2]) + "'");
      }
    }
    try {
      records.push_back({std::string(fields[0]), label, validate_confidence(probs)});
    } catch (const Error& e) {
      throw Error(Errc::ValidationError, at_line(line_no) + e.what());
    }
    max_id = std::max(max_id, label);
  }
  // CSV carries no label-count header: the label space is the widest id seen.
  return PredictionSet(max_id + 1, std::move(label_space), std::move(records));
}

bool csv_safe(std::string_view id) {
  return id.find_first_of(",\"\r\n") == std::string_view::npos;
}

}  // namespace

PredictionFormat parse_format(std::string_view name) {
  if (name == "jsonl") return PredictionFormat::Jsonl;
  if (name == "csv") return PredictionFormat::Csv;
  throw Error(Errc::InvalidArgument, "unknown prediction format '" + std::string(name) + "'");
}

PredictionFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? PredictionFormat::Csv : PredictionFormat::Jsonl;
}

std::string format_double_shortest(double value) {
  if (!std::isfinite(value)) throw Error(Errc::InvalidArgument, "cannot serialize non-finite value");
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

std::string format_double_17(double value) {
  if (!std::isfinite(value)) throw Error(Errc::InvalidArgument, "cannot serialize non-finite value");
  char buf[64];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::string format_header_line(const PredictionHeader& header) {
  std::string out = "{\"format\":\"mpru-preds\",\"version\":1,\"n_labels\":";
  out += std::to_string(header.n_labels);
  out += ",\"label_space\":[";
  for (std::size_t i = 0; i < header.label_space.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(header.label_space[i]);
  }
  out += "]}";
  return out;
}

std::string format_record_line(const PredictionRecord& record) {
  std::string out = "{\"id\":";
  out += Json(record.id).dump();
  out += ",\"label\":";
  out += std::to_string(record.label);
  out += ",\"probs\":[";
  const auto& v = record.confidence.values();
  for (Index i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double_shortest(v[i]);
  }
  out += "]}";
  return out;
}

std::optional<PredictionHeader> parse_header_line(std::string_view line) {
  Json doc;
  try {
    doc = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::ParseError, at_line(1) + e.what());
  }
  if (!doc.is_object() || !doc.contains("format")) return std::nullopt;
  if (!doc["format"].is_string() || doc["format"].get<std::string>() != kPredsFormat) {
    throw Error(Errc::ParseError, at_line(1) + "unknown header format");
  }
  try {
    const int version = require_int(doc, "version");
    if (version != kVersion) {
      throw Error(Errc::VersionMismatch, "prediction file version " + std::to_string(version) +
                                             ", supported " + std::to_string(kVersion));
    }
    PredictionHeader header;
    header.n_labels = require_int(doc, "n_labels");
    header.label_space = doc.contains("label_space") ? require_ids(doc, "label_space")
                                                     : identity_label_space(header.n_labels);
    // Fails early on an inconsistent label space.
    PredictionSet(header.n_labels, header.label_space);
    return header;
  } catch (const Error& e) {
    if (e.code() == Errc::VersionMismatch) throw;
    throw Error(Errc::ParseError, at_line(1) + e.what());
  }
}

PredictionRecord parse_record_line(std::string_view line, const PredictionHeader& header,
                                   std::size_t line_number) {
  Json doc;
  try {
    doc = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::ParseError, at_line(line_number) + e.what());
  }
  if (!doc.is_object() || !doc.contains("id") || !doc.contains("label") || !doc.contains("probs")) {
    throw Error(Errc::ParseError, at_line(line_number) + "record needs 'id', 'label', 'probs'");
  }
  const Json& id = doc["id"];
  const Json& label = doc["label"];
  const Json& probs = doc["probs"];
  if (!id.is_string()) throw Error(Errc::ParseError, at_line(line_number) + "'id' must be a string");
  if (!label.is_number_integer()) {
    throw Error(Errc::ParseError, at_line(line_number) + "'label' must be an integer");
  }
  if (!probs.is_array()) throw Error(Errc::ParseError, at_line(line_number) + "'probs' must be an array");
  if (probs.size() != header.label_space.size()) {
    throw Error(Errc::InconsistentDimensions,
                at_line(line_number) + "expected " + std::to_string(header.label_space.size()) +
                    " probabilities, got " + std::to_string(probs.size()));
  }
  std::vector<double> values(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!probs[i].is_number()) {
      throw Error(Errc::ParseError, at_line(line_number) + "probabilities must be numbers");
    }
    values[i] = probs[i].get<double>();
  }
  const ClassId y = label.get<ClassId>();
  if (y < 0 || y >= header.n_labels) {
    throw Error(Errc::ValidationError, at_line(line_number) + "label " + std::to_string(y) +
                                           " outside [0, " + std::to_string(header.n_labels) + ")");
  }
  try {
    return {id.get<std::string>(), y, validate_confidence(values)};
  } catch (const Error& e) {
    throw Error(Errc::ValidationError, at_line(line_number) + e.what());
  }
}

PredictionSet read_predictions(std::istream& in, PredictionFormat format) {
  if (format == PredictionFormat::Csv) return read_csv(in);

  std::string line;
  std::size_t line_no = 0;
  std::optional<PredictionHeader> header;
  std::vector<PredictionRecord> records;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = strip_cr(line);
    if (text.find_first_not_of(" \t") == std::string_view::npos) continue;
    if (first) {
      first = false;
      header = parse_header_line(text);
      if (header) continue;
      // No header: identity space over the first record's width.
      Json doc;
      try {
        doc = Json::parse(text);
      } catch (const Json::parse_error& e) {
        throw Error(Errc::ParseError, at_line(line_no) + e.what());
      }
      if (!doc.is_object() || !doc.contains("probs") || !doc["probs"].is_array() ||
          doc["probs"].empty()) {
        throw Error(Errc::ParseError, at_line(line_no) + "record needs a nonempty 'probs' array");
      }
      const int width = static_cast<int>(doc["probs"].size());
      header = PredictionHeader{width, identity_label_space(width)};
    }
    records.push_back(parse_record_line(text, *header, line_no));
  }
  if (!header) throw Error(Errc::ParseError, "prediction input is empty");
  try {
    return PredictionSet(header->n_labels, header->label_space, std::move(records));
  } catch (const Error& e) {
    throw Error(Errc::ValidationError, e.what());
  }
}

PredictionSet read_predictions(const std::filesystem::path& path) {
  if (path == "-") return read_predictions(std::cin, PredictionFormat::Jsonl);
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path.string() + "'");
  return read_predictions(in, format_for_path(path));
}

PredictionWriter::PredictionWriter(std::ostream& out, PredictionFormat format,
                                   PredictionHeader header, bool flush_each)
    : out_(out), format_(format), header_(std::move(header)), flush_each_(flush_each) {
  if (format_ == PredictionFormat::Jsonl) {
    out_ << format_header_line(header_) << '\n';
  } else {
    out_ << "id,label";
    for (ClassId id : header_.label_space) out_ << ",p" << id;
    out_ << '\n';
  }
  if (flush_each_) out_.flush();
  if (!out_) throw Error(Errc::IoError, "write failed");
}

void PredictionWriter::write(const PredictionRecord& record) {
  if (record.confidence.size() != static_cast<Index>(header_.label_space.size())) {
    throw Error(Errc::InconsistentDimensions, "record '" + record.id + "' has the wrong width");
  }
  if (format_ == PredictionFormat::Jsonl) {
    out_ << format_record_line(record) << '\n';
  } else {
    if (!csv_safe(record.id)) {
      throw Error(Errc::InvalidArgument, "id '" + record.id + "' cannot be written as CSV");
    }
    std::string row = record.id + "," + std::to_string(record.label);
    const auto& v = record.confidence.values();
    for (Index i = 0; i < v.size(); ++i) row += "," + format_double_shortest(v[i]);
    out_ << row << '\n';
  }
  if (flush_each_) out_.flush();
  if (!out_) throw Error(Errc::IoError, "write failed");
  ++count_;
}

void write_predictions(const PredictionSet& set, std::ostream& out, PredictionFormat format) {
  PredictionWriter writer(out, format, {set.n_labels(), set.label_space()});
  for (const auto& rec : set) writer.write(rec);
  out.flush();
}

void write_predictions(const PredictionSet& set, const std::filesystem::path& path) {
  if (path == "-") {
    write_predictions(set, std::cout, PredictionFormat::Jsonl);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot open '" + path.string() + "' for writing");
  write_predictions(set, out, format_for_path(path));
  if (!out) throw Error(Errc::IoError, "write to '" + path.string() + "' failed");
}

std::string canonical_dump(const Json& doc) {
  std::string out;
  dump_value(doc, 0, out);
  out += '\n';
  return out;
}

Json filter_to_json(const FilterModel& model) {
  const Diagnostics& d = model.diagnostics();
  Json diagnostics;
  diagnostics["forget_accuracy"] = d.forget_accuracy;
  diagnostics["mean_top_confidence"] = d.mean_top_confidence;
  diagnostics["n_samples"] = d.n_samples;
  diagnostics["assumption_met"] = d.assumption_met;

  Json doc;
  doc["format"] = kFilterFormat;
  doc["version"] = kVersion;
  doc["forget_class"] = model.forget_class();
  doc["n"] = model.n();
  doc["label_space"] = to_array(model.label_space());
  doc["retained_label_space"] = to_array(model.retained_label_space());
  doc["centroid"] = to_array(model.centroid().values);
  doc["distribution_ratio"] = to_array(model.distribution_ratio());
  doc["diagnostics"] = std::move(diagnostics);
  return doc;
}

FilterModel filter_from_json(const Json& doc) {
  const Json& format = require(doc, "format");
  if (!format.is_string() || format.get<std::string>() != kFilterFormat) {
    schema_error("not an mpru-filter document");
  }
  const int version = require_int(doc, "version");
  if (version != kVersion) {
    throw Error(Errc::VersionMismatch, "filter artifact version " + std::to_string(version) +
                                           ", supported " + std::to_string(kVersion));
  }
  const int n = require_int(doc, "n");
  if (n < 2) schema_error("'n' must be >= 2");
  const ForgetSpec spec{require_int(doc, "forget_class")};
  if (spec.forget_class < 0 || spec.forget_class >= n) schema_error("'forget_class' out of range");
  if (require_ids(doc, "label_space") != identity_label_space(n)) {
    schema_error("'label_space' must be 0..n-1");
  }
  if (require_ids(doc, "retained_label_space") != spec.retained_label_space(n)) {
    schema_error("'retained_label_space' must list every id except forget_class");
  }
  Eigen::VectorXd centroid = require_vector(doc, "centroid");
  Eigen::VectorXd ratio = require_vector(doc, "distribution_ratio");
  if (centroid.size() != n) schema_error("'centroid' must have n entries");
  if (ratio.size() != n - 1) schema_error("'distribution_ratio' must have n-1 entries");
  if (centroid.minCoeff() < 0.0 || std::abs(centroid.sum() - 1.0) > 1e-9) {
    schema_error("'centroid' is not on the simplex within 1e-9");
  }
  if (ratio.minCoeff() < 0.0 || std::abs(ratio.sum() - 1.0) > 1e-9) {
    schema_error("'distribution_ratio' does not sum to 1 within 1e-9");
  }

  const Json& diag = require(doc, "diagnostics");
  Diagnostics d;
  d.forget_accuracy = require_number(diag, "forget_accuracy");
  d.mean_top_confidence = require_number(diag, "mean_top_confidence");
  const int samples = require_int(diag, "n_samples");
  if (samples < 1) schema_error("'n_samples' must be >= 1");
  d.n_samples = static_cast<std::size_t>(samples);
  const Json& met = require(diag, "assumption_met");
  if (!met.is_boolean()) schema_error("'assumption_met' must be a boolean");
  d.assumption_met = met.get<bool>();

  try {
    return FilterModel(spec, n, Centroid{std::move(centroid), d.n_samples}, std::move(ratio), d);
  } catch (const Error& e) {
    schema_error(e.what());
  }
}

std::string filter_to_string(const FilterModel& model) {
  return canonical_dump(filter_to_json(model));
}

FilterModel filter_from_string(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::SchemaError, e.what());
  }
  return filter_from_json(doc);
}

void save_filter(const FilterModel& model, const std::filesystem::path& path) {
  write_text(path, filter_to_string(model));
}

FilterModel load_filter(const std::filesystem::path& path) {
  return filter_from_string(read_text(path));
}

Json report_to_json(const EvaluationReport& report) {
  Json doc;
  doc["format"] = kReportFormat;
  doc["version"] = kVersion;
  doc["forget_class"] = report.forget_class;
  doc["n_forget"] = report.n_forget;
  doc["n_retain"] = report.n_retain;

  const AccuracyReport& a = report.accuracy;
  Json acc;
  acc["pretrained_retain"] = a.pretrained_retain_accuracy;
  acc["retrained_retain"] = a.retrained_retain_accuracy;
  acc["mpru_retain"] = a.retain_accuracy;
  acc["mpru_forget"] = a.forget_accuracy;
  acc["epsilon_p"] = a.epsilon_p;
  acc["epsilon_r"] = a.epsilon_r;
  doc["accuracy"] = std::move(acc);

  Json kl = Json::array();
  for (const auto& k : report.kl) {
    Json e;
    e["pair"] = k.pair_name;
    e["direction"] = k.direction;
    e["retain_kl"] = k.retain_kl_mean;
    e["forget_kl"] = k.forget_kl_mean;
    kl.push_back(std::move(e));
  }
  doc["kl"] = std::move(kl);

  Json mse;
  mse["mean"] = report.mse.mean;
  mse["std"] = report.mse.std;
  mse["max"] = report.mse.max;
  mse["pct_below_mean"] = report.mse.pct_below_mean;
  doc["mse"] = std::move(mse);

  Json hist = Json::object();
  for (const auto& [model, counts] : report.histograms) {
    Json h = Json::object();
    for (const auto& [id, count] : counts) h[std::to_string(id)] = count;
    hist[model] = std::move(h);
  }
  doc["histograms"] = std::move(hist);

  Json runtimes = Json::object();
  for (const auto& [stage, seconds] : report.runtimes) runtimes[stage] = seconds;
  doc["runtimes"] = std::move(runtimes);
  return doc;
}

Json synth_config_to_json(const synth::SynthConfig& config, const synth::TrainerParams& params) {
  Json doc;
  doc["n_classes"] = config.n_classes;
  doc["dim"] = config.dim;
  doc["per_class_train"] = config.per_class_train;
  doc["per_class_test"] = config.per_class_test;
  doc["class_separation"] = config.class_separation;
  doc["noise_sigma"] = config.noise_sigma;
  doc["seed"] = config.seed;
  doc["epochs"] = params.epochs;
  doc["learning_rate"] = params.learning_rate;
  return doc;
}

void synth_config_from_json(const Json& doc, synth::SynthConfig& config,
                            synth::TrainerParams& params) {
  if (!doc.is_object()) schema_error("config must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    const Json& v = it.value();
    auto as_int = [&]() {
      if (!v.is_number_integer()) schema_error("'" + key + "' must be an integer");
      return v.get<int>();
    };
    auto as_double = [&]() {
      if (!v.is_number()) schema_error("'" + key + "' must be a number");
      return v.get<double>();
    };
    if (key == "n_classes") config.n_classes = as_int();
    else if (key == "dim") config.dim = as_int();
    else if (key == "per_class_train") config.per_class_train = as_int();
    else if (key == "per_class_test") config.per_class_test = as_int();
    else if (key == "class_separation") config.class_separation = as_double();
    else if (key == "noise_sigma") config.noise_sigma = as_double();
    else if (key == "seed") {
      if (!v.is_number_unsigned()) schema_error("'seed' must be a nonnegative integer");
      config.seed = v.get<std::uint64_t>();
    } else if (key == "epochs") params.epochs = as_int();
    else if (key == "learning_rate") params.learning_rate = as_double();
    else schema_error("unknown config key '" + key + "'");
  }
}

std::string read_text(const std::filesystem::path& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error(Errc::IoError, "write to '" + path.string() + "' failed");
}

}  // namespace mpru::io
