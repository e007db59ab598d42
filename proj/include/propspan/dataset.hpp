#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "propspan/annotation.hpp"
#include "propspan/tag_codec.hpp"

namespace propspan {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line_no, const std::string& reason)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + reason),
        line_no_(line_no) {}

  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string id, std::vector<std::string> violations)
      : std::runtime_error(build_message(id, violations)),
        id_(std::move(id)),
        violations_(std::move(violations)) {}

  const std::string& id() const { return id_; }
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string build_message(const std::string& id,
                                   const std::vector<std::string>& violations) {
    std::string msg = "annotation \"" + id + "\" is invalid:";
    for (const auto& v : violations) msg += " " + v + ";";
    return msg;
  }

  std::string id_;
  std::vector<std::string> violations_;
};

// One dataset line: the annotation plus, for multi-label classification
// files, an optional explicit label set.
struct DatasetRecord {
  TweetAnnotation annotation;
  std::optional<LabelSet> labels;

  bool operator==(const DatasetRecord&) const = default;
};

// Explicit labels when present, else the distinct span techniques.
inline LabelSet record_labels(const DatasetRecord& record) {
  return record.labels ? *record.labels : labels_of(record.annotation);
}

namespace detail {

using json = nlohmann::ordered_json;

inline DatasetRecord record_from_json(const json& j, std::size_t line_no) {
  if (!j.is_object()) throw ParseError(line_no, "record is not an object");
  DatasetRecord record;
  if (!j.contains("id") || !j["id"].is_string()) {
    throw ParseError(line_no, "missing or non-string \"id\" field");
  }
  if (!j.contains("text") || !j["text"].is_string()) {
    throw ParseError(line_no, "missing or non-string \"text\" field");
  }
  record.annotation.id = j["id"].get<std::string>();
  record.annotation.text = j["text"].get<std::string>();
  if (j.contains("spans")) {
    if (!j["spans"].is_array()) {
      throw ParseError(line_no, "\"spans\" is not an array");
    }
    for (const auto& sj : j["spans"]) {
      if (!sj.is_object() || !sj.contains("start") || !sj.contains("end") ||
          !sj.contains("technique") || !sj["start"].is_number_integer() ||
          !sj["end"].is_number_integer() || !sj["technique"].is_string()) {
        throw ParseError(line_no,
                         "span must be {start:int, end:int, technique:text}");
      }
      Span span;
      span.start = sj["start"].get<CharOffset>();
      span.end = sj["end"].get<CharOffset>();
      try {
        span.technique =
            technique_from_name(sj["technique"].get<std::string>());
      } catch (const UnknownTechniqueError& e) {
        throw ParseError(line_no, e.what());
      }
      record.annotation.spans.push_back(span);
    }
  }
  if (j.contains("labels")) {
    if (!j["labels"].is_array()) {
      throw ParseError(line_no, "\"labels\" is not an array");
    }
    LabelSet labels;
    for (const auto& lj : j["labels"]) {
      if (!lj.is_string()) {
        throw ParseError(line_no, "label entries must be technique names");
      }
      try {
        labels.insert(technique_from_name(lj.get<std::string>()));
      } catch (const UnknownTechniqueError& e) {
        throw ParseError(line_no, e.what());
      }
    }
    record.labels = std::move(labels);
  }
  return record;
}

inline json record_to_json(const DatasetRecord& record) {
  json j;
  j["id"] = record.annotation.id;
  j["text"] = record.annotation.text;
  json spans = json::array();
  for (const Span& s : record.annotation.spans) {
    json sj;
    sj["start"] = s.start;
    sj["end"] = s.end;
    sj["technique"] = std::string(technique_name(s.technique));
    spans.push_back(std::move(sj));
  }
  j["spans"] = std::move(spans);
  if (record.labels) {
    json labels = json::array();
    for (const Technique t : *record.labels) {
      labels.push_back(std::string(technique_name(t)));
    }
    j["labels"] = std::move(labels);
  }
  return j;
}

inline bool blank_line(const std::string& line) {
  for (const char c : line) {
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

}  // namespace detail

// Reads a line-delimited UTF-8 dataset: one JSON record per line with
// fields id, text, spans and optionally labels. Every record must pass
// validate_annotation.
inline std::vector<DatasetRecord> read_records(
    const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw std::runtime_error("cannot open dataset: " + path.string());
  }
  std::vector<DatasetRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    if (detail::blank_line(line)) continue;
    detail::json j;
    try {
      j = detail::json::parse(line);
    } catch (const detail::json::parse_error& e) {
      throw ParseError(line_no, e.what());
    }
    DatasetRecord record = detail::record_from_json(j, line_no);
    auto violations = validate_annotation(record.annotation);
    if (!violations.empty()) {
      throw ValidationError(record.annotation.id, std::move(violations));
    }
    records.push_back(std::move(record));
  }
  return records;
}

inline std::vector<TweetAnnotation> read_dataset(
    const std::filesystem::path& path) {
  std::vector<TweetAnnotation> out;
  for (auto& record : read_records(path)) {
    out.push_back(std::move(record.annotation));
  }
  return out;
}

// Writes records with a byte-stable field order (id, text, spans, labels),
// one compact JSON object per line, newline-terminated.
inline void write_records(const std::vector<DatasetRecord>& records,
                          const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw std::runtime_error("cannot open dataset for writing: " +
                             path.string());
  }
  for (const DatasetRecord& record : records) {
    file << detail::record_to_json(record).dump() << '\n';
  }
  if (!file) {
    throw std::runtime_error("failed to write dataset: " + path.string());
  }
}

inline void write_dataset(const std::vector<TweetAnnotation>& annotations,
                          const std::filesystem::path& path) {
  std::vector<DatasetRecord> records;
  records.reserve(annotations.size());
  for (const TweetAnnotation& ann : annotations) {
    records.push_back(DatasetRecord{ann, std::nullopt});
  }
  write_records(records, path);
}

}  // namespace propspan
