#pragma once

// Pipeline configuration: a flat key = value text file, every key
// overridable by a same-named CLI flag (flags win). validate() reports
// every violation at once rather than stopping at the first.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "unbox/errors.hpp"
#include "unbox/text.hpp"

namespace unbox::config {

struct PipelineConfig {
  // Input
  std::string input;            // comment dump path
  std::string format = "json";  // json | csv

  // Resource files
  std::string lexicon;        // sentiment lexicon (required by `label`)
  std::string emoji_lexicon;  // optional emoji description table
  std::string stopwords;      // optional stopword list
  std::string lemma_table;    // optional lemma lookup table

  // Cleaning
  double caps_ratio_threshold = 0.5;
  double english_latin_ratio_threshold = 0.8;
  std::int64_t min_length = 1;
  bool dedup_case_sensitive = true;

  // Labeling / features
  double label_threshold = 0.5;
  double min_df = 0.01;

  // Split
  double split_fraction = 0.8;
  std::uint64_t seed = 0;
  bool stratified = false;

  // Classifiers
  std::string classifier = "all";  // nb | dt | svm | all
  double nb_alpha = 1.0;
  std::int64_t dt_max_depth = 0;  // 0 = unlimited
  std::int64_t dt_min_samples_split = 2;
  double svm_c = 1.0;
  std::int64_t svm_epochs = 200;
  double svm_tolerance = 1e-8;

  // Output
  std::string out = "out";
  std::string run_name = "run";
};

namespace detail {

inline double parse_double(std::string_view value, std::size_t line_no) {
  try {
    std::size_t consumed = 0;
    const double v = std::stod(std::string(value), &consumed);
    if (consumed != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError("config line " + std::to_string(line_no) + ": \"" +
                         std::string(value) + "\" is not a number",
                     0);
  }
}

inline std::int64_t parse_int(std::string_view value, std::size_t line_no) {
  try {
    std::size_t consumed = 0;
    const std::int64_t v = std::stoll(std::string(value), &consumed);
    if (consumed != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError("config line " + std::to_string(line_no) + ": \"" +
                         std::string(value) + "\" is not an integer",
                     0);
  }
}

inline std::uint64_t parse_uint(std::string_view value, std::size_t line_no) {
  try {
    if (!value.empty() && value.front() == '-') throw std::invalid_argument("sign");
    std::size_t consumed = 0;
    const std::uint64_t v = std::stoull(std::string(value), &consumed);
    if (consumed != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError("config line " + std::to_string(line_no) + ": \"" +
                         std::string(value) + "\" is not a non-negative integer",
                     0);
  }
}

inline bool parse_bool(std::string_view value, std::size_t line_no) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ParseError("config line " + std::to_string(line_no) + ": \"" +
                       std::string(value) + "\" is not true/false",
                   0);
}

}  // namespace detail

// Applies `key = value` lines from `bytes` on top of `base`. `#` starts a
// comment line; blank lines are ignored; unknown keys are an error.
inline PipelineConfig parse_config_text(std::string_view bytes,
                                        PipelineConfig base = {}) {
  std::size_t line_no = 0;
  for (auto raw_line : text::split_lines(bytes)) {
    ++line_no;
    const auto line = text::trim(raw_line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config line " + std::to_string(line_no) +
                           ": expected key = value",
                       0);
    }
    const std::string key{text::trim(line.substr(0, eq))};
    const std::string_view value = text::trim(line.substr(eq + 1));

    if (key == "input") base.input = value;
    else if (key == "format") base.format = value;
    else if (key == "lexicon") base.lexicon = value;
    else if (key == "emoji_lexicon") base.emoji_lexicon = value;
    else if (key == "stopwords") base.stopwords = value;
    else if (key == "lemma_table") base.lemma_table = value;
    else if (key == "caps_ratio_threshold")
      base.caps_ratio_threshold = detail::parse_double(value, line_no);
    else if (key == "english_latin_ratio_threshold")
      base.english_latin_ratio_threshold = detail::parse_double(value, line_no);
    else if (key == "min_length") base.min_length = detail::parse_int(value, line_no);
    else if (key == "dedup_case_sensitive")
      base.dedup_case_sensitive = detail::parse_bool(value, line_no);
    else if (key == "label_threshold")
      base.label_threshold = detail::parse_double(value, line_no);
    else if (key == "min_df") base.min_df = detail::parse_double(value, line_no);
    else if (key == "split_fraction")
      base.split_fraction = detail::parse_double(value, line_no);
    else if (key == "seed") base.seed = detail::parse_uint(value, line_no);
    else if (key == "stratified") base.stratified = detail::parse_bool(value, line_no);
    else if (key == "classifier") base.classifier = value;
    else if (key == "nb_alpha") base.nb_alpha = detail::parse_double(value, line_no);
    else if (key == "dt_max_depth")
      base.dt_max_depth = detail::parse_int(value, line_no);
    else if (key == "dt_min_samples_split")
      base.dt_min_samples_split = detail::parse_int(value, line_no);
    else if (key == "svm_c") base.svm_c = detail::parse_double(value, line_no);
    else if (key == "svm_epochs") base.svm_epochs = detail::parse_int(value, line_no);
    else if (key == "svm_tolerance")
      base.svm_tolerance = detail::parse_double(value, line_no);
    else if (key == "out") base.out = value;
    else if (key == "run_name") base.run_name = value;
    else
      throw ParseError("config line " + std::to_string(line_no) +
                           ": unknown key \"" + key + "\"",
                       0);
  }
  return base;
}

// Every violation, not just the first. An empty result means the config is
// valid. Path fields are only checked when set (non-empty).
inline std::vector<std::string> validate(const PipelineConfig& c) {
  std::vector<std::string> violations;
  const auto check_path = [&](const std::string& path, const char* key) {
    if (!path.empty() && !std::filesystem::exists(path)) {
      violations.push_back(std::string(key) + " path does not exist: " + path);
    }
  };

  if (c.format != "json" && c.format != "csv") {
    violations.push_back("format must be json or csv");
  }
  if (!(c.caps_ratio_threshold > 0.0) || c.caps_ratio_threshold > 1.0) {
    violations.push_back("caps_ratio_threshold must be in (0,1]");
  }
  if (!(c.english_latin_ratio_threshold > 0.0) || c.english_latin_ratio_threshold > 1.0) {
    violations.push_back("english_latin_ratio_threshold must be in (0,1]");
  }
  if (c.min_length < 0) violations.push_back("min_length must be >= 0");
  if (!(c.label_threshold > 0.0)) violations.push_back("label_threshold must be > 0");
  if (!(c.min_df > 0.0) || c.min_df > 1.0) {
    violations.push_back("min_df must be in (0,1]");
  }
  if (!(c.split_fraction > 0.0 && c.split_fraction < 1.0)) {
    violations.push_back("split_fraction must be in (0,1)");
  }
  if (c.classifier != "nb" && c.classifier != "dt" && c.classifier != "svm" &&
      c.classifier != "all") {
    violations.push_back("classifier must be one of nb, dt, svm, all");
  }
  if (!(c.nb_alpha > 0.0)) violations.push_back("nb_alpha must be > 0");
  if (c.dt_max_depth < 0) violations.push_back("dt_max_depth must be >= 0");
  if (c.dt_min_samples_split < 1) {
    violations.push_back("dt_min_samples_split must be a positive integer");
  }
  if (!(c.svm_c > 0.0)) violations.push_back("svm_c must be > 0");
  if (c.svm_epochs < 1) violations.push_back("svm_epochs must be a positive integer");
  if (!(c.svm_tolerance > 0.0)) violations.push_back("svm_tolerance must be > 0");
  if (c.out.empty()) violations.push_back("out directory must be non-empty");

  check_path(c.input, "input");
  check_path(c.lexicon, "lexicon");
  check_path(c.emoji_lexicon, "emoji_lexicon");
  check_path(c.stopwords, "stopwords");
  check_path(c.lemma_table, "lemma_table");
  return violations;
}

// Reads and validates a config file. Unreadable file -> UsageError; parse
// problems are folded into the violation list so callers get one report.
inline std::vector<std::string> validate_file(const std::string& path,
                                              PipelineConfig* parsed = nullptr) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec) || ec) {
    throw UsageError("config file is not readable: " + path);
  }
  std::string bytes;
  {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw UsageError("config file is not readable: " + path);
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) bytes.append(buf, n);
    std::fclose(f);
  }
  try {
    const PipelineConfig config = parse_config_text(bytes);
    if (parsed) *parsed = config;
    return validate(config);
  } catch (const ParseError& e) {
    return {e.what()};
  }
}

}  // namespace unbox::config
