#pragma once

// 2x2 confusion matrices and macro-averaged classification reports, plus
// the markdown renderings (Actual x Predicted grid with All margins, and a
// classifier x metric grid) and a JSON form for artifacts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "unbox/errors.hpp"
#include "unbox/labeling.hpp"

namespace unbox::eval {

using labeling::Label;

struct ConfusionMatrix {
  // Actual Negative row: tn, fp; actual Positive row: fn, tp.
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tp = 0;

  std::uint64_t total() const { return tn + fp + fn + tp; }
  std::uint64_t actual_negative() const { return tn + fp; }
  std::uint64_t actual_positive() const { return fn + tp; }
  std::uint64_t predicted_negative() const { return tn + fn; }
  std::uint64_t predicted_positive() const { return fp + tp; }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ClassificationReport {
  ClassMetrics negative;
  ClassMetrics positive;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
};

inline ConfusionMatrix confusion(const std::vector<Label>& predictions,
                                 const std::vector<Label>& truths) {
  if (predictions.size() != truths.size()) {
    throw DataError("predictions and truths disagree in length (" +
                    std::to_string(predictions.size()) + " vs " +
                    std::to_string(truths.size()) + ")");
  }
  if (predictions.empty()) throw EmptyDatasetError("cannot evaluate zero predictions");

  ConfusionMatrix m;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == Label::Neutral || truths[i] == Label::Neutral) {
      throw DataError("evaluation labels must be binary positive/negative");
    }
    const bool actual_pos = truths[i] == Label::Positive;
    const bool predicted_pos = predictions[i] == Label::Positive;
    if (actual_pos) {
      predicted_pos ? ++m.tp : ++m.fn;
    } else {
      predicted_pos ? ++m.fp : ++m.tn;
    }
  }
  return m;
}

namespace detail {

// 0/0 is defined as 0 (a class never predicted / never present).
inline double ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

inline double f1_score(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

inline std::string fixed2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

}  // namespace detail

inline ClassificationReport report(const ConfusionMatrix& m) {
  if (m.total() == 0) throw DataError("cannot report on an empty confusion matrix");

  ClassificationReport r;
  r.negative.precision = detail::ratio(m.tn, m.predicted_negative());
  r.negative.recall = detail::ratio(m.tn, m.actual_negative());
  r.negative.f1 = detail::f1_score(r.negative.precision, r.negative.recall);
  r.positive.precision = detail::ratio(m.tp, m.predicted_positive());
  r.positive.recall = detail::ratio(m.tp, m.actual_positive());
  r.positive.f1 = detail::f1_score(r.positive.precision, r.positive.recall);
  r.macro_precision = (r.negative.precision + r.positive.precision) / 2.0;
  r.macro_recall = (r.negative.recall + r.positive.recall) / 2.0;
  r.macro_f1 = (r.negative.f1 + r.positive.f1) / 2.0;
  r.accuracy = detail::ratio(m.tn + m.tp, m.total());
  return r;
}

// Ranking: accuracy desc, then macro-F1 desc, then name asc.
inline std::vector<std::pair<std::string, ClassificationReport>> compare_reports(
    const std::map<std::string, ClassificationReport>& reports) {
  std::vector<std::pair<std::string, ClassificationReport>> ranking(reports.begin(),
                                                                    reports.end());
  std::stable_sort(ranking.begin(), ranking.end(), [](const auto& a, const auto& b) {
    if (a.second.accuracy != b.second.accuracy) {
      return a.second.accuracy > b.second.accuracy;
    }
    if (a.second.macro_f1 != b.second.macro_f1) {
      return a.second.macro_f1 > b.second.macro_f1;
    }
    return a.first < b.first;
  });
  return ranking;
}

inline std::string confusion_markdown(const ConfusionMatrix& m) {
  std::string out;
  out += "|  | Predicted Negative | Predicted Positive | All |\n";
  out += "| --- | --- | --- | --- |\n";
  out += "| Actual Negative | " + std::to_string(m.tn) + " | " + std::to_string(m.fp) +
         " | " + std::to_string(m.actual_negative()) + " |\n";
  out += "| Actual Positive | " + std::to_string(m.fn) + " | " + std::to_string(m.tp) +
         " | " + std::to_string(m.actual_positive()) + " |\n";
  out += "| All | " + std::to_string(m.predicted_negative()) + " | " +
         std::to_string(m.predicted_positive()) + " | " + std::to_string(m.total()) +
         " |\n";
  return out;
}

inline std::string report_row_markdown(const std::string& name,
                                       const ClassificationReport& r) {
  return "| " + name + " | " + detail::fixed2(r.macro_precision) + " | " +
         detail::fixed2(r.macro_recall) + " | " + detail::fixed2(r.macro_f1) + " | " +
         detail::fixed2(r.accuracy) + " |";
}

inline std::string report_markdown(
    const std::vector<std::pair<std::string, ClassificationReport>>& rows) {
  std::string out = "| Classifier | Precision | Recall | F1-Score | Accuracy |\n";
  out += "| --- | --- | --- | --- | --- |\n";
  for (const auto& [name, r] : rows) {
    out += report_row_markdown(name, r);
    out += '\n';
  }
  return out;
}

inline nlohmann::ordered_json to_json(const ConfusionMatrix& m) {
  return nlohmann::ordered_json{
      {"tn", m.tn}, {"fp", m.fp}, {"fn", m.fn}, {"tp", m.tp}};
}

inline nlohmann::ordered_json to_json(const ClassificationReport& r) {
  const auto metrics = [](const ClassMetrics& c) {
    return nlohmann::ordered_json{
        {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}};
  };
  return nlohmann::ordered_json{
      {"negative", metrics(r.negative)},
      {"positive", metrics(r.positive)},
      {"macro_precision", r.macro_precision},
      {"macro_recall", r.macro_recall},
      {"macro_f1", r.macro_f1},
      {"accuracy", r.accuracy},
      {"rounded",
       nlohmann::ordered_json{
           {"macro_precision", detail::fixed2(r.macro_precision)},
           {"macro_recall", detail::fixed2(r.macro_recall)},
           {"macro_f1", detail::fixed2(r.macro_f1)},
           {"accuracy", detail::fixed2(r.accuracy)},
       }},
  };
}

inline nlohmann::ordered_json evaluation_json(const ConfusionMatrix& m,
                                              const ClassificationReport& r) {
  return nlohmann::ordered_json{{"confusion", to_json(m)}, {"metrics", to_json(r)}};
}

}  // namespace unbox::eval
