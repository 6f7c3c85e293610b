#pragma once

// Threshold labeling of sentiment scores and assembly of the binary
// positive/negative training dataset (neutrals are dropped).

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "unbox/cleaning.hpp"
#include "unbox/corpus.hpp"
#include "unbox/errors.hpp"
#include "unbox/sentiment.hpp"

namespace unbox::labeling {

// Ordered so that label-as-a-function-of-compound is monotone.
enum class Label : int { Negative = 0, Neutral = 1, Positive = 2 };

inline std::string_view label_name(Label label) {
  switch (label) {
    case Label::Negative: return "negative";
    case Label::Neutral: return "neutral";
    case Label::Positive: return "positive";
  }
  return "neutral";
}

inline Label label_from_name(std::string_view name) {
  if (name == "negative") return Label::Negative;
  if (name == "neutral") return Label::Neutral;
  if (name == "positive") return Label::Positive;
  throw DataError("unknown label name: \"" + std::string(name) + "\"");
}

// Boundaries are inclusive on both polar sides: compound of exactly
// +threshold is Positive, exactly -threshold is Negative.
inline Label label(const sentiment::SentimentScores& scores, double threshold = 0.5) {
  if (!(threshold > 0.0)) throw UsageError("label threshold must be > 0");
  if (scores.compound >= threshold) return Label::Positive;
  if (scores.compound <= -threshold) return Label::Negative;
  return Label::Neutral;
}

struct LabeledItem {
  cleaning::CleanComment comment;
  Label label = Label::Neutral;   // Positive or Negative within a dataset
  double compound = 0.0;

  friend bool operator==(const LabeledItem&, const LabeledItem&) = default;
};

struct LabeledDataset {
  std::vector<LabeledItem> items;
  std::uint64_t positive_count = 0;
  std::uint64_t negative_count = 0;
  std::uint64_t neutral_dropped_count = 0;
};

struct ScoredComment {
  cleaning::CleanComment comment;
  sentiment::SentimentScores scores;
};

// Labels every scored comment, drops neutrals, preserves order.
inline LabeledDataset build_dataset(const std::vector<ScoredComment>& scored,
                                    double threshold = 0.5) {
  LabeledDataset dataset;
  dataset.items.reserve(scored.size());
  for (const auto& sc : scored) {
    const Label l = label(sc.scores, threshold);
    if (l == Label::Neutral) {
      ++dataset.neutral_dropped_count;
      continue;
    }
    if (l == Label::Positive) {
      ++dataset.positive_count;
    } else {
      ++dataset.negative_count;
    }
    dataset.items.push_back(LabeledItem{sc.comment, l, sc.scores.compound});
  }
  if (dataset.items.empty()) {
    throw EmptyDatasetError("no positive or negative comments after labeling");
  }
  return dataset;
}

namespace detail {

inline std::string format_compound(double compound) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", compound);
  return buf;
}

}  // namespace detail

inline std::string to_csv(const LabeledDataset& dataset) {
  std::string out = "id,text,label,compound\n";
  for (const auto& item : dataset.items) {
    out += corpus::csv_escape(item.comment.id);
    out += ',';
    out += corpus::csv_escape(item.comment.text);
    out += ',';
    out += label_name(item.label);
    out += ',';
    out += detail::format_compound(item.compound);
    out += '\n';
  }
  return out;
}

inline nlohmann::ordered_json to_json(const LabeledDataset& dataset) {
  nlohmann::ordered_json items = nlohmann::ordered_json::array();
  for (const auto& item : dataset.items) {
    items.push_back(nlohmann::ordered_json{
        {"id", item.comment.id},
        {"text", item.comment.text},
        {"label", std::string(label_name(item.label))},
        {"compound", item.compound},
    });
  }
  return nlohmann::ordered_json{
      {"items", std::move(items)},
      {"counts",
       nlohmann::ordered_json{
           {"positive", dataset.positive_count},
           {"negative", dataset.negative_count},
           {"neutral_dropped", dataset.neutral_dropped_count},
       }},
  };
}

inline LabeledDataset dataset_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("items") || !doc["items"].is_array()) {
    throw DataError("labeled dataset JSON must contain an \"items\" array");
  }
  LabeledDataset dataset;
  for (const auto& item : doc["items"]) {
    LabeledItem li;
    li.comment.id = item.at("id").get<std::string>();
    li.comment.text = item.at("text").get<std::string>();
    li.label = label_from_name(item.at("label").get<std::string>());
    li.compound = item.at("compound").get<double>();
    if (li.label == Label::Neutral) {
      throw DataError("labeled dataset may not contain neutral items");
    }
    if (li.label == Label::Positive) {
      ++dataset.positive_count;
    } else {
      ++dataset.negative_count;
    }
    dataset.items.push_back(std::move(li));
  }
  if (dataset.items.empty()) throw EmptyDatasetError("labeled dataset is empty");
  return dataset;
}

// One row of the run-summary markdown table (name, positive, negative, total).
inline std::string summary_markdown_row(std::string_view run_name,
                                        const LabeledDataset& dataset) {
  return "| " + std::string(run_name) + " | " +
         std::to_string(dataset.positive_count) + " | " +
         std::to_string(dataset.negative_count) + " | " +
         std::to_string(dataset.positive_count + dataset.negative_count) + " |";
}

inline std::string summary_markdown(std::string_view run_name,
                                    const LabeledDataset& dataset) {
  std::string out = "| Run | Positive | Negative | Total |\n";
  out += "| --- | --- | --- | --- |\n";
  out += summary_markdown_row(run_name, dataset);
  out += '\n';
  return out;
}

}  // namespace unbox::labeling
