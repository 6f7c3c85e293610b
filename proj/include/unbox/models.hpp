#pragma once

// Deterministic train/test splitting and three from-scratch binary
// classifiers (multinomial Naive Bayes, Gini decision tree, linear
// soft-margin SVM) behind a common train/predict contract, plus the JSON
// model envelope used to run train and evaluate as separate invocations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "unbox/errors.hpp"
#include "unbox/features.hpp"
#include "unbox/labeling.hpp"

namespace unbox::models {

using features::CountVector;
using labeling::Label;

namespace detail {

inline int class_index(Label label) {
  if (label == Label::Negative) return 0;
  if (label == Label::Positive) return 1;
  throw DataError("classifiers accept only binary positive/negative labels");
}

inline Label class_label(int index) {
  return index == 0 ? Label::Negative : Label::Positive;
}

// Unbiased bounded draw (rejection sampling) so the shuffle is a pure
// function of the seed rather than of any library's distribution choices.
inline std::uint64_t bounded(std::mt19937_64& engine, std::uint64_t upper) {
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % upper;
  for (;;) {
    const std::uint64_t x = engine();
    if (x < limit) return x % upper;
  }
}

inline void shuffle(std::vector<std::size_t>& items, std::mt19937_64& engine) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded(engine, i));
    std::swap(items[i - 1], items[j]);
  }
}

inline void check_width(const std::vector<CountVector>& rows) {
  if (rows.empty()) throw EmptyDatasetError("cannot train on an empty matrix");
  for (const auto& row : rows) {
    if (row.size() != rows.front().size()) {
      throw DataError("ragged matrix: all rows must share the vocabulary width");
    }
  }
}

inline void check_vector_width(std::size_t expected, std::size_t got) {
  if (expected != got) {
    throw DataError("dimension mismatch: model expects " + std::to_string(expected) +
                    " features, got " + std::to_string(got));
  }
}

}  // namespace detail

// --------------------------------------------------------------------------
// Splitting

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  bool stratified = false;
};

struct Split {
  std::vector<std::size_t> train_indices;  // ascending
  std::vector<std::size_t> test_indices;   // ascending
};

// Train size is exactly floor(train_fraction * N); membership comes from a
// seeded uniform shuffle (per class in stratified mode, extra train slots
// going to the classes with the largest fractional remainders).
inline Split split(const std::vector<Label>& labels, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw UsageError("train_fraction must be in (0,1)");
  }
  const std::size_t n = labels.size();
  std::size_t per_class[2] = {0, 0};
  for (const Label l : labels) ++per_class[detail::class_index(l)];
  if (n < 2 || per_class[0] == 0 || per_class[1] == 0) {
    throw DataError("degenerate split: need at least two examples with both classes present");
  }

  const std::size_t train_n = static_cast<std::size_t>(
      std::floor(spec.train_fraction * static_cast<double>(n)));
  if (train_n == 0 || train_n == n) {
    throw DataError("degenerate split: a partition would be empty");
  }

  std::mt19937_64 engine(spec.seed);
  Split result;

  if (!spec.stratified) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    detail::shuffle(perm, engine);
    result.train_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(train_n));
    result.test_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(train_n), perm.end());
  } else {
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < n; ++i) {
      by_class[detail::class_index(labels[i])].push_back(i);
    }
    // Per-class train counts: floors first, then the spare slot (if any)
    // goes to the class with the larger fractional remainder.
    std::size_t take[2];
    double frac[2];
    std::size_t base_total = 0;
    for (int c = 0; c < 2; ++c) {
      const double exact = spec.train_fraction * static_cast<double>(by_class[c].size());
      take[c] = static_cast<std::size_t>(std::floor(exact));
      frac[c] = exact - std::floor(exact);
      base_total += take[c];
    }
    for (std::size_t extra = base_total; extra < train_n; ++extra) {
      const int c = (frac[1] > frac[0]) ? 1 : 0;
      ++take[c];
      frac[c] = -1.0;
    }
    for (int c = 0; c < 2; ++c) {
      detail::shuffle(by_class[c], engine);
      if (take[c] == 0 || take[c] == by_class[c].size()) {
        throw DataError("degenerate split: a stratified partition would be single-class");
      }
      result.train_indices.insert(result.train_indices.end(), by_class[c].begin(),
                                  by_class[c].begin() + static_cast<std::ptrdiff_t>(take[c]));
      result.test_indices.insert(result.test_indices.end(),
                                 by_class[c].begin() + static_cast<std::ptrdiff_t>(take[c]),
                                 by_class[c].end());
    }
  }

  std::sort(result.train_indices.begin(), result.train_indices.end());
  std::sort(result.test_indices.begin(), result.test_indices.end());
  return result;
}

// --------------------------------------------------------------------------
// Multinomial Naive Bayes

struct NBModel {
  // Index 0 = Negative, 1 = Positive throughout.
  double class_priors[2] = {0.0, 0.0};      // plain probabilities
  std::vector<double> log_likelihoods[2];   // one log-probability per term
  double smoothing_alpha = 1.0;

  std::size_t n_features() const { return log_likelihoods[0].size(); }
  double log_prior(int c) const { return std::log(class_priors[c]); }
};

inline NBModel train_nb(const std::vector<CountVector>& rows,
                        const std::vector<Label>& labels, double alpha = 1.0) {
  if (!(alpha > 0.0)) throw UsageError("smoothing alpha must be > 0");
  detail::check_width(rows);
  if (rows.size() != labels.size()) {
    throw DataError("matrix and label list disagree on the number of documents");
  }

  const std::size_t v = rows.front().size();
  NBModel model;
  model.smoothing_alpha = alpha;

  std::size_t doc_counts[2] = {0, 0};
  std::vector<double> term_counts[2] = {std::vector<double>(v, 0.0),
                                        std::vector<double>(v, 0.0)};
  double token_totals[2] = {0.0, 0.0};

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int c = detail::class_index(labels[i]);
    ++doc_counts[c];
    for (std::size_t t = 0; t < v; ++t) {
      term_counts[c][t] += rows[i][t];
      token_totals[c] += rows[i][t];
    }
  }

  for (int c = 0; c < 2; ++c) {
    model.class_priors[c] =
        static_cast<double>(doc_counts[c]) / static_cast<double>(rows.size());
    model.log_likelihoods[c].resize(v);
    const double denom = token_totals[c] + alpha * static_cast<double>(v);
    for (std::size_t t = 0; t < v; ++t) {
      model.log_likelihoods[c][t] = std::log((term_counts[c][t] + alpha) / denom);
    }
  }
  return model;
}

// Unnormalized log-posteriors (prior + likelihood terms).
inline void nb_scores(const NBModel& model, const CountVector& x, double out[2]) {
  detail::check_vector_width(model.n_features(), x.size());
  for (int c = 0; c < 2; ++c) {
    double s = model.log_prior(c);
    for (std::size_t t = 0; t < x.size(); ++t) {
      if (x[t] != 0) s += x[t] * model.log_likelihoods[c][t];
    }
    out[c] = s;
  }
}

inline Label predict(const NBModel& model, const CountVector& x) {
  double s[2];
  nb_scores(model, x, s);
  return s[1] >= s[0] ? Label::Positive : Label::Negative;
}

// Normalized posteriors (log-sum-exp); sums to 1 within 1e-9.
inline void nb_posteriors(const NBModel& model, const CountVector& x, double out[2]) {
  double s[2];
  nb_scores(model, x, s);
  const double m = std::max(s[0], s[1]);
  const double e0 = std::exp(s[0] - m);
  const double e1 = std::exp(s[1] - m);
  out[0] = e0 / (e0 + e1);
  out[1] = e1 / (e0 + e1);
}

// --------------------------------------------------------------------------
// Gini decision tree

struct DTConfig {
  std::size_t max_depth = 0;  // 0 = unlimited
  std::size_t min_samples_split = 2;
};

struct DTNode {
  bool is_leaf = true;
  Label leaf_label = Label::Positive;
  std::size_t feature = 0;
  std::int32_t threshold = 0;  // count <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
};

struct DTModel {
  std::vector<DTNode> nodes;  // nodes[0] is the root
  std::size_t n_features = 0;
  DTConfig config;
};

namespace detail {

inline double gini(std::size_t neg, std::size_t pos) {
  const std::size_t total = neg + pos;
  if (total == 0) return 0.0;
  const double pn = static_cast<double>(neg) / static_cast<double>(total);
  const double pp = static_cast<double>(pos) / static_cast<double>(total);
  return 1.0 - pn * pn - pp * pp;
}

struct DTBuilder {
  const std::vector<CountVector>& rows;
  const std::vector<Label>& labels;
  const DTConfig& config;
  std::vector<DTNode> nodes;

  std::int32_t leaf(std::size_t neg, std::size_t pos) {
    DTNode node;
    node.is_leaf = true;
    node.leaf_label = pos >= neg ? Label::Positive : Label::Negative;
    nodes.push_back(node);
    return static_cast<std::int32_t>(nodes.size() - 1);
  }

  std::int32_t build(const std::vector<std::size_t>& indices, std::size_t depth) {
    std::size_t neg = 0, pos = 0;
    for (const std::size_t i : indices) {
      labels[i] == Label::Positive ? ++pos : ++neg;
    }
    const double node_impurity = gini(neg, pos);

    const bool depth_capped = config.max_depth > 0 && depth >= config.max_depth;
    if (node_impurity == 0.0 || depth_capped ||
        indices.size() < std::max<std::size_t>(config.min_samples_split, 2)) {
      return leaf(neg, pos);
    }

    // Best (feature, threshold) by weighted child Gini; candidates are the
    // integer floors of midpoints between consecutive distinct counts. Ties
    // keep the first candidate in (feature, threshold) iteration order.
    const std::size_t width = rows.front().size();
    double best_impurity = node_impurity - 1e-12;
    std::size_t best_feature = 0;
    std::int32_t best_threshold = 0;
    bool found = false;

    std::vector<std::pair<std::int32_t, bool>> values;  // (count, is_positive)
    values.reserve(indices.size());
    for (std::size_t f = 0; f < width; ++f) {
      values.clear();
      for (const std::size_t i : indices) {
        values.emplace_back(rows[i][f], labels[i] == Label::Positive);
      }
      std::sort(values.begin(), values.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (values.front().first == values.back().first) continue;

      std::size_t left_neg = 0, left_pos = 0;
      const std::size_t total = values.size();
      for (std::size_t k = 0; k + 1 < total; ++k) {
        values[k].second ? ++left_pos : ++left_neg;
        if (values[k].first == values[k + 1].first) continue;
        const std::int32_t threshold = (values[k].first + values[k + 1].first) / 2;
        const std::size_t left_n = k + 1;
        const std::size_t right_n = total - left_n;
        const std::size_t right_neg = neg - left_neg;
        const std::size_t right_pos = pos - left_pos;
        const double weighted =
            (static_cast<double>(left_n) / static_cast<double>(total)) *
                gini(left_neg, left_pos) +
            (static_cast<double>(right_n) / static_cast<double>(total)) *
                gini(right_neg, right_pos);
        if (weighted < best_impurity) {
          best_impurity = weighted;
          best_feature = f;
          best_threshold = threshold;
          found = true;
        }
      }
    }

    if (!found) return leaf(neg, pos);

    std::vector<std::size_t> left_idx, right_idx;
    for (const std::size_t i : indices) {
      (rows[i][best_feature] <= best_threshold ? left_idx : right_idx).push_back(i);
    }

    DTNode node;
    node.is_leaf = false;
    node.feature = best_feature;
    node.threshold = best_threshold;
    nodes.push_back(node);
    const std::int32_t id = static_cast<std::int32_t>(nodes.size() - 1);
    const std::int32_t left = build(left_idx, depth + 1);
    const std::int32_t right = build(right_idx, depth + 1);
    nodes[id].left = left;
    nodes[id].right = right;
    return id;
  }
};

}  // namespace detail

inline DTModel train_dt(const std::vector<CountVector>& rows,
                        const std::vector<Label>& labels, const DTConfig& config = {}) {
  if (config.min_samples_split == 0) {
    throw UsageError("min_samples_split must be a positive integer");
  }
  detail::check_width(rows);
  if (rows.size() != labels.size()) {
    throw DataError("matrix and label list disagree on the number of documents");
  }
  for (const Label l : labels) detail::class_index(l);

  detail::DTBuilder builder{rows, labels, config, {}};
  std::vector<std::size_t> all(rows.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  builder.build(all, 0);

  DTModel model;
  model.nodes = std::move(builder.nodes);
  model.n_features = rows.front().size();
  model.config = config;
  return model;
}

inline Label predict(const DTModel& model, const CountVector& x) {
  detail::check_vector_width(model.n_features, x.size());
  if (model.nodes.empty()) throw DataError("decision tree has no nodes");
  std::int32_t at = 0;
  for (;;) {
    const DTNode& node = model.nodes[static_cast<std::size_t>(at)];
    if (node.is_leaf) return node.leaf_label;
    at = x[node.feature] <= node.threshold ? node.left : node.right;
  }
}

// --------------------------------------------------------------------------
// Linear soft-margin SVM

struct SVMModel {
  std::vector<double> weights;
  double bias = 0.0;
  double regularization_c = 1.0;
  std::size_t epochs = 200;
  double tolerance = 1e-8;
};

namespace detail {

inline double svm_objective(const std::vector<CountVector>& rows,
                            const std::vector<double>& y, double c,
                            const std::vector<double>& w, double b) {
  double obj = 0.0;
  for (const double wi : w) obj += 0.5 * wi * wi;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double margin = b;
    for (std::size_t t = 0; t < w.size(); ++t) {
      if (rows[i][t] != 0) margin += w[t] * rows[i][t];
    }
    obj += c * std::max(0.0, 1.0 - y[i] * margin);
  }
  return obj;
}

}  // namespace detail

// Full-batch subgradient descent on (1/2)||w||^2 + c * sum hinge, with a
// halving line search that only ever accepts strict objective improvements,
// so the objective is non-increasing by construction and the result is a
// pure function of (data order, hyperparameters). The seed parameter is
// part of the training interface but this deterministic scheme draws no
// random numbers from it.
inline SVMModel train_svm(const std::vector<CountVector>& rows,
                          const std::vector<Label>& labels, double c = 1.0,
                          std::size_t epochs = 200, double tolerance = 1e-8,
                          std::uint64_t seed = 0) {
  (void)seed;
  if (!(c > 0.0)) throw UsageError("regularization c must be > 0");
  if (epochs == 0) throw UsageError("epochs must be a positive integer");
  if (!(tolerance > 0.0)) throw UsageError("tolerance must be > 0");
  detail::check_width(rows);
  if (rows.size() != labels.size()) {
    throw DataError("matrix and label list disagree on the number of documents");
  }

  const std::size_t v = rows.front().size();
  std::vector<double> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    y[i] = detail::class_index(labels[i]) == 1 ? 1.0 : -1.0;
  }

  SVMModel model;
  model.weights.assign(v, 0.0);
  model.regularization_c = c;
  model.epochs = epochs;
  model.tolerance = tolerance;

  double obj = detail::svm_objective(rows, y, c, model.weights, model.bias);
  double step = 1.0;
  std::vector<double> grad_w(v), cand_w(v);

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    double grad_b = 0.0;
    for (std::size_t t = 0; t < v; ++t) grad_w[t] = model.weights[t];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      double margin = model.bias;
      for (std::size_t t = 0; t < v; ++t) {
        if (rows[i][t] != 0) margin += model.weights[t] * rows[i][t];
      }
      if (y[i] * margin < 1.0) {
        for (std::size_t t = 0; t < v; ++t) {
          if (rows[i][t] != 0) grad_w[t] -= c * y[i] * rows[i][t];
        }
        grad_b -= c * y[i];
      }
    }

    double grad_norm2 = grad_b * grad_b;
    for (const double g : grad_w) grad_norm2 += g * g;
    if (grad_norm2 == 0.0) break;

    double t = step;
    double cand_obj = obj;
    double cand_b = model.bias;
    bool accepted = false;
    for (int trial = 0; trial < 80; ++trial) {
      for (std::size_t k = 0; k < v; ++k) cand_w[k] = model.weights[k] - t * grad_w[k];
      cand_b = model.bias - t * grad_b;
      cand_obj = detail::svm_objective(rows, y, c, cand_w, cand_b);
      if (cand_obj < obj) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;

    const double improvement = obj - cand_obj;
    model.weights = cand_w;
    model.bias = cand_b;
    obj = cand_obj;
    step = t * 2.0;
    if (improvement < tolerance) break;
  }
  return model;
}

inline double svm_decision(const SVMModel& model, const CountVector& x) {
  detail::check_vector_width(model.weights.size(), x.size());
  double margin = model.bias;
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (x[t] != 0) margin += model.weights[t] * x[t];
  }
  return margin;
}

inline Label predict(const SVMModel& model, const CountVector& x) {
  return svm_decision(model, x) >= 0.0 ? Label::Positive : Label::Negative;
}

// --------------------------------------------------------------------------
// JSON model envelope

inline constexpr int kModelFormatVersion = 1;

inline nlohmann::ordered_json to_json(const NBModel& model,
                                      const std::string& vocabulary_hash) {
  return nlohmann::ordered_json{
      {"format_version", kModelFormatVersion},
      {"model_type", "naive_bayes"},
      {"vocabulary_hash", vocabulary_hash},
      {"params",
       nlohmann::ordered_json{
           {"smoothing_alpha", model.smoothing_alpha},
           {"class_priors",
            nlohmann::ordered_json{{"negative", model.class_priors[0]},
                                   {"positive", model.class_priors[1]}}},
           {"log_likelihoods",
            nlohmann::ordered_json{{"negative", model.log_likelihoods[0]},
                                   {"positive", model.log_likelihoods[1]}}},
       }},
  };
}

inline nlohmann::ordered_json to_json(const DTModel& model,
                                      const std::string& vocabulary_hash) {
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (const auto& node : model.nodes) {
    if (node.is_leaf) {
      nodes.push_back(nlohmann::ordered_json{
          {"leaf", std::string(labeling::label_name(node.leaf_label))}});
    } else {
      nodes.push_back(nlohmann::ordered_json{{"feature", node.feature},
                                             {"threshold", node.threshold},
                                             {"left", node.left},
                                             {"right", node.right}});
    }
  }
  return nlohmann::ordered_json{
      {"format_version", kModelFormatVersion},
      {"model_type", "decision_tree"},
      {"vocabulary_hash", vocabulary_hash},
      {"params",
       nlohmann::ordered_json{
           {"n_features", model.n_features},
           {"max_depth", model.config.max_depth},
           {"min_samples_split", model.config.min_samples_split},
           {"nodes", std::move(nodes)},
       }},
  };
}

inline nlohmann::ordered_json to_json(const SVMModel& model,
                                      const std::string& vocabulary_hash) {
  return nlohmann::ordered_json{
      {"format_version", kModelFormatVersion},
      {"model_type", "linear_svm"},
      {"vocabulary_hash", vocabulary_hash},
      {"params",
       nlohmann::ordered_json{
           {"weights", model.weights},
           {"bias", model.bias},
           {"regularization_c", model.regularization_c},
           {"epochs", model.epochs},
           {"tolerance", model.tolerance},
       }},
  };
}

struct LoadedModel {
  std::string model_type;
  std::string vocabulary_hash;
  std::variant<NBModel, DTModel, SVMModel> model;
};

inline LoadedModel model_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("model_type") || !doc.contains("params")) {
    throw DataError("model file must carry \"model_type\" and \"params\"");
  }
  LoadedModel loaded;
  loaded.model_type = doc["model_type"].get<std::string>();
  loaded.vocabulary_hash = doc.value("vocabulary_hash", std::string());
  const auto& params = doc["params"];

  if (loaded.model_type == "naive_bayes") {
    NBModel model;
    model.smoothing_alpha = params.at("smoothing_alpha").get<double>();
    model.class_priors[0] = params.at("class_priors").at("negative").get<double>();
    model.class_priors[1] = params.at("class_priors").at("positive").get<double>();
    model.log_likelihoods[0] =
        params.at("log_likelihoods").at("negative").get<std::vector<double>>();
    model.log_likelihoods[1] =
        params.at("log_likelihoods").at("positive").get<std::vector<double>>();
    if (model.log_likelihoods[0].size() != model.log_likelihoods[1].size()) {
      throw DataError("model file log-likelihood vectors disagree on width");
    }
    loaded.model = std::move(model);
  } else if (loaded.model_type == "decision_tree") {
    DTModel model;
    model.n_features = params.at("n_features").get<std::size_t>();
    model.config.max_depth = params.at("max_depth").get<std::size_t>();
    model.config.min_samples_split = params.at("min_samples_split").get<std::size_t>();
    for (const auto& item : params.at("nodes")) {
      DTNode node;
      if (item.contains("leaf")) {
        node.is_leaf = true;
        node.leaf_label = labeling::label_from_name(item["leaf"].get<std::string>());
      } else {
        node.is_leaf = false;
        node.feature = item.at("feature").get<std::size_t>();
        node.threshold = item.at("threshold").get<std::int32_t>();
        node.left = item.at("left").get<std::int32_t>();
        node.right = item.at("right").get<std::int32_t>();
      }
      model.nodes.push_back(node);
    }
    if (model.nodes.empty()) throw DataError("model file carries an empty tree");
    loaded.model = std::move(model);
  } else if (loaded.model_type == "linear_svm") {
    SVMModel model;
    model.weights = params.at("weights").get<std::vector<double>>();
    model.bias = params.at("bias").get<double>();
    model.regularization_c = params.at("regularization_c").get<double>();
    model.epochs = params.at("epochs").get<std::size_t>();
    model.tolerance = params.at("tolerance").get<double>();
    loaded.model = std::move(model);
  } else {
    throw DataError("unknown model_type: \"" + loaded.model_type + "\"");
  }
  return loaded;
}

inline Label predict(const LoadedModel& loaded, const CountVector& x) {
  return std::visit([&](const auto& model) { return predict(model, x); },
                    loaded.model);
}

}  // namespace unbox::models
