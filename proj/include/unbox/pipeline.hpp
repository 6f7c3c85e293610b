#pragma once

// Stage orchestration: each stage reads its predecessor's artifact from the
// output directory and writes its own, so stages can run as separate
// invocations and the full pipeline equals their composition. All artifacts
// are deterministic byte-for-byte given (input bytes, config, seed).

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "unbox/cleaning.hpp"
#include "unbox/config.hpp"
#include "unbox/corpus.hpp"
#include "unbox/errors.hpp"
#include "unbox/eval.hpp"
#include "unbox/features.hpp"
#include "unbox/labeling.hpp"
#include "unbox/models.hpp"
#include "unbox/sentiment.hpp"

namespace unbox::pipeline {

struct Artifacts {
  std::filesystem::path out;

  std::filesystem::path comments() const { return out / "comments.json"; }
  std::filesystem::path cleaned() const { return out / "cleaned.json"; }
  std::filesystem::path cleaning_stats() const { return out / "cleaning_stats.json"; }
  std::filesystem::path labeled_json() const { return out / "labeled.json"; }
  std::filesystem::path labeled_csv() const { return out / "labeled.csv"; }
  std::filesystem::path vocabulary() const { return out / "vocabulary.txt"; }
  std::filesystem::path matrix() const { return out / "matrix.csv"; }
  std::filesystem::path features_meta() const { return out / "features.json"; }
  std::filesystem::path split() const { return out / "split.json"; }
  std::filesystem::path model(const std::string& kind) const {
    return out / ("model_" + kind + ".json");
  }
  std::filesystem::path evaluation() const { return out / "evaluation.json"; }
  std::filesystem::path report_md() const { return out / "report.md"; }
  std::filesystem::path report_json() const { return out / "report.json"; }
};

namespace detail {

inline std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::string bytes;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    bytes.append(buf, static_cast<std::size_t>(in.gcount()));
  }
  return bytes;
}

inline std::string read_input(const std::string& path, const char* what) {
  if (path.empty()) {
    throw UsageError(std::string(what) + " path is required but not configured");
  }
  if (!std::filesystem::exists(path)) {
    throw UsageError(std::string(what) + " file does not exist: " + path);
  }
  return read_bytes(path);
}

inline std::string read_artifact(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw MissingArtifactError(path.string());
  }
  return read_bytes(path);
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("short write to " + path.string());
}

inline nlohmann::json parse_artifact_json(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_artifact(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("artifact " + path.string() + " is not valid JSON: " + e.what());
  }
}

inline std::string dump_json(const nlohmann::ordered_json& j) {
  return j.dump(2) + "\n";
}

inline cleaning::CleaningConfig cleaning_config(const config::PipelineConfig& cfg) {
  cleaning::CleaningConfig cc;
  cc.caps_ratio_threshold = cfg.caps_ratio_threshold;
  cc.english_latin_ratio_threshold = cfg.english_latin_ratio_threshold;
  cc.min_length = static_cast<std::size_t>(cfg.min_length);
  cc.dedup_case_sensitive = cfg.dedup_case_sensitive;
  return cc;
}

inline std::vector<std::string> selected_classifiers(const config::PipelineConfig& cfg) {
  if (cfg.classifier == "all") return {"nb", "dt", "svm"};
  return {cfg.classifier};
}

inline std::string classifier_display_name(const std::string& kind) {
  if (kind == "nb") return "Naive Bayes";
  if (kind == "dt") return "Decision Tree";
  if (kind == "svm") return "Linear SVM";
  return kind;
}

struct FeatureArtifacts {
  features::DocTermMatrix matrix;
  std::vector<labeling::Label> labels;
  labeling::LabeledDataset dataset;
};

// Rebuilds the document-term matrix and label vector from the featurize
// and label artifacts.
inline FeatureArtifacts load_feature_artifacts(const Artifacts& art) {
  const nlohmann::json meta = parse_artifact_json(art.features_meta());
  const std::size_t n_docs = meta.at("n_documents").get<std::size_t>();
  const double min_df = meta.at("min_df").get<double>();

  FeatureArtifacts fa;
  fa.matrix.vocabulary =
      features::vocabulary_from_text(read_artifact(art.vocabulary()), min_df);
  const std::size_t width = fa.matrix.vocabulary.size();
  if (meta.at("vocabulary_size").get<std::size_t>() != width) {
    throw DataError("vocabulary.txt disagrees with features.json on vocabulary size");
  }
  fa.matrix.rows.assign(n_docs, features::CountVector(width, 0));

  const std::string csv = read_artifact(art.matrix());
  const auto lines = text::split_lines(csv);
  if (lines.empty() || text::trim(lines.front()) != "row,col,count") {
    throw DataError("matrix.csv must start with the header row,col,count");
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = text::trim(lines[i]);
    if (line.empty()) continue;
    std::size_t row = 0, col = 0;
    long long count = 0;
    if (std::sscanf(std::string(line).c_str(), "%zu,%zu,%lld", &row, &col, &count) != 3 ||
        row >= n_docs || col >= width || count <= 0) {
      throw DataError("matrix.csv line " + std::to_string(i + 1) + " is malformed");
    }
    fa.matrix.rows[row][col] = static_cast<std::int32_t>(count);
  }

  fa.dataset = labeling::dataset_from_json(parse_artifact_json(art.labeled_json()));
  if (fa.dataset.items.size() != n_docs) {
    throw DataError("labeled.json and features.json disagree on document count");
  }
  fa.labels.reserve(n_docs);
  for (const auto& item : fa.dataset.items) fa.labels.push_back(item.label);
  return fa;
}

struct SplitArtifact {
  models::Split split;
};

inline SplitArtifact load_split_artifact(const Artifacts& art, std::size_t n_docs) {
  const nlohmann::json doc = parse_artifact_json(art.split());
  SplitArtifact sa;
  sa.split.train_indices = doc.at("train_indices").get<std::vector<std::size_t>>();
  sa.split.test_indices = doc.at("test_indices").get<std::vector<std::size_t>>();
  for (const auto idx : sa.split.train_indices) {
    if (idx >= n_docs) throw DataError("split.json train index out of range");
  }
  for (const auto idx : sa.split.test_indices) {
    if (idx >= n_docs) throw DataError("split.json test index out of range");
  }
  if (sa.split.train_indices.size() + sa.split.test_indices.size() != n_docs) {
    throw DataError("split.json does not partition the document set");
  }
  return sa;
}

}  // namespace detail

inline void run_ingest(const config::PipelineConfig& cfg) {
  const Artifacts art{cfg.out};
  const std::string bytes = detail::read_input(cfg.input, "input");
  const auto format =
      cfg.format == "csv" ? corpus::DumpFormat::csv : corpus::DumpFormat::json;
  const corpus::CommentDump dump = corpus::parse_dump(bytes, format);
  detail::write_file(art.comments(), corpus::serialize_json(dump));
}

inline void run_clean(const config::PipelineConfig& cfg) {
  const Artifacts art{cfg.out};
  const corpus::CommentDump dump = corpus::parse_dump(
      detail::read_artifact(art.comments()), corpus::DumpFormat::json);
  const auto result = cleaning::clean_corpus(dump, detail::cleaning_config(cfg));

  nlohmann::ordered_json comments = nlohmann::ordered_json::array();
  for (const auto& c : result.comments) {
    comments.push_back(nlohmann::ordered_json{{"id", c.id}, {"text", c.text}});
  }
  detail::write_file(art.cleaned(),
                     detail::dump_json(nlohmann::ordered_json{
                         {"comments", std::move(comments)},
                         {"stats", cleaning::stats_to_json(result.stats)}}));
  detail::write_file(art.cleaning_stats(),
                     detail::dump_json(cleaning::stats_to_json(result.stats)));
}

inline void run_label(const config::PipelineConfig& cfg) {
  const Artifacts art{cfg.out};
  const nlohmann::json cleaned = detail::parse_artifact_json(art.cleaned());
  if (!cleaned.contains("comments") || !cleaned["comments"].is_array()) {
    throw DataError("cleaned.json must contain a \"comments\" array");
  }

  const std::string lexicon_bytes = detail::read_input(cfg.lexicon, "lexicon");
  const std::string emoji_bytes =
      cfg.emoji_lexicon.empty() ? std::string()
                                : detail::read_input(cfg.emoji_lexicon, "emoji_lexicon");
  const sentiment::Lexicon lexicon = sentiment::load_lexicon(lexicon_bytes, emoji_bytes);

  std::vector<labeling::ScoredComment> scored;
  scored.reserve(cleaned["comments"].size());
  for (const auto& item : cleaned["comments"]) {
    labeling::ScoredComment sc;
    sc.comment.id = item.at("id").get<std::string>();
    sc.comment.text = item.at("text").get<std::string>();
    sc.scores = sentiment::score(sc.comment.text, lexicon);
    scored.push_back(std::move(sc));
  }

  const labeling::LabeledDataset dataset =
      labeling::build_dataset(scored, cfg.label_threshold);
  detail::write_file(art.labeled_json(), detail::dump_json(labeling::to_json(dataset)));
  detail::write_file(art.labeled_csv(), labeling::to_csv(dataset));
}

inline void run_featurize(const config::PipelineConfig& cfg) {
  const Artifacts art{cfg.out};
  const labeling::LabeledDataset dataset =
      labeling::dataset_from_json(detail::parse_artifact_json(art.labeled_json()));

  const std::unordered_set<std::string> stoplist =
      cfg.stopwords.empty()
          ? std::unordered_set<std::string>{}
          : features::load_stopwords(detail::read_input(cfg.stopwords, "stopwords"));
  const features::LemmaTable table =
      cfg.lemma_table.empty()
          ? features::LemmaTable{}
          : features::load_lemma_table(detail::read_input(cfg.lemma_table, "lemma_table"));

  std::vector<std::vector<std::string>> corpus_tokens;
  corpus_tokens.reserve(dataset.items.size());
  for (const auto& item : dataset.items) {
    corpus_tokens.push_back(features::lemmatize_all(
        features::remove_stopwords(features::tokenize(item.comment.text), stoplist),
        table));
  }

  const features::Vocabulary vocab = features::fit_vocabulary(corpus_tokens, cfg.min_df);
  const features::DocTermMatrix matrix = features::transform_all(corpus_tokens, vocab);

  detail::write_file(art.vocabulary(), features::vocabulary_to_text(vocab));
  detail::write_file(art.matrix(), features::matrix_to_csv(matrix));
  detail::write_file(art.features_meta(),
                     detail::dump_json(nlohmann::ordered_json{
                         {"n_documents", matrix.rows.size()},
                         {"vocabulary_size", vocab.size()},
                         {"min_df", cfg.min_df},
                         {"vocabulary_hash", vocab.hash()},
                     }));
}

inline void run_train(const config::PipelineConfig& cfg) {
  const Artifacts art{cfg.out};
  const detail::FeatureArtifacts fa = detail::load_feature_artifacts(art);

  models::SplitSpec spec;
  spec.train_fraction = cfg.split_fraction;
  spec.seed = cfg.seed;
  spec.stratified = cfg.stratified;
  const models::Split split = models::split(fa.labels, spec);

  detail::write_file(art.split(),
                     detail::dump_json(nlohmann::ordered_json{
                         {"train_fraction", spec.train_fraction},
                         {"seed", spec.seed},
                         {"stratified", spec.stratified},
                         {"train_indices", split.train_indices},
                         {"test_indices", split.test_indices},
                     }));

  std::vector<features::CountVector> train_rows;
  std::vector<labeling::Label> train_labels;
  train_rows.reserve(split.train_indices.size());
  train_labels.reserve(split.train_indices.size());
  for (const auto idx : split.train_indices) {
    train_rows.push_back(fa.matrix.rows[idx]);
    train_labels.push_back(fa.labels[idx]);
  }

  const std::string vocab_hash = fa.matrix.vocabulary.hash();
  for (const auto& kind : detail::selected_classifiers(cfg)) {
    nlohmann::ordered_json model_json;
    if (kind == "nb") {
      model_json = models::to_json(models::train_nb(train_rows, train_labels, cfg.nb_alpha),
                                   vocab_hash);
    } else if (kind == "dt") {
      models::DTConfig dc;
      dc.max_depth = static_cast<std::size_t>(cfg.dt_max_depth);
      dc.min_samples_split = static_cast<std::size_t>(cfg.dt_min_samples_split);
      model_json = models::to_json(models::train_dt(train_rows, train_labels, dc),
                                   vocab_hash);
    } else {
      model_json = models::to_json(
          models::train_svm(train_rows, train_labels, cfg.svm_c,
                            static_cast<std::size_t>(cfg.svm_epochs),
                            cfg.svm_tolerance, cfg.seed),
          vocab_hash);
    }
    detail::write_file(art.model(kind), detail::dump_json(model_json));
  }
}

inline void run_evaluate(const config::PipelineConfig& cfg) {
  const Artifacts art{cfg.out};
  const detail::FeatureArtifacts fa = detail::load_feature_artifacts(art);
  const detail::SplitArtifact sa = detail::load_split_artifact(art, fa.labels.size());

  std::vector<labeling::Label> truths;
  truths.reserve(sa.split.test_indices.size());
  for (const auto idx : sa.split.test_indices) truths.push_back(fa.labels[idx]);

  const std::string vocab_hash = fa.matrix.vocabulary.hash();
  nlohmann::ordered_json evaluation;
  for (const auto& kind : detail::selected_classifiers(cfg)) {
    const models::LoadedModel loaded =
        models::model_from_json(detail::parse_artifact_json(art.model(kind)));
    if (loaded.vocabulary_hash != vocab_hash) {
      throw DataError("model " + art.model(kind).string() +
                      " was trained against a different vocabulary");
    }
    std::vector<labeling::Label> predictions;
    predictions.reserve(sa.split.test_indices.size());
    for (const auto idx : sa.split.test_indices) {
      predictions.push_back(models::predict(loaded, fa.matrix.rows[idx]));
    }
    const eval::ConfusionMatrix m = eval::confusion(predictions, truths);
    evaluation[kind] = eval::evaluation_json(m, eval::report(m));
  }
  detail::write_file(art.evaluation(), detail::dump_json(evaluation));
}

inline void run_report(const config::PipelineConfig& cfg) {
  const Artifacts art{cfg.out};
  const nlohmann::json stats = detail::parse_artifact_json(art.cleaning_stats());
  const labeling::LabeledDataset dataset =
      labeling::dataset_from_json(detail::parse_artifact_json(art.labeled_json()));
  const nlohmann::json evaluation = detail::parse_artifact_json(art.evaluation());

  std::map<std::string, eval::ClassificationReport> reports;
  std::map<std::string, eval::ConfusionMatrix> matrices;
  for (const auto& kind : detail::selected_classifiers(cfg)) {
    if (!evaluation.contains(kind)) {
      throw DataError("evaluation.json lacks results for classifier \"" + kind + "\"");
    }
    const auto& entry = evaluation[kind];
    eval::ConfusionMatrix m;
    m.tn = entry.at("confusion").at("tn").get<std::uint64_t>();
    m.fp = entry.at("confusion").at("fp").get<std::uint64_t>();
    m.fn = entry.at("confusion").at("fn").get<std::uint64_t>();
    m.tp = entry.at("confusion").at("tp").get<std::uint64_t>();
    const std::string name = detail::classifier_display_name(kind);
    matrices[name] = m;
    reports[name] = eval::report(m);
  }
  const auto ranking = eval::compare_reports(reports);

  std::string md = "# Sentiment classification report\n\n";
  md += "## Corpus\n\n";
  md += labeling::summary_markdown(cfg.run_name, dataset);
  md += "\n## Cleaning\n\n";
  md += "| Counter | Count |\n| --- | --- |\n";
  for (const char* key : {"input_count", "removed_empty", "removed_non_english",
                          "removed_numeric_only", "removed_caps",
                          "removed_duplicates", "output_count"}) {
    md += "| " + std::string(key) + " | " +
          std::to_string(stats.at(key).get<std::uint64_t>()) + " |\n";
  }
  md += "\n## Confusion matrices\n";
  for (const auto& [name, m] : matrices) {
    md += "\n### " + name + "\n\n";
    md += eval::confusion_markdown(m);
  }
  md += "\n## Classification reports\n\n";
  md += eval::report_markdown(ranking);
  md += "\n## Ranking\n\n";
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    md += std::to_string(i + 1) + ". " + ranking[i].first + " (accuracy " +
          eval::detail::fixed2(ranking[i].second.accuracy) + ", macro F1 " +
          eval::detail::fixed2(ranking[i].second.macro_f1) + ")\n";
  }
  detail::write_file(art.report_md(), md);

  nlohmann::ordered_json ranking_json = nlohmann::ordered_json::array();
  for (const auto& [name, r] : ranking) {
    ranking_json.push_back(nlohmann::ordered_json{
        {"classifier", name},
        {"accuracy", r.accuracy},
        {"macro_f1", r.macro_f1},
    });
  }
  nlohmann::ordered_json matrices_json;
  for (const auto& [name, m] : matrices) {
    matrices_json[name] = eval::evaluation_json(m, reports.at(name));
  }
  detail::write_file(art.report_json(),
                     detail::dump_json(nlohmann::ordered_json{
                         {"run", cfg.run_name},
                         {"cleaning", stats},
                         {"labels",
                          nlohmann::ordered_json{
                              {"positive", dataset.positive_count},
                              {"negative", dataset.negative_count},
                              {"neutral_dropped", dataset.neutral_dropped_count}}},
                         {"results", std::move(matrices_json)},
                         {"ranking", std::move(ranking_json)},
                     }));
}

inline void run_pipeline(const config::PipelineConfig& cfg) {
  run_ingest(cfg);
  run_clean(cfg);
  run_label(cfg);
  run_featurize(cfg);
  run_train(cfg);
  run_evaluate(cfg);
  run_report(cfg);
}

}  // namespace unbox::pipeline
