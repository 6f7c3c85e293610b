// unbox: subcommand CLI wiring the comment-sentiment pipeline end to end.
// Every config-file key has a same-named flag (dashes for underscores);
// flags win over the config file. Exit codes: 0 success, 1 usage, 2 data.

#include <cstdlib>
#include <deque>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "unbox/config.hpp"
#include "unbox/errors.hpp"
#include "unbox/eval.hpp"
#include "unbox/fetch.hpp"
#include "unbox/pipeline.hpp"

namespace {

struct ConfigFlags {
  std::string config_path;

  unbox::config::PipelineConfig values;
  CLI::Option* input = nullptr;
  CLI::Option* format = nullptr;
  CLI::Option* lexicon = nullptr;
  CLI::Option* emoji_lexicon = nullptr;
  CLI::Option* stopwords = nullptr;
  CLI::Option* lemma_table = nullptr;
  CLI::Option* caps_ratio_threshold = nullptr;
  CLI::Option* english_latin_ratio_threshold = nullptr;
  CLI::Option* min_length = nullptr;
  CLI::Option* dedup_case_sensitive = nullptr;
  CLI::Option* label_threshold = nullptr;
  CLI::Option* min_df = nullptr;
  CLI::Option* split_fraction = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* stratified = nullptr;
  CLI::Option* classifier = nullptr;
  CLI::Option* nb_alpha = nullptr;
  CLI::Option* dt_max_depth = nullptr;
  CLI::Option* dt_min_samples_split = nullptr;
  CLI::Option* svm_c = nullptr;
  CLI::Option* svm_epochs = nullptr;
  CLI::Option* svm_tolerance = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* run_name = nullptr;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--config", f.config_path, "config file (flat key = value lines)");
  f.input = cmd->add_option("--input", f.values.input, "comment dump path");
  f.format = cmd->add_option("--format", f.values.format, "input format: json|csv");
  f.lexicon = cmd->add_option("--lexicon", f.values.lexicon, "sentiment lexicon path");
  f.emoji_lexicon = cmd->add_option("--emoji-lexicon", f.values.emoji_lexicon,
                                    "emoji description table path");
  f.stopwords = cmd->add_option("--stopwords", f.values.stopwords, "stopword list path");
  f.lemma_table =
      cmd->add_option("--lemma-table", f.values.lemma_table, "lemma lookup table path");
  f.caps_ratio_threshold =
      cmd->add_option("--caps-ratio-threshold", f.values.caps_ratio_threshold,
                      "remove comments with uppercase ratio above this");
  f.english_latin_ratio_threshold =
      cmd->add_option("--english-latin-ratio-threshold",
                      f.values.english_latin_ratio_threshold,
                      "keep comments with at least this Latin letter ratio");
  f.min_length = cmd->add_option("--min-length", f.values.min_length,
                                 "minimum trimmed length in characters");
  f.dedup_case_sensitive =
      cmd->add_flag("--dedup-case-sensitive,!--no-dedup-case-sensitive",
                    f.values.dedup_case_sensitive, "case-sensitive deduplication");
  f.label_threshold = cmd->add_option("--label-threshold", f.values.label_threshold,
                                      "compound threshold for polar labels");
  f.min_df = cmd->add_option("--min-df", f.values.min_df,
                             "minimum document frequency fraction");
  f.split_fraction = cmd->add_option("--split-fraction", f.values.split_fraction,
                                     "train fraction of the labeled set");
  f.seed = cmd->add_option("--seed", f.values.seed, "split shuffle seed");
  f.stratified = cmd->add_flag("--stratified,!--no-stratified", f.values.stratified,
                               "stratify the split by class");
  f.classifier = cmd->add_option("--classifier", f.values.classifier,
                                 "classifier selection: nb|dt|svm|all");
  f.nb_alpha = cmd->add_option("--nb-alpha", f.values.nb_alpha,
                               "Laplace smoothing for Naive Bayes");
  f.dt_max_depth = cmd->add_option("--dt-max-depth", f.values.dt_max_depth,
                                   "decision tree depth cap (0 = unlimited)");
  f.dt_min_samples_split =
      cmd->add_option("--dt-min-samples-split", f.values.dt_min_samples_split,
                      "minimum samples required to split a node");
  f.svm_c = cmd->add_option("--svm-c", f.values.svm_c, "SVM regularization C");
  f.svm_epochs = cmd->add_option("--svm-epochs", f.values.svm_epochs,
                                 "SVM training epoch cap");
  f.svm_tolerance = cmd->add_option("--svm-tolerance", f.values.svm_tolerance,
                                    "SVM objective improvement tolerance");
  f.out = cmd->add_option("--out", f.values.out, "artifact output directory");
  f.run_name = cmd->add_option("--run-name", f.values.run_name,
                               "run label used in the report");
}

// defaults -> config file -> flags that were actually passed.
unbox::config::PipelineConfig merge_config(const ConfigFlags& f) {
  unbox::config::PipelineConfig cfg;
  if (!f.config_path.empty()) {
    unbox::config::PipelineConfig parsed;
    const auto violations = unbox::config::validate_file(f.config_path, &parsed);
    // Range violations are re-checked on the merged config below; a parse
    // failure leaves nothing to merge, so surface it immediately.
    if (!violations.empty() && violations.front().rfind("config line", 0) == 0) {
      throw unbox::UsageError(violations.front());
    }
    cfg = parsed;
  }
  const auto passed = [](const CLI::Option* opt) { return opt && opt->count() > 0; };
  if (passed(f.input)) cfg.input = f.values.input;
  if (passed(f.format)) cfg.format = f.values.format;
  if (passed(f.lexicon)) cfg.lexicon = f.values.lexicon;
  if (passed(f.emoji_lexicon)) cfg.emoji_lexicon = f.values.emoji_lexicon;
  if (passed(f.stopwords)) cfg.stopwords = f.values.stopwords;
  if (passed(f.lemma_table)) cfg.lemma_table = f.values.lemma_table;
  if (passed(f.caps_ratio_threshold)) {
    cfg.caps_ratio_threshold = f.values.caps_ratio_threshold;
  }
  if (passed(f.english_latin_ratio_threshold)) {
    cfg.english_latin_ratio_threshold = f.values.english_latin_ratio_threshold;
  }
  if (passed(f.min_length)) cfg.min_length = f.values.min_length;
  if (passed(f.dedup_case_sensitive)) {
    cfg.dedup_case_sensitive = f.values.dedup_case_sensitive;
  }
  if (passed(f.label_threshold)) cfg.label_threshold = f.values.label_threshold;
  if (passed(f.min_df)) cfg.min_df = f.values.min_df;
  if (passed(f.split_fraction)) cfg.split_fraction = f.values.split_fraction;
  if (passed(f.seed)) cfg.seed = f.values.seed;
  if (passed(f.stratified)) cfg.stratified = f.values.stratified;
  if (passed(f.classifier)) cfg.classifier = f.values.classifier;
  if (passed(f.nb_alpha)) cfg.nb_alpha = f.values.nb_alpha;
  if (passed(f.dt_max_depth)) cfg.dt_max_depth = f.values.dt_max_depth;
  if (passed(f.dt_min_samples_split)) {
    cfg.dt_min_samples_split = f.values.dt_min_samples_split;
  }
  if (passed(f.svm_c)) cfg.svm_c = f.values.svm_c;
  if (passed(f.svm_epochs)) cfg.svm_epochs = f.values.svm_epochs;
  if (passed(f.svm_tolerance)) cfg.svm_tolerance = f.values.svm_tolerance;
  if (passed(f.out)) cfg.out = f.values.out;
  if (passed(f.run_name)) cfg.run_name = f.values.run_name;
  return cfg;
}

unbox::config::PipelineConfig validated_config(const ConfigFlags& f) {
  const auto cfg = merge_config(f);
  const auto violations = unbox::config::validate(cfg);
  if (!violations.empty()) {
    std::string message = "invalid configuration:";
    for (const auto& v : violations) message += "\n  - " + v;
    throw unbox::UsageError(message);
  }
  return cfg;
}

unbox::eval::ConfusionMatrix parse_confusion_arg(const std::string& arg) {
  unbox::eval::ConfusionMatrix m;
  bool seen[4] = {false, false, false, false};
  std::size_t start = 0;
  while (start <= arg.size()) {
    const std::size_t comma = std::min(arg.find(',', start), arg.size());
    const std::string part = arg.substr(start, comma - start);
    start = comma + 1;
    if (part.empty()) {
      if (comma == arg.size()) break;
      continue;
    }
    const std::size_t eq = part.find('=');
    if (eq == std::string::npos) {
      throw unbox::UsageError("--from-confusion expects tn=..,fp=..,fn=..,tp=..");
    }
    const std::string key = part.substr(0, eq);
    std::uint64_t value = 0;
    try {
      std::size_t consumed = 0;
      const long long v = std::stoll(part.substr(eq + 1), &consumed);
      if (consumed != part.size() - eq - 1 || v < 0) throw std::invalid_argument("range");
      value = static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
      throw unbox::UsageError("--from-confusion: \"" + part +
                              "\" is not a non-negative integer assignment");
    }
    if (key == "tn" && !seen[0]) {
      m.tn = value;
      seen[0] = true;
    } else if (key == "fp" && !seen[1]) {
      m.fp = value;
      seen[1] = true;
    } else if (key == "fn" && !seen[2]) {
      m.fn = value;
      seen[2] = true;
    } else if (key == "tp" && !seen[3]) {
      m.tp = value;
      seen[3] = true;
    } else {
      throw unbox::UsageError("--from-confusion: unexpected or repeated key \"" + key +
                              "\"");
    }
    if (comma == arg.size()) break;
  }
  if (!(seen[0] && seen[1] && seen[2] && seen[3])) {
    throw unbox::UsageError("--from-confusion requires all of tn, fp, fn, tp");
  }
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"comment-sentiment pipeline: ingest, clean, label, featurize, "
               "train, evaluate, report"};
  app.require_subcommand(1);

  std::deque<ConfigFlags> flag_sets;
  const auto stage_cmd = [&](const std::string& name, const std::string& desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    flag_sets.emplace_back();
    add_config_flags(cmd, flag_sets.back());
    return std::make_pair(cmd, &flag_sets.back());
  };

  auto [ingest_cmd, ingest_flags] = stage_cmd("ingest", "parse a comment dump into the artifact tree");
  auto [clean_cmd, clean_flags] = stage_cmd("clean", "apply the cleaning filters");
  auto [label_cmd, label_flags] = stage_cmd("label", "score sentiment and assign labels");
  auto [featurize_cmd, featurize_flags] =
      stage_cmd("featurize", "fit the vocabulary and build count vectors");
  auto [train_cmd, train_flags] = stage_cmd("train", "split the data and train classifiers");
  auto [evaluate_cmd, evaluate_flags] =
      stage_cmd("evaluate", "evaluate trained classifiers on the test split");
  auto [report_cmd, report_flags] = stage_cmd("report", "emit the markdown/JSON report");
  auto [pipeline_cmd, pipeline_flags] = stage_cmd("pipeline", "run every stage in order");

  std::string from_confusion;
  report_cmd->add_option("--from-confusion", from_confusion,
                         "classification report for tn=..,fp=..,fn=..,tp=.. "
                         "(bypasses artifacts)");

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "validate a config file and list every violation");
  validate_cmd->alias("validate-config");
  std::string validate_path;
  validate_cmd->add_option("--config", validate_path, "config file to validate")
      ->required();

  CLI::App* fetch_cmd =
      app.add_subcommand("fetch", "download comments from a remote comments API");
  flag_sets.emplace_back();
  ConfigFlags& fetch_flags = flag_sets.back();
  add_config_flags(fetch_cmd, fetch_flags);
  std::string video_id, base_url = "http://localhost:8080", api_key;
  int page_limit = 1, page_size = 100;
  fetch_cmd->add_option("--video-id", video_id, "video whose comments to fetch")
      ->required();
  fetch_cmd->add_option("--base-url", base_url, "comments API base URL");
  fetch_cmd->add_option("--page-limit", page_limit, "maximum pages to fetch");
  fetch_cmd->add_option("--page-size", page_size, "results requested per page");
  fetch_cmd->add_option("--api-key", api_key,
                        "API credentials (falls back to UNBOX_API_KEY)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (ingest_cmd->parsed()) {
      unbox::pipeline::run_ingest(validated_config(*ingest_flags));
    } else if (clean_cmd->parsed()) {
      unbox::pipeline::run_clean(validated_config(*clean_flags));
    } else if (label_cmd->parsed()) {
      unbox::pipeline::run_label(validated_config(*label_flags));
    } else if (featurize_cmd->parsed()) {
      unbox::pipeline::run_featurize(validated_config(*featurize_flags));
    } else if (train_cmd->parsed()) {
      unbox::pipeline::run_train(validated_config(*train_flags));
    } else if (evaluate_cmd->parsed()) {
      unbox::pipeline::run_evaluate(validated_config(*evaluate_flags));
    } else if (report_cmd->parsed()) {
      if (!from_confusion.empty()) {
        const auto m = parse_confusion_arg(from_confusion);
        const auto r = unbox::eval::report(m);
        std::cout << unbox::eval::report_markdown({{"provided", r}});
      } else {
        unbox::pipeline::run_report(validated_config(*report_flags));
      }
    } else if (pipeline_cmd->parsed()) {
      unbox::pipeline::run_pipeline(validated_config(*pipeline_flags));
    } else if (validate_cmd->parsed()) {
      const auto violations = unbox::config::validate_file(validate_path);
      if (violations.empty()) {
        std::cout << "ok\n";
      } else {
        for (const auto& v : violations) std::cerr << v << "\n";
        return 1;
      }
    } else if (fetch_cmd->parsed()) {
      if (api_key.empty()) {
        if (const char* env = std::getenv("UNBOX_API_KEY")) api_key = env;
      }
      unbox::fetch::FetchOptions opts;
      opts.base_url = base_url;
      opts.page_size = page_size;
      const auto cfg = merge_config(fetch_flags);
      const auto dump = unbox::fetch::fetch_comments(video_id, api_key, page_limit, opts);
      const unbox::pipeline::Artifacts art{cfg.out};
      unbox::pipeline::detail::write_file(art.comments(),
                                          unbox::corpus::serialize_json(dump));
    }
  } catch (const unbox::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const unbox::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
