#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "unbox/errors.hpp"
#include "unbox/labeling.hpp"

using namespace unbox;
using labeling::Label;
using labeling::LabeledDataset;
using labeling::ScoredComment;

namespace {

ScoredComment scored(const std::string& id, double compound) {
  ScoredComment sc;
  sc.comment.id = id;
  sc.comment.text = "text for " + id;
  sc.scores.compound = compound;
  return sc;
}

}  // namespace

TEST_CASE("labels come from inclusive compound thresholds") {
  const auto at = [](double compound) {
    sentiment::SentimentScores s;
    s.compound = compound;
    return labeling::label(s);
  };
  CHECK(at(-1.0) == Label::Negative);
  CHECK(at(-0.5) == Label::Negative);  // boundary is polar, not neutral
  CHECK(at(-0.4999) == Label::Neutral);
  CHECK(at(0.0) == Label::Neutral);
  CHECK(at(0.4999) == Label::Neutral);
  CHECK(at(0.5) == Label::Positive);
  CHECK(at(1.0) == Label::Positive);
}

TEST_CASE("custom thresholds move the boundary") {
  sentiment::SentimentScores s;
  s.compound = 0.25;
  CHECK(labeling::label(s, 0.25) == Label::Positive);
  CHECK(labeling::label(s, 0.2500001) == Label::Neutral);
  CHECK_THROWS_AS(labeling::label(s, 0.0), UsageError);
  CHECK_THROWS_AS(labeling::label(s, -0.5), UsageError);
}

TEST_CASE("label names round-trip") {
  for (Label l : {Label::Negative, Label::Neutral, Label::Positive}) {
    CHECK(labeling::label_from_name(labeling::label_name(l)) == l);
  }
  CHECK_THROWS_AS(labeling::label_from_name("positivity"), DataError);
}

TEST_CASE("build_dataset drops neutrals and keeps order") {
  const std::vector<ScoredComment> comments = {
      scored("a", 0.9), scored("b", 0.1), scored("c", -0.77),
      scored("d", 0.5), scored("e", -0.5), scored("f", 0.0),
  };
  const LabeledDataset ds = labeling::build_dataset(comments);
  CHECK(ds.positive_count == 2);
  CHECK(ds.negative_count == 2);
  CHECK(ds.neutral_dropped_count == 2);
  REQUIRE(ds.items.size() == 4);
  CHECK(ds.items[0].comment.id == "a");
  CHECK(ds.items[1].comment.id == "c");
  CHECK(ds.items[2].comment.id == "d");
  CHECK(ds.items[3].comment.id == "e");
  CHECK(ds.items[1].label == Label::Negative);
  CHECK(ds.items[1].compound == -0.77);
}

TEST_CASE("build_dataset refuses a fully neutral corpus") {
  CHECK_THROWS_AS(labeling::build_dataset({scored("a", 0.1), scored("b", -0.2)}),
                  EmptyDatasetError);
  CHECK_THROWS_AS(labeling::build_dataset({}), EmptyDatasetError);
}

TEST_CASE("labeling partitions every comment exactly once") {
  std::mt19937_64 rng(99123);
  std::uniform_real_distribution<double> compound(-1.0, 1.0);
  std::uniform_int_distribution<int> size(1, 200);
  std::uniform_real_distribution<double> thr(0.05, 0.95);

  for (int iter = 0; iter < 1000; ++iter) {
    const int n = size(rng);
    const double threshold = thr(rng);
    std::vector<ScoredComment> comments;
    std::size_t expect_pos = 0, expect_neg = 0, expect_neu = 0;
    for (int i = 0; i < n; ++i) {
      const double c = compound(rng);
      comments.push_back(scored("id" + std::to_string(i), c));
      if (c >= threshold) ++expect_pos;
      else if (c <= -threshold) ++expect_neg;
      else ++expect_neu;
    }
    if (expect_pos + expect_neg == 0) {
      CHECK_THROWS_AS(labeling::build_dataset(comments, threshold), EmptyDatasetError);
      continue;
    }
    const LabeledDataset ds = labeling::build_dataset(comments, threshold);
    REQUIRE(ds.positive_count == expect_pos);
    REQUIRE(ds.negative_count == expect_neg);
    REQUIRE(ds.neutral_dropped_count == expect_neu);
    REQUIRE(ds.items.size() + ds.neutral_dropped_count == comments.size());
    for (const auto& item : ds.items) {
      REQUIRE(item.label != Label::Neutral);
      REQUIRE((item.label == Label::Positive ? item.compound >= threshold
                                             : item.compound <= -threshold));
    }
  }
}

TEST_CASE("labeled dataset serializes to CSV with 4-decimal compounds") {
  const LabeledDataset ds =
      labeling::build_dataset({scored("a", 0.8641), scored("b", -0.52)});
  CHECK(labeling::to_csv(ds) ==
        "id,text,label,compound\n"
        "a,text for a,positive,0.8641\n"
        "b,text for b,negative,-0.5200\n");
}

TEST_CASE("labeled dataset JSON round-trips") {
  const LabeledDataset ds = labeling::build_dataset(
      {scored("a", 0.8641), scored("b", -0.52), scored("c", 0.01)});
  const auto doc = labeling::to_json(ds);
  CHECK(doc["counts"]["positive"] == 1);
  CHECK(doc["counts"]["negative"] == 1);
  CHECK(doc["counts"]["neutral_dropped"] == 1);

  const LabeledDataset back = labeling::dataset_from_json(doc);
  REQUIRE(back.items.size() == ds.items.size());
  CHECK(back.items == ds.items);
  CHECK(back.positive_count == ds.positive_count);
  CHECK(back.negative_count == ds.negative_count);

  // Neutral rows are invalid on disk too.
  auto bad = doc;
  bad["items"][0]["label"] = "neutral";
  CHECK_THROWS_AS(labeling::dataset_from_json(bad), DataError);
  CHECK_THROWS_AS(labeling::dataset_from_json(nlohmann::json::array()), DataError);
}

TEST_CASE("run summary row matches the published layout") {
  LabeledDataset ds;
  ds.positive_count = 4377;
  ds.negative_count = 1527;
  CHECK(labeling::summary_markdown_row("run A", ds) == "| run A | 4377 | 1527 | 5904 |");
  LabeledDataset small = labeling::build_dataset({scored("a", 0.9), scored("b", -0.9)});
  CHECK(labeling::summary_markdown("sample", small) ==
        "| Run | Positive | Negative | Total |\n"
        "| --- | --- | --- | --- |\n"
        "| sample | 1 | 1 | 2 |\n");
}
