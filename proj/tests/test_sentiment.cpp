#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "unbox/errors.hpp"
#include "unbox/sentiment.hpp"

using namespace unbox;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

const sentiment::Lexicon& lexicon() {
  static const sentiment::Lexicon lex = sentiment::load_lexicon(
      read_file(UNBOX_SOURCE_DIR "/data/vader_lexicon.txt"),
      read_file(UNBOX_SOURCE_DIR "/data/emoji_lexicon.tsv"));
  return lex;
}

}  // namespace

TEST_CASE("lexicon loads every entry, last duplicate wins") {
  const auto& lex = lexicon();
  CHECK(lex.entries.size() == 7503);
  CHECK(lex.entries.at("great") == 3.1);
  CHECK(lex.entries.at("horrible") == -2.5);
  CHECK(lex.entries.at("lol") == 1.8);  // file lists lol twice; the later line wins
  CHECK(lex.emoji_map.size() == 1913);
  CHECK(lex.emoji_map.at("👍") == "thumbs up");
  CHECK(lex.emoji_map.at("😀") == "grinning face");
}

TEST_CASE("lexicon loader rejects malformed lines") {
  CHECK_THROWS_AS(sentiment::load_lexicon("word-without-tab"), ParseError);
  CHECK_THROWS_AS(sentiment::load_lexicon("word\tnot-a-number"), ParseError);
  CHECK_THROWS_AS(sentiment::load_lexicon("word\t9.5"), ParseError);
  CHECK_THROWS_AS(sentiment::load_lexicon("word\tnan"), ParseError);
  CHECK_THROWS_AS(sentiment::load_lexicon("\t1.0"), ParseError);
  CHECK_THROWS_AS(sentiment::load_lexicon("ok\t1.0", "emoji-without-tab"), ParseError);
  // Comments and blank lines are fine.
  const auto lex = sentiment::load_lexicon("# comment\n\nok\t1.0\n", "# c\n\n👍\tthumbs up\n");
  CHECK(lex.entries.size() == 1);
  CHECK(lex.emoji_map.size() == 1);
}

TEST_CASE("normalization maps raw sums into [-1, 1]") {
  CHECK_THAT(sentiment::normalize(0.0), Catch::Matchers::WithinAbs(0.0, 1e-12));
  CHECK_THAT(sentiment::normalize(3.1),
             Catch::Matchers::WithinAbs(3.1 / std::sqrt(3.1 * 3.1 + 15.0), 1e-12));
  CHECK_THAT(sentiment::normalize(-3.1),
             Catch::Matchers::WithinAbs(-3.1 / std::sqrt(3.1 * 3.1 + 15.0), 1e-12));
  CHECK(sentiment::normalize(1e9) <= 1.0);
  CHECK(sentiment::normalize(-1e9) >= -1.0);
}

TEST_CASE("degenerate inputs score as all zeros") {
  for (const char* text : {"", "   ", "\t\n"}) {
    const auto s = sentiment::score(text, lexicon());
    CHECK(s == sentiment::SentimentScores{});
  }
}

TEST_CASE("text without lexicon hits is fully neutral") {
  const auto s = sentiment::score("the table has four legs", lexicon());
  CHECK(s.compound == 0.0);
  CHECK(s.pos == 0.0);
  CHECK(s.neg == 0.0);
  CHECK(s.neu == 1.0);
}

TEST_CASE("reference fixture reproduces exactly") {
  const auto fixture = nlohmann::json::parse(
      read_file(UNBOX_SOURCE_DIR "/tests/fixtures/vader_fixture.json"));
  REQUIRE(fixture.is_array());
  REQUIRE(fixture.size() == 747);

  std::size_t compound_exact = 0;
  for (const auto& row : fixture) {
    const std::string text = row["text"].get<std::string>();
    const auto s = sentiment::score(text, lexicon());
    INFO("text: " << text);
    if (std::abs(s.compound - row["compound"].get<double>()) < 5e-9) ++compound_exact;
    CHECK_THAT(s.compound,
               Catch::Matchers::WithinAbs(row["compound"].get<double>(), 5e-5));
    CHECK_THAT(s.pos, Catch::Matchers::WithinAbs(row["pos"].get<double>(), 1.0001e-3));
    CHECK_THAT(s.neu, Catch::Matchers::WithinAbs(row["neu"].get<double>(), 1.0001e-3));
    CHECK_THAT(s.neg, Catch::Matchers::WithinAbs(row["neg"].get<double>(), 1.0001e-3));
  }
  // The 4-decimal compound should be bit-for-bit right on every fixture row.
  CHECK(compound_exact == fixture.size());
}

TEST_CASE("emoji are scored through their descriptions") {
  const auto with_emoji = sentiment::score("that unboxing 😍", lexicon());
  const auto with_words = sentiment::score("that unboxing smiling face with heart-eyes",
                                           lexicon());
  CHECK(with_emoji.compound == with_words.compound);
  CHECK(with_emoji.compound > 0.0);
}

TEST_CASE("scoring is deterministic") {
  const char* text = "The camera is AMAZING!!! but the battery is terrible :(";
  const auto a = sentiment::score(text, lexicon());
  const auto b = sentiment::score(text, lexicon());
  CHECK(a == b);
}

TEST_CASE("random inputs always produce scores in range") {
  static const std::vector<std::string> pieces = {
      "good",  "bad",   "not",  "very",  "GREAT", "terrible", "!!!", "???",
      "but",   "least", "the",  "phone", "😍",    "💀",       ":)",  ":(",
      "never", "so",    "kind", "of",    ",",     ".",        "á",   "日",
      " ",     " ",     " ",    " ",
  };
  std::mt19937_64 rng(424242);
  std::uniform_int_distribution<std::size_t> len(0, 24);
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);

  for (int iter = 0; iter < 2000; ++iter) {
    std::string text;
    const std::size_t n = len(rng);
    for (std::size_t i = 0; i < n; ++i) text += pieces[pick(rng)];

    const auto s = sentiment::score(text, lexicon());
    REQUIRE(s.compound >= -1.0);
    REQUIRE(s.compound <= 1.0);
    for (double part : {s.pos, s.neu, s.neg}) {
      REQUIRE(part >= 0.0);
      REQUIRE(part <= 1.0);
    }
    const double sum = s.pos + s.neu + s.neg;
    const bool all_zero = s.pos == 0.0 && s.neu == 0.0 && s.neg == 0.0;
    REQUIRE((all_zero || std::abs(sum - 1.0) <= 2e-3));
  }
}
