#pragma once

// Lexicon-and-rule sentiment scorer. This is a faithful port of the
// published VADER reference implementation (Hutto & Gilbert, ICWSM-14);
// rule constants, booster/negation tables, and evaluation order follow
// the reference so that scores agree with it to four decimal places.
// See tests/fixtures/vader_fixture.json for the pinned oracle corpus.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "unbox/errors.hpp"
#include "unbox/text.hpp"

namespace unbox::sentiment {

struct Lexicon {
  // token -> mean valence in [-4, +4]
  std::unordered_map<std::string, double> entries;
  // emoji -> textual description, substituted before tokenization
  std::unordered_map<std::string, std::string> emoji_map;
};

struct SentimentScores {
  double pos = 0.0;
  double neu = 0.0;
  double neg = 0.0;
  double compound = 0.0;

  friend bool operator==(const SentimentScores&, const SentimentScores&) = default;
};

struct RuleConstants {
  double normalization_alpha = 15.0;
  double booster_increment = 0.293;
  double caps_boost = 0.733;
  double negation_scalar = -0.74;
  double but_pre_weight = 0.5;
  double but_post_weight = 1.5;
  double exclamation_unit = 0.292;  // per mark, capped at 4 marks
  double question_unit = 0.18;      // per mark for 2-3 marks
  double question_cap = 0.96;       // flat total for 4+ marks
};

// x / sqrt(x^2 + alpha), clamped to [-1, 1].
inline double normalize(double raw_sum, double alpha = 15.0) {
  const double norm = raw_sum / std::sqrt(raw_sum * raw_sum + alpha);
  return std::clamp(norm, -1.0, 1.0);
}

namespace detail {

inline const std::vector<std::string>& negate_words() {
  static const std::vector<std::string> kNegate = {
      "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt",
      "ain't", "aren't", "can't", "couldn't", "daren't", "didn't", "doesn't",
      "dont", "hadnt", "hasnt", "havent", "isnt", "mightnt", "mustnt", "neither",
      "don't", "hadn't", "hasn't", "haven't", "isn't", "mightn't", "mustn't",
      "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing",
      "nowhere", "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent",
      "oughtn't", "shan't", "shouldn't", "uh-uh", "wasn't", "weren't",
      "without", "wont", "wouldnt", "won't", "wouldn't", "rarely", "seldom",
      "despite"};
  return kNegate;
}

// Degree modifiers; value is +increment (booster) or -increment (dampener).
inline const std::unordered_map<std::string, int>& booster_signs() {
  static const std::unordered_map<std::string, int> kBoosters = {
      {"absolutely", +1}, {"amazingly", +1},  {"awfully", +1},
      {"completely", +1}, {"considerably", +1}, {"decidedly", +1},
      {"deeply", +1},     {"effing", +1},     {"enormously", +1},
      {"entirely", +1},   {"especially", +1}, {"exceptionally", +1},
      {"extremely", +1},  {"fabulously", +1}, {"flipping", +1},
      {"flippin", +1},    {"fricking", +1},   {"frickin", +1},
      {"frigging", +1},   {"friggin", +1},    {"fully", +1},
      {"fucking", +1},    {"greatly", +1},    {"hella", +1},
      {"highly", +1},     {"hugely", +1},     {"incredibly", +1},
      {"intensely", +1},  {"majorly", +1},    {"more", +1},
      {"most", +1},       {"particularly", +1}, {"purely", +1},
      {"quite", +1},      {"really", +1},     {"remarkably", +1},
      {"so", +1},         {"substantially", +1}, {"thoroughly", +1},
      {"totally", +1},    {"tremendously", +1}, {"uber", +1},
      {"unbelievably", +1}, {"unusually", +1}, {"utterly", +1},
      {"very", +1},
      {"almost", -1},     {"barely", -1},     {"hardly", -1},
      {"just enough", -1}, {"kind of", -1},   {"kinda", -1},
      {"kindof", -1},     {"kind-of", -1},    {"less", -1},
      {"little", -1},     {"marginally", -1}, {"occasionally", -1},
      {"partly", -1},     {"scarcely", -1},   {"slightly", -1},
      {"somewhat", -1},   {"sort of", -1},    {"sorta", -1},
      {"sortof", -1},     {"sort-of", -1}};
  return kBoosters;
}

inline const std::unordered_map<std::string, double>& special_case_idioms() {
  static const std::unordered_map<std::string, double> kIdioms = {
      {"the shit", 3.0},  {"the bomb", 3.0},       {"bad ass", 1.5},
      {"yeah right", -2.0}, {"cut the mustard", 2.0}, {"kiss of death", -1.5},
      {"hand to mouth", -2.0}};
  return kIdioms;
}

inline const std::vector<std::string>& punc_list() {
  static const std::vector<std::string> kPunc = {
      ".", "!", "?", ",", ";", ":", "-", "'", "\"",
      "!!", "!!!", "??", "???", "?!?", "!?!", "?!?!", "!?!?"};
  return kPunc;
}

inline bool is_ascii_punct(char c) {
  switch (c) {
    case '!': case '"': case '#': case '$': case '%': case '&': case '\'':
    case '(': case ')': case '*': case '+': case ',': case '-': case '.':
    case '/': case ':': case ';': case '<': case '=': case '>': case '?':
    case '@': case '[': case '\\': case ']': case '^': case '_': case '`':
    case '{': case '|': case '}': case '~':
      return true;
    default:
      return false;
  }
}

// True when the token has at least one ASCII uppercase letter and no
// ASCII lowercase letter (emoticons such as ":D" count as uppercase).
inline bool is_all_caps(std::string_view word) {
  bool has_upper = false;
  for (char c : word) {
    if (text::is_ascii_lower(c)) return false;
    if (text::is_ascii_upper(c)) has_upper = true;
  }
  return has_upper;
}

// True when some but not all tokens are ALL CAPS.
inline bool allcap_differential(const std::vector<std::string>& words) {
  std::size_t allcaps = 0;
  for (const auto& w : words) {
    if (is_all_caps(w)) ++allcaps;
  }
  const std::size_t diff = words.size() - allcaps;
  return diff > 0 && diff < words.size();
}

// Exact-match negation test over raw tokens, plus the "n't" contraction
// and bare "least" heuristics.
inline bool negated(const std::vector<std::string>& input_words, bool include_nt = true) {
  const auto& negs = negate_words();
  for (const auto& w : input_words) {
    if (std::find(negs.begin(), negs.end(), w) != negs.end()) return true;
  }
  if (include_nt) {
    for (const auto& w : input_words) {
      if (w.find("n't") != std::string::npos) return true;
    }
  }
  auto it = std::find(input_words.begin(), input_words.end(), "least");
  if (it != input_words.end()) {
    const std::size_t i = static_cast<std::size_t>(it - input_words.begin());
    if (i > 0 && input_words[i - 1] != "at") return true;
  }
  return false;
}

inline double scalar_inc_dec(std::string_view word, double valence, bool is_cap_diff,
                             const RuleConstants& rc) {
  const std::string lower = text::to_lower(word);
  const auto& boosters = booster_signs();
  const auto it = boosters.find(lower);
  if (it == boosters.end()) return 0.0;

  double scalar = it->second * rc.booster_increment;
  if (valence < 0) scalar *= -1;
  if (is_cap_diff && is_all_caps(word)) {
    scalar += (valence > 0) ? rc.caps_boost : -rc.caps_boost;
  }
  return scalar;
}

// Splits on whitespace and keeps only tokens longer than one UTF-16 unit.
inline std::vector<std::string> whitespace_tokens(std::string_view s) {
  std::vector<std::string> tokens;
  std::size_t pos = 0, start = 0;
  bool in_token = false;
  auto flush = [&](std::size_t end) {
    if (in_token) {
      std::string_view tok = s.substr(start, end - start);
      if (text::utf16_length(tok) > 1) tokens.emplace_back(tok);
      in_token = false;
    }
  };
  while (pos < s.size()) {
    const text::Codepoint cp = text::decode_utf8(s, pos);
    if (cp.valid && text::is_unicode_space(cp.value)) {
      flush(pos);
    } else if (!in_token) {
      in_token = true;
      start = pos;
    }
    pos += cp.length;
  }
  flush(s.size());
  return tokens;
}

// Tokenization used by the scorer: leading/trailing punctuation variants
// of each word map back to the bare word, so contractions and most
// emoticons survive.
inline std::vector<std::string> words_and_emoticons(std::string_view s) {
  std::string no_punc;
  no_punc.reserve(s.size());
  for (char c : s) {
    if (!is_ascii_punct(c)) no_punc.push_back(c);
  }
  const std::vector<std::string> stripped_words = whitespace_tokens(no_punc);

  std::unordered_map<std::string, std::string> punc_map;
  punc_map.reserve(stripped_words.size() * punc_list().size() * 2);
  for (const auto& p : punc_list()) {
    for (const auto& w : stripped_words) {
      punc_map.emplace(p + w, w);
      punc_map.emplace(w + p, w);
    }
  }

  std::vector<std::string> tokens = whitespace_tokens(s);
  for (auto& tok : tokens) {
    const auto it = punc_map.find(tok);
    if (it != punc_map.end()) tok = it->second;
  }
  return tokens;
}

inline double least_check(double valence, const std::vector<std::string>& words,
                          std::size_t i, const Lexicon& lex, const RuleConstants& rc) {
  const auto prev_is_bare_least = [&](std::size_t k) {
    const std::string lower = text::to_lower(words[k]);
    return lower == "least" && lex.entries.find(lower) == lex.entries.end();
  };
  if (i > 1 && prev_is_bare_least(i - 1)) {
    const std::string before = text::to_lower(words[i - 2]);
    if (before != "at" && before != "very") valence *= rc.negation_scalar;
  } else if (i == 1 && prev_is_bare_least(0)) {
    valence *= rc.negation_scalar;
  }
  return valence;
}

inline double never_check(double valence, const std::vector<std::string>& words,
                          int start_i, std::size_t i, const RuleConstants& rc) {
  const auto is_so_or_this = [&](std::size_t k) {
    return words[k] == "so" || words[k] == "this";
  };
  if (start_i == 0) {
    if (negated({words[i - 1]})) valence *= rc.negation_scalar;
  }
  if (start_i == 1) {
    if (words[i - 2] == "never" && is_so_or_this(i - 1)) {
      valence *= 1.5;
    } else if (negated({words[i - 2]})) {
      valence *= rc.negation_scalar;
    }
  }
  if (start_i == 2) {
    if ((words[i - 3] == "never" && is_so_or_this(i - 2)) || is_so_or_this(i - 1)) {
      valence *= 1.25;
    } else if (negated({words[i - 3]})) {
      valence *= rc.negation_scalar;
    }
  }
  return valence;
}

inline double idioms_check(double valence, const std::vector<std::string>& words,
                           std::size_t i, const RuleConstants& rc) {
  const auto& idioms = special_case_idioms();
  const auto join2 = [&](std::size_t a, std::size_t b) { return words[a] + " " + words[b]; };
  const auto join3 = [&](std::size_t a, std::size_t b, std::size_t c) {
    return words[a] + " " + words[b] + " " + words[c];
  };

  // Callers guarantee i >= 3.
  const std::string onezero = join2(i - 1, i);
  const std::string twoonezero = join3(i - 2, i - 1, i);
  const std::string twoone = join2(i - 2, i - 1);
  const std::string threetwoone = join3(i - 3, i - 2, i - 1);
  const std::string threetwo = join2(i - 3, i - 2);

  for (const auto* seq : {&onezero, &twoonezero, &twoone, &threetwoone, &threetwo}) {
    const auto it = idioms.find(*seq);
    if (it != idioms.end()) {
      valence = it->second;
      break;
    }
  }

  if (words.size() - 1 > i) {
    const auto it = idioms.find(join2(i, i + 1));
    if (it != idioms.end()) valence = it->second;
  }
  if (words.size() - 1 > i + 1) {
    const auto it = idioms.find(join3(i, i + 1, i + 2));
    if (it != idioms.end()) valence = it->second;
  }

  const auto& boosters = booster_signs();
  if (boosters.count(threetwo) || boosters.count(twoone)) {
    valence -= rc.booster_increment;
  }
  return valence;
}

inline void sentiment_valence(const std::vector<std::string>& words, std::size_t i,
                              bool is_cap_diff, const Lexicon& lex,
                              const RuleConstants& rc, std::vector<double>& sentiments) {
  double valence = 0.0;
  const std::string& item = words[i];
  const std::string item_lower = text::to_lower(item);

  const auto it = lex.entries.find(item_lower);
  if (it != lex.entries.end()) {
    valence = it->second;
    if (is_all_caps(item) && is_cap_diff) {
      valence += (valence > 0) ? rc.caps_boost : -rc.caps_boost;
    }

    for (int start_i = 0; start_i < 3; ++start_i) {
      const std::size_t back = static_cast<std::size_t>(start_i) + 1;
      if (i > static_cast<std::size_t>(start_i) &&
          lex.entries.find(text::to_lower(words[i - back])) == lex.entries.end()) {
        double s = scalar_inc_dec(words[i - back], valence, is_cap_diff, rc);
        if (start_i == 1 && s != 0.0) s *= 0.95;
        if (start_i == 2 && s != 0.0) s *= 0.9;
        valence += s;
        valence = never_check(valence, words, start_i, i, rc);
        if (start_i == 2) valence = idioms_check(valence, words, i, rc);
      }
    }

    valence = least_check(valence, words, i, lex, rc);
  }
  sentiments.push_back(valence);
}

inline void but_check(const std::vector<std::string>& words, std::vector<double>& sentiments,
                      const RuleConstants& rc) {
  auto it = std::find(words.begin(), words.end(), "but");
  if (it == words.end()) it = std::find(words.begin(), words.end(), "BUT");
  if (it == words.end()) return;
  const std::size_t but_index = static_cast<std::size_t>(it - words.begin());
  for (std::size_t i = 0; i < sentiments.size(); ++i) {
    if (i < but_index) {
      sentiments[i] *= rc.but_pre_weight;
    } else if (i > but_index) {
      sentiments[i] *= rc.but_post_weight;
    }
  }
}

inline double amplify_exclamation(std::string_view s, const RuleConstants& rc) {
  long count = std::count(s.begin(), s.end(), '!');
  if (count > 4) count = 4;
  return static_cast<double>(count) * rc.exclamation_unit;
}

inline double amplify_question(std::string_view s, const RuleConstants& rc) {
  const long count = std::count(s.begin(), s.end(), '?');
  if (count > 1) {
    return count <= 3 ? static_cast<double>(count) * rc.question_unit : rc.question_cap;
  }
  return 0.0;
}

inline double round_places(double x, int places) {
  const double scale = places == 3 ? 1000.0 : 10000.0;
  return std::round(x * scale) / scale;
}

// Substitutes each emoji codepoint with its description; consecutive
// replacements get a separating space, and the result is trimmed.
inline std::string replace_emoji(std::string_view s, const Lexicon& lex) {
  if (lex.emoji_map.empty()) return std::string(text::trim(s));
  std::string out;
  out.reserve(s.size());
  std::string key;
  bool prev_space = true;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const text::Codepoint cp = text::decode_utf8(s, pos);
    key.assign(s.substr(pos, cp.length));
    const auto it = cp.valid ? lex.emoji_map.find(key) : lex.emoji_map.end();
    if (it != lex.emoji_map.end()) {
      if (!prev_space) out.push_back(' ');
      out.append(it->second);
      prev_space = false;
    } else {
      out.append(key);
      prev_space = (key == " ");
    }
    pos += cp.length;
  }
  return std::string(text::trim(out));
}

}  // namespace detail

// Scores one text. Pure; safe to call concurrently on a shared lexicon.
inline SentimentScores score(std::string_view raw_text, const Lexicon& lexicon,
                             const RuleConstants& constants = {}) {
  const std::string processed = detail::replace_emoji(raw_text, lexicon);

  const std::vector<std::string> words = detail::words_and_emoticons(processed);
  const bool is_cap_diff = detail::allcap_differential(words);
  const auto& boosters = detail::booster_signs();

  std::vector<double> sentiments;
  sentiments.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string lower = text::to_lower(words[i]);
    if (boosters.count(lower) ||
        (i + 1 < words.size() && lower == "kind" &&
         text::to_lower(words[i + 1]) == "of")) {
      sentiments.push_back(0.0);
      continue;
    }
    detail::sentiment_valence(words, i, is_cap_diff, lexicon, constants, sentiments);
  }

  detail::but_check(words, sentiments, constants);

  SentimentScores out;
  if (sentiments.empty()) return out;

  double sum = 0.0;
  for (double s : sentiments) sum += s;

  const double punct = detail::amplify_exclamation(processed, constants) +
                       detail::amplify_question(processed, constants);
  if (sum > 0) {
    sum += punct;
  } else if (sum < 0) {
    sum -= punct;
  }

  const double compound = normalize(sum, constants.normalization_alpha);

  double pos_sum = 0.0, neg_sum = 0.0;
  long neu_count = 0;
  for (double s : sentiments) {
    if (s > 0) {
      pos_sum += s + 1;  // +1 mirrors the neutral count weight
    } else if (s < 0) {
      neg_sum += s - 1;
    } else {
      ++neu_count;
    }
  }

  if (pos_sum > std::fabs(neg_sum)) {
    pos_sum += punct;
  } else if (pos_sum < std::fabs(neg_sum)) {
    neg_sum -= punct;
  }

  const double total = pos_sum + std::fabs(neg_sum) + static_cast<double>(neu_count);
  out.pos = detail::round_places(std::fabs(pos_sum / total), 3);
  out.neg = detail::round_places(std::fabs(neg_sum / total), 3);
  out.neu = detail::round_places(std::fabs(static_cast<double>(neu_count) / total), 3);
  out.compound = detail::round_places(compound, 4);
  return out;
}

// Parses the lexicon TSV (`token<TAB>mean<TAB>stddev<TAB>ratings`) and the
// optional emoji TSV (`emoji<TAB>description`). Later duplicates overwrite
// earlier entries. Lines starting with '#' are ignored.
inline Lexicon load_lexicon(std::string_view lexicon_bytes,
                            std::string_view emoji_bytes = {}) {
  Lexicon lex;
  std::size_t line_no = 0;
  for (std::string_view line : text::split_lines(lexicon_bytes)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t tab1 = line.find('\t');
    if (tab1 == std::string_view::npos || tab1 == 0) {
      throw ParseError("lexicon line " + std::to_string(line_no) +
                           ": expected token<TAB>valence",
                       0);
    }
    std::string token(line.substr(0, tab1));
    std::size_t tab2 = line.find('\t', tab1 + 1);
    if (tab2 == std::string_view::npos) tab2 = line.size();
    const std::string valence_str(line.substr(tab1 + 1, tab2 - tab1 - 1));

    double valence = 0.0;
    bool numeric = true;
    try {
      std::size_t consumed = 0;
      valence = std::stod(valence_str, &consumed);
      if (consumed != valence_str.size()) numeric = false;
    } catch (const std::exception&) {
      numeric = false;
    }
    if (!numeric || std::isnan(valence)) {
      throw ParseError("lexicon line " + std::to_string(line_no) +
                           ": non-numeric valence \"" + valence_str + "\"",
                       0);
    }
    if (valence < -4.0 || valence > 4.0) {
      throw ParseError("lexicon line " + std::to_string(line_no) +
                           ": valence out of range [-4, 4]",
                       0);
    }
    lex.entries[std::move(token)] = valence;
  }

  line_no = 0;
  for (std::string_view line : text::split_lines(emoji_bytes)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw ParseError("emoji line " + std::to_string(line_no) +
                           ": expected emoji<TAB>description",
                       0);
    }
    lex.emoji_map[std::string(line.substr(0, tab))] =
        std::string(line.substr(tab + 1));
  }
  return lex;
}

}  // namespace unbox::sentiment
