#pragma once

// Corpus cleaning filters: empty/whitespace-only, non-English (by Latin
// letter ratio), numeric-only, heavily capitalized, and duplicate comments
// are dropped, in that fixed order, with one counter per filter so the
// stats always sum back to the input count.

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "unbox/corpus.hpp"
#include "unbox/errors.hpp"
#include "unbox/text.hpp"

namespace unbox::cleaning {

struct CleaningConfig {
  double caps_ratio_threshold = 0.5;            // remove when ratio > threshold
  double english_latin_ratio_threshold = 0.8;   // keep when ratio >= threshold
  std::size_t min_length = 1;                   // minimum trimmed codepoints
  bool dedup_case_sensitive = true;
};

struct CleanComment {
  std::string id;
  std::string text;

  friend bool operator==(const CleanComment&, const CleanComment&) = default;
};

struct CleaningStats {
  std::uint64_t input_count = 0;
  std::uint64_t removed_empty = 0;
  std::uint64_t removed_non_english = 0;
  std::uint64_t removed_numeric_only = 0;
  std::uint64_t removed_caps = 0;
  std::uint64_t removed_duplicates = 0;
  std::uint64_t output_count = 0;

  friend bool operator==(const CleaningStats&, const CleaningStats&) = default;
};

namespace detail {

// Letter detection for the Latin-ratio heuristic. Coarse script ranges are
// enough here: the goal is separating Latin text from other writing systems,
// not full Unicode category data.
inline bool is_latin_letter(char32_t cp) {
  if (cp < 0x80) return text::is_ascii_alpha(static_cast<char>(cp));
  if (cp == 0xD7 || cp == 0xF7) return false;  // multiplication/division signs
  if (cp >= 0xC0 && cp <= 0xFF) return true;   // Latin-1 letters
  if (cp >= 0x100 && cp <= 0x2AF) return true; // Latin Extended-A/B, IPA
  if (cp >= 0x1E00 && cp <= 0x1EFF) return true;  // Latin Extended Additional
  return false;
}

inline bool is_nonlatin_letter(char32_t cp) {
  struct Range {
    char32_t lo, hi;
  };
  static constexpr Range kRanges[] = {
      {0x370, 0x3FF},    // Greek
      {0x400, 0x52F},    // Cyrillic + supplement
      {0x531, 0x58F},    // Armenian
      {0x5D0, 0x5EA},    // Hebrew
      {0x620, 0x64A},    // Arabic
      {0x66E, 0x6D3},    // Arabic (extended letters)
      {0x904, 0x939},    // Devanagari
      {0x958, 0x961},    // Devanagari (additional)
      {0x985, 0x9B9},    // Bengali
      {0xB85, 0xBB9},    // Tamil
      {0xC05, 0xC39},    // Telugu
      {0xD05, 0xD39},    // Malayalam
      {0xD85, 0xDC6},    // Sinhala
      {0xE01, 0xE30},    // Thai
      {0x10A0, 0x10FF},  // Georgian
      {0x1100, 0x11FF},  // Hangul jamo
      {0x3041, 0x30FF},  // Hiragana/Katakana
      {0x3400, 0x4DBF},  // CJK extension A
      {0x4E00, 0x9FFF},  // CJK unified
      {0xAC00, 0xD7A3},  // Hangul syllables
  };
  for (const auto& r : kRanges) {
    if (cp >= r.lo && cp <= r.hi) return true;
  }
  return false;
}

inline bool is_letter(char32_t cp) {
  return is_latin_letter(cp) || is_nonlatin_letter(cp);
}

// Codepoint count after stripping leading/trailing Unicode whitespace.
inline std::size_t trimmed_codepoint_count(std::string_view text) {
  std::size_t count = 0;
  std::size_t pending_spaces = 0;
  bool seen_content = false;
  for (std::size_t i = 0; i < text.size();) {
    const auto cp = text::decode_utf8(text, i);
    i += cp.length;
    const bool space = cp.valid && text::is_unicode_space(cp.value);
    if (space) {
      if (seen_content) ++pending_spaces;
    } else {
      count += pending_spaces + 1;
      pending_spaces = 0;
      seen_content = true;
    }
  }
  return count;
}

}  // namespace detail

// True iff every non-whitespace character is a decimal digit or one of
// `.,:%+-`, with at least one digit present.
inline bool is_numeric_only(std::string_view text) {
  bool has_digit = false;
  for (std::size_t i = 0; i < text.size();) {
    const auto cp = text::decode_utf8(text, i);
    i += cp.length;
    if (cp.valid && text::is_unicode_space(cp.value)) continue;
    if (cp.value < 0x80) {
      const char c = static_cast<char>(cp.value);
      if (text::is_ascii_digit(c)) {
        has_digit = true;
        continue;
      }
      if (c == '.' || c == ',' || c == ':' || c == '%' || c == '+' || c == '-') {
        continue;
      }
    }
    return false;
  }
  return has_digit;
}

// Uppercase cased letters over all cased letters; 0 when there are none.
// Only ASCII letters carry case here, consistent with the all-caps emphasis
// rule in the sentiment engine.
inline double caps_ratio(std::string_view text) {
  std::size_t cased = 0;
  std::size_t upper = 0;
  for (char c : text) {
    if (text::is_ascii_upper(c)) {
      ++cased;
      ++upper;
    } else if (text::is_ascii_lower(c)) {
      ++cased;
    }
  }
  if (cased == 0) return 0.0;
  return static_cast<double>(upper) / static_cast<double>(cased);
}

// True iff the fraction of letters from the Latin script is at least the
// configured threshold. Texts with no letters at all pass (emoji-only or
// numeric comments are judged by the other filters).
inline bool is_english_like(std::string_view text, const CleaningConfig& config = {}) {
  std::size_t letters = 0;
  std::size_t latin = 0;
  for (std::size_t i = 0; i < text.size();) {
    const auto cp = text::decode_utf8(text, i);
    i += cp.length;
    if (!cp.valid) continue;
    if (detail::is_letter(cp.value)) {
      ++letters;
      if (detail::is_latin_letter(cp.value)) ++latin;
    }
  }
  if (letters == 0) return true;
  return static_cast<double>(latin) / static_cast<double>(letters) >=
         config.english_latin_ratio_threshold;
}

struct CleanResult {
  std::vector<CleanComment> comments;
  CleaningStats stats;
};

// Applies the filters in fixed order (empty -> non-English -> numeric-only
// -> caps -> duplicate), attributing each removal to exactly one counter.
// Output preserves input order; the first occurrence of a duplicate wins.
inline CleanResult clean_corpus(const corpus::CommentDump& dump,
                                const CleaningConfig& config = {}) {
  CleanResult result;
  result.stats.input_count = dump.comments.size();
  std::unordered_set<std::string> seen;
  seen.reserve(dump.comments.size());

  for (const auto& comment : dump.comments) {
    const std::string& text = comment.text;
    if (detail::trimmed_codepoint_count(text) < config.min_length) {
      ++result.stats.removed_empty;
      continue;
    }
    if (!is_english_like(text, config)) {
      ++result.stats.removed_non_english;
      continue;
    }
    if (is_numeric_only(text)) {
      ++result.stats.removed_numeric_only;
      continue;
    }
    if (caps_ratio(text) > config.caps_ratio_threshold) {
      ++result.stats.removed_caps;
      continue;
    }
    const std::string key =
        config.dedup_case_sensitive ? text : text::to_lower(text);
    if (!seen.insert(key).second) {
      ++result.stats.removed_duplicates;
      continue;
    }
    result.comments.push_back(CleanComment{comment.id, text});
  }
  result.stats.output_count = result.comments.size();
  return result;
}

inline nlohmann::ordered_json stats_to_json(const CleaningStats& stats) {
  return nlohmann::ordered_json{
      {"input_count", stats.input_count},
      {"removed_empty", stats.removed_empty},
      {"removed_non_english", stats.removed_non_english},
      {"removed_numeric_only", stats.removed_numeric_only},
      {"removed_caps", stats.removed_caps},
      {"removed_duplicates", stats.removed_duplicates},
      {"output_count", stats.output_count},
  };
}

}  // namespace unbox::cleaning
