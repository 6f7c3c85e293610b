#pragma once

// Bag-of-words feature extraction: tokenizer, stopword filter, table+rule
// lemmatizer, min_df-pruned vocabulary, and integer count vectors.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "unbox/errors.hpp"
#include "unbox/text.hpp"

namespace unbox::features {

// Lower-cases, splits on maximal runs of non-alphanumeric bytes (so any
// multi-byte character is a separator), and drops empty and pure-digit
// tokens.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  bool has_alpha = false;
  const auto flush = [&]() {
    if (!current.empty() && has_alpha) tokens.push_back(current);
    current.clear();
    has_alpha = false;
  };
  for (char raw : text) {
    const char c = text::to_lower(raw);
    if (text::is_ascii_alnum(c)) {
      current.push_back(c);
      if (!text::is_ascii_digit(c)) has_alpha = true;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

inline std::vector<std::string> remove_stopwords(
    const std::vector<std::string>& tokens,
    const std::unordered_set<std::string>& stoplist) {
  std::vector<std::string> kept;
  kept.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!stoplist.contains(t)) kept.push_back(t);
  }
  return kept;
}

// One token per line; blank lines and `#` comments ignored.
inline std::unordered_set<std::string> load_stopwords(std::string_view bytes) {
  std::unordered_set<std::string> stoplist;
  for (auto line : text::split_lines(bytes)) {
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    stoplist.insert(text::to_lower(trimmed));
  }
  return stoplist;
}

using LemmaTable = std::unordered_map<std::string, std::string>;

// TSV `surface<TAB>lemma`, one pair per line; later rows overwrite earlier.
inline LemmaTable load_lemma_table(std::string_view bytes) {
  LemmaTable table;
  std::size_t line_no = 0;
  for (auto line : text::split_lines(bytes)) {
    ++line_no;
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto tab = trimmed.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError("lemma table line " + std::to_string(line_no) +
                           ": expected surface<TAB>lemma",
                       0);
    }
    const auto surface = text::trim(trimmed.substr(0, tab));
    const auto lemma = text::trim(trimmed.substr(tab + 1));
    if (surface.empty() || lemma.empty()) {
      throw ParseError("lemma table line " + std::to_string(line_no) +
                           ": empty surface or lemma",
                       0);
    }
    table[text::to_lower(surface)] = text::to_lower(lemma);
  }
  return table;
}

namespace detail {

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

inline bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

// "stopped" -> "stopp" -> "stop"; doubling repair never fires on l/s/z
// ("called" -> "call", "missed" -> "miss").
inline void repair_doubling(std::string& stem) {
  if (stem.size() < 3) return;
  const char last = stem.back();
  if (last != stem[stem.size() - 2]) return;
  if (is_vowel(last) || !text::is_ascii_lower(last)) return;
  if (last == 'l' || last == 's' || last == 'z') return;
  stem.pop_back();
}

}  // namespace detail

// Lookup-table lemma when present, else ordered suffix rules, else identity.
// Expects a lower-cased token (what tokenize() produces).
inline std::string lemmatize(const std::string& token, const LemmaTable& table) {
  if (const auto it = table.find(token); it != table.end()) return it->second;

  const std::size_t n = token.size();
  using detail::ends_with;

  if (ends_with(token, "ies") && n >= 5) {
    return token.substr(0, n - 3) + "y";
  }
  if (ends_with(token, "es") && n >= 4) {
    const char before = token[n - 3];
    if (before == 's' || before == 'x' || before == 'z' ||
        ends_with(token, "ches") || ends_with(token, "shes")) {
      return token.substr(0, n - 2);
    }
  }
  if (ends_with(token, "s") && n >= 3 && !ends_with(token, "ss") &&
      !ends_with(token, "us") && !ends_with(token, "is")) {
    return token.substr(0, n - 1);
  }
  if (ends_with(token, "ing") && n >= 6) {
    std::string stem = token.substr(0, n - 3);
    detail::repair_doubling(stem);
    if (stem.size() >= 3) return stem;
  }
  if (ends_with(token, "ed") && n >= 5) {
    std::string stem = token.substr(0, n - 2);
    detail::repair_doubling(stem);
    if (stem.size() >= 3) return stem;
  }
  return token;
}

inline std::vector<std::string> lemmatize_all(const std::vector<std::string>& tokens,
                                              const LemmaTable& table) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(lemmatize(t, table));
  return out;
}

struct Vocabulary {
  std::vector<std::string> terms;  // sorted lexicographically
  std::unordered_map<std::string, std::size_t> index;
  double min_df = 0.01;

  std::size_t size() const { return terms.size(); }

  // Stable fingerprint over the sorted term list, used to detect a model
  // being applied to vectors from a different vocabulary.
  std::string hash() const {
    std::uint64_t h = text::fnv1a("");
    for (const auto& t : terms) {
      h = text::fnv1a(t, h);
      h = text::fnv1a("\n", h);
    }
    return text::to_hex(h);
  }
};

// Keeps exactly the terms with document frequency df satisfying
// df / N >= min_df; terms come out sorted.
inline Vocabulary fit_vocabulary(const std::vector<std::vector<std::string>>& corpus,
                                 double min_df = 0.01) {
  if (corpus.empty()) throw EmptyDatasetError("cannot fit a vocabulary on an empty corpus");
  if (!(min_df > 0.0) || min_df > 1.0) {
    throw UsageError("min_df must be a fraction in (0,1]");
  }

  std::map<std::string, std::size_t> df;  // ordered: terms come out sorted
  for (const auto& tokens : corpus) {
    std::unordered_set<std::string_view> seen;
    for (const auto& t : tokens) {
      if (seen.insert(t).second) ++df[t];
    }
  }

  Vocabulary vocab;
  vocab.min_df = min_df;
  const double n = static_cast<double>(corpus.size());
  for (const auto& [term, count] : df) {
    if (static_cast<double>(count) / n >= min_df) {
      vocab.index.emplace(term, vocab.terms.size());
      vocab.terms.push_back(term);
    }
  }
  return vocab;
}

using CountVector = std::vector<std::int32_t>;

inline CountVector transform(const std::vector<std::string>& tokens,
                             const Vocabulary& vocabulary) {
  CountVector row(vocabulary.size(), 0);
  for (const auto& t : tokens) {
    if (const auto it = vocabulary.index.find(t); it != vocabulary.index.end()) {
      ++row[it->second];
    }
  }
  return row;
}

struct DocTermMatrix {
  std::vector<CountVector> rows;
  Vocabulary vocabulary;
};

inline DocTermMatrix transform_all(const std::vector<std::vector<std::string>>& corpus,
                                   const Vocabulary& vocabulary) {
  DocTermMatrix matrix;
  matrix.vocabulary = vocabulary;
  matrix.rows.reserve(corpus.size());
  for (const auto& tokens : corpus) matrix.rows.push_back(transform(tokens, vocabulary));
  return matrix;
}

// Sparse triplet export `row,col,count` (header line included), row-major.
inline std::string matrix_to_csv(const DocTermMatrix& matrix) {
  std::string out = "row,col,count\n";
  for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
    const auto& row = matrix.rows[r];
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] == 0) continue;
      out += std::to_string(r);
      out += ',';
      out += std::to_string(c);
      out += ',';
      out += std::to_string(row[c]);
      out += '\n';
    }
  }
  return out;
}

inline std::string vocabulary_to_text(const Vocabulary& vocabulary) {
  std::string out;
  for (const auto& t : vocabulary.terms) {
    out += t;
    out += '\n';
  }
  return out;
}

inline Vocabulary vocabulary_from_text(std::string_view bytes, double min_df) {
  Vocabulary vocab;
  vocab.min_df = min_df;
  for (auto line : text::split_lines(bytes)) {
    const auto term = text::trim(line);
    if (term.empty()) continue;
    if (!vocab.index.emplace(std::string(term), vocab.terms.size()).second) {
      throw DataError("duplicate vocabulary term: \"" + std::string(term) + "\"");
    }
    vocab.terms.emplace_back(term);
  }
  return vocab;
}

}  // namespace unbox::features
