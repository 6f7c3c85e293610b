#pragma once

// Small byte/codepoint helpers shared by the cleaning, sentiment, and
// feature stages. Everything here is locale-independent: ASCII case
// mapping only, explicit UTF-8 decoding, no <cctype>.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace unbox::text {

inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }
inline bool is_ascii_lower(char c) { return c >= 'a' && c <= 'z'; }
inline bool is_ascii_alpha(char c) { return is_ascii_upper(c) || is_ascii_lower(c); }
inline bool is_ascii_alnum(char c) { return is_ascii_alpha(c) || is_ascii_digit(c); }
inline bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline char to_lower(char c) { return is_ascii_upper(c) ? static_cast<char>(c + 32) : c; }

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = to_lower(c);
  return out;
}

inline std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_ascii_space(s[b])) ++b;
  while (e > b && is_ascii_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

struct Codepoint {
  char32_t value;      // decoded scalar, or the raw byte value for invalid input
  std::size_t offset;  // byte offset in the source string
  std::size_t length;  // byte length consumed
  bool valid;          // false when the bytes were not well-formed UTF-8
};

// Decodes one codepoint starting at `pos`. Invalid sequences consume a
// single byte and are flagged rather than rejected, so callers can stay
// total on arbitrary input.
inline Codepoint decode_utf8(std::string_view s, std::size_t pos) {
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
  const unsigned char b0 = byte(pos);
  const auto bad = [&]() { return Codepoint{b0, pos, 1, false}; };

  if (b0 < 0x80) return {b0, pos, 1, true};
  if (b0 < 0xC2 || b0 > 0xF4) return bad();

  const std::size_t need = b0 < 0xE0 ? 1 : b0 < 0xF0 ? 2 : 3;
  if (pos + need >= s.size()) return bad();

  char32_t cp = b0 & (0x7F >> (need + 1));
  for (std::size_t i = 1; i <= need; ++i) {
    const unsigned char bi = byte(pos + i);
    if ((bi & 0xC0) != 0x80) return bad();
    cp = (cp << 6) | (bi & 0x3F);
  }
  // Reject overlongs, surrogates, and out-of-range values.
  static constexpr char32_t kMin[4] = {0, 0x80, 0x800, 0x10000};
  if (cp < kMin[need]) return bad();
  if (cp >= 0xD800 && cp <= 0xDFFF) return bad();
  if (cp > 0x10FFFF) return bad();
  return {cp, pos, need + 1, true};
}

inline bool is_valid_utf8(std::string_view s, std::size_t* first_bad = nullptr) {
  std::size_t pos = 0;
  while (pos < s.size()) {
    Codepoint cp = decode_utf8(s, pos);
    if (!cp.valid) {
      if (first_bad) *first_bad = pos;
      return false;
    }
    pos += cp.length;
  }
  return true;
}

inline std::size_t codepoint_count(std::string_view s) {
  std::size_t n = 0, pos = 0;
  while (pos < s.size()) {
    pos += decode_utf8(s, pos).length;
    ++n;
  }
  return n;
}

// Length in UTF-16 code units; an invalid byte counts as one unit.
inline std::size_t utf16_length(std::string_view s) {
  std::size_t n = 0, pos = 0;
  while (pos < s.size()) {
    Codepoint cp = decode_utf8(s, pos);
    n += (cp.valid && cp.value >= 0x10000) ? 2 : 1;
    pos += cp.length;
  }
  return n;
}

// Whitespace per the Unicode-aware `\s` character class (what the
// sentiment tokenizer splits on).
inline bool is_unicode_space(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0xA0: case 0x1680: case 0x2028: case 0x2029: case 0x202F:
    case 0x205F: case 0x3000: case 0xFEFF:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

inline std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '\n') {
      std::string_view line = s.substr(start, i - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      start = i + 1;
    }
  }
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

// FNV-1a over bytes; used to fingerprint vocabularies in model files.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string to_hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

}  // namespace unbox::text
