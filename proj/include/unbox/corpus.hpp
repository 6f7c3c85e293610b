#pragma once

// Comment dump ingestion. Dumps come from JSON or CSV files (schemas
// below) or from the HTTP fetch client in fetch.hpp; all three produce
// the same CommentDump shape with the original record order preserved.
//
// JSON dump: top-level array of objects. Required: "id" (string),
// "text" (string). Optional: "author", "published_at", "like_count",
// "is_reply". Unknown keys are ignored.
//
// CSV dump: header `id,text,author,published_at,like_count,is_reply`,
// RFC 4180 quoting; empty optional cells mean "absent".

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "unbox/errors.hpp"
#include "unbox/text.hpp"

namespace unbox::corpus {

struct RawComment {
  std::string id;
  std::string text;
  std::optional<std::string> author;
  std::optional<std::string> published_at;
  std::optional<std::int64_t> like_count;
  bool is_reply = false;

  friend bool operator==(const RawComment&, const RawComment&) = default;
};

enum class DumpSource { json_file, csv_file, api_fetch };
enum class DumpFormat { json, csv };

struct CommentDump {
  DumpSource source = DumpSource::json_file;
  std::optional<std::string> video_id;
  std::vector<RawComment> comments;

  friend bool operator==(const CommentDump&, const CommentDump&) = default;
};

namespace detail {

inline void check_unique_ids(const std::vector<RawComment>& comments) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(comments.size());
  for (const auto& c : comments) {
    if (c.id.empty()) throw DataError("comment with empty id");
    if (!seen.insert(c.id).second) throw DuplicateIdError(c.id);
  }
}

inline CommentDump parse_json_dump(std::string_view bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(),
                     e.byte > 0 ? e.byte - 1 : 0);
  }
  if (!doc.is_array()) {
    throw ParseError("JSON dump must be a top-level array", 0);
  }

  CommentDump dump;
  dump.source = DumpSource::json_file;
  dump.comments.reserve(doc.size());
  std::size_t index = 0;
  for (const auto& item : doc) {
    const std::string where = "record " + std::to_string(index);
    if (!item.is_object()) throw DataError(where + ": expected an object");

    RawComment c;
    if (!item.contains("id") || !item["id"].is_string()) {
      throw DataError(where + ": required string field \"id\" missing");
    }
    if (!item.contains("text") || !item["text"].is_string()) {
      throw DataError(where + ": required string field \"text\" missing");
    }
    c.id = item["id"].get<std::string>();
    c.text = item["text"].get<std::string>();

    if (item.contains("author")) {
      if (!item["author"].is_string()) throw DataError(where + ": \"author\" must be a string");
      c.author = item["author"].get<std::string>();
    }
    if (item.contains("published_at")) {
      if (!item["published_at"].is_string()) {
        throw DataError(where + ": \"published_at\" must be a string");
      }
      c.published_at = item["published_at"].get<std::string>();
    }
    if (item.contains("like_count")) {
      if (!item["like_count"].is_number_integer() ||
          item["like_count"].get<std::int64_t>() < 0) {
        throw DataError(where + ": \"like_count\" must be a non-negative integer");
      }
      c.like_count = item["like_count"].get<std::int64_t>();
    }
    if (item.contains("is_reply")) {
      if (!item["is_reply"].is_boolean()) throw DataError(where + ": \"is_reply\" must be a boolean");
      c.is_reply = item["is_reply"].get<bool>();
    }
    dump.comments.push_back(std::move(c));
    ++index;
  }
  check_unique_ids(dump.comments);
  return dump;
}

// RFC 4180 field splitter; returns one record per row, honouring quoted
// fields with embedded separators, quotes, and newlines.
inline std::vector<std::vector<std::string>> parse_csv_records(std::string_view bytes) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;

  const auto end_field = [&]() {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  const auto end_record = [&]() {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  std::size_t i = 0;
  const std::size_t n = bytes.size();
  while (i < n) {
    const char ch = bytes[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < n && bytes[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty() && !field_was_quoted) {
      in_quotes = true;
      field_was_quoted = true;
    } else if (ch == ',') {
      end_field();
    } else if (ch == '\r' && i + 1 < n && bytes[i + 1] == '\n') {
      ++i;  // CRLF record end; bare \r outside quotes stays in the field
      end_record();
    } else if (ch == '\n') {
      end_record();
    } else {
      field.push_back(ch);
    }
    ++i;
  }
  if (in_quotes) throw ParseError("unterminated quoted CSV field", n);
  if (!field.empty() || !record.empty()) end_record();
  return records;
}

inline CommentDump parse_csv_dump(std::string_view bytes) {
  static const std::vector<std::string> kHeader = {"id",         "text",
                                                   "author",     "published_at",
                                                   "like_count", "is_reply"};
  const auto records = parse_csv_records(bytes);
  if (records.empty()) throw ParseError("CSV dump is empty (missing header row)", 0);
  if (records.front() != kHeader) {
    throw ParseError("CSV header must be exactly id,text,author,published_at,like_count,is_reply", 0);
  }

  CommentDump dump;
  dump.source = DumpSource::csv_file;
  dump.comments.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = "CSV record " + std::to_string(r);
    if (rec.size() != kHeader.size()) {
      throw DataError(where + ": expected " + std::to_string(kHeader.size()) +
                      " fields, got " + std::to_string(rec.size()));
    }
    RawComment c;
    c.id = rec[0];
    c.text = rec[1];
    if (!rec[2].empty()) c.author = rec[2];
    if (!rec[3].empty()) c.published_at = rec[3];
    if (!rec[4].empty()) {
      try {
        std::size_t consumed = 0;
        const long long v = std::stoll(rec[4], &consumed);
        if (consumed != rec[4].size() || v < 0) throw std::invalid_argument("range");
        c.like_count = v;
      } catch (const std::exception&) {
        throw DataError(where + ": like_count must be a non-negative integer");
      }
    }
    if (!rec[5].empty()) {
      if (rec[5] == "true") {
        c.is_reply = true;
      } else if (rec[5] == "false") {
        c.is_reply = false;
      } else {
        throw DataError(where + ": is_reply must be true or false");
      }
    }
    dump.comments.push_back(std::move(c));
  }
  check_unique_ids(dump.comments);
  return dump;
}

}  // namespace detail

// Pure function of its byte input; identical bytes give an identical dump.
inline CommentDump parse_dump(std::string_view bytes, DumpFormat format) {
  std::size_t bad_offset = 0;
  if (!text::is_valid_utf8(bytes, &bad_offset)) {
    throw InvalidUtf8Error("input is not valid UTF-8", bad_offset);
  }
  return format == DumpFormat::json ? detail::parse_json_dump(bytes)
                                    : detail::parse_csv_dump(bytes);
}

inline std::string serialize_json(const CommentDump& dump) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : dump.comments) {
    nlohmann::ordered_json item;
    item["id"] = c.id;
    item["text"] = c.text;
    if (c.author) item["author"] = *c.author;
    if (c.published_at) item["published_at"] = *c.published_at;
    if (c.like_count) item["like_count"] = *c.like_count;
    item["is_reply"] = c.is_reply;
    arr.push_back(std::move(item));
  }
  return arr.dump(2) + "\n";
}

inline std::string csv_escape(std::string_view field) {
  const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string serialize_csv(const CommentDump& dump) {
  std::string out = "id,text,author,published_at,like_count,is_reply\n";
  for (const auto& c : dump.comments) {
    out += csv_escape(c.id);
    out += ',';
    out += csv_escape(c.text);
    out += ',';
    if (c.author) out += csv_escape(*c.author);
    out += ',';
    if (c.published_at) out += csv_escape(*c.published_at);
    out += ',';
    if (c.like_count) out += std::to_string(*c.like_count);
    out += ',';
    out += c.is_reply ? "true" : "false";
    out += '\n';
  }
  return out;
}

}  // namespace unbox::corpus
