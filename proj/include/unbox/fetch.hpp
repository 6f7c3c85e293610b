#pragma once

// HTTP client for pulling comment threads from a remote comments API.
//
// Endpoint contract (documented in docs/fetch_api.md):
//   GET {base_url}/comments?videoId=<id>&key=<credentials>&maxResults=<n>
//       [&pageToken=<token>]
// responds with JSON
//   {
//     "videoId": "...",
//     "items": [
//       {"id": "...", "text": "...", "author": "...", "publishedAt": "...",
//        "likeCount": 0, "replies": [ { same shape, no nested replies } ]}
//     ],
//     "nextPageToken": "..."            // absent or null on the last page
//   }
// Status mapping: 401/403 -> auth error, 404 -> unknown video, 429 ->
// quota/rate limit (retried with exponential backoff, then surfaced).

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_map>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "unbox/corpus.hpp"
#include "unbox/errors.hpp"

namespace unbox::fetch {

struct FetchOptions {
  std::string base_url = "http://localhost:8080";
  int page_size = 100;  // maxResults per request
  int max_retries = 3;  // extra attempts after the first, for 429/transport
  std::chrono::milliseconds initial_backoff{250};
  std::chrono::seconds timeout{10};
};

namespace detail {

// Serializes fetches per video id: at most one in-flight request sequence
// per video, so concurrent callers cannot interleave pagination.
inline std::mutex& video_mutex(const std::string& video_id) {
  static std::mutex registry_mutex;
  static std::unordered_map<std::string, std::unique_ptr<std::mutex>> registry;
  std::lock_guard<std::mutex> lock(registry_mutex);
  auto& slot = registry[video_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

inline corpus::RawComment comment_from_item(const nlohmann::json& item,
                                            bool is_reply) {
  if (!item.is_object() || !item.contains("id") || !item["id"].is_string() ||
      !item.contains("text") || !item["text"].is_string()) {
    throw ParseError("fetch response item missing string \"id\"/\"text\"", 0);
  }
  corpus::RawComment c;
  c.id = item["id"].get<std::string>();
  c.text = item["text"].get<std::string>();
  c.is_reply = is_reply;
  if (item.contains("author") && item["author"].is_string()) {
    c.author = item["author"].get<std::string>();
  }
  if (item.contains("publishedAt") && item["publishedAt"].is_string()) {
    c.published_at = item["publishedAt"].get<std::string>();
  }
  if (item.contains("likeCount") && item["likeCount"].is_number_integer() &&
      item["likeCount"].get<std::int64_t>() >= 0) {
    c.like_count = item["likeCount"].get<std::int64_t>();
  }
  return c;
}

inline httplib::Result request_page(httplib::Client& client,
                                    const std::string& video_id,
                                    const std::string& credentials,
                                    const std::string& page_token,
                                    const FetchOptions& opts) {
  httplib::Params params{{"videoId", video_id},
                         {"key", credentials},
                         {"maxResults", std::to_string(opts.page_size)}};
  if (!page_token.empty()) params.emplace("pageToken", page_token);
  return client.Get("/comments", params, httplib::Headers{});
}

// One page with the retry/backoff policy applied. Returns the parsed body.
inline nlohmann::json fetch_page(httplib::Client& client,
                                 const std::string& video_id,
                                 const std::string& credentials,
                                 const std::string& page_token,
                                 const FetchOptions& opts) {
  auto backoff = opts.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    auto res = request_page(client, video_id, credentials, page_token, opts);
    const bool retryable =
        (!res) || res->status == 429 || (res->status >= 500 && res->status < 600);
    if (retryable && attempt < opts.max_retries) {
      if (backoff.count() > 0) std::this_thread::sleep_for(backoff);
      backoff *= 2;
      continue;
    }
    if (!res) {
      throw FetchError(FetchError::Kind::network,
                       "network failure fetching comments for video \"" + video_id +
                           "\": " + httplib::to_string(res.error()));
    }
    if (res->status == 401 || res->status == 403) {
      throw FetchError(FetchError::Kind::auth,
                       "authentication rejected fetching video \"" + video_id + "\"");
    }
    if (res->status == 404) {
      throw FetchError(FetchError::Kind::not_found,
                       "unknown video id \"" + video_id + "\"");
    }
    if (res->status == 429) {
      throw FetchError(FetchError::Kind::quota,
                       "quota exhausted fetching video \"" + video_id +
                           "\" (gave up after " + std::to_string(opts.max_retries) +
                           " retries)");
    }
    if (res->status >= 500) {
      throw FetchError(FetchError::Kind::network,
                       "server error " + std::to_string(res->status) +
                           " fetching video \"" + video_id + "\"");
    }
    if (res->status != 200) {
      throw FetchError(FetchError::Kind::network,
                       "unexpected status " + std::to_string(res->status) +
                           " fetching video \"" + video_id + "\"");
    }
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("malformed fetch response: ") + e.what(),
                       e.byte > 0 ? e.byte - 1 : 0);
    }
  }
}

}  // namespace detail

// Fetches up to page_limit pages of comments (top-level comments plus their
// replies, flattened in response order). page_limit == 0 performs no HTTP
// call and yields an empty dump. Deterministic for a fixed server transcript.
inline corpus::CommentDump fetch_comments(const std::string& video_id,
                                          const std::string& credentials,
                                          int page_limit,
                                          const FetchOptions& opts = {}) {
  if (video_id.empty()) throw UsageError("video id must be non-empty");
  if (credentials.empty()) throw UsageError("API credentials must be non-empty");
  if (page_limit < 0) throw UsageError("page limit must be >= 0");

  corpus::CommentDump dump;
  dump.source = corpus::DumpSource::api_fetch;
  dump.video_id = video_id;
  if (page_limit == 0) return dump;

  std::lock_guard<std::mutex> in_flight(detail::video_mutex(video_id));

  httplib::Client client(opts.base_url);
  client.set_connection_timeout(opts.timeout);
  client.set_read_timeout(opts.timeout);

  std::string page_token;
  for (int page = 0; page < page_limit; ++page) {
    const nlohmann::json body =
        detail::fetch_page(client, video_id, credentials, page_token, opts);
    if (!body.is_object() || !body.contains("items") || !body["items"].is_array()) {
      throw ParseError("fetch response must be an object with an \"items\" array", 0);
    }
    for (const auto& item : body["items"]) {
      dump.comments.push_back(detail::comment_from_item(item, /*is_reply=*/false));
      if (item.contains("replies") && item["replies"].is_array()) {
        for (const auto& reply : item["replies"]) {
          dump.comments.push_back(detail::comment_from_item(reply, /*is_reply=*/true));
        }
      }
    }
    if (!body.contains("nextPageToken") || body["nextPageToken"].is_null()) break;
    if (!body["nextPageToken"].is_string()) {
      throw ParseError("\"nextPageToken\" must be a string when present", 0);
    }
    page_token = body["nextPageToken"].get<std::string>();
    if (page_token.empty()) break;
  }
  corpus::detail::check_unique_ids(dump.comments);
  return dump;
}

}  // namespace unbox::fetch
