#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "unbox/corpus.hpp"
#include "unbox/errors.hpp"
#include "unbox/fetch.hpp"

using namespace unbox;
using corpus::CommentDump;
using corpus::DumpFormat;
using corpus::RawComment;

TEST_CASE("JSON dump parses required and optional fields") {
  const std::string bytes = R"([
    {"id": "c1", "text": "hello", "author": "ann", "published_at": "2021-01-02T03:04:05Z",
     "like_count": 7, "is_reply": true, "extra": "ignored"},
    {"id": "c2", "text": ""}
  ])";
  const CommentDump dump = corpus::parse_dump(bytes, DumpFormat::json);

  REQUIRE(dump.source == corpus::DumpSource::json_file);
  REQUIRE_FALSE(dump.video_id.has_value());
  REQUIRE(dump.comments.size() == 2);

  const RawComment& a = dump.comments[0];
  CHECK(a.id == "c1");
  CHECK(a.text == "hello");
  CHECK(a.author == "ann");
  CHECK(a.published_at == "2021-01-02T03:04:05Z");
  CHECK(a.like_count == 7);
  CHECK(a.is_reply);

  const RawComment& b = dump.comments[1];
  CHECK(b.id == "c2");
  CHECK(b.text.empty());
  CHECK_FALSE(b.author.has_value());
  CHECK_FALSE(b.published_at.has_value());
  CHECK_FALSE(b.like_count.has_value());
  CHECK_FALSE(b.is_reply);
}

TEST_CASE("JSON dump rejects malformed input") {
  SECTION("syntax error carries a byte offset") {
    try {
      corpus::parse_dump("[{\"id\": }]", DumpFormat::json);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("malformed JSON") != std::string::npos);
      CHECK(e.byte_offset() == 8);  // the '}' that broke the parse
    }
  }
  SECTION("top level must be an array") {
    CHECK_THROWS_AS(corpus::parse_dump(R"({"id":"x"})", DumpFormat::json), ParseError);
  }
  SECTION("records must be objects") {
    CHECK_THROWS_AS(corpus::parse_dump("[1]", DumpFormat::json), DataError);
  }
  SECTION("missing or mistyped required fields") {
    CHECK_THROWS_WITH(corpus::parse_dump(R"([{"text":"t"}])", DumpFormat::json),
                      Catch::Matchers::ContainsSubstring("record 0"));
    CHECK_THROWS_AS(corpus::parse_dump(R"([{"id":1,"text":"t"}])", DumpFormat::json),
                    DataError);
    CHECK_THROWS_WITH(
        corpus::parse_dump(R"([{"id":"a","text":"t"},{"id":"b"}])", DumpFormat::json),
        Catch::Matchers::ContainsSubstring("record 1"));
  }
  SECTION("mistyped optional fields") {
    CHECK_THROWS_AS(
        corpus::parse_dump(R"([{"id":"a","text":"t","author":3}])", DumpFormat::json),
        DataError);
    CHECK_THROWS_AS(
        corpus::parse_dump(R"([{"id":"a","text":"t","like_count":-1}])", DumpFormat::json),
        DataError);
    CHECK_THROWS_AS(
        corpus::parse_dump(R"([{"id":"a","text":"t","like_count":1.5}])", DumpFormat::json),
        DataError);
    CHECK_THROWS_AS(
        corpus::parse_dump(R"([{"id":"a","text":"t","is_reply":"yes"}])", DumpFormat::json),
        DataError);
  }
  SECTION("duplicate ids") {
    try {
      corpus::parse_dump(R"([{"id":"c9","text":"a"},{"id":"c9","text":"b"}])",
                         DumpFormat::json);
      FAIL("expected DuplicateIdError");
    } catch (const DuplicateIdError& e) {
      CHECK(e.id() == "c9");
      CHECK(std::string(e.what()) == "duplicate comment id: \"c9\"");
    }
  }
  SECTION("empty id") {
    CHECK_THROWS_AS(corpus::parse_dump(R"([{"id":"","text":"a"}])", DumpFormat::json),
                    DataError);
  }
}

TEST_CASE("CSV dump honours RFC 4180 quoting") {
  const std::string bytes =
      "id,text,author,published_at,like_count,is_reply\r\n"
      "c1,\"hello, \"\"world\"\"\nsecond line\",ann,2021-01-02,3,true\r\n"
      "c2,plain,,,,\n"
      "c3,\"ends with return\r\",bob,,0,false\n";
  const CommentDump dump = corpus::parse_dump(bytes, DumpFormat::csv);

  REQUIRE(dump.source == corpus::DumpSource::csv_file);
  REQUIRE(dump.comments.size() == 3);

  CHECK(dump.comments[0].text == "hello, \"world\"\nsecond line");
  CHECK(dump.comments[0].author == "ann");
  CHECK(dump.comments[0].like_count == 3);
  CHECK(dump.comments[0].is_reply);

  CHECK(dump.comments[1].text == "plain");
  CHECK_FALSE(dump.comments[1].author.has_value());
  CHECK_FALSE(dump.comments[1].like_count.has_value());
  CHECK_FALSE(dump.comments[1].is_reply);

  CHECK(dump.comments[2].text == "ends with return\r");
  CHECK(dump.comments[2].like_count == 0);
}

TEST_CASE("CSV dump rejects malformed input") {
  const std::string header = "id,text,author,published_at,like_count,is_reply\n";
  SECTION("empty input") {
    CHECK_THROWS_AS(corpus::parse_dump("", DumpFormat::csv), ParseError);
  }
  SECTION("wrong header") {
    CHECK_THROWS_AS(corpus::parse_dump("id,text\nc1,t\n", DumpFormat::csv), ParseError);
  }
  SECTION("wrong field count") {
    CHECK_THROWS_WITH(corpus::parse_dump(header + "c1,t,a\n", DumpFormat::csv),
                      Catch::Matchers::ContainsSubstring("expected 6 fields, got 3"));
  }
  SECTION("bad like_count") {
    CHECK_THROWS_AS(corpus::parse_dump(header + "c1,t,,,x,\n", DumpFormat::csv), DataError);
    CHECK_THROWS_AS(corpus::parse_dump(header + "c1,t,,,-2,\n", DumpFormat::csv), DataError);
    CHECK_THROWS_AS(corpus::parse_dump(header + "c1,t,,,3q,\n", DumpFormat::csv), DataError);
  }
  SECTION("bad is_reply") {
    CHECK_THROWS_AS(corpus::parse_dump(header + "c1,t,,,,maybe\n", DumpFormat::csv),
                    DataError);
  }
  SECTION("unterminated quote") {
    try {
      corpus::parse_dump(header + "c1,\"open\n", DumpFormat::csv);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("unterminated") != std::string::npos);
    }
  }
  SECTION("duplicate ids") {
    CHECK_THROWS_AS(
        corpus::parse_dump(header + "c1,a,,,,\nc1,b,,,,\n", DumpFormat::csv),
        DuplicateIdError);
  }
}

TEST_CASE("invalid UTF-8 is rejected before parsing, with the bad offset") {
  std::string bytes = "[{\"id\":\"a\",\"text\":\"x";
  bytes.push_back(static_cast<char>(0xFF));
  bytes += "\"}]";
  const std::size_t bad = bytes.find(static_cast<char>(0xFF));
  for (auto format : {DumpFormat::json, DumpFormat::csv}) {
    try {
      corpus::parse_dump(bytes, format);
      FAIL("expected InvalidUtf8Error");
    } catch (const InvalidUtf8Error& e) {
      CHECK(e.byte_offset() == bad);
    }
  }
  // Truncated multi-byte sequence at end of input.
  std::string truncated = "id,text,author,published_at,like_count,is_reply\nc1,\xE2\x82";
  CHECK_THROWS_AS(corpus::parse_dump(truncated, DumpFormat::csv), InvalidUtf8Error);
}

namespace {

std::string random_text(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {
      "a",  "b",  "z",    "Q",        " ",          ",", "\"", "\n",
      "\r", "'",  "#",    "=",        "0",          "9", ".",  "!",
      "é",  "ß",  "日",   "👍",       "😀",         ";", ":",  "-",
      "~",  "\t", "\r\n", "comma, ",  "\"quoted\"",
  };
  std::uniform_int_distribution<std::size_t> len(0, 18);
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  std::string out;
  const std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) out += pieces[pick(rng)];
  return out;
}

CommentDump random_dump(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(0, 12);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<std::int64_t> likes(0, 1'000'000);
  CommentDump dump;
  const int n = size(rng);
  for (int i = 0; i < n; ++i) {
    RawComment c;
    c.id = "id-" + std::to_string(i) + "-" + std::to_string(likes(rng));
    c.text = random_text(rng);
    if (coin(rng)) c.author = "u" + random_text(rng);
    if (coin(rng)) c.published_at = "2021-06-0" + std::to_string(1 + i % 9);
    if (coin(rng)) c.like_count = likes(rng);
    c.is_reply = coin(rng) == 1;
    dump.comments.push_back(std::move(c));
  }
  return dump;
}

}  // namespace

TEST_CASE("serialize/parse round-trips preserve every comment") {
  std::mt19937_64 rng(20240901);
  for (int iter = 0; iter < 200; ++iter) {
    const CommentDump dump = random_dump(rng);

    const CommentDump via_json =
        corpus::parse_dump(corpus::serialize_json(dump), DumpFormat::json);
    REQUIRE(via_json.comments == dump.comments);

    const CommentDump via_csv =
        corpus::parse_dump(corpus::serialize_csv(dump), DumpFormat::csv);
    REQUIRE(via_csv.comments == dump.comments);
  }
}

TEST_CASE("serialization is deterministic and omits absent optionals") {
  CommentDump dump;
  dump.comments.push_back({"c1", "hi", std::nullopt, std::nullopt, std::nullopt, false});
  const std::string json = corpus::serialize_json(dump);
  CHECK(json.find("author") == std::string::npos);
  CHECK(json.find("like_count") == std::string::npos);
  CHECK(json.find("\"is_reply\": false") != std::string::npos);
  CHECK(json == corpus::serialize_json(dump));
  CHECK(json.back() == '\n');

  const std::string csv = corpus::serialize_csv(dump);
  CHECK(csv == "id,text,author,published_at,like_count,is_reply\nc1,hi,,,,false\n");
}

// ---------------------------------------------------------------------------
// Fetch client, exercised against a local HTTP server.

namespace {

struct TestServer {
  httplib::Server server;
  int port = 0;
  std::thread thread;

  fetch::FetchOptions options() const {
    fetch::FetchOptions opts;
    opts.base_url = "http://127.0.0.1:" + std::to_string(port);
    opts.initial_backoff = std::chrono::milliseconds(1);
    opts.max_retries = 2;
    return opts;
  }

  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  ~TestServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
};

nlohmann::json item(const std::string& id, const std::string& text) {
  return {{"id", id}, {"text", text}};
}

}  // namespace

TEST_CASE("fetch paginates and flattens replies after their parents") {
  TestServer ts;
  std::vector<std::string> seen_tokens;
  std::vector<std::string> seen_params;
  std::mutex mu;
  ts.server.Get("/comments", [&](const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard<std::mutex> lock(mu);
      seen_tokens.push_back(req.get_param_value("pageToken"));
      seen_params.push_back(req.get_param_value("videoId") + "|" +
                            req.get_param_value("key") + "|" +
                            req.get_param_value("maxResults"));
    }
    nlohmann::json body;
    if (req.get_param_value("pageToken").empty()) {
      auto top = item("t1", "first");
      top["author"] = "ann";
      top["publishedAt"] = "2021-01-01";
      top["likeCount"] = 5;
      top["replies"] = nlohmann::json::array({item("r1", "reply one"), item("r2", "reply two")});
      body = {{"videoId", "vid123"},
              {"items", nlohmann::json::array({top, item("t2", "second")})},
              {"nextPageToken", "page2"}};
    } else {
      body = {{"videoId", "vid123"},
              {"items", nlohmann::json::array({item("t3", "third")})},
              {"nextPageToken", nullptr}};
    }
    res.set_content(body.dump(), "application/json");
  });
  ts.start();

  auto opts = ts.options();
  opts.page_size = 2;
  const CommentDump dump = fetch::fetch_comments("vid123", "secret", 10, opts);

  CHECK(dump.source == corpus::DumpSource::api_fetch);
  CHECK(dump.video_id == "vid123");
  REQUIRE(dump.comments.size() == 5);
  CHECK(dump.comments[0].id == "t1");
  CHECK_FALSE(dump.comments[0].is_reply);
  CHECK(dump.comments[0].author == "ann");
  CHECK(dump.comments[0].like_count == 5);
  CHECK(dump.comments[1].id == "r1");
  CHECK(dump.comments[1].is_reply);
  CHECK(dump.comments[2].id == "r2");
  CHECK(dump.comments[2].is_reply);
  CHECK(dump.comments[3].id == "t2");
  CHECK(dump.comments[4].id == "t3");
  CHECK(seen_tokens == std::vector<std::string>{"", "page2"});
  REQUIRE(seen_params.size() == 2);
  for (const auto& p : seen_params) CHECK(p == "vid123|secret|2");
}

TEST_CASE("fetch respects the page limit") {
  TestServer ts;
  std::atomic<int> hits{0};
  ts.server.Get("/comments", [&](const httplib::Request&, httplib::Response& res) {
    const int page = hits.fetch_add(1);
    nlohmann::json body = {{"items", nlohmann::json::array({item("p" + std::to_string(page), "t")})},
                           {"nextPageToken", "more"}};
    res.set_content(body.dump(), "application/json");
  });
  ts.start();

  const CommentDump dump = fetch::fetch_comments("vid", "k", 3, ts.options());
  CHECK(hits.load() == 3);
  CHECK(dump.comments.size() == 3);
}

TEST_CASE("fetch with page limit zero makes no request") {
  TestServer ts;
  std::atomic<int> hits{0};
  ts.server.Get("/comments", [&](const httplib::Request&, httplib::Response& res) {
    hits.fetch_add(1);
    res.set_content("{}", "application/json");
  });
  ts.start();

  const CommentDump dump = fetch::fetch_comments("vid", "k", 0, ts.options());
  CHECK(hits.load() == 0);
  CHECK(dump.comments.empty());
  CHECK(dump.video_id == "vid");
  CHECK(dump.source == corpus::DumpSource::api_fetch);
}

TEST_CASE("fetch argument validation") {
  CHECK_THROWS_AS(fetch::fetch_comments("", "k", 1), UsageError);
  CHECK_THROWS_AS(fetch::fetch_comments("v", "", 1), UsageError);
  CHECK_THROWS_AS(fetch::fetch_comments("v", "k", -1), UsageError);
}

TEST_CASE("fetch maps HTTP statuses to error kinds") {
  const auto kind_for_status = [](int status, int* hits_out = nullptr) {
    TestServer ts;
    std::atomic<int> hits{0};
    ts.server.Get("/comments", [&](const httplib::Request&, httplib::Response& res) {
      hits.fetch_add(1);
      res.status = status;
    });
    ts.start();
    try {
      fetch::fetch_comments("vid-" + std::to_string(status), "k", 1, ts.options());
      FAIL("expected FetchError");
      return FetchError::Kind::network;
    } catch (const FetchError& e) {
      if (hits_out) *hits_out = hits.load();
      return e.kind();
    }
  };

  CHECK(kind_for_status(401) == FetchError::Kind::auth);
  CHECK(kind_for_status(403) == FetchError::Kind::auth);
  CHECK(kind_for_status(404) == FetchError::Kind::not_found);

  int hits_429 = 0;
  CHECK(kind_for_status(429, &hits_429) == FetchError::Kind::quota);
  CHECK(hits_429 == 3);  // initial attempt + max_retries

  int hits_500 = 0;
  CHECK(kind_for_status(500, &hits_500) == FetchError::Kind::network);
  CHECK(hits_500 == 3);
}

TEST_CASE("fetch retries transient server errors then succeeds") {
  TestServer ts;
  std::atomic<int> hits{0};
  ts.server.Get("/comments", [&](const httplib::Request&, httplib::Response& res) {
    if (hits.fetch_add(1) == 0) {
      res.status = 503;
      return;
    }
    nlohmann::json body = {{"items", nlohmann::json::array({item("a", "t")})}};
    res.set_content(body.dump(), "application/json");
  });
  ts.start();

  const CommentDump dump = fetch::fetch_comments("vid-retry", "k", 5, ts.options());
  CHECK(hits.load() == 2);
  REQUIRE(dump.comments.size() == 1);
  CHECK(dump.comments[0].id == "a");
}

TEST_CASE("fetch validates response bodies") {
  SECTION("malformed JSON") {
    TestServer ts;
    ts.server.Get("/comments", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("{not json", "application/json");
    });
    ts.start();
    CHECK_THROWS_AS(fetch::fetch_comments("v1", "k", 1, ts.options()), ParseError);
  }
  SECTION("missing items array") {
    TestServer ts;
    ts.server.Get("/comments", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"videoId":"x"})", "application/json");
    });
    ts.start();
    CHECK_THROWS_AS(fetch::fetch_comments("v2", "k", 1, ts.options()), ParseError);
  }
  SECTION("non-string nextPageToken") {
    TestServer ts;
    ts.server.Get("/comments", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"items":[],"nextPageToken":7})", "application/json");
    });
    ts.start();
    CHECK_THROWS_AS(fetch::fetch_comments("v3", "k", 2, ts.options()), ParseError);
  }
  SECTION("item missing text") {
    TestServer ts;
    ts.server.Get("/comments", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"items":[{"id":"a"}]})", "application/json");
    });
    ts.start();
    CHECK_THROWS_AS(fetch::fetch_comments("v4", "k", 1, ts.options()), ParseError);
  }
  SECTION("duplicate ids across pages") {
    TestServer ts;
    std::atomic<int> hits{0};
    ts.server.Get("/comments", [&](const httplib::Request&, httplib::Response& res) {
      nlohmann::json body = {{"items", nlohmann::json::array({item("same", "t")})},
                             {"nextPageToken", hits.fetch_add(1) == 0 ? "next" : ""}};
      res.set_content(body.dump(), "application/json");
    });
    ts.start();
    CHECK_THROWS_AS(fetch::fetch_comments("v5", "k", 2, ts.options()), DuplicateIdError);
  }
}
