// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>
#include <arpa/inet.h>
#include <httplib.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <mutex>
#include <thread>

#include "annotator/model_client.hpp"
#include "core/error.hpp"
#include "core/http_post.hpp"
#include "core/serialize.hpp"
#include "kb/embedder.hpp"
#include "support.hpp"

using namespace flowy;

namespace {

// Local stand-in for a model service; `reply` decides each response.
class FakeService {
 public:
  using Reply = std::function<void(const httplib::Request&, httplib::Response&)>;

  explicit FakeService(Reply reply) : reply_(std::move(reply)) {
    server_.Post(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
      {
        std::lock_guard lock(mutex_);
        bodies_.push_back(req.body);
        auth_.push_back(req.get_header_value("Authorization"));
      }
      reply_(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeService() {
    server_.stop();
    thread_.join();
  }
  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }
  std::vector<std::string> bodies() const {
    std::lock_guard lock(mutex_);
    return bodies_;
  }
  std::vector<std::string> auth() const {
    std::lock_guard lock(mutex_);
    return auth_;
  }

 private:
  Reply reply_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mutex_;
  std::vector<std::string> bodies_;
  std::vector<std::string> auth_;
};

Error caught(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an Error");
  return Error(ErrorCode::internal, "");
}

json embedding_reply(const json& request, std::size_t dim, bool reverse = false) {
  json data = json::array();
  const auto n = request["input"].size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = reverse ? n - 1 - k : k;
    std::vector<double> v(dim, 0.0);
    v[i % dim] = 1.0 + static_cast<double>(request["input"][i].get<std::string>().size());
    data.push_back({{"index", i}, {"embedding", v}});
  }
  return {{"data", data}};
}

}  // namespace

TEST_SUITE("adapters") {

TEST_CASE("endpoint parsing") {
  const auto ep = parse_endpoint("https://api.example.com:8443/v1/chat/completions");
  CHECK(ep.base == "https://api.example.com:8443");
  CHECK(ep.path == "/v1/chat/completions");
  CHECK(parse_endpoint("http://h").path == "/");
  CHECK(caught([] { parse_endpoint("ftp://h/x"); }).code() == ErrorCode::config);
  CHECK(caught([] { parse_endpoint("not a url"); }).code() == ErrorCode::config);
  CHECK(caught([] { parse_endpoint("http:///x"); }).code() == ErrorCode::config);
}

TEST_CASE("post statuses map onto retriable and permanent errors") {
  int status = 200;
  FakeService svc([&](const httplib::Request&, httplib::Response& res) {
    res.status = status;
    res.set_content("{\"ok\":true}", "application/json");
  });
  const auto ep = parse_endpoint(svc.url("/x"));
  CHECK(post_json(ep, "tok", "{}") == "{\"ok\":true}");
  CHECK(svc.auth().back() == "Bearer tok");
  post_json(ep, "", "{}");
  CHECK(svc.auth().back().empty());
  for (int s : {500, 503, 429}) {
    status = s;
    const auto e = caught([&] { post_json(ep, "", "{}"); });
    CHECK(e.code() == ErrorCode::client);
    CHECK(e.retriable());
  }
  for (int s : {400, 401, 404}) {
    status = s;
    const auto e = caught([&] { post_json(ep, "", "{}"); });
    CHECK(e.code() == ErrorCode::client);
    CHECK_FALSE(e.retriable());
  }
}

TEST_CASE("connection failures are retriable") {
  // Bound but never listening, so connecting is refused at once.
  const int fd = socket(AF_INET, SOCK_STREAM, 0);
  REQUIRE(fd >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  REQUIRE(bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  socklen_t len = sizeof addr;
  REQUIRE(getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) == 0);
  const int port = ntohs(addr.sin_port);
  const auto e = caught([&] { post_json(parse_endpoint("http://127.0.0.1:" + std::to_string(port) + "/"), "", "{}"); });
  CHECK(e.code() == ErrorCode::client);
  CHECK(e.retriable());
  close(fd);
}

TEST_CASE("chat adapter sends images and reads the reply") {
  FakeService svc([](const httplib::Request&, httplib::Response& res) {
    res.set_content(
        R"({"choices":[{"message":{"role":"assistant","content":"```json\n{}\n```"}}],"usage":{"prompt_tokens":11,"completion_tokens":3}})",
        "application/json");
  });
  const auto& ds = testing::fixture_dataset();
  annotator::HttpModelConfig cfg;
  cfg.endpoint = svc.url("/v1/chat/completions");
  cfg.api_key = "secret";
  cfg.models[annotator::ModelRole::grounding] = "vision-model";
  cfg.image_root = ds.root;
  annotator::HttpModelClient client(cfg);
  annotator::ModelRequest r;
  r.role = annotator::ModelRole::grounding;
  r.messages.push_back({"user", "what is this", {ds.screens[0].image_ref}});
  const auto reply = client.send(r);
  CHECK(reply.text == "```json\n{}\n```");
  CHECK(reply.prompt_tokens == 11);
  CHECK(reply.completion_tokens == 3);
  const json sent = json::parse(svc.bodies().at(0));
  CHECK(sent == client.build_body(r));
  CHECK(sent["model"] == "vision-model");
  CHECK(svc.auth().at(0) == "Bearer secret");
}

TEST_CASE("chat adapter accepts content parts and rejects malformed replies") {
  std::string body = R"({"choices":[{"message":{"content":[{"type":"text","text":"a"},{"type":"text","text":"b"}]}}]})";
  FakeService svc([&](const httplib::Request&, httplib::Response& res) { res.set_content(body, "application/json"); });
  annotator::HttpModelConfig cfg;
  cfg.endpoint = svc.url("/c");
  annotator::HttpModelClient client(cfg);
  annotator::ModelRequest r;
  r.messages.push_back({"user", "x", {}});
  CHECK(client.send(r).text == "ab");
  body = R"({"choices":[]})";
  CHECK(caught([&] { client.send(r); }).code() == ErrorCode::client);
}

TEST_CASE("embedding adapter batches and restores order") {
  FakeService svc([](const httplib::Request& req, httplib::Response& res) {
    res.set_content(embedding_reply(json::parse(req.body), 4, true).dump(), "application/json");
  });
  kb::HttpEmbedder e({svc.url("/v1/embeddings"), "k", "embed-small", 4, 2});
  const std::vector<std::string> texts{"a", "bb", "ccc"};
  const auto out = e.embed(texts);
  REQUIRE(out.size() == 3);
  CHECK(out[0].values == std::vector<double>{2, 0, 0, 0});
  CHECK(out[1].values == std::vector<double>{0, 3, 0, 0});
  CHECK(out[2].values == std::vector<double>{4, 0, 0, 0});
  CHECK(svc.bodies().size() == 2);
  CHECK(json::parse(svc.bodies()[0])["model"] == "embed-small");
  CHECK(e.name() == "http:embed-small");
}

TEST_CASE("embedding adapter rejects wrong shapes") {
  std::size_t dim = 3;
  bool drop = false;
  FakeService svc([&](const httplib::Request& req, httplib::Response& res) {
    json reply = embedding_reply(json::parse(req.body), dim);
    if (drop) reply["data"].erase(0);
    res.set_content(reply.dump(), "application/json");
  });
  kb::HttpEmbedder e({svc.url("/e"), "", "m", 4, 64});
  const std::vector<std::string> texts{"a", "b"};
  CHECK(caught([&] { e.embed(texts); }).code() == ErrorCode::client);
  dim = 4;
  drop = true;
  CHECK(caught([&] { e.embed(texts); }).code() == ErrorCode::client);
  drop = false;
  CHECK(e.embed(texts).size() == 2);
}

}  // TEST_SUITE
