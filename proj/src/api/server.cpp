// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include "api/server.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <mutex>
#include <regex>
#include <thread>

#include "core/error.hpp"
#include "core/serialize.hpp"

namespace flowy::api {

namespace {

Reply json_reply(int status, const json& body) { return Reply{status, dump_canonical(body), "application/json"}; }

Reply error_reply(int status, const std::string& code, const std::string& message) {
  return json_reply(status, {{"error", {{"code", code}, {"message", message}}}});
}

std::string asset_url(const std::string& ref) { return "/" + ref; }

json flow_summary(const FlowExample& f) {
  return {{"id", f.id}, {"app_name", f.app_name}, {"product_feature", f.product_feature}, {"title", f.title}};
}

json summary_json(const PatternAnnotation& a) {
  const auto s = store::hover_summary(a);
  return {{"purpose", s.purpose},
          {"advantages", s.advantages},
          {"disadvantages", s.disadvantages},
          {"considerations", s.considerations}};
}

Reply list_flows(const store::Store& store) {
  json flows = json::array();
  for (const auto& doc : store.flows()) {
    json f = flow_summary(doc.flow);
    f["thumbnail"] = asset_url(doc.screens.front().image_ref);
    f["screen_count"] = doc.screens.size();
    f["annotation_count"] = doc.annotations.size();
    flows.push_back(std::move(f));
  }
  return json_reply(200, {{"flows", std::move(flows)}, {"features", store.features()}});
}

Reply get_flow(const store::Store& store, const std::string& id) {
  const auto* doc = store.find_flow(id);
  if (!doc) return error_reply(404, "not_found", "no flow '" + id + "'");
  json screens = json::array();
  for (std::size_t i = 0; i < doc->screens.size(); ++i) {
    const auto& s = doc->screens[i];
    const auto& m = doc->marked[i];
    json marks = json::array();
    for (const auto& mk : m.kept_marks)
      marks.push_back({{"number", mk.number}, {"mask_id", mk.mask_id}, {"anchor", mk.label_anchor}});
    screens.push_back({{"id", s.id},
                       {"order_index", s.order_index},
                       {"width", s.width_px},
                       {"height", s.height_px},
                       {"image", asset_url(s.image_ref)},
                       {"marked_image", asset_url(m.overlay_image_ref)},
                       {"marks", std::move(marks)}});
  }
  json annotations = json::array();
  for (const auto& a : doc->annotations)
    annotations.push_back({{"id", a.id},
                           {"pattern_name", a.pattern_name},
                           {"kind", std::string(to_string(a.kind))},
                           {"anchors", a.anchors},
                           {"summary", summary_json(a)}});
  return json_reply(200, {{"flow", flow_summary(doc->flow)},
                          {"screens", std::move(screens)},
                          {"annotations", std::move(annotations)},
                          {"warnings", doc->warnings}});
}

Reply get_annotation(const store::Store& store, const std::string& id) {
  const auto [doc, a] = store.find_annotation(id);
  if (!a) return error_reply(404, "not_found", "no annotation '" + id + "'");
  json refs = json::array();
  const auto* kb = store.knowledge_base();
  for (const auto& r : a->source_refs) {
    const auto* article = kb ? kb->find_article(r.article_id) : nullptr;
    refs.push_back({{"article_id", r.article_id},
                    {"article_title", article ? article->title : std::string{}},
                    {"excerpt", r.excerpt},
                    {"char_start", r.char_start},
                    {"char_end", r.char_end}});
  }
  json body = *a;
  body["source_refs"] = std::move(refs);
  body["summary"] = summary_json(*a);
  return json_reply(200, {{"annotation", std::move(body)}, {"flow", flow_summary(doc->flow)}});
}

// Screen that best represents an annotation: its first anchor's, else the
// flow's first.
const Screen& lead_screen(const store::FlowDoc& doc, const PatternAnnotation& a) {
  if (!a.anchors.empty())
    for (const auto& s : doc.screens)
      if (s.id == a.anchors.front().screen_id) return s;
  return doc.screens.front();
}

Reply get_related(const store::Store& store, const std::string& id, const std::map<std::string, std::string>& query) {
  std::size_t k = related::kDefaultK;
  if (const auto it = query.find("k"); it != query.end()) {
    const std::string& v = it->second;
    std::size_t parsed = 0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
    if (ec != std::errc{} || end != v.data() + v.size() || parsed < 1 || parsed > kMaxRelatedK)
      return error_reply(400, "bad_request", "k must be an integer between 1 and " + std::to_string(kMaxRelatedK));
    k = parsed;
  }
  const auto [doc, a] = store.find_annotation(id);
  if (!a) return error_reply(404, "not_found", "no annotation '" + id + "'");
  const auto index = store.related();
  if (!index->contains(id)) return error_reply(404, "not_indexed", "annotation '" + id + "' is not in the related index");
  json results = json::array();
  for (const auto& hit : index->rank_related(id, k)) {
    const auto [odoc, other] = store.find_annotation(hit.annotation_id);
    json r{{"annotation_id", hit.annotation_id}, {"flow_id", hit.flow_id}, {"score", hit.score}};
    if (other) {
      const Screen& s = lead_screen(*odoc, *other);
      const auto pos = static_cast<std::size_t>(&s - odoc->screens.data());
      r["pattern_name"] = other->pattern_name;
      r["definition"] = other->definition;
      r["flow"] = flow_summary(odoc->flow);
      r["screen_id"] = s.id;
      r["thumbnail"] = asset_url(odoc->marked[pos].overlay_image_ref);
    }
    results.push_back(std::move(r));
  }
  return json_reply(200, {{"annotation_id", id}, {"k", k}, {"results", std::move(results)}});
}

}  // namespace

Reply handle_get(const store::Store& store, const std::string& path, const std::map<std::string, std::string>& query) {
  static const std::regex flow_re(R"(^/api/flows/([^/]+)$)");
  static const std::regex ann_re(R"(^/api/annotations/([^/]+)$)");
  static const std::regex rel_re(R"(^/api/annotations/([^/]+)/related$)");
  std::smatch m;
  if (path == "/api/flows") return list_flows(store);
  if (std::regex_match(path, m, flow_re)) return get_flow(store, m[1]);
  if (std::regex_match(path, m, ann_re)) return get_annotation(store, m[1]);
  if (std::regex_match(path, m, rel_re)) return get_related(store, m[1], query);
  return error_reply(404, "not_found", "no route for " + path);
}

struct Server::Impl {
  httplib::Server http;
  std::mutex mutex;
  bool stop_requested = false;
  bool in_run = false;
};

Server::Server(std::shared_ptr<const store::Store> store, ServerConfig config)
    : impl_(std::make_unique<Impl>()), store_(std::move(store)), config_(std::move(config)) {
  auto& http = impl_->http;
  // Address reuse only: the library default also sets SO_REUSEPORT, which
  // would let a second server silently share a port that is in use.
  http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  const auto assets = store_->root() / "assets";
  std::error_code ec;
  if (std::filesystem::is_directory(assets, ec)) http.set_mount_point("/assets", assets.string());

  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [key, value] : req.params) query.emplace(key, value);
    const Reply reply = handle_get(*store_, req.path, query);
    res.status = reply.status;
    res.set_content(reply.body, reply.content_type);
  };
  http.Get(R"(/api/.*)", route);
  http.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  http.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    const Reply reply = error_reply(res.status, res.status == 404 ? "not_found" : "http_error",
                                    "cannot serve " + req.path);
    res.set_content(reply.body, reply.content_type);
  });
  http.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    const std::string origin = req.get_header_value("Origin");
    if (origin.empty()) return;
    const auto& allowed = config_.cors_origins;
    const bool any = std::find(allowed.begin(), allowed.end(), "*") != allowed.end();
    if (!any && std::find(allowed.begin(), allowed.end(), origin) == allowed.end()) return;
    res.set_header("Access-Control-Allow-Origin", any ? "*" : origin);
    res.set_header("Access-Control-Allow-Methods", "GET, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    if (!any) res.set_header("Vary", "Origin");
  });
}

Server::~Server() { stop(); }

int Server::bind() {
  auto& http = impl_->http;
  if (config_.port == 0) {
    port_ = http.bind_to_any_port(config_.host);
    if (port_ <= 0) throw Error(ErrorCode::io, "cannot bind " + config_.host);
  } else {
    if (!http.bind_to_port(config_.host, config_.port))
      throw Error(ErrorCode::io, "cannot bind " + config_.host + ":" + std::to_string(config_.port));
    port_ = config_.port;
  }
  return port_;
}

void Server::run() {
  {
    std::lock_guard lock(impl_->mutex);
    if (impl_->stop_requested) return;
    impl_->in_run = true;
  }
  impl_->http.listen_after_bind();
  std::lock_guard lock(impl_->mutex);
  impl_->in_run = false;
}

// httplib ignores stop() until the accept loop is running, so a stop that
// races with run() waits for the loop to start.
void Server::stop() {
  if (!impl_) return;
  {
    std::lock_guard lock(impl_->mutex);
    impl_->stop_requested = true;
  }
  for (;;) {
    {
      std::lock_guard lock(impl_->mutex);
      if (!impl_->in_run) break;
    }
    if (impl_->http.is_running()) {
      impl_->http.stop();
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  impl_->http.stop();
}

}  // namespace flowy::api
