// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include "annotator/model_client.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "core/error.hpp"
#include "core/util.hpp"

namespace flowy::annotator {

std::string_view to_string(ModelRole role) {
  switch (role) {
    case ModelRole::grounding: return "grounding";
    case ModelRole::annotation: return "annotation";
    case ModelRole::source_selection: return "source_selection";
  }
  return "grounding";
}

std::optional<ModelRole> parse_model_role(std::string_view text) {
  if (text == "grounding") return ModelRole::grounding;
  if (text == "annotation") return ModelRole::annotation;
  if (text == "source_selection") return ModelRole::source_selection;
  return std::nullopt;
}

json ModelRequest::to_json() const {
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"text", m.text}, {"images", m.images}});
  return {{"role", std::string(to_string(role))}, {"messages", std::move(msgs)}};
}

std::string ModelRequest::canonical() const {
  return to_json().dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string ModelRequest::content_hash() const { return sha256_hex(canonical()); }

ModelClient& ClientSet::for_role(ModelRole role) const {
  const std::shared_ptr<ModelClient>* p = nullptr;
  switch (role) {
    case ModelRole::grounding: p = &grounding; break;
    case ModelRole::annotation: p = &annotation; break;
    case ModelRole::source_selection: p = &source_selection; break;
  }
  if (!p || !*p) throw Error(ErrorCode::config, "no model client for role " + std::string(to_string(role)));
  return **p;
}

ClientSet ClientSet::uniform(std::shared_ptr<ModelClient> client) { return ClientSet{client, client, client}; }

std::optional<std::string> extract_fenced_block(std::string_view text) {
  const auto open = text.find("```");
  if (open != std::string_view::npos) {
    const auto line_end = text.find('\n', open);
    if (line_end == std::string_view::npos) return std::nullopt;
    const auto close = text.find("```", line_end + 1);
    if (close == std::string_view::npos) return std::nullopt;
    return std::string(text.substr(line_end + 1, close - line_end - 1));
  }
  std::string t = trim(text);
  if (!t.empty() && t.front() == '{') return t;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Mock client

namespace {

std::string fence(const json& j) { return "```json\n" + j.dump(2, ' ', false, json::error_handler_t::replace) + "\n```\n"; }

json context_of(const ModelRequest& request) {
  for (const auto& m : request.messages) {
    if (m.role != "user") continue;
    const auto block = extract_fenced_block(m.text);
    if (!block) break;
    try {
      return json::parse(*block);
    } catch (const json::exception&) {
      break;
    }
  }
  return json::object();
}

std::string str(const json& j, const char* key) {
  return j.is_object() && j.contains(key) && j[key].is_string() ? j[key].get<std::string>() : std::string{};
}

const char* third(int v, int extent, const char* a, const char* b, const char* c) {
  if (extent <= 0) return b;
  if (v * 3 < extent) return a;
  if (v * 3 < extent * 2) return b;
  return c;
}

std::string mock_grounding(const json& ctx) {
  const json screen = ctx.value("screen", json::object());
  const int width = screen.value("width", 0);
  const int height = screen.value("height", 0);
  const std::string feature = str(ctx.value("flow", json::object()), "product_feature");
  json elements = json::array();
  for (const auto& m : ctx.value("marks", json::array())) {
    const int number = m.value("number", 0);
    BBox box;
    if (m.contains("bbox") && m["bbox"].is_array() && m["bbox"].size() == 4)
      box = BBox{m["bbox"][0].get<int>(), m["bbox"][1].get<int>(), m["bbox"][2].get<int>(), m["bbox"][3].get<int>()};
    std::vector<std::string> labels;
    for (const auto& t : ctx.value("text_regions", json::array())) {
      if (!t.contains("bbox") || t["bbox"].size() != 4) continue;
      const int cx = t["bbox"][0].get<int>() + t["bbox"][2].get<int>() / 2;
      const int cy = t["bbox"][1].get<int>() + t["bbox"][3].get<int>() / 2;
      if (cx >= box.x && cx < box.right() && cy >= box.y && cy < box.bottom()) labels.push_back(str(t, "text"));
    }
    std::string place = std::string(third(box.y + box.h / 2, height, "top", "middle", "bottom")) + "-" +
                        third(box.x + box.w / 2, width, "left", "centre", "right");
    std::string role;
    if (!labels.empty()) {
      role = "Element labelled \"" + labels.front() + "\"";
      for (std::size_t i = 1; i < labels.size(); ++i) role += ", \"" + labels[i] + "\"";
      role += " in the " + place + " area; it lets the user act on this step of " + feature + ".";
    } else {
      role = "Unlabelled " + std::to_string(box.w) + "x" + std::to_string(box.h) + " element in the " + place +
             " area of the screen.";
    }
    elements.push_back({{"mark", number}, {"role", role}});
  }
  return "Each mark is described from its position and the text inside it.\n" + fence({{"elements", elements}});
}

struct Section {
  std::string heading;
  std::string article_id;
  std::string kind;
  std::string description;  // first prose line after the heading
  std::map<std::string, std::string> fields;
};

bool starts_with(const std::string& s, std::string_view p) { return s.compare(0, p.size(), p) == 0; }

const std::vector<std::string>& labels() {
  static const std::vector<std::string> v{"Pattern type:", "Purpose:", "Advantages:", "Disadvantages:",
                                          "Considerations:"};
  return v;
}

// Splits an excerpt into "## " sections with labelled lines. Excerpts may
// start or end mid-section; whatever is present is returned.
std::vector<Section> parse_sections(const std::string& article_id, const std::string& text) {
  std::vector<Section> out;
  std::istringstream in(text);
  std::string line;
  Section* cur = nullptr;
  while (std::getline(in, line)) {
    if (starts_with(line, "## ")) {
      out.push_back(Section{trim(line.substr(3)), article_id, {}, {}, {}});
      cur = &out.back();
      continue;
    }
    if (!cur) continue;
    const std::string t = trim(line);
    if (t.empty()) continue;
    bool labelled = false;
    for (const auto& l : labels()) {
      if (starts_with(t, l)) {
        const std::string value = trim(t.substr(l.size()));
        if (l == "Pattern type:")
          cur->kind = value;
        else
          cur->fields[l] = value;
        labelled = true;
      }
    }
    if (!labelled && cur->description.empty() && !starts_with(t, "#")) cur->description = t;
  }
  return out;
}

std::vector<std::string> split_items(const std::string& value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    auto end = value.find(';', start);
    if (end == std::string::npos) end = value.size();
    std::string item = trim(std::string_view(value).substr(start, end - start));
    if (!item.empty()) out.push_back(item);
    start = end + 1;
  }
  return out;
}

std::string kind_of(const std::string& label) {
  std::string k;
  for (char c : trim(label)) k += c == ' ' || c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (parse_pattern_kind(k)) return k;
  return "feature_specific";
}

std::string mock_annotation(const json& ctx) {
  const json flow = ctx.value("flow", json::object());
  const std::string app = str(flow, "app_name");
  const std::string title = str(flow, "title");
  const std::string feature = str(flow, "product_feature");

  std::vector<std::pair<std::string, int>> marks;  // (screen_id, mark) in flow order
  std::map<std::string, std::string> roles;
  const json screens = ctx.value("screens", json::array());
  for (const auto& s : screens)
    for (const auto& e : s.value("elements", json::array())) {
      marks.emplace_back(str(s, "id"), e.value("mark", 0));
      roles[str(s, "id") + "#" + std::to_string(e.value("mark", 0))] = str(e, "role");
    }

  // Excerpts from articles tagged with the flow's feature come first.
  std::vector<json> sources;
  for (const bool tagged : {true, false})
    for (const auto& src : ctx.value("sources", json::array())) {
      const auto features = src.value("features", std::vector<std::string>{});
      if ((std::find(features.begin(), features.end(), feature) != features.end()) == tagged) sources.push_back(src);
    }
  std::vector<Section> picked;
  std::set<std::string> seen;
  for (const auto& src : sources) {
    for (auto& sec : parse_sections(str(src, "article_id"), str(src, "text"))) {
      if (picked.size() >= 2) break;
      if (sec.description.empty() || !seen.insert(sec.heading).second) continue;
      picked.push_back(std::move(sec));
    }
  }

  json patterns = json::array();
  auto anchors_for = [&](std::size_t i, std::set<std::string>& on_screens) {
    json anchors = json::array();
    if (marks.empty()) return anchors;
    std::set<std::size_t> used;
    for (std::size_t k = 0; k < 2; ++k) {
      const std::size_t idx = (2 * i + k) % marks.size();
      if (!used.insert(idx).second) continue;
      anchors.push_back({{"screen_id", marks[idx].first}, {"mark", marks[idx].second}});
      on_screens.insert(marks[idx].first);
    }
    return anchors;
  };
  auto where = [&](std::size_t n) {
    return "In " + app + "'s \"" + title + "\" flow it appears on " + std::to_string(n) + " of " +
           std::to_string(screens.size()) + " screens.";
  };

  for (std::size_t i = 0; i < picked.size(); ++i) {
    const auto& sec = picked[i];
    std::set<std::string> on;
    json anchors = anchors_for(i, on);
    auto list = [&](const char* label, const char* fallback) {
      auto items = split_items(sec.fields.count(label) ? sec.fields.at(label) : std::string{});
      if (items.empty()) items.push_back(fallback);
      return items;
    };
    const std::string purpose =
        sec.fields.count("Purpose:") ? sec.fields.at("Purpose:") : "Supports the " + feature + " task.";
    patterns.push_back({{"pattern_name", sec.heading},
                        {"kind", kind_of(sec.kind)},
                        {"definition", first_sentence(sec.description) + " " + where(on.size())},
                        {"purpose", purpose},
                        {"advantages", list("Advantages:", "Keeps the task visible.")},
                        {"disadvantages", list("Disadvantages:", "Adds elements to the screen.")},
                        {"considerations", list("Considerations:", "Test it with real content.")},
                        {"anchors", std::move(anchors)}});
  }
  if (patterns.empty()) {
    std::set<std::string> on;
    json anchors = anchors_for(0, on);
    std::string first_role = marks.empty() ? std::string{} : roles[marks[0].first + "#" + std::to_string(marks[0].second)];
    patterns.push_back(
        {{"pattern_name", feature + " flow"},
         {"kind", "feature_specific"},
         {"definition", "A step-by-step " + feature + " sequence. " + where(on.size())},
         {"purpose", first_role.empty() ? "Guides the user through " + feature + "." : first_role},
         {"advantages", {"Each step has a single focus."}},
         {"disadvantages", {"More steps add more taps."}},
         {"considerations", {"Keep the way back to earlier steps visible."}},
         {"anchors", std::move(anchors)}});
  }
  return "Patterns follow the reference sections that match this flow.\n" + fence({{"patterns", patterns}});
}

std::string mock_source_selection(const json& ctx) {
  const std::string name = str(ctx.value("annotation", json::object()), "pattern_name");
  json sources = json::array();
  for (const auto& src : ctx.value("sources", json::array())) {
    for (const auto& sec : parse_sections(str(src, "article_id"), str(src, "text"))) {
      if (sec.heading != name || sec.description.empty()) continue;
      sources.push_back({{"article_id", sec.article_id}, {"passage", first_sentence(sec.description)}});
      return fence({{"sources", sources}});
    }
  }
  return fence({{"sources", sources}});
}

long long token_estimate(std::size_t bytes) { return static_cast<long long>((bytes + 3) / 4); }

}  // namespace

MockModelClient::MockModelClient(std::filesystem::path canned_dir) : canned_dir_(std::move(canned_dir)) {}

ModelResponse MockModelClient::send(const ModelRequest& request) {
  ModelResponse r;
  std::size_t prompt_bytes = 0;
  for (const auto& m : request.messages) prompt_bytes += m.text.size();
  r.prompt_tokens = token_estimate(prompt_bytes);

  if (!canned_dir_.empty()) {
    const auto path = canned_dir_ / (request.content_hash() + ".txt");
    std::error_code ec;
    if (std::filesystem::is_regular_file(path, ec)) {
      r.text = read_file(path);
      r.completion_tokens = token_estimate(r.text.size());
      return r;
    }
  }
  const json ctx = context_of(request);
  switch (request.role) {
    case ModelRole::grounding: r.text = mock_grounding(ctx); break;
    case ModelRole::annotation: r.text = mock_annotation(ctx); break;
    case ModelRole::source_selection: r.text = mock_source_selection(ctx); break;
  }
  r.completion_tokens = token_estimate(r.text.size());
  return r;
}

// ---------------------------------------------------------------------------
// HTTP client

HttpModelClient::HttpModelClient(HttpModelConfig config)
    : config_(std::move(config)), endpoint_(parse_endpoint(config_.endpoint)) {}

json HttpModelClient::build_body(const ModelRequest& request) const {
  const auto it = config_.models.find(request.role);
  json messages = json::array();
  for (const auto& m : request.messages) {
    if (m.images.empty()) {
      messages.push_back({{"role", m.role}, {"content", m.text}});
      continue;
    }
    json parts = json::array();
    parts.push_back({{"type", "text"}, {"text", m.text}});
    for (const auto& ref : m.images) {
      const std::string png = read_file(config_.image_root / ref);
      parts.push_back({{"type", "image_url"}, {"image_url", {{"url", "data:image/png;base64," + base64_encode(png)}}}});
    }
    messages.push_back({{"role", m.role}, {"content", std::move(parts)}});
  }
  return {{"model", it != config_.models.end() ? it->second : config_.default_model},
          {"messages", std::move(messages)},
          {"temperature", 0}};
}

ModelResponse HttpModelClient::send(const ModelRequest& request) {
  const std::string raw =
      post_json(endpoint_, config_.api_key, build_body(request).dump(-1, ' ', false, json::error_handler_t::replace));
  try {
    const json j = json::parse(raw);
    const json& content = j.at("choices").at(0).at("message").at("content");
    ModelResponse r;
    if (content.is_string()) {
      r.text = content.get<std::string>();
    } else {
      for (const auto& part : content)
        if (part.is_object() && part.value("type", "") == "text") r.text += part.value("text", "");
    }
    if (j.contains("usage") && j["usage"].is_object()) {
      r.prompt_tokens = j["usage"].value("prompt_tokens", 0LL);
      r.completion_tokens = j["usage"].value("completion_tokens", 0LL);
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::client, std::string("malformed chat-completions response: ") + e.what());
  }
}

}  // namespace flowy::annotator
