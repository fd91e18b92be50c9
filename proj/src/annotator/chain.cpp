// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include "annotator/chain.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "annotator/prompts.hpp"
#include "core/util.hpp"

namespace flowy::annotator {

bool FlowContext::has_mark(const std::string& screen_id, int mark) const {
  for (const auto& s : screens) {
    if (s.screen.id != screen_id) continue;
    for (const auto& m : s.marked.kept_marks)
      if (m.number == mark) return true;
  }
  return false;
}

std::size_t FlowContext::mark_count() const {
  std::size_t n = 0;
  for (const auto& s : screens) n += s.marked.kept_marks.size();
  return n;
}

std::string retrieval_query(const FlowExample& flow, const ChainConfig& config) {
  if (config.enrich_query_with_title && !flow.title.empty()) return flow.product_feature + " " + flow.title;
  return flow.product_feature;
}

namespace {

template <typename T>
struct Parsed {
  std::optional<T> value;  // usable result, possibly partial
  std::string problems;    // non-empty asks for a repair round
};

// Sends `request`, parses the reply and, while attempts remain, answers an
// unusable reply with a repair message. Transport errors are retried with the
// same request when the client marks them retriable. Returns the first clean
// result, else the most recent partial one; throws ChainError otherwise.
template <typename T, typename Parse>
T exchange(ModelClient& client, ModelRequest request, ChainTrace& trace, const json& tag, int max_attempts,
           Parse&& parse) {
  const std::string stage(to_string(request.role));
  std::vector<std::string> raws;
  std::optional<T> fallback;
  std::string last_problem = "no attempt made";
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    json rec = tag;
    rec["stage"] = stage;
    rec["event"] = "request";
    rec["attempt"] = attempt;
    rec["request_hash"] = request.content_hash();
    rec["request"] = request.to_json();
    trace.append(std::move(rec));

    ModelResponse response;
    try {
      response = client.send(request);
    } catch (const std::exception& e) {
      const auto* err = dynamic_cast<const Error*>(&e);
      const bool retriable = err && err->retriable();
      json fail = tag;
      fail["stage"] = stage;
      fail["event"] = "client_error";
      fail["attempt"] = attempt;
      fail["message"] = e.what();
      fail["retriable"] = retriable;
      trace.append(std::move(fail));
      last_problem = e.what();
      if (!retriable) break;
      continue;
    }

    json got = tag;
    got["stage"] = stage;
    got["event"] = "response";
    got["attempt"] = attempt;
    got["raw"] = response.text;
    got["prompt_tokens"] = response.prompt_tokens;
    got["completion_tokens"] = response.completion_tokens;
    trace.append(std::move(got));
    raws.push_back(response.text);

    Parsed<T> parsed = parse(response.text);
    if (parsed.value && parsed.problems.empty()) return std::move(*parsed.value);
    if (parsed.value) fallback = std::move(parsed.value);

    json bad = tag;
    bad["stage"] = stage;
    bad["event"] = "parse_error";
    bad["attempt"] = attempt;
    bad["problems"] = parsed.problems;
    trace.append(std::move(bad));
    last_problem = parsed.problems;

    if (attempt < max_attempts) {
      request.messages.push_back(Message{"assistant", response.text, {}});
      request.messages.push_back(
          Message{"user", render(template_text(Template::repair), {{"problems", parsed.problems}}), {}});
    }
  }
  if (fallback) {
    json rec = tag;
    rec["stage"] = stage;
    rec["event"] = "partial_accept";
    trace.append(std::move(rec));
    return std::move(*fallback);
  }
  throw ChainError(stage + " failed after " + std::to_string(raws.size()) + " response(s): " + last_problem, raws);
}

std::optional<json> parse_reply_json(const std::string& text, std::string& problem) {
  const auto block = extract_fenced_block(text);
  if (!block) {
    problem = "the reply contains no fenced JSON object";
    return std::nullopt;
  }
  try {
    json j = json::parse(*block);
    if (!j.is_object()) {
      problem = "the fenced block is not a JSON object";
      return std::nullopt;
    }
    return j;
  } catch (const json::exception& e) {
    problem = std::string("the fenced block is not valid JSON (") + e.what() + ")";
    return std::nullopt;
  }
}

json flow_json(const FlowExample& f) {
  return json{{"id", f.id}, {"app_name", f.app_name}, {"product_feature", f.product_feature}, {"title", f.title}};
}

json sources_json(std::span<const kb::ScoredChunk> retrieved, const kb::KnowledgeBase& kb) {
  json out = json::array();
  for (const auto& hit : retrieved) {
    const auto* article = kb.find_article(hit.chunk->article_id);
    out.push_back({{"article_id", hit.chunk->article_id},
                   {"title", article ? article->title : std::string{}},
                   {"features", article ? article->feature_tags : std::vector<std::string>{}},
                   {"chunk_index", hit.chunk->chunk_index},
                   {"text", hit.chunk->text}});
  }
  return out;
}

std::string pretty(const json& j) { return j.dump(2, ' ', false, json::error_handler_t::replace); }

std::vector<std::string> string_list(const json& j, const char* key, std::vector<std::string>& problems,
                                     const std::string& label) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  const auto& v = j[key];
  if (v.is_string()) {
    out.push_back(v.get<std::string>());
  } else if (v.is_array()) {
    for (const auto& item : v) {
      if (item.is_string())
        out.push_back(item.get<std::string>());
      else
        problems.push_back(label + ": " + key + " must contain only strings");
    }
  } else {
    problems.push_back(label + ": " + key + " must be a list of strings");
  }
  return out;
}

std::string string_field(const json& j, const char* key) {
  return j.contains(key) && j[key].is_string() ? j[key].get<std::string>() : std::string{};
}

Parsed<std::vector<PatternAnnotation>> parse_drafts(const std::string& text, const FlowContext& flow) {
  Parsed<std::vector<PatternAnnotation>> out;
  std::string problem;
  const auto reply = parse_reply_json(text, problem);
  if (!reply) {
    out.problems = problem;
    return out;
  }
  if (!reply->contains("patterns") || !(*reply)["patterns"].is_array()) {
    out.problems = "the object has no \"patterns\" array";
    return out;
  }
  std::vector<PatternAnnotation> valid;
  std::vector<std::string> problems;
  const auto& patterns = (*reply)["patterns"];
  if (patterns.empty()) problems.push_back("\"patterns\" is empty");
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    const auto& p = patterns[i];
    std::string label = "pattern " + std::to_string(i + 1);
    if (!p.is_object()) {
      problems.push_back(label + ": not an object");
      continue;
    }
    PatternAnnotation a;
    a.flow_id = flow.flow.id;
    a.pattern_name = trim(string_field(p, "pattern_name"));
    if (!a.pattern_name.empty()) label += " (\"" + a.pattern_name + "\")";
    std::vector<std::string> mine;
    const auto kind = parse_pattern_kind(string_field(p, "kind"));
    if (!kind)
      mine.push_back(label + ": kind must be one of component_layout, user_interaction, feature_specific");
    else
      a.kind = *kind;
    a.definition = trim(string_field(p, "definition"));
    a.purpose = trim(string_field(p, "purpose"));
    a.advantages = string_list(p, "advantages", mine, label);
    a.disadvantages = string_list(p, "disadvantages", mine, label);
    a.considerations = string_list(p, "considerations", mine, label);
    if (p.contains("anchors") && p["anchors"].is_array()) {
      for (const auto& anchor : p["anchors"]) {
        if (!anchor.is_object() || !anchor.contains("mark") || !anchor["mark"].is_number_integer()) {
          mine.push_back(label + ": each anchor needs a screen_id and an integer mark");
          continue;
        }
        a.anchors.push_back(MarkAnchor{string_field(anchor, "screen_id"), anchor["mark"].get<int>()});
      }
    }
    for (const auto& msg : annotation_problems(a, [&](const MarkAnchor& m) { return flow.has_mark(m.screen_id, m.mark); }))
      mine.push_back(label + ": " + msg);
    if (mine.empty()) {
      valid.push_back(std::move(a));
    } else {
      problems.insert(problems.end(), mine.begin(), mine.end());
    }
  }
  for (std::size_t i = 0; i < valid.size(); ++i) valid[i].id = flow.flow.id + ".p" + std::to_string(i + 1);
  if (!valid.empty()) out.value = std::move(valid);
  for (const auto& p : problems) out.problems += "- " + p + "\n";
  return out;
}

}  // namespace

std::vector<ElementExplanation> run_grounding(const FlowContext& flow, ModelClient& client, ChainTrace& trace,
                                              const ChainConfig& config) {
  std::vector<ElementExplanation> out;
  const std::size_t count = flow.screens.size();
  for (std::size_t idx = 0; idx < count; ++idx) {
    const auto& sc = flow.screens[idx];
    const auto& marks = sc.marked.kept_marks;
    if (marks.empty()) {
      trace.append({{"stage", "grounding"}, {"event", "skipped"}, {"screen_id", sc.screen.id}, {"reason", "no marks"}});
      continue;
    }

    json context{{"flow", flow_json(flow.flow)},
                 {"screen",
                  {{"id", sc.screen.id},
                   {"order_index", sc.screen.order_index},
                   {"width", sc.screen.width_px},
                   {"height", sc.screen.height_px}}},
                 {"marks", json::array()},
                 {"text_regions", json::array()}};
    for (const auto& m : marks) {
      const auto it = sc.masks.find(m.mask_id);
      context["marks"].push_back({{"number", m.number}, {"bbox", it != sc.masks.end() ? json(it->second.bbox) : json()}});
    }
    for (const auto& t : sc.texts) context["text_regions"].push_back({{"bbox", t.bbox}, {"text", t.text}});

    ModelRequest request;
    request.role = ModelRole::grounding;
    request.messages.push_back(Message{
        "user",
        render(template_text(Template::grounding), {{"product_feature", flow.flow.product_feature},
                                                    {"screen_position", std::to_string(idx + 1)},
                                                    {"screen_count", std::to_string(count)},
                                                    {"flow_title", flow.flow.title},
                                                    {"app_name", flow.flow.app_name},
                                                    {"context_json", pretty(context)}}),
        {sc.image_ref, sc.marked.overlay_image_ref}});

    std::set<int> known;
    for (const auto& m : marks) known.insert(m.number);

    std::vector<std::string> stray;
    auto parse = [&](const std::string& text) {
      Parsed<std::map<int, std::string>> result;
      std::string problem;
      const auto reply = parse_reply_json(text, problem);
      if (!reply) {
        result.problems = problem;
        return result;
      }
      if (!reply->contains("elements") || !(*reply)["elements"].is_array()) {
        result.problems = "the object has no \"elements\" array";
        return result;
      }
      std::map<int, std::string> roles;
      stray.clear();
      for (const auto& e : (*reply)["elements"]) {
        if (!e.is_object() || !e.contains("mark") || !e["mark"].is_number_integer()) {
          result.problems = "each element needs an integer \"mark\" and a \"role\" string";
          return result;
        }
        const int mark = e["mark"].get<int>();
        if (!known.count(mark)) {
          stray.push_back(std::to_string(mark));
          continue;
        }
        roles[mark] = trim(string_field(e, "role"));
      }
      result.value = std::move(roles);
      return result;
    };
    const json tag{{"screen_id", sc.screen.id}};
    const auto roles = exchange<std::map<int, std::string>>(client, std::move(request), trace, tag,
                                                             config.max_attempts, parse);
    for (const auto& mark : stray)
      trace.warn("grounding", "reply explains mark " + mark + ", which is not on the screen", tag);
    for (const auto& m : marks) {
      const auto it = roles.find(m.number);
      if (it == roles.end() || it->second.empty())
        trace.warn("grounding", "no explanation for mark " + std::to_string(m.number), tag);
      out.push_back(ElementExplanation{sc.screen.id, m.number, it == roles.end() ? std::string{} : it->second});
    }
  }
  return out;
}

std::vector<PatternAnnotation> run_annotation(const FlowContext& flow, std::span<const ElementExplanation> explanations,
                                              std::span<const kb::ScoredChunk> retrieved,
                                              const kb::KnowledgeBase& kb, ModelClient& client, ChainTrace& trace,
                                              const ChainConfig& config) {
  json context{{"flow", flow_json(flow.flow)}, {"screens", json::array()}, {"sources", sources_json(retrieved, kb)}};
  std::vector<std::string> images;
  for (const auto& sc : flow.screens) {
    json elements = json::array();
    for (const auto& e : explanations)
      if (e.screen_id == sc.screen.id) elements.push_back({{"mark", e.mark}, {"role", e.role_text}});
    context["screens"].push_back(
        {{"id", sc.screen.id}, {"order_index", sc.screen.order_index}, {"elements", std::move(elements)}});
    images.push_back(sc.image_ref);
    images.push_back(sc.marked.overlay_image_ref);
  }
  if (retrieved.empty()) trace.warn("annotation", "no reference excerpts retrieved; prompting without sources");

  ModelRequest request;
  request.role = ModelRole::annotation;
  request.messages.push_back(Message{
      "user",
      render(template_text(Template::annotation),
             {{"flow_title", flow.flow.title},
              {"app_name", flow.flow.app_name},
              {"product_feature", flow.flow.product_feature},
              {"sources_notice", std::string(trim(template_text(retrieved.empty() ? Template::notice_no_sources
                                                                                    : Template::notice_sources)))},
              {"context_json", pretty(context)}}),
      std::move(images)});

  return exchange<std::vector<PatternAnnotation>>(client, std::move(request), trace, json::object(),
                                                  config.max_attempts,
                                                  [&](const std::string& text) { return parse_drafts(text, flow); });
}

std::optional<SourceRef> verify_passage(const kb::KnowledgeBase& kb, const std::string& article_id,
                                        const std::string& passage) {
  if (passage.empty()) return std::nullopt;
  const auto* article = kb.find_article(article_id);
  if (!article) return std::nullopt;
  const auto pos = article->body.find(passage);
  if (pos == std::string::npos) return std::nullopt;
  return SourceRef{article_id, passage, pos, pos + passage.size()};
}

PatternAnnotation select_sources(const PatternAnnotation& draft, std::span<const kb::ScoredChunk> retrieved,
                                 const kb::KnowledgeBase& kb, ModelClient& client, ChainTrace& trace,
                                 const ChainConfig& config) {
  PatternAnnotation out = draft;
  out.source_refs.clear();
  const json tag{{"annotation_id", draft.id}};
  if (retrieved.empty()) {
    trace.append({{"stage", "source_selection"}, {"event", "skipped"}, {"annotation_id", draft.id},
                  {"reason", "no retrieved excerpts"}});
    return out;
  }

  json context{{"annotation",
                {{"pattern_name", draft.pattern_name},
                 {"kind", std::string(to_string(draft.kind))},
                 {"definition", draft.definition},
                 {"purpose", draft.purpose},
                 {"advantages", draft.advantages},
                 {"disadvantages", draft.disadvantages},
                 {"considerations", draft.considerations}}},
               {"sources", sources_json(retrieved, kb)}};
  ModelRequest request;
  request.role = ModelRole::source_selection;
  request.messages.push_back(
      Message{"user", render(template_text(Template::source_selection), {{"context_json", pretty(context)}}), {}});

  using Passages = std::vector<std::pair<std::string, std::string>>;
  auto parse = [&](const std::string& text) {
    Parsed<Passages> result;
    std::string problem;
    const auto reply = parse_reply_json(text, problem);
    if (!reply) {
      result.problems = problem;
      return result;
    }
    if (!reply->contains("sources") || !(*reply)["sources"].is_array()) {
      result.problems = "the object has no \"sources\" array";
      return result;
    }
    Passages passages;
    for (const auto& s : (*reply)["sources"])
      if (s.is_object()) passages.emplace_back(string_field(s, "article_id"), string_field(s, "passage"));
    result.value = std::move(passages);
    return result;
  };

  Passages passages;
  try {
    passages = exchange<Passages>(client, std::move(request), trace, tag, config.max_attempts, parse);
  } catch (const std::exception& e) {
    trace.warn("source_selection", std::string("keeping annotation without sources: ") + e.what(), tag);
    return out;
  }

  for (const auto& [article_id, passage] : passages) {
    auto ref = verify_passage(kb, article_id, passage);
    if (!ref) {
      json extra = tag;
      extra["article_id"] = article_id;
      extra["passage"] = passage;
      trace.warn("source_selection", "dropped passage that is not verbatim in article '" + article_id + "'", extra);
      continue;
    }
    if (std::find(out.source_refs.begin(), out.source_refs.end(), *ref) == out.source_refs.end())
      out.source_refs.push_back(std::move(*ref));
  }
  return out;
}

ChainResult run_chain(const FlowContext& flow, const kb::KnowledgeBase& kb, kb::Embedder& embedder,
                      const ClientSet& clients, const ChainConfig& config) {
  ChainResult result;
  result.flow_id = flow.flow.id;
  result.trace = ChainTrace(flow.flow.id);
  auto& trace = result.trace;
  try {
    const std::string query = retrieval_query(flow.flow, config);
    std::vector<kb::ScoredChunk> retrieved;
    for (int attempt = 1;; ++attempt) {
      try {
        retrieved = kb.retrieve(query, config.retrieval_k, embedder);
        break;
      } catch (const Error& e) {
        trace.append({{"stage", "retrieval"}, {"event", "client_error"}, {"attempt", attempt}, {"message", e.what()}});
        if (!e.retriable() || attempt >= config.max_attempts) throw;
      }
    }
    json hits = json::array();
    for (const auto& h : retrieved)
      hits.push_back({{"article_id", h.chunk->article_id}, {"chunk_index", h.chunk->chunk_index}, {"score", h.score}});
    trace.append({{"stage", "retrieval"}, {"event", "result"}, {"query", query}, {"hits", std::move(hits)}});

    if (flow.mark_count() == 0) {
      trace.warn("annotation", "no screen in this flow kept any marks; no annotations produced");
      result.ok = true;
      return result;
    }

    const auto explanations = run_grounding(flow, *clients.grounding, trace, config);
    const auto drafts = run_annotation(flow, explanations, retrieved, kb, *clients.annotation, trace, config);
    for (const auto& d : drafts)
      result.annotations.push_back(select_sources(d, retrieved, kb, *clients.source_selection, trace, config));
    trace.append({{"stage", "chain"}, {"event", "done"}, {"annotations", result.annotations.size()}});
    result.ok = true;
  } catch (const std::exception& e) {
    result.ok = false;
    result.error = e.what();
    result.annotations.clear();
    trace.append({{"stage", "chain"}, {"event", "error"}, {"message", e.what()}});
  }
  return result;
}

}  // namespace flowy::annotator
