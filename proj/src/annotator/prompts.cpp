// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include "annotator/prompts.hpp"

#include "core/error.hpp"
#include "prompt_templates.inc"

namespace flowy::annotator {

std::string_view template_text(Template t) {
  switch (t) {
    case Template::grounding: return prompt_text::grounding;
    case Template::annotation: return prompt_text::annotation;
    case Template::source_selection: return prompt_text::source_selection;
    case Template::repair: return prompt_text::repair;
    case Template::notice_sources: return prompt_text::notice_sources;
    case Template::notice_no_sources: return prompt_text::notice_no_sources;
  }
  return {};
}

std::string render(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (true) {
    const auto open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) break;
    const auto close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    const std::string name(tmpl.substr(open + 2, close - open - 2));
    const auto it = values.find(name);
    if (it == values.end()) throw Error(ErrorCode::internal, "prompt placeholder '" + name + "' has no value");
    out.append(tmpl.substr(pos, open - pos));
    out.append(it->second);
    pos = close + 2;
  }
  out.append(tmpl.substr(pos));
  return out;
}

}  // namespace flowy::annotator
