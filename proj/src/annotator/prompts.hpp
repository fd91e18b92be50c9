// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <string_view>

namespace flowy::annotator {

// Prompt templates live in prompts/<version>/*.txt and are compiled in.
inline constexpr std::string_view kPromptVersion = "v1";

enum class Template { grounding, annotation, source_selection, repair, notice_sources, notice_no_sources };

std::string_view template_text(Template t);

// Replaces every {{name}} with values.at(name). Throws Error{internal} for a
// placeholder without a value, so a template edit cannot silently drop input.
std::string render(std::string_view tmpl, const std::map<std::string, std::string>& values);

}  // namespace flowy::annotator
