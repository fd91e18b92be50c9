// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

// JSON mapping for the domain types. Field names here are the on-disk names
// documented in docs/formats.md; readers are strict about required fields
// and lenient about unknown ones.

#pragma once

#include <json.hpp>
#include <string>

#include "core/model.hpp"

namespace flowy {

using json = nlohmann::json;

void to_json(json& j, const BBox& b);
void from_json(const json& j, BBox& b);
void to_json(json& j, const Point& p);
void from_json(const json& j, Point& p);
void to_json(json& j, const FlowExample& f);
void from_json(const json& j, FlowExample& f);
void to_json(json& j, const Screen& s);
void from_json(const json& j, Screen& s);
void to_json(json& j, const TextRegion& t);
void from_json(const json& j, TextRegion& t);
void to_json(json& j, const SegmentMask& m);
void from_json(const json& j, SegmentMask& m);
void to_json(json& j, const Mark& m);
void from_json(const json& j, Mark& m);
void to_json(json& j, const MarkAnchor& a);
void from_json(const json& j, MarkAnchor& a);
void to_json(json& j, const SourceRef& r);
void from_json(const json& j, SourceRef& r);
void to_json(json& j, const PatternAnnotation& a);
void from_json(const json& j, PatternAnnotation& a);
void to_json(json& j, const EmbeddingVector& e);
void from_json(const json& j, EmbeddingVector& e);
void to_json(json& j, const RemovedMask& r);
void from_json(const json& j, RemovedMask& r);
void to_json(json& j, const MarkedScreen& m);
void from_json(const json& j, MarkedScreen& m);
void to_json(json& j, const Violation& v);

// Parses JSON text, turning library exceptions into Error{parse} that names
// `what` (usually a file path).
json parse_json(const std::string& text, const std::string& what);

// Stable rendering used for every persisted document: sorted keys, two-space
// indent, trailing newline.
std::string dump_canonical(const json& j);

[[noreturn]] void throw_decode_error(const std::string& what, const std::string& detail);

// Converts a from_json failure into Error{parse} naming `what`.
template <typename T>
T decode(const json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw_decode_error(what, e.what());
  }
}

}  // namespace flowy
