// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "core/serialize.hpp"

namespace flowy::annotator {

// Append-only log of one flow's chain run: every request, response, retry,
// parse outcome and warning, in order. Records carry no timestamps, so a
// trace is reproducible under deterministic clients.
class ChainTrace {
 public:
  explicit ChainTrace(std::string flow_id = {}) : flow_id_(std::move(flow_id)) {}

  // `record` must be an object; "seq" and "flow_id" are filled in.
  void append(json record);
  void warn(const std::string& stage, const std::string& message, json extra = json::object());

  const std::string& flow_id() const { return flow_id_; }
  const std::vector<json>& records() const { return records_; }
  std::vector<std::string> warnings() const;

  // One compact JSON object per line.
  std::string to_ndjson() const;
  static ChainTrace from_ndjson(const std::string& text);

 private:
  std::string flow_id_;
  std::vector<json> records_;
};

}  // namespace flowy::annotator
