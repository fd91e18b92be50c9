// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include "annotator/trace.hpp"

#include <sstream>

#include "core/error.hpp"

namespace flowy::annotator {

void ChainTrace::append(json record) {
  if (!record.is_object()) throw Error(ErrorCode::internal, "trace records must be objects");
  record["seq"] = records_.size();
  record["flow_id"] = flow_id_;
  records_.push_back(std::move(record));
}

void ChainTrace::warn(const std::string& stage, const std::string& message, json extra) {
  extra["stage"] = stage;
  extra["event"] = "warning";
  extra["message"] = message;
  append(std::move(extra));
}

std::vector<std::string> ChainTrace::warnings() const {
  std::vector<std::string> out;
  for (const auto& r : records_)
    if (r.value("event", std::string{}) == "warning") out.push_back(r.value("message", std::string{}));
  return out;
}

std::string ChainTrace::to_ndjson() const {
  std::string out;
  for (const auto& r : records_) {
    out += r.dump(-1, ' ', false, json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

ChainTrace ChainTrace::from_ndjson(const std::string& text) {
  ChainTrace trace;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json r = parse_json(line, "trace line");
    if (trace.flow_id_.empty()) trace.flow_id_ = r.value("flow_id", std::string{});
    trace.records_.push_back(std::move(r));
  }
  return trace;
}

}  // namespace flowy::annotator
