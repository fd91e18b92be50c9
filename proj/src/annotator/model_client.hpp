// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/http_post.hpp"
#include "core/serialize.hpp"

namespace flowy::annotator {

// Which step of the chain a request belongs to; clients are routed by role.
enum class ModelRole { grounding, annotation, source_selection };

std::string_view to_string(ModelRole role);
std::optional<ModelRole> parse_model_role(std::string_view text);

struct Message {
  std::string role;                 // "system" | "user" | "assistant"
  std::string text;
  std::vector<std::string> images;  // store-relative PNG paths
  bool operator==(const Message&) const = default;
};

struct ModelRequest {
  ModelRole role = ModelRole::grounding;
  std::vector<Message> messages;

  json to_json() const;
  // Sorted-key compact JSON; the basis of content_hash().
  std::string canonical() const;
  std::string content_hash() const;
};

struct ModelResponse {
  std::string text;
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
};

// send() must be safe to call concurrently. Transport problems throw
// Error{client}; `retriable()` tells whether trying again may help.
class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual ModelResponse send(const ModelRequest& request) = 0;
};

struct ClientSet {
  std::shared_ptr<ModelClient> grounding;
  std::shared_ptr<ModelClient> annotation;
  std::shared_ptr<ModelClient> source_selection;

  ModelClient& for_role(ModelRole role) const;
  static ClientSet uniform(std::shared_ptr<ModelClient> client);
};

// Offline stand-in for a multimodal model. A request whose content hash has a
// file `<canned_dir>/<hash>.txt` gets that file's text back verbatim;
// anything else is answered by a rule-based responder that reads the JSON
// context block of the first user message. Pure function of the request.
class MockModelClient final : public ModelClient {
 public:
  explicit MockModelClient(std::filesystem::path canned_dir = {});
  ModelResponse send(const ModelRequest& request) override;

 private:
  std::filesystem::path canned_dir_;
};

struct HttpModelConfig {
  std::string endpoint;  // chat-completions URL
  std::string api_key;
  std::map<ModelRole, std::string> models;  // model name per role
  std::string default_model = "default";
  std::filesystem::path image_root;  // resolves Message::images
};

// OpenAI-style chat-completions adapter; images are sent inline as
// base64 data URLs.
class HttpModelClient final : public ModelClient {
 public:
  explicit HttpModelClient(HttpModelConfig config);
  ModelResponse send(const ModelRequest& request) override;

  json build_body(const ModelRequest& request) const;

 private:
  HttpModelConfig config_;
  HttpEndpoint endpoint_;
};

// Returns the body of the first ``` fenced block (any info string) in
// `text`, or the trimmed text itself when it starts with '{'.
std::optional<std::string> extract_fenced_block(std::string_view text);

}  // namespace flowy::annotator
