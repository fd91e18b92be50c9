// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "core/http_post.hpp"
#include "core/model.hpp"

namespace flowy::kb {

// Text embedding client. Implementations must be safe for concurrent calls
// and must return one vector per input, in order.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) = 0;
  virtual std::size_t dimension() const = 0;
  // Recorded in snapshots so a store is never queried with a different model.
  virtual std::string name() const = 0;

  EmbeddingVector embed_one(const std::string& text);
};

// Hashes lower-cased character trigrams of " text " into `dimension` signed
// buckets (FNV-1a 64) and L2-normalizes. A pure function of its input.
class MockEmbedder final : public Embedder {
 public:
  explicit MockEmbedder(std::size_t dimension = 256);
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;
  std::size_t dimension() const override { return dimension_; }
  std::string name() const override;

  EmbeddingVector embed_text(const std::string& text) const;

 private:
  std::size_t dimension_;
};

struct HttpEmbedderConfig {
  std::string endpoint;  // OpenAI-style /v1/embeddings URL
  std::string api_key;
  std::string model = "default";
  std::size_t dimension = 256;
  std::size_t batch_size = 64;
};

// Sends {"model", "input": [...]} and reads data[i].embedding.
class HttpEmbedder final : public Embedder {
 public:
  explicit HttpEmbedder(HttpEmbedderConfig config);
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;
  std::size_t dimension() const override { return config_.dimension; }
  std::string name() const override { return "http:" + config_.model; }

 private:
  HttpEmbedderConfig config_;
  HttpEndpoint endpoint_;
};

}  // namespace flowy::kb
