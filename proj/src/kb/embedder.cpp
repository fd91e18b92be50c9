// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include "kb/embedder.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>

#include "core/error.hpp"
#include "core/serialize.hpp"

namespace flowy::kb {

EmbeddingVector Embedder::embed_one(const std::string& text) {
  auto out = embed(std::span<const std::string>(&text, 1));
  if (out.size() != 1) throw Error(ErrorCode::client, "embedder returned " + std::to_string(out.size()) + " vectors for 1 input");
  return std::move(out.front());
}

MockEmbedder::MockEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw Error(ErrorCode::invalid_argument, "embedding dimension must be positive");
}

std::string MockEmbedder::name() const { return "mock-trigram-v1"; }

EmbeddingVector MockEmbedder::embed_text(const std::string& text) const {
  std::string padded;
  padded.reserve(text.size() + 2);
  padded.push_back(' ');
  for (char c : text) padded.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  padded.push_back(' ');

  EmbeddingVector v;
  v.values.assign(dimension_, 0.0);
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    std::uint64_t h = 14695981039346656037ULL;
    for (std::size_t k = 0; k < 3; ++k) {
      h ^= static_cast<unsigned char>(padded[i + k]);
      h *= 1099511628211ULL;
    }
    const double sign = (h >> 63) ? -1.0 : 1.0;
    v.values[h % dimension_] += sign;
  }
  const double n = v.norm();
  if (n == 0.0) throw Error(ErrorCode::invalid_argument, "cannot embed text without trigrams: '" + text + "'");
  for (double& x : v.values) x /= n;
  return v;
}

std::vector<EmbeddingVector> MockEmbedder::embed(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_text(t));
  return out;
}

HttpEmbedder::HttpEmbedder(HttpEmbedderConfig config)
    : config_(std::move(config)), endpoint_(parse_endpoint(config_.endpoint)) {
  if (config_.dimension == 0) throw Error(ErrorCode::config, "embedding dimension must be positive");
  if (config_.batch_size == 0) config_.batch_size = 1;
}

std::vector<EmbeddingVector> HttpEmbedder::embed(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += config_.batch_size) {
    const auto batch = texts.subspan(start, std::min(config_.batch_size, texts.size() - start));
    json request{{"model", config_.model}, {"input", json::array()}};
    for (const auto& t : batch) request["input"].push_back(t);
    const json response = parse_json(post_json(endpoint_, config_.api_key, request.dump()), "embedding response");

    const auto& data = response.contains("data") ? response["data"] : json::array();
    if (!data.is_array() || data.size() != batch.size())
      throw Error(ErrorCode::client, "embedding response has " + std::to_string(data.size()) + " items for " +
                                         std::to_string(batch.size()) + " inputs");
    std::vector<EmbeddingVector> ordered(batch.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      const std::size_t idx = data[i].is_object() ? data[i].value("index", i) : i;
      if (idx >= batch.size()) throw Error(ErrorCode::client, "embedding response index out of range");
      try {
        ordered[idx] = data[i].at("embedding").get<EmbeddingVector>();
      } catch (const json::exception& e) {
        throw Error(ErrorCode::client, std::string("malformed embedding response: ") + e.what());
      }
      if (ordered[idx].dimension() != config_.dimension)
        throw Error(ErrorCode::client, "embedding has dimension " + std::to_string(ordered[idx].dimension()) +
                                           ", expected " + std::to_string(config_.dimension));
      if (!ordered[idx].all_finite()) throw Error(ErrorCode::client, "embedding contains non-finite values");
    }
    for (auto& v : ordered) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace flowy::kb
