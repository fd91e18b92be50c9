// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

// Read-only HTTP API over a loaded store. Every response body is a pure
// function of the store, so the same URL always yields the same bytes.

#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "store/store.hpp"

namespace flowy::api {

inline constexpr int kDefaultPort = 8713;
inline constexpr std::size_t kMaxRelatedK = 100;

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = kDefaultPort;  // 0 picks a free port
  // Origins echoed in Access-Control-Allow-Origin; "*" allows any.
  std::vector<std::string> cors_origins;
};

struct Reply {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Routes one GET request; used by the HTTP layer and directly by tests.
// Paths outside /api are answered with 404.
Reply handle_get(const store::Store& store, const std::string& path, const std::map<std::string, std::string>& query);

class Server {
 public:
  Server(std::shared_ptr<const store::Store> store, ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds the listening socket; throws Error{io} on failure. Returns the port.
  int bind();
  int port() const { return port_; }
  // Blocks until stop(). bind() must have succeeded.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::shared_ptr<const store::Store> store_;
  ServerConfig config_;
  int port_ = 0;
};

}  // namespace flowy::api
