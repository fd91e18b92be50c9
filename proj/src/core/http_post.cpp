// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/http_post.hpp"

#include <httplib.h>

#include "core/error.hpp"

namespace flowy {

HttpEndpoint parse_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::config, "endpoint is not a URL: '" + url + "'");
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https")
    throw Error(ErrorCode::config, "endpoint scheme must be http or https: '" + url + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  HttpEndpoint ep;
  ep.base = path_start == std::string::npos ? url : url.substr(0, path_start);
  ep.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (ep.base.size() <= scheme_end + 3) throw Error(ErrorCode::config, "endpoint has no host: '" + url + "'");
  return ep;
}

std::string post_json(const HttpEndpoint& endpoint, const std::string& bearer_token, const std::string& body,
                      std::chrono::seconds timeout) {
  httplib::Client client(endpoint.base);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers headers;
  if (!bearer_token.empty()) headers.emplace("Authorization", "Bearer " + bearer_token);

  auto res = client.Post(endpoint.path, headers, body, "application/json");
  if (!res)
    throw Error(ErrorCode::client,
                "POST " + endpoint.base + endpoint.path + " failed: " + httplib::to_string(res.error()), true);
  if (res->status < 200 || res->status >= 300) {
    const bool transient = res->status == 429 || res->status >= 500;
    throw Error(ErrorCode::client,
                "POST " + endpoint.base + endpoint.path + " returned HTTP " + std::to_string(res->status) + ": " +
                    res->body.substr(0, 512),
                transient);
  }
  return res->body;
}

}  // namespace flowy
