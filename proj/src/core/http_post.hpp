// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <string>

namespace flowy {

struct HttpEndpoint {
  std::string base;  // scheme://host[:port]
  std::string path;  // starts with '/'
};

// Splits "https://api.example.com:8443/v1/chat/completions". Throws
// Error{config} on anything that is not http(s).
HttpEndpoint parse_endpoint(const std::string& url);

// POSTs a JSON body with an optional bearer token and returns the response
// body. Transport failures and 5xx/429 responses throw Error{client,
// retriable=true}; other non-2xx statuses throw Error{client}.
std::string post_json(const HttpEndpoint& endpoint, const std::string& bearer_token, const std::string& body,
                      std::chrono::seconds timeout = std::chrono::seconds(120));

}  // namespace flowy
