// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace flowy {

enum class ErrorCode {
  invalid_argument,
  io,
  parse,
  validation,
  not_found,
  config,
  client,
  internal,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the core. The C API maps `code()` onto status
// values; `retriable()` marks transient client/transport failures.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, bool retriable = false)
      : std::runtime_error(message), code_(code), retriable_(retriable) {}

  ErrorCode code() const noexcept { return code_; }
  bool retriable() const noexcept { return retriable_; }

 private:
  ErrorCode code_;
  bool retriable_;
};

}  // namespace flowy
