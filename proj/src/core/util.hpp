// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

namespace flowy {

std::string read_file(const std::filesystem::path& path);

enum class WriteStatus { written, unchanged };

// Writes through a sibling temp file and rename(2), so readers see either the
// old content or the new content. Identical content is not rewritten.
WriteStatus write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

namespace testing {
// When set to N >= 0, the next atomic write fails after N bytes of the temp
// file have been written. Reset to -1 after it fires.
void inject_write_fault_after(long long bytes);
}  // namespace testing

std::string sha256_hex(std::string_view bytes);

std::string base64_encode(std::string_view bytes);

// "\r\n" and lone "\r" become "\n".
std::string normalize_newlines(std::string_view text);

std::string trim(std::string_view text);

// Text up to and including the first '.', '!' or '?' that is followed by
// whitespace or end of text; the whole trimmed text when there is none.
std::string first_sentence(std::string_view text);

// Ids end up in file names and URLs: [A-Za-z0-9._-]+, not starting with '.'.
bool is_valid_id(std::string_view id);

// Moves `pos` back to the start of the UTF-8 code point containing it.
std::size_t utf8_floor(std::string_view text, std::size_t pos);

}  // namespace flowy
