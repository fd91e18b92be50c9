// Copyright 2026 The Flowy Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "core/model.hpp"

namespace flowy {

inline constexpr const char* kDatasetManifest = "manifest.json";
inline constexpr const char* kDatasetFormat = "flowy-dataset/1";

struct Dataset {
  std::filesystem::path root;
  std::vector<FlowExample> flows;
  std::vector<Screen> screens;
  std::map<std::string, std::vector<SegmentMask>> masks;   // keyed by screen id
  std::map<std::string, std::vector<TextRegion>> texts;    // keyed by screen id

  const FlowExample* find_flow(const std::string& id) const;
  const Screen* find_screen(const std::string& id) const;
  // Screens of `flow` in its screen_ids order; unresolved ids are skipped.
  std::vector<const Screen*> screens_of(const FlowExample& flow) const;
  const std::vector<SegmentMask>& masks_of(const std::string& screen_id) const;
  const std::vector<TextRegion>& texts_of(const std::string& screen_id) const;
};

struct LoadedDataset {
  Dataset dataset;
  std::vector<Violation> violations;  // unreadable/unparseable inputs
};

// Throws Error{io} only when `root` is not a directory; everything else that
// goes wrong is reported as a violation.
LoadedDataset load_dataset(const std::filesystem::path& root);

// Checks every type invariant and cross-reference, including that each
// screenshot exists and has the declared pixel size.
std::vector<Violation> check_dataset(const Dataset& dataset);

// load_dataset + check_dataset. Empty iff the dataset is valid.
std::vector<Violation> validate_dataset(const std::filesystem::path& root);

}  // namespace flowy
