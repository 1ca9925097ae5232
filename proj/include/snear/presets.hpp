// Copyright 2026 The snear Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SNEAR_PRESETS_HPP
#define SNEAR_PRESETS_HPP

#include <string>
#include <vector>

#include "snear/config.hpp"

namespace snear {

struct PresetInfo {
  std::string name;
  std::string description;
};

std::vector<PresetInfo> preset_list();
/// Throws ErrorCode::config for an unknown name.
KeyValues preset(const std::string& name);

}  // namespace snear

#endif  // SNEAR_PRESETS_HPP
