// Copyright 2026 The netslice Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "netslice/scenario.hpp"

namespace netslice {

/// Parses and validates a scenario document. Errors name the offending key.
Scenario parse_scenario(std::string_view text);

/// Reads `path` and parses it.
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical document; parse_scenario(emit_scenario(s)) == s.
std::string emit_scenario(const Scenario& scenario);

}  // namespace netslice
