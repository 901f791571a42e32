#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "cforge/types.hpp"

namespace cforge {

/// Bundled permissive-license id set (minimal-restriction licenses).
/// Operators can replace it with a one-id-per-line file.
const std::set<std::string>& default_permissive_licenses();

std::set<std::string> load_spdx_list(const std::string& path);

/// Declared metadata wins when present; otherwise canonical-keyphrase
/// detection over the license file text; otherwise Unknown.
LicenseVerdict classify_license(const std::optional<std::string>& declared,
                                const std::optional<std::string>& license_file_text,
                                const std::set<std::string>& permissive_list);

}  // namespace cforge
