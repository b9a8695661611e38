#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "safeml/monitor.hpp"

namespace safeml {

// JSON documents exchanged with other tools. Schemas are described in
// docs/formats.md; every document carries an integer "version".

inline constexpr int kProfileVersion = 1;
inline constexpr int kVerdictVersion = 1;

std::string profile_to_json(const TrainingProfile& profile);

/// Throws UnsupportedVersion for unknown versions and InvalidArgument for
/// structurally invalid documents.
TrainingProfile profile_from_json(std::string_view text);

void save_profile(const std::filesystem::path& path, const TrainingProfile& profile);
TrainingProfile load_profile(const std::filesystem::path& path);

/// Single-line JSON object (no trailing newline).
std::string verdict_to_json_line(const MonitorVerdict& verdict, const TrainingProfile& profile);

}  // namespace safeml
