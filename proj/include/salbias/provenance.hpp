// Copyright 2026 The salbias Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace salbias {

inline constexpr std::string_view kToolName = "salbias";
inline constexpr std::string_view kToolVersion = "1.0.0";

std::string sha256_hex(std::span<const unsigned char> bytes);
std::string sha256_hex(std::string_view text);
/// Throws MissingFile.
std::string sha256_file(const std::filesystem::path& path);

/// Sidecar written next to every derived artifact.
struct Provenance {
    std::string kind;
    std::string source_hash;
    std::string tool = std::string(kToolName);
    std::string tool_version = std::string(kToolVersion);

    bool operator==(const Provenance&) const = default;
};

std::filesystem::path sidecar_path(const std::filesystem::path& artifact);
void write_sidecar(const std::filesystem::path& artifact, const Provenance& prov);
Provenance read_sidecar(const std::filesystem::path& artifact);

}  // namespace salbias
