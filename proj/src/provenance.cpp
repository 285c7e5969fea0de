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

#include "salbias/provenance.hpp"

#include <array>
#include <fstream>
#include <iterator>

#include <openssl/evp.h>

#include <fmt/format.h>
#include <json.hpp>

#include "salbias/error.hpp"

namespace salbias {

std::string sha256_hex(std::span<const unsigned char> bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
    return out;
}

std::string sha256_hex(std::string_view text) {
    return sha256_hex(std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return sha256_hex(bytes);
}

std::filesystem::path sidecar_path(const std::filesystem::path& artifact) {
    auto p = artifact;
    p += ".prov.json";
    return p;
}

void write_sidecar(const std::filesystem::path& artifact, const Provenance& prov) {
    const nlohmann::ordered_json j = {{"kind", prov.kind},
                                      {"source_hash", prov.source_hash},
                                      {"tool", prov.tool},
                                      {"tool_version", prov.tool_version}};
    const auto path = sidecar_path(artifact);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::UnwritablePath, "cannot write " + path.string());
    out << j.dump(2) << '\n';
}

Provenance read_sidecar(const std::filesystem::path& artifact) {
    const auto path = sidecar_path(artifact);
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingFile, "no provenance sidecar " + path.string());
    try {
        const auto j = nlohmann::json::parse(in);
        return Provenance{j.at("kind").get<std::string>(), j.at("source_hash").get<std::string>(),
                          j.at("tool").get<std::string>(), j.at("tool_version").get<std::string>()};
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

}  // namespace salbias
