// Copyright 2026 ODC library developers
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

#include <string>

#include <json.hpp>

#include "odc/model.hpp"

namespace odc {

/// Model archive format: magic + version header, a JSON manifest
/// (config, hyper, dims, block directory with CRC32 checksums), then
/// raw little-endian float64 / int64 blocks.  A load/save round trip
/// reproduces predictions bit-identically.
inline constexpr std::uint32_t kModelFormatVersion = 1;

void save_model(const OdcModel& model, const std::string& path);

/// The descriptive part of the archive manifest (config, hyper, dims,
/// per-subdomain and per-machine summaries) for an in-memory model;
/// save_model extends it with the block directory.
nlohmann::json model_manifest(const OdcModel& model);

/// Loads and fully validates an archive.  Truncation or checksum
/// failures throw corrupt_model; an unknown version throws
/// version_mismatch naming both versions.
OdcModel load_model(const std::string& path);

/// Reads only the manifest (no matrix payload); returns it as a JSON
/// string for display.
std::string inspect_model(const std::string& path);

/// CRC-32 (IEEE 802.3 polynomial) used for block checksums.
std::uint32_t crc32(const void* data, std::size_t size,
                    std::uint32_t seed = 0);

}  // namespace odc
