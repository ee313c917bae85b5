// SPDX-License-Identifier: Apache-2.0
//
// rpabeam - hybrid beamforming with pattern-reconfigurable antennas
// Copyright (C) 2026 the rpabeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace rpabeam {

/// Streaming 64-bit FNV-1a digest of a file's bytes. Returns the hash and,
/// when size_out is given, the byte count. Throws IoError if unreadable.
std::uint64_t fnv1a_file(const std::string& path, std::uint64_t* size_out = nullptr);

/// FNV-1a over an in-memory buffer.
std::uint64_t fnv1a_bytes(const void* data, std::size_t len);

/// Reproducibility record written next to every CLI artifact: the
/// subcommand, its effective settings, and a content hash per output file.
class RunManifest {
  public:
    explicit RunManifest(std::string command) : command_(std::move(command)) {}

    void add_field(const std::string& key, const std::string& value);
    /// Hashes the file now; call after the output is fully written.
    void add_output(const std::string& path);

    /// Plain-text layout, one `key = value` line per field, then one
    /// `output = <path> bytes=<n> fnv1a=<hex>` line per artifact.
    std::string text() const;
    void write(const std::string& path) const;

  private:
    struct Entry {
        std::string path;
        std::uint64_t bytes = 0;
        std::uint64_t hash = 0;
    };

    std::string command_;
    std::vector<std::pair<std::string, std::string>> fields_;
    std::vector<Entry> outputs_;
};

} // namespace rpabeam
