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
#include <fstream>
#include <string>

#include "rpabeam/channel.hpp"
#include "rpabeam/system_config.hpp"

namespace rpabeam {

/// Fixed 64-byte little-endian file header. Byte layout:
///   offset  0  "RPAH" magic
///   offset  4  format version (u32)
///   offset  8  bytes per real scalar, 4 or 8 (u8)
///   offset  9  endianness flag, 0 = little (u8)
///   offset 10  subcarriers Nc (u32)
///   offset 14  users K (u32)
///   offset 18  antennas Nt (u32)
///   offset 22  radiation modes M (u32)
///   offset 26  sample count (u64)
///   offset 34  master seed (u64)
///   offset 42  reserved, zero-filled to byte 63
/// The header is followed by a u32 byte length and that many bytes of
/// config text, then the sample payload: for each sample, real/imag pairs
/// in row-major (subcarrier, user, antenna, mode) order.
struct DatasetHeader {
    std::uint32_t version = 1;
    std::uint8_t float_width = 8;
    std::uint8_t endianness = 0;
    std::uint32_t num_subcarriers = 0;
    std::uint32_t num_users = 0;
    std::uint32_t num_antennas = 0;
    std::uint32_t num_patterns = 0;
    std::uint64_t sample_count = 0;
    std::uint64_t seed = 0;

    /// Payload bytes occupied by one sample at this float width.
    std::uint64_t sample_bytes() const;
};

struct DatasetWriteOptions {
    int float_width = 8; ///< bytes per real scalar; 8 keeps round trips bit-exact
    int workers = 0;     ///< generation threads; 0 picks the hardware count
    std::uint64_t max_bytes = std::uint64_t{8} << 30; ///< refuse files larger than this
};

/// Draws `sample_count` channel realizations with per-sample seeds
/// derive_seed(seed, index) and writes them to `path`. Output bytes are
/// identical for any worker count. Throws ConfigError if the file would
/// exceed options.max_bytes and IoError on write failure.
void generate_dataset(const SystemConfig& cfg, std::uint64_t sample_count, std::uint64_t seed,
                      const std::string& path, const DatasetWriteOptions& options = {});

/// Random-access reader over a generated file. Header and config are parsed
/// eagerly; samples are read on demand. Not safe for concurrent use from
/// multiple threads (clone one reader per thread instead).
class DatasetReader {
  public:
    explicit DatasetReader(const std::string& path);

    const DatasetHeader& header() const { return header_; }
    const SystemConfig& config() const { return config_; }
    std::uint64_t size() const { return header_.sample_count; }

    /// Reads one sample back as a channel tensor; subcarrier frequencies
    /// are rebuilt from the stored config. Throws std::out_of_range for a
    /// bad index and IoError on a short or failed read.
    EmCsiTensor load_sample(std::uint64_t index) const;

  private:
    std::string path_;
    DatasetHeader header_;
    SystemConfig config_;
    std::uint64_t payload_offset_ = 0;
    mutable std::ifstream file_;
};

} // namespace rpabeam
