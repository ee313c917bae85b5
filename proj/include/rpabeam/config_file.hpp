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
#include <optional>
#include <string>
#include <vector>

#include "rpabeam/system_config.hpp"

namespace rpabeam {

/// Flat "key = value" configuration text with [section] headers, '#'
/// comments and deterministic serialization order. Reads mark keys as
/// consumed so callers can reject unknown keys with a precise message.
class ConfigMap {
  public:
    static ConfigMap parse(const std::string& text);
    static ConfigMap load_file(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key,
                           std::optional<std::string> fallback = std::nullopt) const;
    double get_double(const std::string& section, const std::string& key,
                      std::optional<double> fallback = std::nullopt) const;
    int get_int(const std::string& section, const std::string& key,
                std::optional<int> fallback = std::nullopt) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::optional<std::uint64_t> fallback = std::nullopt) const;

    void set_string(const std::string& section, const std::string& key, std::string value);
    void set_double(const std::string& section, const std::string& key, double value);
    void set_int(const std::string& section, const std::string& key, long long value);
    void set_u64(const std::string& section, const std::string& key, std::uint64_t value);

    /// Throws ConfigError naming the first key that was never read.
    void reject_unconsumed() const;

    std::string serialize() const;

  private:
    struct Entry {
        std::string key;
        std::string value;
        mutable bool consumed = false;
    };
    struct Section {
        std::string name;
        std::vector<Entry> entries;
    };

    const Entry* find(const std::string& section, const std::string& key) const;
    Entry& upsert(const std::string& section, const std::string& key);
    Section& upsert_section(const std::string& section);

    std::vector<Section> sections_;
};

/// Locale-independent shortest round-trip formatting.
std::string format_double(double v);

/// SystemConfig <-> config text. Parsing consumes the [system], [paths] and
/// [codebook] sections; every key is optional and falls back to the
/// defaults of SystemConfig.
SystemConfig system_config_from_map(const ConfigMap& map);
void system_config_to_map(const SystemConfig& cfg, ConfigMap& map);
std::string system_config_to_text(const SystemConfig& cfg);
SystemConfig system_config_from_text(const std::string& text);

} // namespace rpabeam
