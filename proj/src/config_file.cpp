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

#include "rpabeam/config_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace rpabeam {

namespace {

std::string trim(const std::string& s)
{
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos)
        return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_value(const std::string& section, const std::string& key,
                            const std::string& value, const char* kind)
{
    throw ConfigError("config key '" + section + "." + key + "': cannot parse '" + value +
                      "' as " + kind);
}

} // namespace

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

ConfigMap ConfigMap::parse(const std::string& text)
{
    ConfigMap map;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // Strip full-line and trailing comments before any parsing.
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos)
            line.erase(hash);
        const std::string t = trim(line);
        if (t.empty())
            continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": empty section name");
            // Register the section even if it stays empty.
            map.upsert_section(section);
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        if (section.empty())
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": key outside any [section]");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        Entry& e = map.upsert(section, key);
        e.value = value;
    }
    return map;
}

ConfigMap ConfigMap::load_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

const ConfigMap::Entry* ConfigMap::find(const std::string& section, const std::string& key) const
{
    for (const auto& s : sections_)
        if (s.name == section)
            for (const auto& e : s.entries)
                if (e.key == key)
                    return &e;
    return nullptr;
}

ConfigMap::Entry& ConfigMap::upsert(const std::string& section, const std::string& key)
{
    Section& s = upsert_section(section);
    for (auto& e : s.entries)
        if (e.key == key)
            return e;
    s.entries.push_back(Entry{key, "", false});
    return s.entries.back();
}

ConfigMap::Section& ConfigMap::upsert_section(const std::string& section)
{
    for (auto& s : sections_)
        if (s.name == section)
            return s;
    sections_.push_back(Section{section, {}});
    return sections_.back();
}

bool ConfigMap::has(const std::string& section, const std::string& key) const
{
    return find(section, key) != nullptr;
}

std::string ConfigMap::get_string(const std::string& section, const std::string& key,
                                  std::optional<std::string> fallback) const
{
    const Entry* e = find(section, key);
    if (!e) {
        if (fallback)
            return *fallback;
        throw ConfigError("missing config key '" + section + "." + key + "'");
    }
    e->consumed = true;
    return e->value;
}

double ConfigMap::get_double(const std::string& section, const std::string& key,
                             std::optional<double> fallback) const
{
    const Entry* e = find(section, key);
    if (!e) {
        if (fallback)
            return *fallback;
        throw ConfigError("missing config key '" + section + "." + key + "'");
    }
    e->consumed = true;
    double out = 0.0;
    const char* first = e->value.data();
    const char* last = first + e->value.size();
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last)
        bad_value(section, key, e->value, "a number");
    return out;
}

int ConfigMap::get_int(const std::string& section, const std::string& key,
                       std::optional<int> fallback) const
{
    const Entry* e = find(section, key);
    if (!e) {
        if (fallback)
            return *fallback;
        throw ConfigError("missing config key '" + section + "." + key + "'");
    }
    e->consumed = true;
    int out = 0;
    const char* first = e->value.data();
    const char* last = first + e->value.size();
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last)
        bad_value(section, key, e->value, "an integer");
    return out;
}

std::uint64_t ConfigMap::get_u64(const std::string& section, const std::string& key,
                                 std::optional<std::uint64_t> fallback) const
{
    const Entry* e = find(section, key);
    if (!e) {
        if (fallback)
            return *fallback;
        throw ConfigError("missing config key '" + section + "." + key + "'");
    }
    e->consumed = true;
    std::uint64_t out = 0;
    const char* first = e->value.data();
    const char* last = first + e->value.size();
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last)
        bad_value(section, key, e->value, "an unsigned integer");
    return out;
}

void ConfigMap::set_string(const std::string& section, const std::string& key, std::string value)
{
    upsert(section, key).value = std::move(value);
}

void ConfigMap::set_double(const std::string& section, const std::string& key, double value)
{
    upsert(section, key).value = format_double(value);
}

void ConfigMap::set_int(const std::string& section, const std::string& key, long long value)
{
    upsert(section, key).value = std::to_string(value);
}

void ConfigMap::set_u64(const std::string& section, const std::string& key, std::uint64_t value)
{
    upsert(section, key).value = std::to_string(value);
}

void ConfigMap::reject_unconsumed() const
{
    for (const auto& s : sections_)
        for (const auto& e : s.entries)
            if (!e.consumed)
                throw ConfigError("unknown config key '" + s.name + "." + e.key + "'");
}

std::string ConfigMap::serialize() const
{
    std::string out;
    bool first = true;
    for (const auto& s : sections_) {
        if (!first)
            out += "\n";
        first = false;
        out += "[" + s.name + "]\n";
        for (const auto& e : s.entries)
            out += e.key + " = " + e.value + "\n";
    }
    return out;
}

SystemConfig system_config_from_map(const ConfigMap& map)
{
    SystemConfig d; // defaults
    SystemConfig cfg;
    cfg.num_antennas = map.get_int("system", "num_antennas", d.num_antennas);
    cfg.num_rf_chains = map.get_int("system", "num_rf_chains", d.num_rf_chains);
    cfg.num_users = map.get_int("system", "num_users", d.num_users);
    cfg.num_subcarriers = map.get_int("system", "num_subcarriers", d.num_subcarriers);
    cfg.num_patterns = map.get_int("system", "num_patterns", d.num_patterns);
    cfg.bandwidth_hz = map.get_double("system", "bandwidth_hz", d.bandwidth_hz);
    cfg.carrier_freq_hz = map.get_double("system", "carrier_freq_hz", d.carrier_freq_hz);
    cfg.noise_density_dbm_per_hz =
        map.get_double("system", "noise_density_dbm_per_hz", d.noise_density_dbm_per_hz);
    cfg.transmit_power_dbm =
        map.get_double("system", "transmit_power_dbm", d.transmit_power_dbm);
    cfg.upa_rows = map.get_int("system", "upa_rows", d.upa_rows);
    cfg.upa_cols = map.get_int("system", "upa_cols", d.upa_cols);
    cfg.element_spacing_wavelengths =
        map.get_double("system", "element_spacing_wavelengths", d.element_spacing_wavelengths);
    cfg.rician_k_db = map.get_double("system", "rician_k_db", d.rician_k_db);
    cfg.num_nlos_paths = map.get_int("system", "num_nlos_paths", d.num_nlos_paths);
    cfg.haps_altitude_m = map.get_double("system", "haps_altitude_m", d.haps_altitude_m);
    cfg.rng_seed = map.get_u64("system", "rng_seed", d.rng_seed);

    cfg.paths.max_nadir_offset_deg =
        map.get_double("paths", "max_nadir_offset_deg", d.paths.max_nadir_offset_deg);
    cfg.paths.nlos_azimuth_spread_deg =
        map.get_double("paths", "nlos_azimuth_spread_deg", d.paths.nlos_azimuth_spread_deg);
    cfg.paths.nlos_elevation_spread_deg =
        map.get_double("paths", "nlos_elevation_spread_deg", d.paths.nlos_elevation_spread_deg);
    cfg.paths.max_excess_delay_s =
        map.get_double("paths", "max_excess_delay_s", d.paths.max_excess_delay_s);

    cfg.pattern_azimuth_exponent =
        map.get_double("codebook", "azimuth_exponent", d.pattern_azimuth_exponent);
    cfg.pattern_elevation_exponent =
        map.get_double("codebook", "elevation_exponent", d.pattern_elevation_exponent);

    cfg.validate();
    return cfg;
}

void system_config_to_map(const SystemConfig& cfg, ConfigMap& map)
{
    map.set_int("system", "num_antennas", cfg.num_antennas);
    map.set_int("system", "num_rf_chains", cfg.num_rf_chains);
    map.set_int("system", "num_users", cfg.num_users);
    map.set_int("system", "num_subcarriers", cfg.num_subcarriers);
    map.set_int("system", "num_patterns", cfg.num_patterns);
    map.set_double("system", "bandwidth_hz", cfg.bandwidth_hz);
    map.set_double("system", "carrier_freq_hz", cfg.carrier_freq_hz);
    map.set_double("system", "noise_density_dbm_per_hz", cfg.noise_density_dbm_per_hz);
    map.set_double("system", "transmit_power_dbm", cfg.transmit_power_dbm);
    map.set_int("system", "upa_rows", cfg.upa_rows);
    map.set_int("system", "upa_cols", cfg.upa_cols);
    map.set_double("system", "element_spacing_wavelengths", cfg.element_spacing_wavelengths);
    map.set_double("system", "rician_k_db", cfg.rician_k_db);
    map.set_int("system", "num_nlos_paths", cfg.num_nlos_paths);
    map.set_double("system", "haps_altitude_m", cfg.haps_altitude_m);
    map.set_u64("system", "rng_seed", cfg.rng_seed);

    map.set_double("paths", "max_nadir_offset_deg", cfg.paths.max_nadir_offset_deg);
    map.set_double("paths", "nlos_azimuth_spread_deg", cfg.paths.nlos_azimuth_spread_deg);
    map.set_double("paths", "nlos_elevation_spread_deg", cfg.paths.nlos_elevation_spread_deg);
    map.set_double("paths", "max_excess_delay_s", cfg.paths.max_excess_delay_s);

    map.set_double("codebook", "azimuth_exponent", cfg.pattern_azimuth_exponent);
    map.set_double("codebook", "elevation_exponent", cfg.pattern_elevation_exponent);
}

std::string system_config_to_text(const SystemConfig& cfg)
{
    ConfigMap map;
    system_config_to_map(cfg, map);
    return map.serialize();
}

SystemConfig system_config_from_text(const std::string& text)
{
    return system_config_from_map(ConfigMap::parse(text));
}

} // namespace rpabeam
