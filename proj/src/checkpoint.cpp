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

#include "rpabeam/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

#include "rpabeam/common.hpp"

namespace rpabeam {
namespace {

constexpr char kMagic[4] = {'R', 'P', 'A', 'C'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v)
{
    unsigned char b[4];
    for (int i = 0; i < 4; ++i)
        b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
    out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ofstream& out, std::uint64_t v)
{
    unsigned char b[8];
    for (int i = 0; i < 8; ++i)
        b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
    out.write(reinterpret_cast<const char*>(b), 8);
}

void write_f64(std::ofstream& out, double v) { write_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t read_u32(std::ifstream& in, const std::string& path)
{
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (in.gcount() != 4)
        throw IoError("checkpoint '" + path + "': truncated file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t read_u64(std::ifstream& in, const std::string& path)
{
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (in.gcount() != 8)
        throw IoError("checkpoint '" + path + "': truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double read_f64(std::ifstream& in, const std::string& path)
{
    return std::bit_cast<double>(read_u64(in, path));
}

std::string read_block(std::ifstream& in, std::size_t len, const std::string& path)
{
    std::string s(len, '\0');
    in.read(s.data(), static_cast<std::streamsize>(len));
    if (in.gcount() != static_cast<std::streamsize>(len))
        throw IoError("checkpoint '" + path + "': truncated file");
    return s;
}

/// Validates magic and version, returns {record count, metadata}.
std::pair<std::uint64_t, std::string> read_preamble(std::ifstream& in, const std::string& path)
{
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("checkpoint '" + path + "': bad magic, not a parameter file");
    const std::uint32_t version = read_u32(in, path);
    if (version != kVersion)
        throw IoError("checkpoint '" + path + "': unsupported version " +
                      std::to_string(version));
    const std::uint64_t count = read_u64(in, path);
    const std::uint32_t meta_len = read_u32(in, path);
    std::string metadata = read_block(in, meta_len, path);
    return {count, std::move(metadata)};
}

} // namespace

void save_checkpoint(const std::string& path, const ad::ParameterStore& store,
                     const std::string& metadata)
{
    if (metadata.size() > std::numeric_limits<std::uint32_t>::max())
        throw IoError("checkpoint '" + path + "': metadata too large");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("checkpoint '" + path + "': cannot open for writing");

    out.write(kMagic, 4);
    write_u32(out, kVersion);
    write_u64(out, store.size());
    write_u32(out, static_cast<std::uint32_t>(metadata.size()));
    out.write(metadata.data(), static_cast<std::streamsize>(metadata.size()));

    for (const auto& [name, tensor] : store.items()) {
        write_u32(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_u64(out, static_cast<std::uint64_t>(tensor->rows()));
        write_u64(out, static_cast<std::uint64_t>(tensor->cols()));
        for (Eigen::Index i = 0; i < tensor->rows(); ++i)
            for (Eigen::Index j = 0; j < tensor->cols(); ++j)
                write_f64(out, tensor->value(i, j));
    }
    out.flush();
    if (!out)
        throw IoError("checkpoint '" + path + "': write failed");
}

std::string load_checkpoint(const std::string& path, ad::ParameterStore& store)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("checkpoint '" + path + "': cannot open for reading");
    auto [count, metadata] = read_preamble(in, path);
    if (count != store.size())
        throw IoError("checkpoint '" + path + "': holds " + std::to_string(count) +
                      " parameters, model has " + std::to_string(store.size()));

    for (std::uint64_t r = 0; r < count; ++r) {
        const std::uint32_t name_len = read_u32(in, path);
        const std::string name = read_block(in, name_len, path);
        const std::uint64_t rows = read_u64(in, path);
        const std::uint64_t cols = read_u64(in, path);
        ad::Tensor tensor = store.find(name);
        if (!tensor)
            throw IoError("checkpoint '" + path + "': parameter '" + name +
                          "' not present in the model");
        if (static_cast<std::uint64_t>(tensor->rows()) != rows ||
            static_cast<std::uint64_t>(tensor->cols()) != cols)
            throw IoError("checkpoint '" + path + "': parameter '" + name + "' has shape " +
                          std::to_string(rows) + "x" + std::to_string(cols) +
                          ", model expects " + std::to_string(tensor->rows()) + "x" +
                          std::to_string(tensor->cols()));
        for (std::uint64_t i = 0; i < rows; ++i)
            for (std::uint64_t j = 0; j < cols; ++j)
                tensor->value(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    read_f64(in, path);
    }
    return metadata;
}

std::string read_checkpoint_metadata(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("checkpoint '" + path + "': cannot open for reading");
    return read_preamble(in, path).second;
}

} // namespace rpabeam
