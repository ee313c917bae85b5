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

#include "rpabeam/dataset.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "rpabeam/config_file.hpp"
#include "rpabeam/geometry.hpp"

namespace rpabeam {
namespace {

constexpr char kMagic[4] = {'R', 'P', 'A', 'H'};
constexpr std::size_t kHeaderBytes = 64;
constexpr std::uint32_t kFormatVersion = 1;

void store_u32(unsigned char* out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i)
        out[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
}

void store_u64(unsigned char* out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i)
        out[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
}

std::uint32_t load_u32(const unsigned char* in)
{
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(in[i]) << (8 * i);
    return v;
}

std::uint64_t load_u64(const unsigned char* in)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
    return v;
}

void store_real(unsigned char* out, double v, int width)
{
    if (width == 8) {
        store_u64(out, std::bit_cast<std::uint64_t>(v));
    } else {
        store_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
}

double load_real(const unsigned char* in, int width)
{
    if (width == 8)
        return std::bit_cast<double>(load_u64(in));
    return static_cast<double>(std::bit_cast<float>(load_u32(in)));
}

std::array<unsigned char, kHeaderBytes> encode_header(const DatasetHeader& h)
{
    std::array<unsigned char, kHeaderBytes> bytes{};
    std::memcpy(bytes.data(), kMagic, 4);
    store_u32(bytes.data() + 4, h.version);
    bytes[8] = h.float_width;
    bytes[9] = h.endianness;
    store_u32(bytes.data() + 10, h.num_subcarriers);
    store_u32(bytes.data() + 14, h.num_users);
    store_u32(bytes.data() + 18, h.num_antennas);
    store_u32(bytes.data() + 22, h.num_patterns);
    store_u64(bytes.data() + 26, h.sample_count);
    store_u64(bytes.data() + 34, h.seed);
    return bytes;
}

DatasetHeader decode_header(const std::array<unsigned char, kHeaderBytes>& bytes,
                            const std::string& path)
{
    if (std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw IoError("dataset '" + path + "': bad magic, not a channel dataset");
    DatasetHeader h;
    h.version = load_u32(bytes.data() + 4);
    if (h.version != kFormatVersion)
        throw IoError("dataset '" + path + "': unsupported format version " +
                      std::to_string(h.version));
    h.float_width = bytes[8];
    if (h.float_width != 4 && h.float_width != 8)
        throw IoError("dataset '" + path + "': unsupported float width " +
                      std::to_string(int(h.float_width)));
    h.endianness = bytes[9];
    if (h.endianness != 0)
        throw IoError("dataset '" + path + "': unsupported byte order flag");
    h.num_subcarriers = load_u32(bytes.data() + 10);
    h.num_users = load_u32(bytes.data() + 14);
    h.num_antennas = load_u32(bytes.data() + 18);
    h.num_patterns = load_u32(bytes.data() + 22);
    h.sample_count = load_u64(bytes.data() + 26);
    h.seed = load_u64(bytes.data() + 34);
    return h;
}

void serialize_sample(const EmCsiTensor& tensor, int width, std::vector<unsigned char>& out)
{
    const std::vector<cplx>& values = tensor.data();
    out.resize(values.size() * 2 * static_cast<std::size_t>(width));
    unsigned char* p = out.data();
    for (const cplx& v : values) {
        store_real(p, v.real(), width);
        store_real(p + width, v.imag(), width);
        p += 2 * width;
    }
}

} // namespace

std::uint64_t DatasetHeader::sample_bytes() const
{
    return 2ull * float_width * num_subcarriers * num_users * num_antennas * num_patterns;
}

void generate_dataset(const SystemConfig& cfg, std::uint64_t sample_count, std::uint64_t seed,
                      const std::string& path, const DatasetWriteOptions& options)
{
    cfg.validate();
    if (options.float_width != 4 && options.float_width != 8)
        throw ConfigError("generate_dataset: float width must be 4 or 8 bytes");
    if (options.workers < 0)
        throw ConfigError("generate_dataset: worker count must be non-negative");

    DatasetHeader header;
    header.float_width = static_cast<std::uint8_t>(options.float_width);
    header.num_subcarriers = static_cast<std::uint32_t>(cfg.num_subcarriers);
    header.num_users = static_cast<std::uint32_t>(cfg.num_users);
    header.num_antennas = static_cast<std::uint32_t>(cfg.num_antennas);
    header.num_patterns = static_cast<std::uint32_t>(cfg.num_patterns);
    header.sample_count = sample_count;
    header.seed = seed;

    const std::string config_text = system_config_to_text(cfg);
    if (config_text.size() > std::numeric_limits<std::uint32_t>::max())
        throw ConfigError("generate_dataset: config text too large for header");

    const std::uint64_t per_sample = header.sample_bytes();
    if (sample_count > 0 &&
        per_sample > (std::numeric_limits<std::uint64_t>::max() - kHeaderBytes - 4 -
                      config_text.size()) /
                         sample_count)
        throw ConfigError("generate_dataset: requested size overflows the byte counter");
    const std::uint64_t total =
        kHeaderBytes + 4 + config_text.size() + sample_count * per_sample;
    if (total > options.max_bytes)
        throw ConfigError("generate_dataset: file would be " + std::to_string(total) +
                          " bytes, above the cap of " + std::to_string(options.max_bytes));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("generate_dataset: cannot open '" + path + "' for writing");

    const auto header_bytes = encode_header(header);
    out.write(reinterpret_cast<const char*>(header_bytes.data()),
              static_cast<std::streamsize>(header_bytes.size()));
    unsigned char len_bytes[4];
    store_u32(len_bytes, static_cast<std::uint32_t>(config_text.size()));
    out.write(reinterpret_cast<const char*>(len_bytes), 4);
    out.write(config_text.data(), static_cast<std::streamsize>(config_text.size()));

    const ArrayGeometry geom = ArrayGeometry::from_config(cfg);
    const PatternCodebook book = codebook_from_config(cfg);

    unsigned hw = std::thread::hardware_concurrency();
    const int workers =
        options.workers > 0 ? options.workers : static_cast<int>(hw > 0 ? hw : 1);

    // Samples are produced block by block: each block is filled in parallel
    // into per-sample buffers, then written in index order so the bytes on
    // disk never depend on the worker count.
    const std::uint64_t block = static_cast<std::uint64_t>(workers) * 4;
    std::vector<std::vector<unsigned char>> buffers(static_cast<std::size_t>(block));
    for (std::uint64_t start = 0; start < sample_count; start += block) {
        const std::uint64_t n = std::min(block, sample_count - start);
        auto fill = [&](std::uint64_t offset) {
            for (std::uint64_t i = offset; i < n; i += static_cast<std::uint64_t>(workers)) {
                const EmCsiTensor tensor =
                    generate_sample(cfg, geom, book, derive_seed(seed, start + i));
                serialize_sample(tensor, options.float_width, buffers[i]);
            }
        };
        if (workers == 1 || n == 1) {
            fill(0);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(workers));
            for (int w = 0; w < workers; ++w)
                pool.emplace_back(fill, static_cast<std::uint64_t>(w));
            for (std::thread& t : pool)
                t.join();
        }
        for (std::uint64_t i = 0; i < n; ++i)
            out.write(reinterpret_cast<const char*>(buffers[i].data()),
                      static_cast<std::streamsize>(buffers[i].size()));
        if (!out)
            throw IoError("generate_dataset: write to '" + path + "' failed");
    }

    out.flush();
    if (!out)
        throw IoError("generate_dataset: write to '" + path + "' failed");
}

DatasetReader::DatasetReader(const std::string& path) : path_(path)
{
    file_.open(path, std::ios::binary);
    if (!file_)
        throw IoError("dataset '" + path + "': cannot open for reading");

    std::array<unsigned char, kHeaderBytes> header_bytes{};
    file_.read(reinterpret_cast<char*>(header_bytes.data()),
               static_cast<std::streamsize>(header_bytes.size()));
    if (file_.gcount() != static_cast<std::streamsize>(kHeaderBytes))
        throw IoError("dataset '" + path + "': truncated header");
    header_ = decode_header(header_bytes, path);

    unsigned char len_bytes[4];
    file_.read(reinterpret_cast<char*>(len_bytes), 4);
    if (file_.gcount() != 4)
        throw IoError("dataset '" + path + "': truncated config block");
    const std::uint32_t text_len = load_u32(len_bytes);
    std::string config_text(text_len, '\0');
    file_.read(config_text.data(), static_cast<std::streamsize>(text_len));
    if (file_.gcount() != static_cast<std::streamsize>(text_len))
        throw IoError("dataset '" + path + "': truncated config block");
    config_ = system_config_from_text(config_text);

    if (header_.num_subcarriers != static_cast<std::uint32_t>(config_.num_subcarriers) ||
        header_.num_users != static_cast<std::uint32_t>(config_.num_users) ||
        header_.num_antennas != static_cast<std::uint32_t>(config_.num_antennas) ||
        header_.num_patterns != static_cast<std::uint32_t>(config_.num_patterns))
        throw IoError("dataset '" + path + "': header dims disagree with embedded config");

    payload_offset_ = kHeaderBytes + 4 + text_len;
    file_.seekg(0, std::ios::end);
    const std::uint64_t file_size = static_cast<std::uint64_t>(file_.tellg());
    const std::uint64_t expected =
        payload_offset_ + header_.sample_count * header_.sample_bytes();
    if (file_size < expected)
        throw IoError("dataset '" + path + "': file shorter than the declared payload");
}

EmCsiTensor DatasetReader::load_sample(std::uint64_t index) const
{
    if (index >= header_.sample_count)
        throw std::out_of_range("dataset '" + path_ + "': sample " + std::to_string(index) +
                                " out of range (have " +
                                std::to_string(header_.sample_count) + ")");

    const std::uint64_t bytes = header_.sample_bytes();
    std::vector<unsigned char> raw(static_cast<std::size_t>(bytes));
    file_.clear();
    file_.seekg(static_cast<std::streamoff>(payload_offset_ + index * bytes));
    file_.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));
    if (file_.gcount() != static_cast<std::streamsize>(bytes))
        throw IoError("dataset '" + path_ + "': short read at sample " + std::to_string(index));

    EmCsiTensor tensor(static_cast<int>(header_.num_subcarriers),
                       static_cast<int>(header_.num_users),
                       static_cast<int>(header_.num_antennas),
                       static_cast<int>(header_.num_patterns));
    tensor.subcarrier_freqs =
        subcarrier_frequencies(static_cast<int>(header_.num_subcarriers), config_.bandwidth_hz);
    const int width = header_.float_width;
    const unsigned char* p = raw.data();
    for (cplx& v : tensor.data()) {
        v = cplx(load_real(p, width), load_real(p + width, width));
        p += 2 * width;
    }
    return tensor;
}

} // namespace rpabeam
