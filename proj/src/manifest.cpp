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

#include "rpabeam/manifest.hpp"

#include <fstream>
#include <sstream>

#include "rpabeam/common.hpp"

namespace rpabeam {
namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::string hex64(std::uint64_t v)
{
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xfu];
        v >>= 4;
    }
    return s;
}

} // namespace

std::uint64_t fnv1a_bytes(const void* data, std::size_t len)
{
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = kFnvOffset;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
    return h;
}

std::uint64_t fnv1a_file(const std::string& path, std::uint64_t* size_out)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("manifest: cannot read '" + path + "'");
    std::uint64_t h = kFnvOffset;
    std::uint64_t total = 0;
    char buf[65536];
    while (in) {
        in.read(buf, sizeof(buf));
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= kFnvPrime;
        }
        total += static_cast<std::uint64_t>(got);
    }
    if (size_out)
        *size_out = total;
    return h;
}

void RunManifest::add_field(const std::string& key, const std::string& value)
{
    fields_.emplace_back(key, value);
}

void RunManifest::add_output(const std::string& path)
{
    Entry e;
    e.path = path;
    e.hash = fnv1a_file(path, &e.bytes);
    outputs_.push_back(std::move(e));
}

std::string RunManifest::text() const
{
    std::ostringstream out;
    out << "# rpabeam run manifest v1\n";
    out << "command = " << command_ << "\n";
    for (const auto& [key, value] : fields_)
        out << key << " = " << value << "\n";
    for (const Entry& e : outputs_)
        out << "output = " << e.path << " bytes=" << e.bytes << " fnv1a=" << hex64(e.hash)
            << "\n";
    return out.str();
}

void RunManifest::write(const std::string& path) const
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("manifest: cannot open '" + path + "' for writing");
    out << text();
    out.flush();
    if (!out)
        throw IoError("manifest: write to '" + path + "' failed");
}

} // namespace rpabeam
