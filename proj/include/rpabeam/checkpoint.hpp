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

#include <string>

#include "rpabeam/autodiff.hpp"

namespace rpabeam {

/// Writes every parameter to a little-endian binary file:
///   "RPAC" magic, u32 version, u64 record count, u32 metadata length and
///   bytes, then per record u32 name length, name bytes, u64 rows, u64
///   cols and rows*cols f64 values in row-major order.
/// `metadata` is free-form text the caller can use to describe the model.
void save_checkpoint(const std::string& path, const ad::ParameterStore& store,
                     const std::string& metadata = "");

/// Loads values into an already-constructed store. Every file record must
/// match a registered parameter in name and shape and cover the store
/// exactly; mismatches raise IoError. Returns the stored metadata text.
std::string load_checkpoint(const std::string& path, ad::ParameterStore& store);

/// Reads only the metadata text block of a checkpoint.
std::string read_checkpoint_metadata(const std::string& path);

} // namespace rpabeam
