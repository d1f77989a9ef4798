// Copyright 2026 The maskloc Authors
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

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "maskloc/doa.hpp"
#include "maskloc/mask.hpp"

namespace maskloc {

/// Binary matrix dump: a 16-byte little-endian header followed by the
/// row-major float32 payload.
///
///   offset 0   char[4]  magic "MLMK"
///   offset 4   uint32   rows (L)
///   offset 8   uint32   cols (F)
///   offset 12  uint32   dtype tag, 1 = float32
inline constexpr char kMatrixMagic[4] = {'M', 'L', 'M', 'K'};
inline constexpr std::uint32_t kDtypeFloat32 = 1;

void write_matrix_dump(const std::filesystem::path& path, const Eigen::MatrixXd& values);
void write_matrix_dump(std::ostream& out, const Eigen::MatrixXd& values);
Eigen::MatrixXd read_matrix_dump(const std::filesystem::path& path);

/// CSV with header "frame,bin,value", one line per entry, row-major.
void write_mask_csv(const std::filesystem::path& path, const RatioMask& mask);

/// CSV with header "azimuth_deg,elevation_deg,power".
void write_power_map_csv(const std::filesystem::path& path, const DoaGrid& grid, const DoaResult& result);

}  // namespace maskloc
