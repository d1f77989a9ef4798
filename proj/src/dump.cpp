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

#include "maskloc/dump.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "maskloc/wav.hpp"

namespace maskloc {

namespace {

void put32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                         static_cast<char>(v >> 24)};
  out.write(bytes, 4);
}

std::uint32_t get32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void write_matrix_dump(std::ostream& out, const Eigen::MatrixXd& values) {
  out.write(kMatrixMagic, 4);
  put32(out, static_cast<std::uint32_t>(values.rows()));
  put32(out, static_cast<std::uint32_t>(values.cols()));
  put32(out, kDtypeFloat32);
  for (Index r = 0; r < values.rows(); ++r)
    for (Index c = 0; c < values.cols(); ++c) put32(out, std::bit_cast<std::uint32_t>(static_cast<float>(values(r, c))));
}

void write_matrix_dump(const std::filesystem::path& path, const Eigen::MatrixXd& values) {
  auto out = open_out(path, std::ios::binary);
  write_matrix_dump(out, values);
}

Eigen::MatrixXd read_matrix_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open matrix dump '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMatrixMagic, 4) != 0)
    throw DataError("'" + path.string() + "' is not a matrix dump");
  const std::uint32_t rows = get32(bytes.data() + 4);
  const std::uint32_t cols = get32(bytes.data() + 8);
  if (get32(bytes.data() + 12) != kDtypeFloat32) throw DataError("unsupported matrix dump dtype");
  if (bytes.size() != 16 + 4ULL * rows * cols) throw DataError("matrix dump payload size does not match its header");
  Eigen::MatrixXd m(rows, cols);
  const unsigned char* p = bytes.data() + 16;
  for (std::uint32_t r = 0; r < rows; ++r)
    for (std::uint32_t c = 0; c < cols; ++c, p += 4) m(r, c) = std::bit_cast<float>(get32(p));
  return m;
}

void write_mask_csv(const std::filesystem::path& path, const RatioMask& mask) {
  auto out = open_out(path);
  out << "frame,bin,value\n";
  out.precision(9);
  for (Index l = 0; l < mask.frames(); ++l)
    for (Index f = 0; f < mask.freqs(); ++f) out << l << ',' << f << ',' << mask.values(l, f) << '\n';
}

void write_power_map_csv(const std::filesystem::path& path, const DoaGrid& grid, const DoaResult& result) {
  if (result.power_map.size() != grid.size()) throw ShapeMismatchError("power map does not match the grid");
  auto out = open_out(path);
  out << "azimuth_deg,elevation_deg,power\n";
  out.precision(12);
  for (Index g = 0; g < grid.size(); ++g)
    out << grid.azimuth_deg[g] << ',' << grid.elevation_deg[g] << ',' << result.power_map[g] << '\n';
}

}  // namespace maskloc
