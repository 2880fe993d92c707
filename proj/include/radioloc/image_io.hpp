// SPDX-License-Identifier: Apache-2.0
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

#include "radioloc/grid.hpp"

#include <array>
#include <cstdint>
#include <filesystem>

namespace radioloc::io
{

// 8-bit grayscale PNG, one byte per pixel, row y=1 first.
void write_png(const std::filesystem::path &path, const Grid<std::uint8_t> &img);
Grid<std::uint8_t> read_png(const std::filesystem::path &path);

// Binary grid: 16-byte header (4-byte magic, uint32 N, float64 cell_m) then N*N float32,
// row-major, little-endian.
inline constexpr std::array<char, 4> kToaMagic{'R', 'T', 'O', 'A'};
inline constexpr std::array<char, 4> kPathlossMagic{'R', 'P', 'L', 'D'};

struct FloatGrid
{
    Grid<double> values;
    double cell_m = 1.0;
};

void write_float_grid(const std::filesystem::path &path, const std::array<char, 4> &magic, const Grid<double> &grid, double cell_m);
FloatGrid read_float_grid(const std::filesystem::path &path, const std::array<char, 4> &magic);

Grid<std::uint8_t> to_binary_image(const Grid<std::uint8_t> &mask);
Grid<std::uint8_t> from_binary_image(const Grid<std::uint8_t> &img);
Grid<std::uint8_t> to_gray_image(const Grid<double> &gray);

} // namespace radioloc::io
