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

#include "radioloc/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <vector>

static_assert(std::endian::native == std::endian::little, "binary grid format assumes a little-endian host");

namespace radioloc::io
{

namespace
{

struct FileCloser
{
    void operator()(std::FILE *f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path &path, const char *mode)
{
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f)
        throw std::runtime_error("cannot open " + path.string());
    return f;
}

} // namespace

void write_png(const std::filesystem::path &path, const Grid<std::uint8_t> &img)
{
    auto f = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info)
    {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("libpng: cannot allocate write structs");
    }
    if (setjmp(png_jmpbuf(png)))
    {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("libpng: error writing " + path.string());
    }
    const auto n = png_uint_32(img.size());
    png_init_io(png, f.get());
    png_set_IHDR(png, info, n, n, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (png_uint_32 y = 0; y < n; ++y)
        png_write_row(png, const_cast<png_bytep>(img.data().data() + std::size_t(y) * n));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Grid<std::uint8_t> read_png(const std::filesystem::path &path)
{
    auto f = open_file(path, "rb");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info)
    {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("libpng: cannot allocate read structs");
    }
    if (setjmp(png_jmpbuf(png)))
    {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("libpng: error reading " + path.string());
    }
    png_init_io(png, f.get());
    png_read_info(png, info);
    const auto w = png_get_image_width(png, info), h = png_get_image_height(png, info);
    if (png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY || png_get_bit_depth(png, info) != 8 || w != h)
    {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error(path.string() + ": expected square 8-bit grayscale PNG");
    }
    Grid<std::uint8_t> img(int(w), 0);
    for (png_uint_32 y = 0; y < h; ++y)
        png_read_row(png, img.data().data() + std::size_t(y) * w, nullptr);
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void write_float_grid(const std::filesystem::path &path, const std::array<char, 4> &magic, const Grid<double> &grid, double cell_m)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string());
    const std::uint32_t n = std::uint32_t(grid.size());
    out.write(magic.data(), 4);
    out.write(reinterpret_cast<const char *>(&n), sizeof n);
    out.write(reinterpret_cast<const char *>(&cell_m), sizeof cell_m);
    std::vector<float> buf(grid.data().begin(), grid.data().end());
    out.write(reinterpret_cast<const char *>(buf.data()), std::streamsize(buf.size() * sizeof(float)));
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

FloatGrid read_float_grid(const std::filesystem::path &path, const std::array<char, 4> &magic)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::array<char, 4> m{};
    std::uint32_t n = 0;
    FloatGrid out;
    in.read(m.data(), 4);
    in.read(reinterpret_cast<char *>(&n), sizeof n);
    in.read(reinterpret_cast<char *>(&out.cell_m), sizeof out.cell_m);
    if (!in || m != magic)
        throw std::runtime_error(path.string() + ": bad grid header");
    std::vector<float> buf(std::size_t(n) * n);
    in.read(reinterpret_cast<char *>(buf.data()), std::streamsize(buf.size() * sizeof(float)));
    if (!in)
        throw std::runtime_error(path.string() + ": truncated grid");
    out.values = Grid<double>(int(n), 0.0);
    std::copy(buf.begin(), buf.end(), out.values.data().begin());
    return out;
}

Grid<std::uint8_t> to_binary_image(const Grid<std::uint8_t> &mask)
{
    Grid<std::uint8_t> img(mask.size(), 0);
    for (std::size_t i = 0; i < mask.cells(); ++i)
        img[i] = mask[i] ? 255 : 0;
    return img;
}

Grid<std::uint8_t> from_binary_image(const Grid<std::uint8_t> &img)
{
    Grid<std::uint8_t> mask(img.size(), 0);
    for (std::size_t i = 0; i < img.cells(); ++i)
        mask[i] = img[i] >= 128 ? 1 : 0;
    return mask;
}

Grid<std::uint8_t> to_gray_image(const Grid<double> &gray)
{
    Grid<std::uint8_t> img(gray.size(), 0);
    for (std::size_t i = 0; i < gray.cells(); ++i)
        img[i] = std::uint8_t(std::lround(std::clamp(gray[i], 0.0, 1.0) * 255.0));
    return img;
}

} // namespace radioloc::io
