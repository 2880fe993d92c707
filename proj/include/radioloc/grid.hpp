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

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace radioloc
{

// Pixel coordinates are 1-indexed: x is the column, y the row, both in [1, N].
struct Pixel
{
    int x = 1;
    int y = 1;

    friend bool operator==(const Pixel &, const Pixel &) = default;
};

inline std::string to_string(const Pixel &p)
{
    return "(" + std::to_string(p.x) + "," + std::to_string(p.y) + ")";
}

inline double euclidean(const Pixel &a, const Pixel &b)
{
    return std::hypot(double(a.x - b.x), double(a.y - b.y));
}

// Shortest path length between two cells on an obstacle-free 8-connected grid, in cells.
inline double octile(const Pixel &a, const Pixel &b)
{
    const int dx = std::abs(a.x - b.x), dy = std::abs(a.y - b.y);
    const int diag = std::min(dx, dy), straight = std::max(dx, dy) - diag;
    return straight + diag * std::sqrt(2.0);
}

// Square N x N grid stored row-major.
template <typename T>
class Grid
{
public:
    Grid() = default;
    explicit Grid(int n, T fill = T{}) : n_(n), data_(std::size_t(n) * std::size_t(n), fill)
    {
        if (n < 0)
            throw std::invalid_argument("Grid: negative size");
    }

    int size() const { return n_; }
    std::size_t cells() const { return data_.size(); }

    bool contains(const Pixel &p) const { return p.x >= 1 && p.y >= 1 && p.x <= n_ && p.y <= n_; }
    std::size_t index(const Pixel &p) const { return std::size_t(p.y - 1) * std::size_t(n_) + std::size_t(p.x - 1); }
    Pixel pixel(std::size_t idx) const { return {int(idx % std::size_t(n_)) + 1, int(idx / std::size_t(n_)) + 1}; }

    T &operator()(const Pixel &p) { return data_[index(p)]; }
    const T &operator()(const Pixel &p) const { return data_[index(p)]; }
    T &operator[](std::size_t i) { return data_[i]; }
    const T &operator[](std::size_t i) const { return data_[i]; }

    T &at(const Pixel &p)
    {
        check(p);
        return data_[index(p)];
    }
    const T &at(const Pixel &p) const
    {
        check(p);
        return data_[index(p)];
    }

    std::vector<T> &data() { return data_; }
    const std::vector<T> &data() const { return data_; }

    friend bool operator==(const Grid &, const Grid &) = default;

private:
    void check(const Pixel &p) const
    {
        if (!contains(p))
            throw std::out_of_range("pixel " + to_string(p) + " outside " + std::to_string(n_) + "x" + std::to_string(n_) + " grid");
    }

    int n_ = 0;
    std::vector<T> data_;
};

} // namespace radioloc
