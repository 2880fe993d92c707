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

// Reference implementations used only by the tests. Deliberately naive.

#include "radioloc/dpm_sim.hpp"
#include "radioloc/fingerprint.hpp"
#include "radioloc/heatloc.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace oracle
{

using radioloc::CityMap;
using radioloc::Pixel;

// O(V^2) textbook Dijkstra on the 8-connected grid. Entering a blocked cell costs its
// wall penalty on top of the step length.
inline std::vector<double> grid_cost(const CityMap &map, const Pixel &src, const radioloc::SimParams &p)
{
    const int n = map.size_px;
    const std::size_t v = std::size_t(n) * std::size_t(n);
    const double wall = p.meters_per_db * p.wall_db_per_cell;
    std::vector<double> dist(v, std::numeric_limits<double>::infinity());
    std::vector<bool> done(v, false);
    dist[map.buildings.index(src)] = 0.0;
    for (std::size_t it = 0; it < v; ++it)
    {
        std::size_t u = v;
        for (std::size_t i = 0; i < v; ++i)
            if (!done[i] && (u == v || dist[i] < dist[u]))
                u = i;
        if (u == v || std::isinf(dist[u]))
            break;
        done[u] = true;
        const Pixel a = map.buildings.pixel(u);
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx)
            {
                const Pixel b{a.x + dx, a.y + dy};
                if ((dx == 0 && dy == 0) || !map.buildings.contains(b))
                    continue;
                const double step = map.cell_m * ((dx != 0 && dy != 0) ? std::sqrt(2.0) : 1.0);
                const double w = dist[u] + step + (map.is_blocked(b) ? wall : 0.0);
                const auto bi = map.buildings.index(b);
                if (w < dist[bi])
                    dist[bi] = w;
            }
    }
    return dist;
}

// Sorts every reference by distance with an explicit (distance, index) comparison.
inline radioloc::LocationEstimate brute_knn(const radioloc::FingerprintDB &db, const Eigen::VectorXd &q, int k)
{
    std::vector<std::pair<double, std::size_t>> d;
    for (std::size_t m = 0; m < db.size(); ++m)
    {
        double s = 0.0;
        for (int j = 0; j < db.bs_count(); ++j)
        {
            const double r = db.vectors(Eigen::Index(m), j) - q[j];
            s += r * r;
        }
        d.push_back({std::sqrt(s), m});
    }
    std::sort(d.begin(), d.end());
    radioloc::LocationEstimate e{0, 0, k};
    for (int i = 0; i < k; ++i)
    {
        e.x += db.locations[d[std::size_t(i)].second].x;
        e.y += db.locations[d[std::size_t(i)].second].y;
    }
    e.x /= k;
    e.y /= k;
    return e;
}

// Center of mass by direct double loop over (x, y).
inline std::pair<double, double> com(const std::vector<double> &h, int n)
{
    double s = 0, sx = 0, sy = 0;
    for (int y = 1; y <= n; ++y)
        for (int x = 1; x <= n; ++x)
        {
            const double v = h[std::size_t((y - 1) * n + (x - 1))];
            s += v;
            sx += x * v;
            sy += y * v;
        }
    return {sx / s, sy / s};
}

// Minimizer of sum_j (|x - a_j|^2 - d_j^2)^2 by dense grid scan plus Newton polishing.
inline Eigen::Vector2d squared_range_ls(const std::vector<Eigen::Vector2d> &a, const std::vector<double> &d, double lo, double hi)
{
    auto f = [&](const Eigen::Vector2d &x) {
        double s = 0;
        for (std::size_t j = 0; j < a.size(); ++j)
        {
            const double r = (x - a[j]).squaredNorm() - d[j] * d[j];
            s += r * r;
        }
        return s;
    };
    Eigen::Vector2d best(lo, lo);
    const int steps = 400;
    for (int i = 0; i <= steps; ++i)
        for (int k = 0; k <= steps; ++k)
        {
            const Eigen::Vector2d x(lo + (hi - lo) * i / steps, lo + (hi - lo) * k / steps);
            if (f(x) < f(best))
                best = x;
        }
    for (int it = 0; it < 50; ++it)
    {
        Eigen::Vector2d g = Eigen::Vector2d::Zero();
        Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
        for (std::size_t j = 0; j < a.size(); ++j)
        {
            const Eigen::Vector2d u = best - a[j];
            const double r = u.squaredNorm() - d[j] * d[j];
            g += 4 * r * u;
            h += 8 * u * u.transpose() + 4 * r * Eigen::Matrix2d::Identity();
        }
        best -= h.ldlt().solve(g);
    }
    return best;
}

} // namespace oracle
