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

#include "radioloc/dpm_sim.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <stdexcept>

namespace radioloc
{

namespace
{

const double kSqrt2 = std::sqrt(2.0);

struct StepCounts
{
    int straight = 0;
    int diagonal = 0;
    int walls = 0;
};

double geometric_m(const StepCounts &c, double cell_m) { return cell_m * (c.straight + c.diagonal * kSqrt2); }

double path_cost(const StepCounts &c, double cell_m, double wall_penalty_m)
{
    return geometric_m(c, cell_m) + wall_penalty_m * c.walls;
}

double turn_angle(const Pixel &from, const Pixel &via, const Pixel &to)
{
    const double ux = via.x - from.x, uy = via.y - from.y;
    const double vx = to.x - via.x, vy = to.y - via.y;
    return std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
}

void check_source(const CityMap &map, const Pixel &tx)
{
    if (!map.buildings.contains(tx))
        throw std::invalid_argument("dominant_path: tx " + to_string(tx) + " outside the grid");
    if (map.is_blocked(tx))
        throw std::invalid_argument("dominant_path: tx " + to_string(tx) + " is not an exterior cell");
}

} // namespace

void SimParams::validate() const
{
    if (!(pl_min_db < pl_max_db))
        throw std::invalid_argument("SimParams: pl_min_db must be below pl_max_db");
    if (l0_db < 0 || wall_db_per_cell < 0 || corner_db_per_rad < 0 || meters_per_db < 0)
        throw std::invalid_argument("SimParams: losses and exchange rate must be non-negative");
    if (!(path_exponent > 0))
        throw std::invalid_argument("SimParams: path_exponent must be positive");
}

int segment_blocked_cells(const CityMap &map, const Pixel &a, const Pixel &b)
{
    const int dx = std::abs(b.x - a.x), dy = std::abs(b.y - a.y);
    const int sx = b.x > a.x ? 1 : -1, sy = b.y > a.y ? 1 : -1;
    int count = 0;
    auto visit = [&](const Pixel &p) {
        if (map.buildings.contains(p) && map.is_blocked(p))
            ++count;
    };

    // Grid walk; boundary crossings compared exactly via (2k+1)*|d| products.
    Pixel cur = a;
    int kx = 0, ky = 0;
    while (cur.x != b.x || cur.y != b.y)
    {
        const long long tx = dx == 0 ? -1 : (2LL * kx + 1) * dy;
        const long long ty = dy == 0 ? -1 : (2LL * ky + 1) * dx;
        if (dy == 0 || (dx != 0 && tx < ty))
        {
            cur.x += sx;
            ++kx;
        }
        else if (dx == 0 || ty < tx)
        {
            cur.y += sy;
            ++ky;
        }
        else
        {
            visit({cur.x + sx, cur.y});
            visit({cur.x, cur.y + sy});
            cur.x += sx;
            cur.y += sy;
            ++kx;
            ++ky;
        }
        visit(cur);
    }
    return count;
}

PathField dominant_path(const CityMap &map, const Pixel &tx, const SimParams &params)
{
    params.validate();
    check_source(map, tx);

    const int n = map.size_px;
    const double cell = map.cell_m;
    const double wall_penalty_m = params.meters_per_db * params.wall_db_per_cell;
    const std::size_t cells = map.buildings.cells();
    constexpr double inf = std::numeric_limits<double>::infinity();

    std::vector<StepCounts> counts(cells);
    std::vector<double> best(cells, inf);
    std::vector<std::size_t> pred(cells, cells);
    std::vector<std::uint8_t> done(cells, 0);
    std::vector<std::size_t> order;
    order.reserve(cells);

    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    const auto src = map.buildings.index(tx);
    best[src] = 0.0;
    open.push({0.0, src});

    while (!open.empty())
    {
        const auto [c, u] = open.top();
        open.pop();
        if (done[u])
            continue;
        done[u] = 1;
        order.push_back(u);
        const Pixel p = map.buildings.pixel(u);
        for (int oy = -1; oy <= 1; ++oy)
            for (int ox = -1; ox <= 1; ++ox)
            {
                if (ox == 0 && oy == 0)
                    continue;
                const Pixel q{p.x + ox, p.y + oy};
                if (q.x < 1 || q.y < 1 || q.x > n || q.y > n)
                    continue;
                const auto v = map.buildings.index(q);
                if (done[v])
                    continue;
                StepCounts next = counts[u];
                (ox != 0 && oy != 0 ? next.diagonal : next.straight) += 1;
                next.walls += map.is_blocked(q) ? 1 : 0;
                const double nc = path_cost(next, cell, wall_penalty_m);
                if (nc < best[v])
                {
                    best[v] = nc;
                    counts[v] = next;
                    pred[v] = u;
                    open.push({nc, v});
                }
            }
    }

    PathField field{tx, Grid<double>(n, 0.0), Grid<double>(n, 0.0), Grid<int>(n, 0), Grid<double>(n, 0.0)};
    for (std::size_t i = 0; i < cells; ++i)
    {
        field.wall_cells[i] = counts[i].walls;
        field.cost[i] = best[i];
    }

    // Path length is measured along the pulled polyline.
    // String pulling in settle order: a cell keeps its predecessor's corner when the straight
    // segment from that corner penetrates no more blocked cells than the grid path does.
    std::vector<std::size_t> corner(cells, src);
    for (std::size_t k = 1; k < order.size(); ++k)
    {
        const auto v = order[k];
        const auto u = pred[v];
        const Pixel pv = map.buildings.pixel(v);
        std::size_t a = corner[u];
        const int allowed = counts[v].walls - counts[a].walls;
        if (a != u && segment_blocked_cells(map, map.buildings.pixel(a), pv) > allowed)
            a = u;
        corner[v] = a;
        field.dist_m[v] = field.dist_m[a] + cell * euclidean(map.buildings.pixel(a), pv);
        double turn = field.turn_rad[a];
        if (a != src)
            turn += turn_angle(map.buildings.pixel(corner[a]), map.buildings.pixel(a), pv);
        field.turn_rad[v] = turn;
    }
    return field;
}

double pathloss_db(const SimParams &params, double dist_m, double cell_m, int wall_cells, double turn_rad)
{
    const double rel = std::max(dist_m, cell_m) / cell_m;
    return -(params.l0_db + 10.0 * params.path_exponent * std::log10(rel) + params.wall_db_per_cell * wall_cells +
             params.corner_db_per_rad * turn_rad);
}

RadioMap radio_map_from_pathloss(const Pixel &tx, Grid<double> pl_db, const SimParams &params)
{
    RadioMap rm{tx, std::move(pl_db), Grid<double>(0)};
    rm.gray = Grid<double>(rm.pl_db.size(), 0.0);
    for (std::size_t i = 0; i < rm.pl_db.cells(); ++i)
        rm.gray[i] = pathloss_to_gray(rm.pl_db[i], params);
    return rm;
}

RadioMap simulate_radio_map(const CityMap &map, const Pixel &tx, const SimParams &params)
{
    const PathField field = dominant_path(map, tx, params);
    Grid<double> pl(map.size_px, 0.0);
    for (std::size_t i = 0; i < pl.cells(); ++i)
        pl[i] = pathloss_db(params, field.dist_m[i], map.cell_m, field.wall_cells[i], field.turn_rad[i]);
    return radio_map_from_pathloss(tx, std::move(pl), params);
}

ToAMap simulate_toa(const CityMap &map, const Pixel &tx, const SimParams &params)
{
    const PathField field = dominant_path(map, tx, params);
    ToAMap toa{tx, map.cell_m, Grid<double>(map.size_px, 0.0)};
    for (std::size_t i = 0; i < toa.toa_s.cells(); ++i)
        toa.toa_s[i] = field.dist_m[i] / kSpeedOfLight;
    return toa;
}

CityMap perturb_scene(const CityMap &map, std::uint64_t seed, int n_cars, std::span<const Pixel> keep_clear)
{
    if (n_cars < 0)
        throw std::invalid_argument("perturb_scene: n_cars must be >= 0");
    CityMap out = map;
    const int n = map.size_px;
    if (n_cars == 0)
        return out;

    auto reserved = [&](const Pixel &p) { return std::find(keep_clear.begin(), keep_clear.end(), p) != keep_clear.end(); };
    auto free_cell = [&](const Pixel &p) {
        return out.buildings.contains(p) && out.buildings(p) == 0 && out.cars(p) == 0 && !reserved(p);
    };

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coord(1, n);
    std::bernoulli_distribution horizontal(0.5);
    const long max_attempts = 1000L * n_cars;
    int placed = 0;
    for (long attempt = 0; attempt < max_attempts && placed < n_cars; ++attempt)
    {
        const Pixel a{coord(rng), coord(rng)};
        const Pixel b = horizontal(rng) ? Pixel{a.x + 1, a.y} : Pixel{a.x, a.y + 1};
        if (!free_cell(a) || !free_cell(b))
            continue;
        out.cars(a) = 1;
        out.cars(b) = 1;
        ++placed;
    }
    if (placed < n_cars)
        throw std::runtime_error("perturb_scene: placed only " + std::to_string(placed) + " of " + std::to_string(n_cars) +
                                 " cars after " + std::to_string(max_attempts) + " attempts");
    return out;
}

double pathloss_to_gray(double pl_db, const SimParams &params)
{
    const double g = (pl_db - params.pl_min_db) / (params.pl_max_db - params.pl_min_db);
    return std::clamp(g, 0.0, 1.0);
}

double gray_to_pathloss(double gray, const SimParams &params)
{
    return params.pl_min_db + gray * (params.pl_max_db - params.pl_min_db);
}

double measure_rss(const RadioMap &truth, const Pixel &ue, double noise_db, std::uint64_t seed)
{
    const double pl = truth.pl_db.at(ue);
    if (noise_db <= 0.0)
        return pl;
    std::mt19937_64 rng(seed);
    return pl + std::normal_distribution<double>(0.0, noise_db)(rng);
}

} // namespace radioloc
