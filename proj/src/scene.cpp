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

#include "radioloc/scene.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace radioloc
{

double CityMap::building_fraction() const
{
    if (buildings.cells() == 0)
        return 0.0;
    const auto n = std::count_if(buildings.data().begin(), buildings.data().end(), [](std::uint8_t v) { return v != 0; });
    return double(n) / double(buildings.cells());
}

std::size_t CityMap::exterior_count() const
{
    return std::size_t(std::count(buildings.data().begin(), buildings.data().end(), std::uint8_t{0}));
}

void CityMap::validate() const
{
    if (buildings.size() != size_px || cars.size() != size_px)
        throw std::invalid_argument("CityMap: grids must be " + std::to_string(size_px) + "x" + std::to_string(size_px));
    if (!(cell_m > 0.0))
        throw std::invalid_argument("CityMap: cell_m must be positive");
    for (std::size_t i = 0; i < buildings.cells(); ++i)
    {
        if (buildings[i] > 1 || cars[i] > 1)
            throw std::invalid_argument("CityMap: grids must be {0,1}-valued");
        if (buildings[i] && cars[i])
            throw std::invalid_argument("CityMap: car on building cell " + to_string(buildings.pixel(i)));
    }
}

bool exterior_connected(const CityMap &map)
{
    const auto &b = map.buildings;
    const std::size_t total = map.exterior_count();
    if (total == 0)
        return true;

    std::vector<std::uint8_t> seen(b.cells(), 0);
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < b.cells(); ++i)
        if (b[i] == 0)
        {
            stack.push_back(i);
            seen[i] = 1;
            break;
        }

    std::size_t reached = 0;
    constexpr int dx[4] = {1, -1, 0, 0};
    constexpr int dy[4] = {0, 0, 1, -1};
    while (!stack.empty())
    {
        const Pixel p = b.pixel(stack.back());
        stack.pop_back();
        ++reached;
        for (int k = 0; k < 4; ++k)
        {
            const Pixel q{p.x + dx[k], p.y + dy[k]};
            if (!b.contains(q))
                continue;
            const auto qi = b.index(q);
            if (b[qi] == 0 && !seen[qi])
            {
                seen[qi] = 1;
                stack.push_back(qi);
            }
        }
    }
    return reached == total;
}

CityMap generate_city_map(std::uint64_t seed, int size_px, int n_buildings, const BuildingBounds &bounds)
{
    if (size_px < 16)
        throw std::invalid_argument("generate_city_map: size_px must be >= 16, got " + std::to_string(size_px));
    if (n_buildings < 0)
        throw std::invalid_argument("generate_city_map: n_buildings must be >= 0");
    if (bounds.min_side < 1 || bounds.max_side < bounds.min_side)
        throw std::invalid_argument("generate_city_map: invalid building side bounds");

    std::mt19937_64 rng(seed);
    const int max_side = std::min(bounds.max_side, size_px);
    const int min_side = std::min(bounds.min_side, max_side);
    std::uniform_int_distribution<int> side(min_side, max_side);

    for (int round = 0; round < bounds.max_rounds; ++round)
    {
        CityMap map(size_px);
        for (int b = 0; b < n_buildings; ++b)
        {
            const int w = side(rng), h = side(rng);
            const int x0 = std::uniform_int_distribution<int>(1, size_px - w + 1)(rng);
            const int y0 = std::uniform_int_distribution<int>(1, size_px - h + 1)(rng);
            for (int y = y0; y < y0 + h; ++y)
                for (int x = x0; x < x0 + w; ++x)
                    map.buildings({x, y}) = 1;
        }
        if (map.building_fraction() <= bounds.max_fraction && map.exterior_count() > 0 && exterior_connected(map))
            return map;
    }

    std::ostringstream msg;
    msg << "generate_city_map: no valid map after " << bounds.max_rounds << " rounds (seed=" << seed << ", size_px=" << size_px
        << ", n_buildings=" << n_buildings << ", sides=[" << bounds.min_side << "," << bounds.max_side
        << "], max_fraction=" << bounds.max_fraction << ")";
    throw std::runtime_error(msg.str());
}

std::vector<Pixel> place_points(const CityMap &map, std::size_t count, std::uint64_t seed)
{
    std::vector<std::size_t> free;
    free.reserve(map.buildings.cells());
    for (std::size_t i = 0; i < map.buildings.cells(); ++i)
        if (map.buildings[i] == 0)
            free.push_back(i);
    if (count > free.size())
        throw std::invalid_argument("place_points: requested " + std::to_string(count) + " points but only " +
                                    std::to_string(free.size()) + " exterior cells");

    // Partial Fisher-Yates.
    std::mt19937_64 rng(seed);
    std::vector<Pixel> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
    {
        const auto j = std::uniform_int_distribution<std::size_t>(i, free.size() - 1)(rng);
        std::swap(free[i], free[j]);
        out.push_back(map.buildings.pixel(free[i]));
    }
    return out;
}

void Scene::validate() const
{
    city.validate();
    if (bs_locations.empty())
        throw std::invalid_argument("Scene: needs at least one base station");
    auto check = [&](const Pixel &p, const char *what) {
        if (!city.buildings.contains(p))
            throw std::invalid_argument(std::string("Scene: ") + what + " " + to_string(p) + " outside the grid");
        if (!city.is_exterior(p))
            throw std::invalid_argument(std::string("Scene: ") + what + " " + to_string(p) + " inside a building");
    };
    for (const auto &p : bs_locations)
        check(p, "BS");
    for (const auto &p : ue_locations)
        check(p, "UE");
    for (std::size_t i = 0; i < bs_locations.size(); ++i)
        for (std::size_t j = i + 1; j < bs_locations.size(); ++j)
            if (bs_locations[i] == bs_locations[j])
                throw std::invalid_argument("Scene: duplicate BS location " + to_string(bs_locations[i]));
}

} // namespace radioloc
