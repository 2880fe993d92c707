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

#include <cstdint>
#include <vector>

namespace radioloc
{

// Propagation environment: building footprints plus an optional car overlay on exterior cells.
struct CityMap
{
    int size_px = 0;
    double cell_m = 1.0;
    Grid<std::uint8_t> buildings;
    Grid<std::uint8_t> cars;

    CityMap() = default;
    explicit CityMap(int n, double cell = 1.0) : size_px(n), cell_m(cell), buildings(n, 0), cars(n, 0) {}

    bool is_building(const Pixel &p) const { return buildings(p) != 0; }
    bool is_exterior(const Pixel &p) const { return buildings(p) == 0; }
    // Cells that attenuate a path: buildings and cars.
    bool is_blocked(const Pixel &p) const { return buildings(p) != 0 || cars(p) != 0; }

    double building_fraction() const;
    std::size_t exterior_count() const;

    // Throws std::invalid_argument when a CityMap invariant is violated.
    void validate() const;

    friend bool operator==(const CityMap &, const CityMap &) = default;
};

struct BuildingBounds
{
    int min_side = 3;
    int max_side = 12;
    int max_rounds = 200;
    double max_fraction = 0.6;
};

// Axis-aligned rectangular buildings, resampled until the exterior is 4-connected and the
// building fraction is within bounds. Deterministic in seed.
CityMap generate_city_map(std::uint64_t seed, int size_px, int n_buildings, const BuildingBounds &bounds = {});

// True when all exterior cells form a single 4-connected component (vacuously true with none).
bool exterior_connected(const CityMap &map);

// Distinct, uniformly sampled exterior cells. Deterministic in seed.
std::vector<Pixel> place_points(const CityMap &map, std::size_t count, std::uint64_t seed);

// One localization environment: J base stations and the UE positions evaluated in it.
struct Scene
{
    CityMap city;
    std::vector<Pixel> bs_locations;
    std::vector<Pixel> ue_locations;

    void validate() const;
};

} // namespace radioloc
