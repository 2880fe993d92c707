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

#include "radioloc/scene.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace radioloc
{

inline constexpr double kSpeedOfLight = 2.998e8;

// Loss model for the dominant-path surrogate. All losses in dB.
struct SimParams
{
    double l0_db = 40.0;             // loss at one cell
    double path_exponent = 2.0;
    double wall_db_per_cell = 15.0;  // per penetrated building or car cell
    double corner_db_per_rad = 10.0; // per radian of path turning
    double pl_min_db = -160.0;       // gray-level window
    double pl_max_db = -40.0;
    double meters_per_db = 1.0;      // exchange rate folding wall loss into path cost

    static SimParams base() { return {}; }
    // Stand-in for the finer ray-traced model: steeper decay, different interaction losses.
    static SimParams perturbed()
    {
        SimParams p;
        p.path_exponent = 2.2;
        p.wall_db_per_cell = 12.0;
        p.corner_db_per_rad = 6.0;
        return p;
    }

    void validate() const;
    friend bool operator==(const SimParams &, const SimParams &) = default;
};

// Dominant path from a source cell to every cell of the grid.
struct PathField
{
    Pixel source;
    Grid<double> dist_m;    // length of the pulled polyline from the source
    Grid<double> turn_rad;  // accumulated turning at the path's corners
    Grid<int> wall_cells;   // blocked cells entered along the path
    Grid<double> cost;      // minimized grid cost: octile length + meters_per_db * wall_db_per_cell * wall_cells
};

struct RadioMap
{
    Pixel tx;
    Grid<double> pl_db;  // pathloss in dB, non-positive
    Grid<double> gray;   // pl_db mapped through the gray-level window
};

struct ToAMap
{
    Pixel tx;
    double cell_m = 1.0;
    Grid<double> toa_s;
};

// Single-source shortest path over the 8-connected grid. Cells entered that are blocked
// (building or car) add a wall penalty to the cost. Corners of the realized path are placed
// by line-of-sight string pulling along the predecessor chain.
PathField dominant_path(const CityMap &map, const Pixel &tx, const SimParams &params = {});

// Number of blocked cells crossed by the segment between the centers of a and b, excluding a.
// Cells touched only at a corner count as crossed.
int segment_blocked_cells(const CityMap &map, const Pixel &a, const Pixel &b);

double pathloss_db(const SimParams &params, double dist_m, double cell_m, int wall_cells, double turn_rad);

RadioMap simulate_radio_map(const CityMap &map, const Pixel &tx, const SimParams &params = {});
RadioMap radio_map_from_pathloss(const Pixel &tx, Grid<double> pl_db, const SimParams &params);

ToAMap simulate_toa(const CityMap &map, const Pixel &tx, const SimParams &params = {});

// Copy of map with n_cars non-overlapping 2x1 car obstacles on free exterior cells.
CityMap perturb_scene(const CityMap &map, std::uint64_t seed, int n_cars, std::span<const Pixel> keep_clear = {});

double pathloss_to_gray(double pl_db, const SimParams &params);
double gray_to_pathloss(double gray, const SimParams &params);

// p_j = pl_db(ue) + N(0, noise_db^2).
double measure_rss(const RadioMap &truth, const Pixel &ue, double noise_db, std::uint64_t seed);

} // namespace radioloc
