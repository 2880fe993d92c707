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

#include "radioloc/dpm_sim.hpp"
#include "radioloc/scene.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace radioloc
{

struct SplitCounts
{
    int train = 12;
    int val = 4;
    int test = 4;
    int total() const { return train + val + test; }
};

struct DatasetConfig
{
    int maps = 20;
    int bs_per_map = 5;
    int ues_per_scene = 50;
    int size_px = 64;
    double cell_m = 1.0;
    int n_buildings = 18;
    BuildingBounds bounds{4, 12, 200, 0.6};
    SplitCounts split;
    int n_cars = 40;
    std::uint64_t seed = 1;
    SimParams sim_params = SimParams::base();
    SimParams meas_params = SimParams::perturbed();
    std::filesystem::path out_dir = "dataset";

    void validate() const;
};

struct RadioMapFiles
{
    std::string png;
    std::string sidecar;
    std::string pathloss;
    std::string toa;
};

struct SceneEntry
{
    int id = 0;
    std::string city_png;
    std::string cars_png;
    std::vector<Pixel> bs;
    std::vector<Pixel> ue;
    std::vector<RadioMapFiles> radio_maps;
};

enum class Split
{
    Train,
    Val,
    Test
};

const char *to_string(Split s);

struct DatasetManifest
{
    int format_version = 1;
    std::uint64_t seed = 0;
    int size_px = 0;
    double cell_m = 1.0;
    int n_cars = 0;
    SimParams sim_params;
    SimParams meas_params;
    std::vector<SceneEntry> scenes;
    std::vector<int> train, val, test;

    const std::vector<int> &ids(Split s) const;
    const SceneEntry &scene(int id) const;
};

// Writes city maps, car overlays, per-BS radio maps and ToA maps and the manifest under
// config.out_dir. Scenes are split by map so that no map appears in two splits.
DatasetManifest build_dataset(const DatasetConfig &config);

DatasetManifest load_manifest(const std::filesystem::path &dir);

// Loaded from the files referenced by a manifest entry.
struct LoadedScene
{
    Scene scene;            // city without cars
    Grid<std::uint8_t> cars;
    std::vector<RadioMap> radio_maps;  // base model, from the pathloss grids
    std::vector<ToAMap> toa_maps;
};

LoadedScene load_scene(const std::filesystem::path &dir, const DatasetManifest &manifest, int id);

nlohmann::json to_json(const SimParams &p);
SimParams sim_params_from_json(const nlohmann::json &j);
nlohmann::json to_json(const DatasetConfig &c);
DatasetConfig dataset_config_from_json(const nlohmann::json &j);
nlohmann::json to_json(const DatasetManifest &m);
DatasetManifest manifest_from_json(const nlohmann::json &j);

} // namespace radioloc
