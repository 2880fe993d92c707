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

#include "radioloc/dataset.hpp"

#include "radioloc/image_io.hpp"
#include "radioloc/seeds.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

namespace radioloc
{

using nlohmann::json;
namespace fs = std::filesystem;

namespace
{

enum SeedStream : std::uint64_t
{
    kCityStream = 1,
    kPointStream = 2,
    kCarStream = 3,
    kSplitStream = 4,
};

std::string scene_tag(int id)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "s%03d", id);
    return buf;
}

json pixel_list(const std::vector<Pixel> &pts)
{
    json out = json::array();
    for (const auto &p : pts)
        out.push_back({p.x, p.y});
    return out;
}

std::vector<Pixel> pixels_from(const json &j)
{
    std::vector<Pixel> out;
    for (const auto &e : j)
        out.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    return out;
}

void write_json(const fs::path &path, const json &j)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path.string());
    out << j.dump(2) << '\n';
}

} // namespace

const char *to_string(Split s)
{
    switch (s)
    {
    case Split::Train:
        return "train";
    case Split::Val:
        return "val";
    case Split::Test:
        return "test";
    }
    return "?";
}

void DatasetConfig::validate() const
{
    if (maps < 1 || bs_per_map < 1 || ues_per_scene < 0)
        throw std::invalid_argument("DatasetConfig: maps and bs_per_map must be >= 1");
    if (split.train < 0 || split.val < 0 || split.test < 0 || split.total() != maps)
        throw std::invalid_argument("DatasetConfig: split " + std::to_string(split.train) + "/" + std::to_string(split.val) + "/" +
                                    std::to_string(split.test) + " does not partition " + std::to_string(maps) + " maps");
    if (n_cars < 0)
        throw std::invalid_argument("DatasetConfig: n_cars must be >= 0");
    sim_params.validate();
    meas_params.validate();
}

const std::vector<int> &DatasetManifest::ids(Split s) const
{
    switch (s)
    {
    case Split::Train:
        return train;
    case Split::Val:
        return val;
    default:
        return test;
    }
}

const SceneEntry &DatasetManifest::scene(int id) const
{
    for (const auto &s : scenes)
        if (s.id == id)
            return s;
    throw std::out_of_range("manifest has no scene " + std::to_string(id));
}

DatasetManifest build_dataset(const DatasetConfig &config)
{
    config.validate();
    const fs::path root = config.out_dir;
    fs::create_directories(root / "maps");
    fs::create_directories(root / "radio");
    fs::create_directories(root / "toa");

    DatasetManifest m;
    m.seed = config.seed;
    m.size_px = config.size_px;
    m.cell_m = config.cell_m;
    m.n_cars = config.n_cars;
    m.sim_params = config.sim_params;
    m.meas_params = config.meas_params;

    const int j_count = config.bs_per_map;
    for (int id = 0; id < config.maps; ++id)
    {
        try
        {
            CityMap city = generate_city_map(derive_seed(config.seed, {kCityStream, std::uint64_t(id)}), config.size_px,
                                             config.n_buildings, config.bounds);
            city.cell_m = config.cell_m;
            const auto pts = place_points(city, std::size_t(j_count + config.ues_per_scene),
                                          derive_seed(config.seed, {kPointStream, std::uint64_t(id)}));
            SceneEntry e;
            e.id = id;
            e.bs.assign(pts.begin(), pts.begin() + j_count);
            e.ue.assign(pts.begin() + j_count, pts.end());
            const CityMap with_cars =
                perturb_scene(city, derive_seed(config.seed, {kCarStream, std::uint64_t(id)}), config.n_cars, e.bs);

            const std::string tag = scene_tag(id);
            e.city_png = "maps/" + tag + "_city.png";
            e.cars_png = "maps/" + tag + "_cars.png";
            io::write_png(root / e.city_png, io::to_binary_image(city.buildings));
            io::write_png(root / e.cars_png, io::to_binary_image(with_cars.cars));

            for (int j = 0; j < j_count; ++j)
            {
                const std::string stem = tag + "_bs" + std::to_string(j);
                RadioMapFiles files{"radio/" + stem + ".png", "radio/" + stem + ".json", "radio/" + stem + ".pl",
                                    "toa/" + stem + ".toa"};
                const RadioMap rm = simulate_radio_map(city, e.bs[size_t(j)], config.sim_params);
                io::write_png(root / files.png, io::to_gray_image(rm.gray));
                io::write_float_grid(root / files.pathloss, io::kPathlossMagic, rm.pl_db, city.cell_m);
                write_json(root / files.sidecar, json{{"tx", {rm.tx.x, rm.tx.y}},
                                                      {"sim_params", to_json(config.sim_params)},
                                                      {"pl_window_db", {config.sim_params.pl_min_db, config.sim_params.pl_max_db}}});
                const ToAMap toa = simulate_toa(city, e.bs[size_t(j)], config.sim_params);
                io::write_float_grid(root / files.toa, io::kToaMagic, toa.toa_s, city.cell_m);
                e.radio_maps.push_back(std::move(files));
            }
            m.scenes.push_back(std::move(e));
        }
        catch (const std::exception &ex)
        {
            throw std::runtime_error("build_dataset: scene " + std::to_string(id) + " failed: " + ex.what());
        }
    }

    std::vector<int> order(std::size_t(config.maps));
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(derive_seed(config.seed, {kSplitStream}));
    std::shuffle(order.begin(), order.end(), rng);
    auto take = [&](int from, int count) {
        std::vector<int> ids(order.begin() + from, order.begin() + from + count);
        std::sort(ids.begin(), ids.end());
        return ids;
    };
    m.train = take(0, config.split.train);
    m.val = take(config.split.train, config.split.val);
    m.test = take(config.split.train + config.split.val, config.split.test);

    json doc = to_json(m);
    doc["config"] = to_json(config);
    doc["config"].erase("out_dir");
    write_json(root / "manifest.json", doc);
    return m;
}

DatasetManifest load_manifest(const fs::path &dir)
{
    std::ifstream in(dir / "manifest.json");
    if (!in)
        throw std::runtime_error("cannot open " + (dir / "manifest.json").string());
    return manifest_from_json(json::parse(in));
}

LoadedScene load_scene(const fs::path &dir, const DatasetManifest &manifest, int id)
{
    const SceneEntry &e = manifest.scene(id);
    LoadedScene out;
    CityMap city(manifest.size_px, manifest.cell_m);
    city.buildings = io::from_binary_image(io::read_png(dir / e.city_png));
    out.cars = io::from_binary_image(io::read_png(dir / e.cars_png));
    if (city.buildings.size() != manifest.size_px || out.cars.size() != manifest.size_px)
        throw std::runtime_error("scene " + std::to_string(id) + ": map size does not match manifest");
    out.scene = Scene{std::move(city), e.bs, e.ue};
    out.scene.validate();

    for (std::size_t j = 0; j < e.radio_maps.size(); ++j)
    {
        auto pl = io::read_float_grid(dir / e.radio_maps[j].pathloss, io::kPathlossMagic);
        out.radio_maps.push_back(radio_map_from_pathloss(e.bs[j], std::move(pl.values), manifest.sim_params));
        auto toa = io::read_float_grid(dir / e.radio_maps[j].toa, io::kToaMagic);
        out.toa_maps.push_back(ToAMap{e.bs[j], toa.cell_m, std::move(toa.values)});
    }
    return out;
}

json to_json(const SimParams &p)
{
    return json{{"l0_db", p.l0_db},
                {"path_exponent", p.path_exponent},
                {"wall_db_per_cell", p.wall_db_per_cell},
                {"corner_db_per_rad", p.corner_db_per_rad},
                {"pl_min_db", p.pl_min_db},
                {"pl_max_db", p.pl_max_db},
                {"meters_per_db", p.meters_per_db}};
}

SimParams sim_params_from_json(const json &j)
{
    SimParams p;
    p.l0_db = j.value("l0_db", p.l0_db);
    p.path_exponent = j.value("path_exponent", p.path_exponent);
    p.wall_db_per_cell = j.value("wall_db_per_cell", p.wall_db_per_cell);
    p.corner_db_per_rad = j.value("corner_db_per_rad", p.corner_db_per_rad);
    p.pl_min_db = j.value("pl_min_db", p.pl_min_db);
    p.pl_max_db = j.value("pl_max_db", p.pl_max_db);
    p.meters_per_db = j.value("meters_per_db", p.meters_per_db);
    p.validate();
    return p;
}

json to_json(const DatasetConfig &c)
{
    return json{{"maps", c.maps},
                {"bs_per_map", c.bs_per_map},
                {"ues_per_scene", c.ues_per_scene},
                {"size_px", c.size_px},
                {"cell_m", c.cell_m},
                {"n_buildings", c.n_buildings},
                {"building_min_side", c.bounds.min_side},
                {"building_max_side", c.bounds.max_side},
                {"split", {c.split.train, c.split.val, c.split.test}},
                {"n_cars", c.n_cars},
                {"seed", c.seed},
                {"sim_params", to_json(c.sim_params)},
                {"meas_params", to_json(c.meas_params)},
                {"out_dir", c.out_dir.string()}};
}

DatasetConfig dataset_config_from_json(const json &j)
{
    DatasetConfig c;
    c.maps = j.value("maps", c.maps);
    c.bs_per_map = j.value("bs_per_map", c.bs_per_map);
    c.ues_per_scene = j.value("ues_per_scene", c.ues_per_scene);
    c.size_px = j.value("size_px", c.size_px);
    c.cell_m = j.value("cell_m", c.cell_m);
    c.n_buildings = j.value("n_buildings", c.n_buildings);
    c.bounds.min_side = j.value("building_min_side", c.bounds.min_side);
    c.bounds.max_side = j.value("building_max_side", c.bounds.max_side);
    if (j.contains("split"))
        c.split = {j["split"].at(0).get<int>(), j["split"].at(1).get<int>(), j["split"].at(2).get<int>()};
    c.n_cars = j.value("n_cars", c.n_cars);
    c.seed = j.value("seed", c.seed);
    if (j.contains("sim_params"))
        c.sim_params = sim_params_from_json(j["sim_params"]);
    if (j.contains("meas_params"))
        c.meas_params = sim_params_from_json(j["meas_params"]);
    c.out_dir = j.value("out_dir", c.out_dir.string());
    return c;
}

json to_json(const DatasetManifest &m)
{
    json scenes = json::array();
    for (const auto &s : m.scenes)
    {
        json maps = json::array();
        for (const auto &f : s.radio_maps)
            maps.push_back({{"png", f.png}, {"sidecar", f.sidecar}, {"pathloss", f.pathloss}, {"toa", f.toa}});
        scenes.push_back({{"id", s.id},
                          {"city", s.city_png},
                          {"cars", s.cars_png},
                          {"bs", pixel_list(s.bs)},
                          {"ue", pixel_list(s.ue)},
                          {"radio_maps", maps}});
    }
    return json{{"format_version", m.format_version},
                {"seed", m.seed},
                {"size_px", m.size_px},
                {"cell_m", m.cell_m},
                {"n_cars", m.n_cars},
                {"sim_params", to_json(m.sim_params)},
                {"meas_params", to_json(m.meas_params)},
                {"split", {{"train", m.train}, {"val", m.val}, {"test", m.test}}},
                {"scenes", scenes}};
}

DatasetManifest manifest_from_json(const json &j)
{
    DatasetManifest m;
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != 1)
        throw std::runtime_error("unsupported manifest format_version " + std::to_string(m.format_version));
    m.seed = j.at("seed").get<std::uint64_t>();
    m.size_px = j.at("size_px").get<int>();
    m.cell_m = j.at("cell_m").get<double>();
    m.n_cars = j.at("n_cars").get<int>();
    m.sim_params = sim_params_from_json(j.at("sim_params"));
    m.meas_params = sim_params_from_json(j.at("meas_params"));
    m.train = j.at("split").at("train").get<std::vector<int>>();
    m.val = j.at("split").at("val").get<std::vector<int>>();
    m.test = j.at("split").at("test").get<std::vector<int>>();
    for (const auto &s : j.at("scenes"))
    {
        SceneEntry e;
        e.id = s.at("id").get<int>();
        e.city_png = s.at("city").get<std::string>();
        e.cars_png = s.at("cars").get<std::string>();
        e.bs = pixels_from(s.at("bs"));
        e.ue = pixels_from(s.at("ue"));
        for (const auto &f : s.at("radio_maps"))
            e.radio_maps.push_back({f.at("png").get<std::string>(), f.at("sidecar").get<std::string>(),
                                    f.at("pathloss").get<std::string>(), f.at("toa").get<std::string>()});
        m.scenes.push_back(std::move(e));
    }
    return m;
}

} // namespace radioloc
