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

#include "test_util.hpp"

#include "radioloc/bench.hpp"
#include "radioloc/fingerprint.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>

using namespace radioloc;
namespace fs = std::filesystem;

namespace
{

struct TinyDataset
{
    fs::path dir;
    DatasetManifest manifest;
};

const TinyDataset &tiny()
{
    static const TinyDataset d = [] {
        TinyDataset t;
        t.dir = testutil::scratch_dir("bench_ds");
        t.manifest = build_dataset(testutil::tiny_config(t.dir));
        return t;
    }();
    return d;
}

MethodConfig method(const std::string &name)
{
    MethodConfig m;
    m.method = name;
    m.k = 2;
    return m;
}

} // namespace

TEST_CASE("scenario definitions")
{
    const auto &m = tiny().manifest;
    const auto dpm = make_scenario(kScenarioDpm, m);
    CHECK(dpm.map_source_params == dpm.meas_source_params);
    CHECK(dpm.cars == 0);
    const auto irt = make_scenario(kScenarioDpmToIrt, m);
    CHECK(irt.meas_source_params == m.meas_params);
    CHECK(irt.cars == 0);
    const auto cars = make_scenario(kScenarioDpmToIrtCars, m);
    CHECK(cars.cars > 0);
    CHECK_THROWS_AS(make_scenario("DPM", m), std::invalid_argument);

    Scenario bad = dpm;
    bad.meas_source_params = m.meas_params;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("one row per method, counting every test sample")
{
    const auto &t = tiny();
    const auto run = run_scenario(make_scenario(kScenarioDpm, t.manifest), t.dir, t.manifest, {method("knn")}, 1);
    REQUIRE(run.rows.size() == 1);
    const int expected = int(t.manifest.test.size()) * int(t.manifest.scenes.front().ue.size());
    CHECK(run.rows[0].n_samples == expected);
    CHECK(run.records.size() == std::size_t(expected));
    CHECK(run.rows[0].mae_m >= 0.0);
    CHECK(run.rows[0].scenario == kScenarioDpm);
}

TEST_CASE("identical seeds give identical per-sample files")
{
    const auto &t = tiny();
    const auto dir = testutil::scratch_dir("bench_det");
    const std::vector<MethodConfig> ms{method("knn"), method("aknn"), method("heatmap"), method("gtrs"), method("pocs"),
                                       method("mcc"), method("rss-lateration")};
    const auto sc = make_scenario(kScenarioDpmToIrtCars, t.manifest);
    const auto a = run_scenario(sc, t.dir, t.manifest, ms, 4, RunOptions{false});
    const auto b = run_scenario(sc, t.dir, t.manifest, ms, 4, RunOptions{false});
    write_sample_records(dir / "a.csv", a.records);
    write_sample_records(dir / "b.csv", b.records);
    CHECK(testutil::read_bytes(dir / "a.csv") == testutil::read_bytes(dir / "b.csv"));
    CHECK(a.rows == b.rows);
}

TEST_CASE("measurements come from the measurement source, maps from the map source")
{
    const auto &t = tiny();
    Scenario sc = make_scenario(kScenarioDpmToIrt, t.manifest);
    sc.map_noise_gray = 0.0;
    const auto data = make_scenario_data(t.dir, t.manifest, sc, Split::Test, 2);
    for (const auto &es : data.samples)
    {
        const auto &ls = *es.sample.scene;
        for (std::size_t j = 0; j < ls.bs.size(); ++j)
        {
            const auto meas = simulate_radio_map(ls.city, ls.bs[j], t.manifest.meas_params);
            CHECK(es.sample.p_meas[j] == doctest::Approx(meas.gray(es.sample.truth)).epsilon(1e-12));
        }
        CHECK(es.meas_source.find("n=2.2") != std::string::npos);
        CHECK(es.map_source.find("n=2 ") != std::string::npos);
    }
    const auto loaded = load_scene(t.dir, t.manifest, data.scenes.front()->id);
    CHECK(data.scenes.front()->radio_maps[0] == loaded.radio_maps[0].gray);

    const auto run = run_methods(data, {method("knn")});
    for (const auto &r : run.records)
    {
        CHECK(r.meas_source == data.samples.front().meas_source);
        CHECK(r.map_source == data.samples.front().map_source);
    }
}

TEST_CASE("map noise is bounded to the gray range and reproducible")
{
    const auto &t = tiny();
    const auto sc = make_scenario(kScenarioDpm, t.manifest);
    const auto a = make_scenario_data(t.dir, t.manifest, sc, Split::Test, 2);
    const auto b = make_scenario_data(t.dir, t.manifest, sc, Split::Test, 2);
    const auto c = make_scenario_data(t.dir, t.manifest, sc, Split::Test, 3);
    CHECK(a.scenes[0]->radio_maps[0] == b.scenes[0]->radio_maps[0]);
    CHECK_FALSE(a.scenes[0]->radio_maps[0] == c.scenes[0]->radio_maps[0]);
    for (double v : a.scenes[0]->radio_maps[0].data())
    {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("car scenario measures in the world with cars")
{
    const auto &t = tiny();
    Scenario sc = make_scenario(kScenarioDpmToIrtCars, t.manifest);
    const auto data = make_scenario_data(t.dir, t.manifest, sc, Split::Test, 2);
    const auto &es = data.samples.front();
    const auto loaded = load_scene(t.dir, t.manifest, es.scene_id);
    CityMap world = loaded.scene.city;
    world.cars = loaded.cars;
    const auto meas = simulate_radio_map(world, loaded.scene.bs_locations[0], t.manifest.meas_params);
    CHECK(es.sample.p_meas[0] == doctest::Approx(meas.gray(es.sample.truth)));
    CHECK(es.sample.scene->city.cars == Grid<std::uint8_t>(world.size_px, 0));
}

TEST_CASE("results only contain test scenes")
{
    const auto &t = tiny();
    const auto run = run_scenario(make_scenario(kScenarioDpm, t.manifest), t.dir, t.manifest, {method("knn")}, 1);
    const std::set<int> test(t.manifest.test.begin(), t.manifest.test.end());
    const std::set<int> train(t.manifest.train.begin(), t.manifest.train.end());
    for (const auto &r : run.records)
    {
        CHECK(test.count(r.scene_id) == 1);
        CHECK(train.count(r.scene_id) == 0);
    }
}

TEST_CASE("narrow heat map is exact on unique noiseless fingerprints")
{
    const auto &t = tiny();
    Scenario sc = make_scenario(kScenarioDpm, t.manifest);
    sc.map_noise_gray = 0.0;
    const auto data = make_scenario_data(t.dir, t.manifest, sc, Split::Test, 1);
    MethodConfig m = method("heatmap");
    m.sigma_gray = 1e-5;
    const auto run = run_methods(data, {m});
    int unique = 0;
    for (std::size_t k = 0; k < data.samples.size(); ++k)
    {
        const auto &s = data.samples[k].sample;
        const auto db = build_fingerprint_db(s.scene->radio_maps, s.scene->city, 1);
        const Eigen::Map<const Eigen::VectorXd> q(s.p_meas.data(), Eigen::Index(s.p_meas.size()));
        int matches = 0;
        for (Eigen::Index r = 0; r < db.vectors.rows(); ++r)
            matches += (db.vectors.row(r).transpose() - q).norm() < 1e-12;
        if (matches != 1)
            continue;
        ++unique;
        CHECK(run.records[k].error_m < 0.5 * data.cell_m);
    }
    CHECK(unique > 0);
}

TEST_CASE("method checks happen before evaluation")
{
    const auto &t = tiny();
    MethodConfig net = method("locunet");
    net.checkpoint = testutil::scratch_dir("nockpt") / "model";
    CHECK_THROWS_AS(run_scenario(make_scenario(kScenarioDpm, t.manifest), t.dir, t.manifest, {method("knn"), net}, 1),
                    std::runtime_error);
    CHECK_THROWS_AS(run_scenario(make_scenario(kScenarioDpm, t.manifest), t.dir, t.manifest, {method("svm")}, 1), std::invalid_argument);
    CHECK(is_known_method("rss-lateration"));
    CHECK_FALSE(is_known_method("svm"));
}

TEST_CASE("grid search returns the best validation candidate")
{
    const auto &t = tiny();
    const auto val = make_scenario_data(t.dir, t.manifest, make_scenario(kScenarioDpmToIrt, t.manifest), Split::Val, 1);
    auto grid = default_grid("knn");
    grid.erase(std::remove_if(grid.begin(), grid.end(), [](const MethodConfig &m) { return m.k > 8; }), grid.end());
    const auto best = grid_search(val, grid);
    const double best_mae = run_methods(val, {best}, RunOptions{false}).rows[0].mae_m;
    for (const auto &g : grid)
        CHECK(best_mae <= run_methods(val, {g}, RunOptions{false}).rows[0].mae_m);
    CHECK(default_grid("aknn").size() > 1);
    CHECK(default_grid("heatmap").size() > 1);
    CHECK(default_grid("gtrs").size() == 1);
}

TEST_CASE("report rendering")
{
    const std::vector<ResultRow> rows{{"SIM-DPM", "knn", "k=4", 5.0, 0.2, 10},
                                      {"SIM-DPM", "heatmap", "sigma=0.05", 3.0, 0.1, 10},
                                      {"SIM-DPM2IRT", "gtrs", "", 7.25, 0.01, 10}};
    const auto text = report(rows, ReportFormat::Text);
    CHECK(text.find("heatmap") < text.find("knn"));

    const auto md = report(rows, ReportFormat::Markdown);
    CHECK(md.find("### SIM-DPM\n") != std::string::npos);
    CHECK(md.find("### SIM-DPM2IRT\n") != std::string::npos);
    CHECK(md.find("**heatmap**") != std::string::npos);
    CHECK(md.find("**knn**") == std::string::npos);
    CHECK(md.find("**gtrs**") != std::string::npos);

    const auto csv = report(rows, ReportFormat::Csv);
    const auto back = parse_results_csv(csv);
    REQUIRE(back.size() == 3);
    CHECK(back[0] == rows[1]);
    CHECK(back[1] == rows[0]);
    CHECK(back[2] == rows[2]);

    const std::vector<ResultRow> one{{"SIM-DPM", "gtrs", "a,\"b\"", 1.0 / 3.0, 0.5, 1}};
    CHECK(parse_results_csv(report(one, ReportFormat::Csv)) == one);
    CHECK_THROWS_AS(parse_results_csv("nope\n"), std::invalid_argument);
}

TEST_CASE("sample records append without repeating the header")
{
    const auto dir = testutil::scratch_dir("records");
    const std::vector<SampleRecord> r{{1, 2, "knn", 1.5, 0.0, "m", "p"}};
    write_sample_records(dir / "s.csv", r, true);
    write_sample_records(dir / "s.csv", r, true);
    std::ifstream in(dir / "s.csv");
    std::string line;
    int lines = 0, headers = 0;
    while (std::getline(in, line))
    {
        ++lines;
        headers += line.rfind("scene_id", 0) == 0;
    }
    CHECK(lines == 3);
    CHECK(headers == 1);
}
