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

#include "radioloc/bench.hpp"
#include "radioloc/dataset.hpp"
#include "radioloc/image_io.hpp"
#include "radioloc/seeds.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace radioloc;
using nlohmann::json;

namespace
{

json read_json(const fs::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    return json::parse(in);
}

void write_text(const fs::path &path, const std::string &text)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path.string());
    out << text;
}

Pixel parse_pixel(const std::string &s)
{
    const auto comma = s.find(',');
    if (comma == std::string::npos)
        throw std::invalid_argument("expected X,Y but got '" + s + "'");
    return {std::stoi(s.substr(0, comma)), std::stoi(s.substr(comma + 1))};
}

std::vector<std::string> split_list(const std::string &s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

TrainConfig train_config_from_json(const json &j)
{
    const std::string schedule = j.value("schedule", std::string("reference"));
    if (schedule != "reference" && schedule != "desk")
        throw std::invalid_argument("schedule must be 'reference' or 'desk'");
    TrainConfig c = schedule == "desk" ? TrainConfig::desk_schedule() : TrainConfig{};
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.lr = j.value("lr", c.lr);
    c.lr_decay_every = j.value("lr_decay_every", c.lr_decay_every);
    c.lr_decay_factor = j.value("lr_decay_factor", c.lr_decay_factor);
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.adam_eps = j.value("adam_eps", c.adam_eps);
    c.width_divisor = j.value("width_divisor", c.width_divisor);
    c.min_channels = j.value("min_channels", c.min_channels);
    c.output_bias = j.value("output_bias", c.output_bias);
    c.output_activation = j.value("output_activation", c.output_activation);
    c.input_scale = j.value("input_scale", c.input_scale);
    c.augment = j.value("augment", c.augment);
    c.output_init_gain = j.value("output_init_gain", c.output_init_gain);
    c.seed = j.value("seed", c.seed);
    return c;
}

Scenario scenario_with_overrides(const std::string &name, const DatasetManifest &manifest, double map_noise, double meas_noise_db,
                                 double toa_noise_s)
{
    Scenario s = make_scenario(name, manifest);
    if (map_noise >= 0)
        s.map_noise_gray = map_noise;
    s.meas_noise_db = meas_noise_db;
    s.toa_noise_s = toa_noise_s;
    s.validate();
    return s;
}

struct NoiseFlags
{
    double map_noise = -1.0;
    double meas_noise_db = 0.0;
    double toa_noise_s = 0.0;

    void add(CLI::App *cmd)
    {
        cmd->add_option("--map-noise", map_noise, "Gray-level noise std on localizer maps (default: scenario)");
        cmd->add_option("--meas-noise-db", meas_noise_db, "RSS measurement noise std in dB");
        cmd->add_option("--toa-noise", toa_noise_s, "ToA noise std in seconds");
    }
};

struct MethodFlags
{
    int k = 16;
    bool weighted = false;
    double alpha = 1.1;
    int k_max = 16;
    double sigma = 0.05;
    bool argmax = false;
    std::string checkpoint;
    double mcc_sigma = 5.0;
    int max_iter = 500;

    void add(CLI::App *cmd)
    {
        cmd->add_option("--k", k, "kNN neighbours");
        cmd->add_flag("--weighted", weighted, "Inverse-distance weighted kNN");
        cmd->add_option("--alpha", alpha, "Adaptive kNN threshold factor");
        cmd->add_option("--kmax", k_max, "Adaptive kNN neighbour cap");
        cmd->add_option("--sigma", sigma, "Heat-map gray-level sigma");
        cmd->add_flag("--argmax", argmax, "Heat-map argmax readout");
        cmd->add_option("--checkpoint", checkpoint, "LocUNet checkpoint stem");
        cmd->add_option("--mcc-sigma", mcc_sigma, "Correntropy kernel width in meters");
        cmd->add_option("--max-iter", max_iter, "Iteration cap for iterative solvers");
    }

    MethodConfig make(const std::string &method) const
    {
        MethodConfig m;
        m.method = method;
        m.k = k;
        m.weighted = weighted;
        m.alpha = alpha;
        m.k_max = k_max;
        m.sigma_gray = sigma;
        m.argmax = argmax;
        m.checkpoint = checkpoint;
        m.mcc_sigma_m = mcc_sigma;
        m.max_iter = max_iter;
        return m;
    }
};

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Radio-map based localization toolkit"};
    app.require_subcommand(1);

    // gen-maps
    std::uint64_t gm_seed = 1;
    int gm_maps = 10, gm_size = 64, gm_buildings = 18;
    std::string gm_out = "maps";
    auto *gen = app.add_subcommand("gen-maps", "Generate random city maps as PNG");
    gen->add_option("--seed", gm_seed);
    gen->add_option("--maps", gm_maps);
    gen->add_option("--size", gm_size);
    gen->add_option("--buildings", gm_buildings);
    gen->add_option("--out", gm_out);

    // make-dataset
    std::string md_config, md_out;
    auto *make = app.add_subcommand("make-dataset", "Build a dataset from a JSON config");
    make->add_option("--config", md_config)->required()->check(CLI::ExistingFile);
    make->add_option("--out", md_out, "Override the config's out_dir");

    // simulate
    std::string sim_map, sim_tx, sim_model = "base", sim_out = "radio";
    double sim_cell = 1.0;
    auto *sim = app.add_subcommand("simulate", "Simulate one radio map and ToA map");
    sim->add_option("--map", sim_map, "City map PNG")->required()->check(CLI::ExistingFile);
    sim->add_option("--tx", sim_tx, "Transmitter X,Y (1-indexed)")->required();
    sim->add_option("--model", sim_model)->check(CLI::IsMember({"base", "perturbed"}));
    sim->add_option("--cell", sim_cell, "Cell size in meters");
    sim->add_option("--out", sim_out, "Output stem");

    // eval
    std::string ev_method, ev_dataset, ev_scenario = kScenarioDpm, ev_records, ev_split = "test";
    std::uint64_t ev_seed = 1;
    MethodFlags ev_flags;
    NoiseFlags ev_noise;
    auto *eval = app.add_subcommand("eval", "Evaluate one method on a dataset split");
    eval->add_option("--method", ev_method)->required();
    eval->add_option("--dataset", ev_dataset)->required()->check(CLI::ExistingDirectory);
    eval->add_option("--scenario", ev_scenario);
    eval->add_option("--split", ev_split)->check(CLI::IsMember({"train", "val", "test"}));
    eval->add_option("--seed", ev_seed);
    eval->add_option("--records", ev_records, "Append per-sample errors to this CSV");
    ev_flags.add(eval);
    ev_noise.add(eval);

    // train
    std::string tr_config, tr_out;
    auto *train = app.add_subcommand("train", "Train the LocUNet localizer");
    train->add_option("--config", tr_config)->required()->check(CLI::ExistingFile);
    train->add_option("--out", tr_out)->required();

    // run-scenario
    std::string rs_scenario, rs_methods, rs_dataset, rs_out = ".";
    std::uint64_t rs_seed = 1;
    bool rs_tune = false;
    MethodFlags rs_flags;
    NoiseFlags rs_noise;
    auto *run = app.add_subcommand("run-scenario", "Run several methods on a scenario's test split");
    run->add_option("--scenario", rs_scenario)->required();
    run->add_option("--methods", rs_methods)->required();
    run->add_option("--dataset", rs_dataset)->required()->check(CLI::ExistingDirectory);
    run->add_option("--seed", rs_seed);
    run->add_option("--out", rs_out, "Directory for results.csv, tables.md and samples.csv");
    run->add_flag("--tune", rs_tune, "Grid-search k/alpha/sigma on the validation split first");
    rs_flags.add(run);
    rs_noise.add(run);

    // report
    std::string rp_results, rp_format = "text";
    auto *rep = app.add_subcommand("report", "Render results.csv as a table");
    rep->add_option("--results", rp_results)->required()->check(CLI::ExistingFile);
    rep->add_option("--format", rp_format)->check(CLI::IsMember({"text", "csv", "markdown"}));

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (gen->parsed())
        {
            fs::create_directories(gm_out);
            for (int i = 0; i < gm_maps; ++i)
            {
                const CityMap city = generate_city_map(derive_seed(gm_seed, {std::uint64_t(i)}), gm_size, gm_buildings);
                std::ostringstream name;
                name << "s" << std::setw(3) << std::setfill('0') << i << "_city.png";
                io::write_png(fs::path(gm_out) / name.str(), io::to_binary_image(city.buildings));
            }
            std::cout << "wrote " << gm_maps << " maps to " << gm_out << '\n';
        }
        else if (make->parsed())
        {
            DatasetConfig cfg = dataset_config_from_json(read_json(md_config));
            if (!md_out.empty())
                cfg.out_dir = md_out;
            const auto manifest = build_dataset(cfg);
            std::cout << "dataset with " << manifest.scenes.size() << " scenes written to " << cfg.out_dir.string() << '\n';
        }
        else if (sim->parsed())
        {
            CityMap city(1);
            city.buildings = io::from_binary_image(io::read_png(sim_map));
            city.size_px = city.buildings.size();
            city.cars = Grid<std::uint8_t>(city.size_px, 0);
            city.cell_m = sim_cell;
            const SimParams params = sim_model == "base" ? SimParams::base() : SimParams::perturbed();
            const Pixel tx = parse_pixel(sim_tx);
            const RadioMap rm = simulate_radio_map(city, tx, params);
            const ToAMap toa = simulate_toa(city, tx, params);
            io::write_png(sim_out + ".png", io::to_gray_image(rm.gray));
            io::write_float_grid(sim_out + ".pl", io::kPathlossMagic, rm.pl_db, city.cell_m);
            io::write_float_grid(sim_out + ".toa", io::kToaMagic, toa.toa_s, city.cell_m);
            std::cout << "wrote " << sim_out << ".{png,pl,toa}\n";
        }
        else if (eval->parsed())
        {
            const auto manifest = load_manifest(ev_dataset);
            const Scenario sc = scenario_with_overrides(ev_scenario, manifest, ev_noise.map_noise, ev_noise.meas_noise_db, ev_noise.toa_noise_s);
            const Split split = ev_split == "train" ? Split::Train : ev_split == "val" ? Split::Val : Split::Test;
            const auto data = make_scenario_data(ev_dataset, manifest, sc, split, ev_seed);
            const auto result = run_methods(data, {ev_flags.make(ev_method)});
            if (!ev_records.empty())
                write_sample_records(ev_records, result.records, true);
            std::cout << report(result.rows, ReportFormat::Text);
        }
        else if (train->parsed())
        {
            const json j = read_json(tr_config);
            const fs::path dataset = j.at("dataset").get<std::string>();
            const auto manifest = load_manifest(dataset);
            const Scenario sc = make_scenario(j.value("scenario", std::string(kScenarioDpm)), manifest);
            const TrainConfig cfg = train_config_from_json(j);
            const std::uint64_t data_seed = j.value("data_seed", std::uint64_t(1));
            fs::create_directories(tr_out);
            const auto train_data = make_scenario_data(dataset, manifest, sc, Split::Train, data_seed).plain_samples();
            const auto val_data = make_scenario_data(dataset, manifest, sc, Split::Val, data_seed).plain_samples();
            const auto result = locnet_train(train_data, val_data, cfg, [](const EpochLog &e) {
                std::cout << "epoch " << e.epoch << " lr " << e.lr << " train " << e.train_mae << " val " << e.val_mae << std::endl;
            });
            result.model.save(fs::path(tr_out) / "model");
            write_train_log(fs::path(tr_out) / "train_log.csv", result.log);
            std::cout << "best epoch " << result.best_epoch << " val MAE " << result.best_val_mae << " px\n";
        }
        else if (run->parsed())
        {
            const auto manifest = load_manifest(rs_dataset);
            const Scenario sc = scenario_with_overrides(rs_scenario, manifest, rs_noise.map_noise, rs_noise.meas_noise_db, rs_noise.toa_noise_s);
            std::vector<MethodConfig> methods;
            for (const auto &name : split_list(rs_methods))
            {
                if (!is_known_method(name))
                    throw std::invalid_argument("unknown method '" + name + "'");
                methods.push_back(rs_flags.make(name));
            }
            if (methods.empty())
                throw std::invalid_argument("no methods given");
            if (rs_tune)
            {
                const auto val = make_scenario_data(rs_dataset, manifest, sc, Split::Val, rs_seed);
                for (auto &m : methods)
                    if (m.method != "locunet")
                    {
                        const auto base = m;
                        auto grid = default_grid(m.method);
                        for (auto &g : grid)
                            g.max_iter = base.max_iter;
                        m = grid_search(val, grid);
                    }
            }
            const auto result = run_scenario(sc, rs_dataset, manifest, methods, rs_seed);
            fs::create_directories(rs_out);
            write_text(fs::path(rs_out) / "results.csv", report(result.rows, ReportFormat::Csv));
            write_text(fs::path(rs_out) / "tables.md", report(result.rows, ReportFormat::Markdown));
            write_sample_records(fs::path(rs_out) / "samples.csv", result.records);
            std::cout << report(result.rows, ReportFormat::Text);
        }
        else if (rep->parsed())
        {
            std::ifstream in(rp_results);
            std::stringstream ss;
            ss << in.rdbuf();
            const auto rows = parse_results_csv(ss.str());
            if (rows.empty())
                throw std::invalid_argument("no rows in " + rp_results);
            const ReportFormat f = rp_format == "csv" ? ReportFormat::Csv : rp_format == "markdown" ? ReportFormat::Markdown : ReportFormat::Text;
            std::cout << report(rows, f);
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
