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

#include "radioloc/fingerprint.hpp"
#include "radioloc/locnet.hpp"
#include "radioloc/seeds.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace radioloc
{

namespace fs = std::filesystem;

namespace
{

enum NoiseStream : std::uint64_t
{
    kMapNoise = 11,
    kMeasNoise = 12,
    kToaNoise = 13,
    kCarOverlay = 14,
};

const std::set<std::string> kMethods{"knn", "aknn", "heatmap", "locunet", "pocs", "gtrs", "mcc", "rss-lateration"};

std::string format_number(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fixed(double v, int digits)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

std::string describe(const SimParams &p)
{
    std::ostringstream os;
    os << "l0=" << p.l0_db << " n=" << p.path_exponent << " wall=" << p.wall_db_per_cell << " corner=" << p.corner_db_per_rad;
    return os.str();
}

std::string csv_field(const std::string &s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s)
    {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string &line)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i)
    {
        const char c = line[i];
        if (quoted)
        {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"')
            {
                cur += '"';
                ++i;
            }
            else if (c == '"')
                quoted = false;
            else
                cur += c;
        }
        else if (c == '"')
            quoted = true;
        else if (c == ',')
        {
            out.push_back(cur);
            cur.clear();
        }
        else
            cur += c;
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string &s)
{
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{})
        throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

struct PreparedMethod
{
    MethodConfig config;
    std::unique_ptr<LocNet> net;
    std::map<int, FingerprintDB> dbs;
    double k_sum = 0.0;  // references averaged by aknn, summed over samples
};

Vec2 localize(PreparedMethod &m, const EvalSample &es, double cell_m, const Scenario &scenario)
{
    const Sample &s = es.sample;
    const auto &cfg = m.config;
    const Eigen::Map<const Eigen::VectorXd> query(s.p_meas.data(), Eigen::Index(s.p_meas.size()));
    if (cfg.method == "knn")
    {
        const auto e = knn_localize(m.dbs.at(es.scene_id), query, cfg.k, cfg.weighted);
        return Vec2(e.x, e.y) * cell_m;
    }
    if (cfg.method == "aknn")
    {
        const auto e = adaptive_knn_localize(m.dbs.at(es.scene_id), query, cfg.alpha, cfg.k_max);
        m.k_sum += e.k;
        return Vec2(e.x, e.y) * cell_m;
    }
    if (cfg.method == "heatmap")
        return analytic_localize(s, cfg.sigma_gray, cfg.argmax ? HeatmapReadout::Argmax : HeatmapReadout::CenterOfMass) * cell_m;
    if (cfg.method == "locunet")
    {
        const auto out = m.net->forward(encode_inputs(s));
        return Vec2(out.estimate.x, out.estimate.y) * cell_m;
    }
    if (cfg.method == "pocs")
    {
        PocsOptions o;
        o.max_iter = cfg.max_iter;
        return pocs_localize(es.toa, o).estimate;
    }
    if (cfg.method == "gtrs")
        return gtrs_bisection_localize(es.toa).estimate;
    if (cfg.method == "mcc")
    {
        CorrentropyOptions o;
        o.sigma_m = cfg.mcc_sigma_m;
        o.max_iter = cfg.max_iter;
        return correntropy_localize(es.toa, o).estimate;
    }
    if (cfg.method == "rss-lateration")
    {
        const auto &p = scenario.map_source_params;
        const int n = s.scene->city.size_px;
        LogDistanceParams lp{p.l0_db, p.path_exponent, cell_m, std::sqrt(2.0) * n * cell_m};
        std::vector<double> pl;
        for (double g : s.p_meas)
            pl.push_back(gray_to_pathloss(g, p));
        return rss_log_distance_localize(es.toa.anchors, pl, lp).estimate;
    }
    throw std::invalid_argument("unknown method '" + cfg.method + "'");
}

} // namespace

void Scenario::validate() const
{
    if (name != kScenarioDpm && name != kScenarioDpmToIrt && name != kScenarioDpmToIrtCars)
        throw std::invalid_argument("unknown scenario '" + name + "'");
    map_source_params.validate();
    meas_source_params.validate();
    if (name == kScenarioDpm && !(map_source_params == meas_source_params))
        throw std::invalid_argument(name + ": map and measurement sources must match");
    if (name == kScenarioDpmToIrtCars && cars <= 0)
        throw std::invalid_argument(name + ": needs cars > 0");
    if (map_noise_gray < 0 || meas_noise_db < 0 || toa_noise_s < 0)
        throw std::invalid_argument(name + ": noise levels must be non-negative");
}

Scenario make_scenario(const std::string &name, const DatasetManifest &manifest)
{
    Scenario s;
    s.name = name;
    s.map_source_params = manifest.sim_params;
    if (name == kScenarioDpm)
        s.meas_source_params = manifest.sim_params;
    else if (name == kScenarioDpmToIrt)
        s.meas_source_params = manifest.meas_params;
    else if (name == kScenarioDpmToIrtCars)
    {
        s.meas_source_params = manifest.meas_params;
        s.cars = manifest.n_cars;
    }
    s.validate();
    return s;
}

std::vector<Sample> ScenarioData::plain_samples() const
{
    std::vector<Sample> out;
    out.reserve(samples.size());
    for (const auto &s : samples)
        out.push_back(s.sample);
    return out;
}

ScenarioData make_scenario_data(const fs::path &dir, const DatasetManifest &manifest, const Scenario &scenario, Split split,
                                std::uint64_t seed)
{
    scenario.validate();
    ScenarioData data;
    data.scenario = scenario;
    data.split = split;
    data.cell_m = manifest.cell_m;

    std::ostringstream map_src, meas_src;
    map_src << describe(scenario.map_source_params) << " map_noise=" << scenario.map_noise_gray;
    meas_src << describe(scenario.meas_source_params) << " cars=" << scenario.cars << " meas_noise_db=" << scenario.meas_noise_db;

    for (int id : manifest.ids(split))
    {
        LoadedScene ls = load_scene(dir, manifest, id);
        const CityMap &city = ls.scene.city;
        const auto &bs = ls.scene.bs_locations;

        auto loc = std::make_shared<LocalizerScene>();
        loc->id = id;
        loc->city = city;
        loc->bs = bs;
        for (std::size_t j = 0; j < bs.size(); ++j)
        {
            Grid<double> gray = scenario.map_source_params == manifest.sim_params
                                    ? ls.radio_maps[j].gray
                                    : simulate_radio_map(city, bs[j], scenario.map_source_params).gray;
            if (scenario.map_noise_gray > 0)
            {
                std::mt19937_64 rng(derive_seed(seed, {kMapNoise, std::uint64_t(id), j}));
                std::normal_distribution<double> noise(0.0, scenario.map_noise_gray);
                for (auto &v : gray.data())
                    v = std::clamp(v + noise(rng), 0.0, 1.0);
            }
            loc->radio_maps.push_back(std::move(gray));
        }

        CityMap world = city;
        if (scenario.cars > 0)
        {
            if (scenario.cars == manifest.n_cars)
                world.cars = ls.cars;
            else
                world = perturb_scene(city, derive_seed(seed, {kCarOverlay, std::uint64_t(id)}), scenario.cars, bs);
        }
        std::vector<RadioMap> meas_maps;
        for (std::size_t j = 0; j < bs.size(); ++j)
        {
            if (scenario.meas_source_params == manifest.sim_params && scenario.cars == 0)
                meas_maps.push_back(ls.radio_maps[j]);
            else
                meas_maps.push_back(simulate_radio_map(world, bs[j], scenario.meas_source_params));
        }

        for (std::size_t u = 0; u < ls.scene.ue_locations.size(); ++u)
        {
            const Pixel ue = ls.scene.ue_locations[u];
            EvalSample es;
            es.scene_id = id;
            es.map_source = map_src.str();
            es.meas_source = meas_src.str();
            es.sample.scene = loc;
            es.sample.truth = ue;
            es.sample.ue_id = int(u);
            for (std::size_t j = 0; j < bs.size(); ++j)
            {
                const double p_db =
                    measure_rss(meas_maps[j], ue, scenario.meas_noise_db, derive_seed(seed, {kMeasNoise, std::uint64_t(id), u, j}));
                es.sample.p_meas.push_back(pathloss_to_gray(p_db, scenario.map_source_params));
            }
            es.toa = toa_to_instance(ls.toa_maps, ue, scenario.toa_noise_s, derive_seed(seed, {kToaNoise, std::uint64_t(id), u}));
            data.samples.push_back(std::move(es));
        }
        data.scenes.push_back(std::move(loc));
    }
    return data;
}

std::string MethodConfig::summary() const
{
    std::ostringstream os;
    if (method == "knn")
        os << "k=" << k << (weighted ? " weighted" : "");
    else if (method == "aknn")
        os << "alpha=" << alpha << " kmax=" << k_max;
    else if (method == "heatmap")
        os << "sigma=" << sigma_gray << (argmax ? " argmax" : "");
    else if (method == "locunet")
        os << "checkpoint=" << checkpoint.filename().string();
    else if (method == "mcc")
        os << "sigma_m=" << mcc_sigma_m;
    else if (method == "pocs")
        os << "max_iter=" << max_iter;
    return os.str();
}

bool is_known_method(const std::string &method) { return kMethods.count(method) != 0; }

ScenarioRun run_methods(const ScenarioData &data, const std::vector<MethodConfig> &methods, const RunOptions &opts)
{
    if (data.samples.empty())
        throw std::invalid_argument("run_methods: no samples in split " + std::string(to_string(data.split)));

    std::vector<PreparedMethod> prepared;
    for (const auto &m : methods)
    {
        if (!is_known_method(m.method))
            throw std::invalid_argument("unknown method '" + m.method + "'");
        PreparedMethod p{m, nullptr, {}};
        if (m.method == "locunet")
        {
            auto bin = m.checkpoint, desc = m.checkpoint;
            bin += ".bin";
            desc += ".json";
            if (m.checkpoint.empty() || !fs::exists(bin) || !fs::exists(desc))
                throw std::runtime_error("locunet: checkpoint '" + m.checkpoint.string() + "' not found");
            p.net = std::make_unique<LocNet>(LocNet::load(m.checkpoint));
        }
        if (m.method == "knn" || m.method == "aknn")
            for (const auto &sc : data.scenes)
                p.dbs.emplace(sc->id, build_fingerprint_db(sc->radio_maps, sc->city, 1));
        prepared.push_back(std::move(p));
    }

    ScenarioRun run;
    std::vector<double> err_sum(methods.size(), 0.0), time_sum(methods.size(), 0.0);
    for (const auto &es : data.samples)
    {
        const Vec2 truth = to_meters(es.sample.truth, data.cell_m);
        for (std::size_t k = 0; k < prepared.size(); ++k)
        {
            const auto t0 = std::chrono::steady_clock::now();
            Vec2 est;
            try
            {
                est = localize(prepared[k], es, data.cell_m, data.scenario);
            }
            catch (const std::exception &e)
            {
                throw std::runtime_error(prepared[k].config.method + " failed on scene " + std::to_string(es.scene_id) + " ue " +
                                         std::to_string(es.sample.ue_id) + ": " + e.what());
            }
            const auto t1 = std::chrono::steady_clock::now();
            const double ms = opts.timing ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
            const double err = (est - truth).norm();
            run.records.push_back({es.scene_id, es.sample.ue_id, methods[k].method, err, ms, es.map_source, es.meas_source});
            err_sum[k] += err;
            time_sum[k] += ms;
        }
    }
    const double n = double(data.samples.size());
    for (std::size_t k = 0; k < methods.size(); ++k)
    {
        std::string params = methods[k].summary();
        if (methods[k].method == "aknn")
        {
            std::ostringstream os;
            os << " mean_k=" << std::setprecision(3) << prepared[k].k_sum / n;
            params += os.str();
        }
        run.rows.push_back({data.scenario.name, methods[k].method, params, err_sum[k] / n, time_sum[k] / n, int(data.samples.size())});
    }
    return run;
}

ScenarioRun run_scenario(const Scenario &scenario, const fs::path &dir, const DatasetManifest &manifest,
                         const std::vector<MethodConfig> &methods, std::uint64_t seed, const RunOptions &opts)
{
    for (const auto &m : methods)
        if (m.method == "locunet")
        {
            auto bin = m.checkpoint;
            bin += ".bin";
            if (m.checkpoint.empty() || !fs::exists(bin))
                throw std::runtime_error("locunet: checkpoint '" + m.checkpoint.string() + "' not found");
        }
    const ScenarioData data = make_scenario_data(dir, manifest, scenario, Split::Test, seed);
    return run_methods(data, methods, opts);
}

MethodConfig grid_search(const ScenarioData &val, const std::vector<MethodConfig> &candidates)
{
    if (candidates.empty())
        throw std::invalid_argument("grid_search: no candidates");
    std::size_t best = 0;
    double best_mae = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i)
    {
        const auto run = run_methods(val, {candidates[i]}, RunOptions{false});
        if (run.rows.front().mae_m < best_mae)
        {
            best_mae = run.rows.front().mae_m;
            best = i;
        }
    }
    return candidates[best];
}

std::vector<MethodConfig> default_grid(const std::string &method)
{
    std::vector<MethodConfig> out;
    MethodConfig base;
    base.method = method;
    if (method == "knn")
        for (int k : {1, 2, 4, 8, 16, 32, 64, 128, 256})
        {
            base.k = k;
            out.push_back(base);
        }
    else if (method == "aknn")
        for (double a : {1.05, 1.1, 1.2, 1.5, 2.0})
            for (int km : {4, 8, 16, 32, 64})
            {
                base.alpha = a;
                base.k_max = km;
                out.push_back(base);
            }
    else if (method == "heatmap")
        for (double s : {0.005, 0.01, 0.02, 0.03, 0.05, 0.08, 0.12, 0.2})
        {
            base.sigma_gray = s;
            out.push_back(base);
        }
    else if (method == "mcc")
        for (double s : {1.0, 2.0, 5.0, 10.0, 20.0})
        {
            base.mcc_sigma_m = s;
            out.push_back(base);
        }
    else
        out.push_back(base);
    return out;
}

TrainResult train_scenario(const fs::path &dir, const DatasetManifest &manifest, const Scenario &scenario, const TrainConfig &config,
                           std::uint64_t seed)
{
    const auto train = make_scenario_data(dir, manifest, scenario, Split::Train, seed).plain_samples();
    const auto val = make_scenario_data(dir, manifest, scenario, Split::Val, seed).plain_samples();
    return locnet_train(train, val, config);
}

std::string report(const std::vector<ResultRow> &rows, ReportFormat format)
{
    std::vector<std::string> scenarios;
    for (const auto &r : rows)
        if (std::find(scenarios.begin(), scenarios.end(), r.scenario) == scenarios.end())
            scenarios.push_back(r.scenario);

    std::ostringstream os;
    if (format == ReportFormat::Csv)
        os << "scenario,method,params,mae_m,mean_runtime_ms,n_samples\n";
    for (const auto &sc : scenarios)
    {
        std::vector<ResultRow> group;
        for (const auto &r : rows)
            if (r.scenario == sc)
                group.push_back(r);
        std::stable_sort(group.begin(), group.end(), [](const ResultRow &a, const ResultRow &b) { return a.mae_m < b.mae_m; });

        switch (format)
        {
        case ReportFormat::Csv:
            for (const auto &r : group)
                os << csv_field(r.scenario) << ',' << csv_field(r.method) << ',' << csv_field(r.params) << ',' << format_number(r.mae_m)
                   << ',' << format_number(r.mean_runtime_ms) << ',' << r.n_samples << '\n';
            break;
        case ReportFormat::Markdown:
            os << "### " << sc << "\n\n| Method | Params | MAE (m) | Run-time (ms) | n |\n|---|---|---:|---:|---:|\n";
            for (std::size_t i = 0; i < group.size(); ++i)
            {
                const auto &r = group[i];
                const std::string mae = fixed(r.mae_m, 2);
                os << "| " << (i == 0 ? "**" + r.method + "**" : r.method) << " | " << r.params << " | "
                   << (i == 0 ? "**" + mae + "**" : mae) << " | " << fixed(r.mean_runtime_ms, 3) << " | " << r.n_samples << " |\n";
            }
            os << '\n';
            break;
        case ReportFormat::Text:
            os << sc << '\n';
            os << std::left << std::setw(16) << "method" << std::setw(28) << "params" << std::right << std::setw(10) << "MAE(m)"
               << std::setw(14) << "runtime(ms)" << std::setw(8) << "n" << '\n';
            for (const auto &r : group)
                os << std::left << std::setw(16) << r.method << std::setw(28) << r.params << std::right << std::setw(10)
                   << fixed(r.mae_m, 2) << std::setw(14) << fixed(r.mean_runtime_ms, 3) << std::setw(8) << r.n_samples << '\n';
            os << '\n';
            break;
        }
    }
    return os.str();
}

std::vector<ResultRow> parse_results_csv(const std::string &csv)
{
    std::istringstream in(csv);
    std::string line;
    std::vector<ResultRow> rows;
    if (!std::getline(in, line) || line.rfind("scenario,method", 0) != 0)
        throw std::invalid_argument("parse_results_csv: missing header");
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        const auto f = split_csv_line(line);
        if (f.size() != 6)
            throw std::invalid_argument("parse_results_csv: expected 6 fields in '" + line + "'");
        rows.push_back({f[0], f[1], f[2], parse_double(f[3]), parse_double(f[4]), std::stoi(f[5])});
    }
    return rows;
}

void write_sample_records(const fs::path &path, const std::vector<SampleRecord> &records, bool append)
{
    const bool header = !append || !fs::exists(path) || fs::file_size(path) == 0;
    std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open " + path.string());
    if (header)
        out << "scene_id,ue_id,method,error_m,runtime_ms,map_source,meas_source\n";
    for (const auto &r : records)
        out << r.scene_id << ',' << r.ue_id << ',' << r.method << ',' << format_number(r.error_m) << ',' << format_number(r.runtime_ms)
            << ',' << csv_field(r.map_source) << ',' << csv_field(r.meas_source) << '\n';
}

} // namespace radioloc
