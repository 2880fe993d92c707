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

#include "radioloc/dataset.hpp"
#include "radioloc/heatloc.hpp"
#include "radioloc/ranging.hpp"
#include "radioloc/train.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace radioloc
{

// How far the localizer's radio maps are from the world that produced the measurements.
struct Scenario
{
    std::string name;
    SimParams map_source_params;
    SimParams meas_source_params;
    int cars = 0;
    double map_noise_gray = 0.01;  // iid noise on localizer-side maps, fixed per scene and BS
    double meas_noise_db = 0.0;
    double toa_noise_s = 0.0;

    void validate() const;
};

inline constexpr const char *kScenarioDpm = "SIM-DPM";
inline constexpr const char *kScenarioDpmToIrt = "SIM-DPM2IRT";
inline constexpr const char *kScenarioDpmToIrtCars = "SIM-DPM2IRT-CARS";

// Builds one of the three named scenarios from the parameters recorded in a manifest.
Scenario make_scenario(const std::string &name, const DatasetManifest &manifest);

struct EvalSample
{
    Sample sample;
    int scene_id = 0;
    std::string map_source;   // provenance of the localizer-side maps
    std::string meas_source;  // provenance of the measurements
    RangingInstance toa;      // shared by the range-based methods
};

struct ScenarioData
{
    Scenario scenario;
    Split split = Split::Test;
    double cell_m = 1.0;
    std::vector<std::shared_ptr<const LocalizerScene>> scenes;
    std::vector<EvalSample> samples;

    std::vector<Sample> plain_samples() const;
};

// Loads a split and derives localizer maps and measurements for the scenario.
// All randomness is keyed on (seed, scene, BS, UE) so every method sees identical draws.
ScenarioData make_scenario_data(const std::filesystem::path &dir, const DatasetManifest &manifest, const Scenario &scenario,
                                Split split, std::uint64_t seed);

struct MethodConfig
{
    std::string method;  // knn | aknn | heatmap | locunet | pocs | gtrs | mcc | rss-lateration
    int k = 16;
    bool weighted = false;
    double alpha = 1.1;
    int k_max = 16;
    double sigma_gray = 0.05;
    bool argmax = false;
    std::filesystem::path checkpoint;
    double mcc_sigma_m = 5.0;
    int max_iter = 500;

    std::string summary() const;
};

bool is_known_method(const std::string &method);

struct SampleRecord
{
    int scene_id = 0;
    int ue_id = 0;
    std::string method;
    double error_m = 0.0;
    double runtime_ms = 0.0;
    std::string map_source;
    std::string meas_source;
};

struct ResultRow
{
    std::string scenario;
    std::string method;
    std::string params;
    double mae_m = 0.0;
    double mean_runtime_ms = 0.0;
    int n_samples = 0;

    friend bool operator==(const ResultRow &, const ResultRow &) = default;
};

struct RunOptions
{
    bool timing = true;
};

struct ScenarioRun
{
    std::vector<ResultRow> rows;
    std::vector<SampleRecord> records;
};

// Every method sees the same samples. Missing checkpoints are reported before any method runs.
ScenarioRun run_methods(const ScenarioData &data, const std::vector<MethodConfig> &methods, const RunOptions &opts = {});
ScenarioRun run_scenario(const Scenario &scenario, const std::filesystem::path &dir, const DatasetManifest &manifest,
                         const std::vector<MethodConfig> &methods, std::uint64_t seed, const RunOptions &opts = {});

// Coarse grid search on the validation split; returns the candidate with the lowest MAE.
MethodConfig grid_search(const ScenarioData &val, const std::vector<MethodConfig> &candidates);
std::vector<MethodConfig> default_grid(const std::string &method);

TrainResult train_scenario(const std::filesystem::path &dir, const DatasetManifest &manifest, const Scenario &scenario,
                           const TrainConfig &config, std::uint64_t seed);

enum class ReportFormat
{
    Text,
    Csv,
    Markdown
};

// One table per scenario, methods sorted by MAE.
std::string report(const std::vector<ResultRow> &rows, ReportFormat format);
std::vector<ResultRow> parse_results_csv(const std::string &csv);

void write_sample_records(const std::filesystem::path &path, const std::vector<SampleRecord> &records, bool append = false);

} // namespace radioloc
