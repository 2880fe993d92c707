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

#include "radioloc/ranging.hpp"
#include "radioloc/scene.hpp"

#include <Eigen/Core>

#include <memory>
#include <span>
#include <vector>

namespace radioloc
{

// Channels x pixels; each row is one N x N image in row-major order.
using Tensor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// What a localizer knows about one environment: the city, the BS positions, and its own
// (estimated) gray-level radio map for every BS.
struct LocalizerScene
{
    int id = 0;
    CityMap city;
    std::vector<Pixel> bs;
    std::vector<Grid<double>> radio_maps;
};

struct Sample
{
    std::shared_ptr<const LocalizerScene> scene;
    std::vector<double> p_meas;  // gray level, one per BS
    Pixel truth;
    int ue_id = 0;

    void validate() const;
};

// [J radio maps | J constant RSS images | J one-hot BS images | city map], 3J+1 channels.
Tensor encode_inputs(const Sample &sample);

struct CenterOfMass
{
    double x = 0.0;
    double y = 0.0;
    double mass = 0.0;  // sum of the heat map
};

inline constexpr double kComEpsilon = 1e-8;

// Weighted mean of 1-indexed pixel coordinates. Throws when |sum h| < kComEpsilon.
CenterOfMass center_of_mass(std::span<const double> h, int n);
inline CenterOfMass center_of_mass(const Grid<double> &h) { return center_of_mass(h.data(), h.size()); }

// d(loss)/dh given d(loss)/d(mu_x) and d(loss)/d(mu_y).
void center_of_mass_backward(const CenterOfMass &com, int n, double d_mux, double d_muy, std::span<double> dh);

// Mean Euclidean distance, multiplied by scale (e.g. cell_m for meters).
double mae(std::span<const Vec2> estimates, std::span<const Vec2> truths, double scale = 1.0);

// -sum_j (R_j - p_j)^2 / (2 sigma^2) on exterior cells, -inf inside buildings.
Grid<double> analytic_log_heatmap(const Sample &sample, double sigma_gray);
// exp of the log heat map shifted so that its maximum is 1.
Grid<double> analytic_heatmap(const Sample &sample, double sigma_gray);

enum class HeatmapReadout
{
    CenterOfMass,
    Argmax
};

Vec2 analytic_localize(const Sample &sample, double sigma_gray, HeatmapReadout readout = HeatmapReadout::CenterOfMass);

} // namespace radioloc
