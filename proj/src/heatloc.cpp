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

#include "radioloc/heatloc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace radioloc
{

void Sample::validate() const
{
    if (!scene)
        throw std::invalid_argument("Sample: missing scene");
    const auto j = scene->bs.size();
    if (j == 0 || scene->radio_maps.size() != j || p_meas.size() != j)
        throw std::invalid_argument("Sample: need one radio map and one measurement per BS");
    const int n = scene->city.size_px;
    for (const auto &rm : scene->radio_maps)
        if (rm.size() != n)
            throw std::invalid_argument("Sample: radio map size does not match the city map");
    for (double p : p_meas)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("Sample: measured gray level " + std::to_string(p) + " outside [0,1]");
    if (!scene->city.buildings.contains(truth))
        throw std::invalid_argument("Sample: truth outside the grid");
    if (!scene->city.is_exterior(truth))
        throw std::invalid_argument("Sample: truth " + to_string(truth) + " inside a building");
}

Tensor encode_inputs(const Sample &sample)
{
    sample.validate();
    const auto &sc = *sample.scene;
    const int n = sc.city.size_px;
    const auto j_count = Eigen::Index(sc.bs.size());
    const auto px = Eigen::Index(n) * n;
    Tensor t = Tensor::Zero(3 * j_count + 1, px);
    for (Eigen::Index j = 0; j < j_count; ++j)
    {
        const auto &rm = sc.radio_maps[std::size_t(j)];
        for (Eigen::Index i = 0; i < px; ++i)
        {
            const double v = rm[std::size_t(i)];
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument("encode_inputs: radio map value outside [0,1]");
            t(j, i) = v;
        }
        t.row(j_count + j).setConstant(sample.p_meas[std::size_t(j)]);
        t(2 * j_count + j, Eigen::Index(sc.city.buildings.index(sc.bs[std::size_t(j)]))) = 1.0;
    }
    for (Eigen::Index i = 0; i < px; ++i)
        t(3 * j_count, i) = sc.city.buildings[std::size_t(i)] ? 1.0 : 0.0;
    return t;
}

CenterOfMass center_of_mass(std::span<const double> h, int n)
{
    if (h.size() != std::size_t(n) * std::size_t(n))
        throw std::invalid_argument("center_of_mass: heat map is not " + std::to_string(n) + "x" + std::to_string(n));
    CenterOfMass com;
    double sx = 0.0, sy = 0.0;
    for (int y = 1; y <= n; ++y)
        for (int x = 1; x <= n; ++x)
        {
            const double v = h[std::size_t(y - 1) * std::size_t(n) + std::size_t(x - 1)];
            com.mass += v;
            sx += x * v;
            sy += y * v;
        }
    if (!(std::abs(com.mass) >= kComEpsilon))
        throw std::domain_error("center_of_mass: degenerate heat map (|sum| = " + std::to_string(std::abs(com.mass)) + ")");
    com.x = sx / com.mass;
    com.y = sy / com.mass;
    return com;
}

void center_of_mass_backward(const CenterOfMass &com, int n, double d_mux, double d_muy, std::span<double> dh)
{
    for (int y = 1; y <= n; ++y)
        for (int x = 1; x <= n; ++x)
            dh[std::size_t(y - 1) * std::size_t(n) + std::size_t(x - 1)] = (d_mux * (x - com.x) + d_muy * (y - com.y)) / com.mass;
}

double mae(std::span<const Vec2> estimates, std::span<const Vec2> truths, double scale)
{
    if (estimates.size() != truths.size())
        throw std::invalid_argument("mae: " + std::to_string(estimates.size()) + " estimates vs " + std::to_string(truths.size()) + " truths");
    if (estimates.empty())
        throw std::invalid_argument("mae: empty input");
    double sum = 0.0;
    for (std::size_t k = 0; k < estimates.size(); ++k)
        sum += (estimates[k] - truths[k]).norm();
    return scale * sum / double(estimates.size());
}

Grid<double> analytic_log_heatmap(const Sample &sample, double sigma_gray)
{
    sample.validate();
    if (!(sigma_gray > 0.0))
        throw std::invalid_argument("analytic_heatmap: sigma must be positive");
    const auto &sc = *sample.scene;
    const double scale = 1.0 / (2.0 * sigma_gray * sigma_gray);
    Grid<double> out(sc.city.size_px, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < out.cells(); ++i)
    {
        if (sc.city.buildings[i])
            continue;
        double ss = 0.0;
        for (std::size_t j = 0; j < sc.radio_maps.size(); ++j)
        {
            const double r = sc.radio_maps[j][i] - sample.p_meas[j];
            ss += r * r;
        }
        out[i] = -scale * ss;
    }
    return out;
}

Grid<double> analytic_heatmap(const Sample &sample, double sigma_gray)
{
    Grid<double> h = analytic_log_heatmap(sample, sigma_gray);
    const double top = *std::max_element(h.data().begin(), h.data().end());
    for (auto &v : h.data())
        v = std::isfinite(v) ? std::exp(v - top) : 0.0;
    return h;
}

Vec2 analytic_localize(const Sample &sample, double sigma_gray, HeatmapReadout readout)
{
    const Grid<double> h = analytic_heatmap(sample, sigma_gray);
    if (readout == HeatmapReadout::Argmax)
    {
        const auto it = std::max_element(h.data().begin(), h.data().end());
        const Pixel p = h.pixel(std::size_t(it - h.data().begin()));
        return {double(p.x), double(p.y)};
    }
    const auto com = center_of_mass(h);
    return {com.x, com.y};
}

} // namespace radioloc
