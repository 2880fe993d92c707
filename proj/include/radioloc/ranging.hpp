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

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace radioloc
{

using Vec2 = Eigen::Vector2d;

// Pixel centers sit at (x, y) * cell_m.
inline Vec2 to_meters(const Pixel &p, double cell_m) { return {p.x * cell_m, p.y * cell_m}; }

struct RangingInstance
{
    std::vector<Vec2> anchors;
    std::vector<double> ranges_m;
    std::optional<Vec2> truth;

    void validate(std::size_t min_anchors) const;
};

struct SolverReport
{
    Vec2 estimate = Vec2::Zero();
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;
    std::vector<Vec2> trace;  // iterate after every projection / step, when requested
};

// d_j = (toa_j(ue) + noise) * c, floored at zero.
RangingInstance toa_to_instance(std::span<const ToAMap> toa_maps, const Pixel &ue, double noise_s, std::uint64_t seed);

struct PocsOptions
{
    int max_iter = 500;
    double tol_m = 1e-6;
    double relaxation = 1.0;
    std::optional<Vec2> start;  // defaults to the anchor centroid
    bool record_trace = false;
};

// Cyclic projections onto the discs |x - a_j| <= d_j.
SolverReport pocs_localize(const RangingInstance &inst, const PocsOptions &opts = {});

// Squared-range least squares solved exactly as a generalized trust region subproblem,
// with the multiplier located by bisection. Throws on collinear anchors.
SolverReport gtrs_bisection_localize(const RangingInstance &inst, double tol = 1e-10, int max_iter = 200);

struct CorrentropyOptions
{
    double sigma_m = 5.0;
    int max_iter = 100;
    double tol_m = 1e-9;
};

// Maximum correntropy via half-quadratic reweighting. Started from the GTRS solution and from
// leave-one-out GTRS solutions; the run with the highest correntropy wins (reported as residual).
SolverReport correntropy_localize(const RangingInstance &inst, const CorrentropyOptions &opts = {});

struct LogDistanceParams
{
    double l0_db = 40.0;
    double path_exponent = 2.0;
    double cell_m = 1.0;
    double max_range_m = 0.0;  // ranges are capped here when positive
};

// Inverts pl = -(l0 + 10 n log10(d / cell)) for d.
double log_distance_range(double pl_db, const LogDistanceParams &params);

// Lateration from RSS through a log-distance model, solved with GTRS.
SolverReport rss_log_distance_localize(std::span<const Vec2> anchors, std::span<const double> pl_db, const LogDistanceParams &params);

} // namespace radioloc
