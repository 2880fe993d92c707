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

#include "radioloc/ranging.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace radioloc
{

void RangingInstance::validate(std::size_t min_anchors) const
{
    if (anchors.size() != ranges_m.size())
        throw std::invalid_argument("RangingInstance: anchors and ranges differ in length");
    if (anchors.size() < min_anchors)
        throw std::invalid_argument("RangingInstance: need at least " + std::to_string(min_anchors) + " anchors, got " +
                                    std::to_string(anchors.size()));
    for (double d : ranges_m)
        if (!(d >= 0.0))
            throw std::invalid_argument("RangingInstance: ranges must be non-negative");
}

RangingInstance toa_to_instance(std::span<const ToAMap> toa_maps, const Pixel &ue, double noise_s, std::uint64_t seed)
{
    RangingInstance inst;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_s > 0 ? noise_s : 1.0);
    for (const auto &toa : toa_maps)
    {
        double t = toa.toa_s.at(ue);
        if (noise_s > 0)
            t += noise(rng);
        inst.anchors.push_back(to_meters(toa.tx, toa.cell_m));
        inst.ranges_m.push_back(std::max(0.0, t * kSpeedOfLight));
    }
    if (!toa_maps.empty())
        inst.truth = to_meters(ue, toa_maps.front().cell_m);
    return inst;
}

SolverReport pocs_localize(const RangingInstance &inst, const PocsOptions &opts)
{
    inst.validate(2);
    SolverReport rep;
    Vec2 x = Vec2::Zero();
    if (opts.start)
        x = *opts.start;
    else
    {
        for (const auto &a : inst.anchors)
            x += a;
        x /= double(inst.anchors.size());
    }
    if (opts.record_trace)
        rep.trace.push_back(x);

    for (int cycle = 0; cycle < opts.max_iter; ++cycle)
    {
        const Vec2 start = x;
        for (std::size_t j = 0; j < inst.anchors.size(); ++j)
        {
            const Vec2 off = x - inst.anchors[j];
            const double r = off.norm();
            if (r > inst.ranges_m[j])
            {
                const Vec2 proj = inst.anchors[j] + off * (inst.ranges_m[j] / r);
                x += opts.relaxation * (proj - x);
            }
            if (opts.record_trace)
                rep.trace.push_back(x);
        }
        const double step = (x - start).norm();
        if (step > 0.0)
            ++rep.iterations;
        if (step < opts.tol_m)
        {
            rep.converged = true;
            break;
        }
    }
    rep.estimate = x;
    for (std::size_t j = 0; j < inst.anchors.size(); ++j)
    {
        const double excess = std::max(0.0, (x - inst.anchors[j]).norm() - inst.ranges_m[j]);
        rep.residual += excess * excess;
    }
    return rep;
}

SolverReport gtrs_bisection_localize(const RangingInstance &inst, double tol, int max_iter)
{
    inst.validate(3);
    const auto m = Eigen::Index(inst.anchors.size());
    // Work relative to the anchor centroid to keep the normal equations well conditioned.
    Vec2 c = Vec2::Zero();
    for (const auto &p : inst.anchors)
        c += p;
    c /= double(m);
    Eigen::MatrixXd a(m, 3);
    Eigen::VectorXd b(m);
    for (Eigen::Index j = 0; j < m; ++j)
    {
        const Vec2 p = inst.anchors[std::size_t(j)] - c;
        a.row(j) << -2.0 * p.x(), -2.0 * p.y(), 1.0;
        b(j) = inst.ranges_m[std::size_t(j)] * inst.ranges_m[std::size_t(j)] - p.squaredNorm();
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto sv = svd.singularValues();
    if (sv(2) <= 1e-9 * sv(0))
        throw std::invalid_argument("gtrs_bisection_localize: anchors are collinear");

    const Eigen::Matrix3d ata = a.transpose() * a;
    const Eigen::Vector3d atb = a.transpose() * b;
    const Eigen::Matrix3d d = Eigen::Vector3d(1.0, 1.0, 0.0).asDiagonal();
    const Eigen::Vector3d f(0.0, 0.0, -0.5);

    auto solve = [&](double lambda) -> Eigen::Vector3d { return (ata + lambda * d).ldlt().solve(atb - lambda * f); };
    auto phi = [&](const Eigen::Vector3d &y) { return y(0) * y(0) + y(1) * y(1) - y(2); };

    // phi is decreasing on the interval where ata + lambda * d is positive definite.
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix3d> ges(d, ata, Eigen::EigenvaluesOnly);
    const double lower = -1.0 / ges.eigenvalues().maxCoeff();

    SolverReport rep;
    double lo = lower + 1e-12 * std::max(1.0, std::abs(lower));
    double hi = std::max(1.0, std::abs(lower));
    Eigen::Vector3d y = solve(lo);
    if (phi(y) < 0.0)
    {
        rep.estimate = y.head<2>() + c;
        rep.residual = (a * y - b).squaredNorm();
        return rep;
    }
    for (int k = 0; k < 200 && phi(solve(hi)) > 0.0; ++k)
        hi *= 2.0;

    for (int it = 0; it < max_iter; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        y = solve(mid);
        const double v = phi(y);
        rep.iterations = it + 1;
        if (std::abs(v) < tol * (1.0 + std::abs(y(2))))
        {
            rep.converged = true;
            break;
        }
        (v > 0.0 ? lo : hi) = mid;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid)))
        {
            rep.converged = std::abs(v) < 1e3 * tol * (1.0 + std::abs(y(2)));
            break;
        }
    }
    rep.estimate = y.head<2>() + c;
    rep.residual = (a * y - b).squaredNorm();
    return rep;
}

namespace
{

double correntropy(const RangingInstance &inst, const Vec2 &x, double two_s2)
{
    double c = 0.0;
    for (std::size_t j = 0; j < inst.anchors.size(); ++j)
    {
        const double r = inst.ranges_m[j] - (x - inst.anchors[j]).norm();
        c += std::exp(-r * r / two_s2);
    }
    return c;
}

SolverReport half_quadratic(const RangingInstance &inst, Vec2 x, const CorrentropyOptions &opts)
{
    SolverReport rep;
    const double two_s2 = 2.0 * opts.sigma_m * opts.sigma_m;
    for (int it = 0; it < opts.max_iter; ++it)
    {
        Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
        Vec2 g = Vec2::Zero();
        for (std::size_t j = 0; j < inst.anchors.size(); ++j)
        {
            const Vec2 off = x - inst.anchors[j];
            const double dist = off.norm();
            if (dist < 1e-12)
                continue;
            const Vec2 u = off / dist;
            const double r = inst.ranges_m[j] - dist;
            const double w = std::exp(-r * r / two_s2);
            h += w * u * u.transpose();
            g += w * r * u;
        }
        if (std::abs(h.determinant()) < 1e-12 * std::max(1.0, h.squaredNorm()))
            break;
        const Vec2 step = h.ldlt().solve(g);
        x += step;
        rep.iterations = it + 1;
        if (step.norm() < opts.tol_m)
        {
            rep.converged = true;
            break;
        }
    }
    rep.estimate = x;
    rep.residual = correntropy(inst, x, two_s2);
    return rep;
}

} // namespace

SolverReport correntropy_localize(const RangingInstance &inst, const CorrentropyOptions &opts)
{
    inst.validate(3);
    if (!(opts.sigma_m > 0.0))
        throw std::invalid_argument("correntropy_localize: sigma_m must be positive");

    // Starts: GTRS on all anchors, and with each anchor left out when enough remain.
    std::vector<Vec2> starts{gtrs_bisection_localize(inst).estimate};
    if (inst.anchors.size() >= 4)
        for (std::size_t drop = 0; drop < inst.anchors.size(); ++drop)
        {
            RangingInstance sub;
            for (std::size_t j = 0; j < inst.anchors.size(); ++j)
                if (j != drop)
                {
                    sub.anchors.push_back(inst.anchors[j]);
                    sub.ranges_m.push_back(inst.ranges_m[j]);
                }
            try
            {
                starts.push_back(gtrs_bisection_localize(sub).estimate);
            }
            catch (const std::invalid_argument &)
            {
                // collinear subset
            }
        }

    SolverReport best;
    best.residual = -1.0;
    for (const auto &x0 : starts)
    {
        SolverReport rep = half_quadratic(inst, x0, opts);
        if (rep.residual > best.residual)
            best = rep;
    }
    return best;
}

double log_distance_range(double pl_db, const LogDistanceParams &params)
{
    const double d = params.cell_m * std::pow(10.0, (-pl_db - params.l0_db) / (10.0 * params.path_exponent));
    return params.max_range_m > 0.0 ? std::min(d, params.max_range_m) : d;
}

SolverReport rss_log_distance_localize(std::span<const Vec2> anchors, std::span<const double> pl_db, const LogDistanceParams &params)
{
    if (anchors.size() != pl_db.size())
        throw std::invalid_argument("rss_log_distance_localize: anchors and measurements differ in length");
    RangingInstance inst;
    inst.anchors.assign(anchors.begin(), anchors.end());
    for (double pl : pl_db)
        inst.ranges_m.push_back(log_distance_range(pl, params));
    return gtrs_bisection_localize(inst);
}

} // namespace radioloc
