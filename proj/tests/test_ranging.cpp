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

#include "oracles.hpp"

#include "radioloc/ranging.hpp"
#include "radioloc/seeds.hpp"

#include <doctest.h>

#include <random>

using namespace radioloc;

namespace
{

RangingInstance random_instance(std::uint64_t seed, int anchors, double noise_m = 0.0)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::normal_distribution<double> n(0.0, 1.0);
    RangingInstance inst;
    inst.truth = Vec2(u(rng), u(rng));
    for (int j = 0; j < anchors; ++j)
    {
        inst.anchors.emplace_back(u(rng), u(rng));
        inst.ranges_m.push_back(std::max(0.0, (*inst.truth - inst.anchors.back()).norm() + noise_m * n(rng)));
    }
    return inst;
}

} // namespace

TEST_CASE("GTRS recovers exact ranges")
{
    for (std::uint64_t s = 1; s <= 50; ++s)
    {
        const auto inst = random_instance(s, 3 + int(s % 4));
        const auto rep = gtrs_bisection_localize(inst);
        CHECK((rep.estimate - *inst.truth).norm() < 1e-6);
    }
}

TEST_CASE("GTRS matches the squared-range least squares oracle on noisy ranges")
{
    for (std::uint64_t s = 1; s <= 6; ++s)
    {
        const auto inst = random_instance(100 + s, 5, 3.0);
        const auto rep = gtrs_bisection_localize(inst);
        const auto ref = oracle::squared_range_ls(inst.anchors, inst.ranges_m, -20.0, 120.0);
        CHECK((rep.estimate - ref).norm() < 1e-4);
    }
}

TEST_CASE("GTRS input checks")
{
    RangingInstance line;
    line.anchors = {{0, 0}, {1, 1}, {2, 2}, {5, 5}};
    line.ranges_m = {1, 1, 1, 1};
    CHECK_THROWS_AS(gtrs_bisection_localize(line), std::invalid_argument);
    RangingInstance two;
    two.anchors = {{0, 0}, {1, 0}};
    two.ranges_m = {1, 1};
    CHECK_THROWS_AS(gtrs_bisection_localize(two), std::invalid_argument);
    RangingInstance neg = random_instance(1, 4);
    neg.ranges_m[0] = -1;
    CHECK_THROWS_AS(gtrs_bisection_localize(neg), std::invalid_argument);
}

TEST_CASE("POCS on tangent discs returns the touching point")
{
    RangingInstance inst;
    inst.anchors = {{0, 0}, {10, 0}};
    inst.ranges_m = {5, 5};
    CHECK((pocs_localize(inst).estimate - Vec2(5, 0)).norm() < 1e-6);
    inst.anchors = {{0, 0}, {0, 6}};
    inst.ranges_m = {2, 4};
    CHECK((pocs_localize(inst).estimate - Vec2(0, 2)).norm() < 1e-6);
}

TEST_CASE("POCS iterates approach every point of the intersection monotonically")
{
    for (std::uint64_t s = 1; s <= 20; ++s)
    {
        auto inst = random_instance(s, 4);
        for (auto &d : inst.ranges_m)
            d += 2.0;  // truth strictly inside every disc
        PocsOptions o;
        o.record_trace = true;
        o.start = Vec2(-50.0, 150.0);
        const auto rep = pocs_localize(inst, o);
        for (std::size_t k = 1; k < rep.trace.size(); ++k)
            REQUIRE((rep.trace[k] - *inst.truth).norm() <= (rep.trace[k - 1] - *inst.truth).norm() + 1e-12);
        CHECK(rep.residual < 1e-10);
    }
}

TEST_CASE("POCS leaves a feasible start untouched")
{
    auto inst = random_instance(3, 4);
    for (auto &d : inst.ranges_m)
        d += 1.0;
    PocsOptions o;
    o.start = inst.truth;
    const auto rep = pocs_localize(inst, o);
    CHECK(rep.iterations == 0);
    CHECK(rep.converged);
    CHECK(rep.estimate == *inst.truth);
}

TEST_CASE("correntropy with a huge kernel reduces to range least squares around GTRS")
{
    const auto inst = random_instance(9, 5, 1e-4);
    CorrentropyOptions o;
    o.sigma_m = 1e6;
    const auto mcc = correntropy_localize(inst, o);
    const auto gtrs = gtrs_bisection_localize(inst);
    CHECK((mcc.estimate - gtrs.estimate).norm() < 1e-3);
}

TEST_CASE("correntropy suppresses a single outlier")
{
    int wins = 0;
    for (std::uint64_t s = 1; s <= 20; ++s)
    {
        auto inst = random_instance(200 + s, 5, 0.5);
        inst.ranges_m[s % 5] += 50.0;
        const double e_mcc = (correntropy_localize(inst).estimate - *inst.truth).norm();
        const double e_gtrs = (gtrs_bisection_localize(inst).estimate - *inst.truth).norm();
        wins += e_mcc < e_gtrs;
    }
    CHECK(wins >= 16);
    CHECK_THROWS_AS(correntropy_localize(random_instance(1, 4), CorrentropyOptions{0.0, 10, 1e-9}), std::invalid_argument);
}

TEST_CASE("log-distance range inversion")
{
    LogDistanceParams p{40.0, 2.0, 1.0, 0.0};
    CHECK(log_distance_range(-40.0, p) == doctest::Approx(1.0));
    CHECK(log_distance_range(-60.0, p) == doctest::Approx(10.0));
    p.max_range_m = 5.0;
    CHECK(log_distance_range(-60.0, p) == 5.0);
    const SimParams sp;
    CHECK(log_distance_range(pathloss_db(sp, 37.0, 1.0, 0, 0.0), LogDistanceParams{}) == doctest::Approx(37.0));
}

TEST_CASE("RSS lateration is exact in free space")
{
    const CityMap m(40);
    const std::vector<Pixel> bs{{3, 3}, {38, 5}, {20, 37}, {35, 33}};
    const Pixel ue{17, 12};
    std::vector<Vec2> anchors;
    std::vector<double> pl;
    for (const auto &b : bs)
    {
        anchors.push_back(to_meters(b, 1.0));
        pl.push_back(simulate_radio_map(m, b).pl_db(ue));
    }
    const auto rep = rss_log_distance_localize(anchors, pl, LogDistanceParams{});
    CHECK((rep.estimate - to_meters(ue, 1.0)).norm() < 1e-6);
}

TEST_CASE("ToA instances carry anchors, ranges and truth in meters")
{
    CityMap m(20, 2.0);
    const std::vector<ToAMap> toa{simulate_toa(m, {1, 1}), simulate_toa(m, {20, 1}), simulate_toa(m, {1, 20})};
    const auto inst = toa_to_instance(toa, {4, 5}, 0.0, 1);
    CHECK(inst.anchors[0] == Vec2(2.0, 2.0));
    CHECK(inst.ranges_m[0] == doctest::Approx(10.0));
    CHECK(*inst.truth == Vec2(8.0, 10.0));
    const auto noisy_a = toa_to_instance(toa, {4, 5}, 1e-8, 5);
    const auto noisy_b = toa_to_instance(toa, {4, 5}, 1e-8, 5);
    CHECK(noisy_a.ranges_m == noisy_b.ranges_m);
    CHECK(noisy_a.ranges_m != inst.ranges_m);
}
