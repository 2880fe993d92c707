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
#include "test_util.hpp"

#include "radioloc/heatloc.hpp"

#include <doctest.h>

#include <random>

using namespace radioloc;

TEST_CASE("center of mass closed forms")
{
    const int n = 64;
    std::vector<double> h(n * n, 1.0);
    auto c = center_of_mass(h, n);
    CHECK(c.x == doctest::Approx(32.5).epsilon(1e-12));
    CHECK(c.y == doctest::Approx(32.5).epsilon(1e-12));

    std::fill(h.begin(), h.end(), 0.0);
    h[std::size_t(19 * n + 9)] = 1.0;
    c = center_of_mass(h, n);
    CHECK(c.x == 10.0);
    CHECK(c.y == 20.0);

    std::fill(h.begin(), h.end(), 0.0);
    h[0] = 1.0;
    h[2] = 3.0;
    c = center_of_mass(h, n);
    CHECK(c.x == doctest::Approx(2.5));
    CHECK(c.y == doctest::Approx(1.0));
}

TEST_CASE("center of mass guards a vanishing denominator")
{
    std::vector<double> h(16, 0.0);
    CHECK_THROWS_AS(center_of_mass(h, 4), std::domain_error);
    h[0] = 1.0;
    h[5] = -1.0;
    CHECK_THROWS_AS(center_of_mass(h, 4), std::domain_error);
    h[5] = -0.5;
    CHECK_NOTHROW(center_of_mass(h, 4));
    CHECK_THROWS_AS(center_of_mass(h, 5), std::invalid_argument);
}

TEST_CASE("center of mass agrees with the direct oracle, including negative entries")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-0.5, 1.0);
    for (int t = 0; t < 20; ++t)
    {
        std::vector<double> h(100);
        for (auto &v : h)
            v = u(rng);
        const auto [ox, oy] = oracle::com(h, 10);
        const auto c = center_of_mass(h, 10);
        CHECK(c.x == doctest::Approx(ox).epsilon(1e-12));
        CHECK(c.y == doctest::Approx(oy).epsilon(1e-12));
    }
}

TEST_CASE("center of mass lies in the convex hull of a nonnegative support")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> h(144, 0.0);
    for (int y = 4; y <= 7; ++y)
        for (int x = 2; x <= 9; ++x)
            h[std::size_t((y - 1) * 12 + x - 1)] = u(rng);
    const auto c = center_of_mass(h, 12);
    CHECK(c.x >= 2.0);
    CHECK(c.x <= 9.0);
    CHECK(c.y >= 4.0);
    CHECK(c.y <= 7.0);
}

TEST_CASE("center of mass backward matches finite differences")
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    const int n = 6;
    std::vector<double> h(n * n);
    for (auto &v : h)
        v = u(rng);
    const double wx = 0.7, wy = -1.3;
    const auto c = center_of_mass(h, n);
    std::vector<double> dh(h.size());
    center_of_mass_backward(c, n, wx, wy, dh);
    for (std::size_t i = 0; i < h.size(); ++i)
    {
        auto hp = h, hm = h;
        hp[i] += 1e-6;
        hm[i] -= 1e-6;
        const auto cp = center_of_mass(hp, n), cm = center_of_mass(hm, n);
        const double fd = (wx * (cp.x - cm.x) + wy * (cp.y - cm.y)) / 2e-6;
        CHECK(dh[i] == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("mae examples")
{
    const std::vector<Vec2> a{{0, 0}}, b{{3, 4}};
    CHECK(mae(a, b) == 5.0);
    CHECK(mae(a, b, 2.0) == 10.0);
    CHECK(mae(a, a) == 0.0);
    const std::vector<Vec2> e{{0, 0}, {1, 1}}, t{{3, 4}, {1, 1}};
    CHECK(mae(e, t) == 2.5);
    CHECK_THROWS_AS(mae(a, t), std::invalid_argument);
}

TEST_CASE("input encoding layout")
{
    auto samples = testutil::simulated_samples(3, 20, 5, 1);
    auto s = samples.front();
    s.p_meas[0] = 0.3;
    const Tensor t = encode_inputs(s);
    const auto &sc = *s.scene;
    REQUIRE(t.rows() == 16);
    REQUIRE(t.cols() == 400);
    for (Eigen::Index i = 0; i < t.cols(); ++i)
    {
        CHECK(t(0, i) == sc.radio_maps[0][std::size_t(i)]);
        CHECK(t(5, i) == 0.3);
        CHECK(t(15, i) == double(sc.city.buildings[std::size_t(i)]));
    }
    for (int j = 0; j < 5; ++j)
    {
        CHECK(t.row(10 + j).sum() == 1.0);
        CHECK(t(10 + j, Eigen::Index(sc.city.buildings.index(sc.bs[std::size_t(j)]))) == 1.0);
    }
    CHECK(t.minCoeff() >= 0.0);
    CHECK(t.maxCoeff() <= 1.0);

    s.p_meas[1] = 1.2;
    CHECK_THROWS_AS(encode_inputs(s), std::invalid_argument);
}

TEST_CASE("analytic log heat map is additive over base stations")
{
    const auto s = testutil::simulated_samples(6, 20, 3, 1).front();
    const double sigma = 0.07;
    const auto full = analytic_log_heatmap(s, sigma);
    for (std::size_t i = 0; i < full.cells(); ++i)
    {
        if (s.scene->city.buildings[i])
        {
            CHECK(std::isinf(full[i]));
            continue;
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < 3; ++j)
        {
            const double r = s.scene->radio_maps[j][i] - s.p_meas[j];
            sum += -r * r / (2 * sigma * sigma);
        }
        CHECK(full[i] == doctest::Approx(sum).epsilon(1e-12));
    }
}

TEST_CASE("analytic heat map limits")
{
    const auto samples = testutil::simulated_samples(6, 20, 3, 10);
    const auto &city = samples.front().scene->city;

    // Very wide kernel: uniform over exterior cells.
    double cx = 0, cy = 0;
    for (std::size_t i = 0; i < city.buildings.cells(); ++i)
        if (!city.buildings[i])
        {
            cx += city.buildings.pixel(i).x;
            cy += city.buildings.pixel(i).y;
        }
    cx /= double(city.exterior_count());
    cy /= double(city.exterior_count());
    const Vec2 wide = analytic_localize(samples.front(), 1e6);
    CHECK(wide.x() == doctest::Approx(cx).epsilon(1e-9));
    CHECK(wide.y() == doctest::Approx(cy).epsilon(1e-9));

    // Narrow kernel, noiseless: argmax is the truth.
    for (const auto &s : samples)
    {
        const Vec2 e = analytic_localize(s, 0.01, HeatmapReadout::Argmax);
        CHECK(analytic_heatmap(s, 0.01)(s.truth) == 1.0);
        const auto h = analytic_heatmap(s, 0.01);
        int top = 0;
        for (double v : h.data())
            top += v == 1.0;
        if (top == 1)
        {
            CHECK(e.x() == s.truth.x);
            CHECK(e.y() == s.truth.y);
        }
    }
}

TEST_CASE("single base station heat map depends only on the map value")
{
    auto s = testutil::simulated_samples(1, 16, 1, 1).front();
    const auto h = analytic_heatmap(s, 0.05);
    const auto &rm = s.scene->radio_maps[0];
    for (std::size_t a = 0; a < h.cells(); ++a)
        for (std::size_t b = a + 1; b < h.cells(); ++b)
            if (!s.scene->city.buildings[a] && !s.scene->city.buildings[b] && rm[a] == rm[b])
                CHECK(h[a] == h[b]);
    CHECK_THROWS_AS(analytic_heatmap(s, 0.0), std::invalid_argument);
}
