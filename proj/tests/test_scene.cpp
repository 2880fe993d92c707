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

#include "radioloc/scene.hpp"
#include "radioloc/seeds.hpp"

#include <doctest.h>

#include <set>

using namespace radioloc;

TEST_CASE("grid indexing is 1-based row-major")
{
    Grid<int> g(4, 0);
    g({2, 3}) = 7;
    CHECK(g[std::size_t(2 * 4 + 1)] == 7);
    CHECK(g.pixel(g.index({4, 1})) == Pixel{4, 1});
    CHECK_FALSE(g.contains({0, 1}));
    CHECK_FALSE(g.contains({5, 5}));
    CHECK_THROWS_AS(g.at({5, 1}), std::out_of_range);
}

TEST_CASE("octile and euclidean distances")
{
    CHECK(euclidean({1, 1}, {4, 5}) == doctest::Approx(5.0));
    CHECK(octile({1, 1}, {4, 5}) == doctest::Approx(1 + 3 * std::sqrt(2.0)));
    CHECK(octile({3, 3}, {3, 3}) == 0.0);
}

TEST_CASE("generated city maps satisfy their invariants")
{
    const BuildingBounds bounds{3, 10, 200, 0.6};
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
    {
        const CityMap m = generate_city_map(seed, 48, 12, bounds);
        CHECK_NOTHROW(m.validate());
        CHECK(m.size_px == 48);
        CHECK(exterior_connected(m));
        CHECK(m.building_fraction() <= bounds.max_fraction);
        CHECK(m.building_fraction() > 0.0);
        for (std::size_t i = 0; i < m.cars.cells(); ++i)
            CHECK(m.cars[i] == 0);
    }
}

TEST_CASE("generation is deterministic in the seed")
{
    CHECK(generate_city_map(5, 32, 6) == generate_city_map(5, 32, 6));
    CHECK_FALSE(generate_city_map(5, 32, 6) == generate_city_map(6, 32, 6));
}

TEST_CASE("impossible building requests fail with a message")
{
    CHECK_THROWS_AS(generate_city_map(1, 16, 50, BuildingBounds{6, 8, 5, 0.1}), std::runtime_error);
    CHECK_THROWS(generate_city_map(1, 16, 2, BuildingBounds{5, 3, 10, 0.5}));
    CHECK_THROWS_AS(generate_city_map(1, 8, 2), std::invalid_argument);
}

TEST_CASE("exterior connectivity detects a dividing wall")
{
    CityMap m(8);
    CHECK(exterior_connected(m));
    for (int y = 1; y <= 8; ++y)
        m.buildings({4, y}) = 1;
    CHECK_FALSE(exterior_connected(m));
    m.buildings({4, 5}) = 0;
    CHECK(exterior_connected(m));
}

TEST_CASE("place_points returns distinct exterior cells")
{
    const CityMap m = generate_city_map(3, 32, 8);
    const auto pts = place_points(m, 100, 9);
    CHECK(pts.size() == 100);
    std::set<std::pair<int, int>> seen;
    for (const auto &p : pts)
    {
        CHECK(m.is_exterior(p));
        seen.insert({p.x, p.y});
    }
    CHECK(seen.size() == 100);
    CHECK(place_points(m, 100, 9) == pts);
    CHECK_THROWS_AS(place_points(m, m.exterior_count() + 1, 1), std::invalid_argument);
}

TEST_CASE("scene validation")
{
    Scene s{CityMap(8), {{1, 1}, {8, 8}}, {{4, 4}}};
    CHECK_NOTHROW(s.validate());
    s.city.buildings({4, 4}) = 1;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.city.buildings({4, 4}) = 0;
    s.bs_locations.push_back({1, 1});
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.bs_locations = {{9, 1}};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("derived seeds differ per tag and are stable")
{
    CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
    CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
    CHECK(derive_seed(1, {}) != derive_seed(2, {}));
}
