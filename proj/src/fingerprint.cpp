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

#include "radioloc/fingerprint.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace radioloc
{

namespace
{

void check_query(const FingerprintDB &db, const Eigen::VectorXd &query)
{
    if (db.size() == 0)
        throw std::invalid_argument("fingerprint: empty database");
    if (query.size() != db.vectors.cols())
        throw std::invalid_argument("fingerprint: query has " + std::to_string(query.size()) + " entries, database has " +
                                    std::to_string(db.vectors.cols()));
}

// Reference indices ordered by (distance, index).
std::vector<std::size_t> ranked(const Eigen::VectorXd &dist)
{
    std::vector<std::size_t> idx(std::size_t(dist.size()));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return dist[Eigen::Index(a)] < dist[Eigen::Index(b)]; });
    return idx;
}

} // namespace

FingerprintDB build_fingerprint_db(std::span<const RadioMap> radio_maps, const CityMap &city, int stride)
{
    std::vector<Grid<double>> gray;
    for (const auto &rm : radio_maps)
        gray.push_back(rm.gray);
    return build_fingerprint_db(gray, city, stride);
}

FingerprintDB build_fingerprint_db(std::span<const Grid<double>> radio_maps, const CityMap &city, int stride)
{
    if (stride < 1)
        throw std::invalid_argument("build_fingerprint_db: stride must be >= 1");
    if (radio_maps.empty())
        throw std::invalid_argument("build_fingerprint_db: no radio maps");
    for (const auto &rm : radio_maps)
        if (rm.size() != city.size_px)
            throw std::invalid_argument("build_fingerprint_db: radio map size does not match city map");

    FingerprintDB db;
    db.stride = stride;
    for (int y = 1; y <= city.size_px; y += stride)
        for (int x = 1; x <= city.size_px; x += stride)
            if (city.is_exterior({x, y}))
                db.locations.push_back({x, y});
    if (db.locations.empty())
        throw std::invalid_argument("build_fingerprint_db: no exterior cell on the stride-" + std::to_string(stride) + " lattice");

    db.vectors.resize(Eigen::Index(db.locations.size()), Eigen::Index(radio_maps.size()));
    for (std::size_t m = 0; m < db.locations.size(); ++m)
        for (std::size_t j = 0; j < radio_maps.size(); ++j)
            db.vectors(Eigen::Index(m), Eigen::Index(j)) = radio_maps[j](db.locations[m]);
    return db;
}

LocationEstimate knn_localize(const FingerprintDB &db, const Eigen::VectorXd &query, int k, bool distance_weighted)
{
    check_query(db, query);
    if (k < 1 || std::size_t(k) > db.size())
        throw std::invalid_argument("knn_localize: k=" + std::to_string(k) + " outside [1, " + std::to_string(db.size()) + "]");

    const Eigen::VectorXd dist = (db.vectors.rowwise() - query.transpose()).rowwise().norm();
    const auto order = ranked(dist);
    LocationEstimate est{0.0, 0.0, k};
    double wsum = 0.0;
    for (int i = 0; i < k; ++i)
    {
        const auto m = order[std::size_t(i)];
        const double w = distance_weighted ? 1.0 / std::max(dist[Eigen::Index(m)], 1e-12) : 1.0;
        est.x += w * db.locations[m].x;
        est.y += w * db.locations[m].y;
        wsum += w;
    }
    est.x /= wsum;
    est.y /= wsum;
    return est;
}

LocationEstimate adaptive_knn_localize(const FingerprintDB &db, const Eigen::VectorXd &query, double alpha, int k_max)
{
    check_query(db, query);
    if (!(alpha >= 1.0) || k_max < 1)
        throw std::invalid_argument("adaptive_knn_localize: need alpha >= 1 and k_max >= 1");

    const Eigen::VectorXd dist = (db.vectors.rowwise() - query.transpose()).rowwise().norm();
    const auto order = ranked(dist);
    const double threshold = alpha * dist[Eigen::Index(order.front())];
    LocationEstimate est;
    for (const auto m : order)
    {
        if (est.k == k_max || dist[Eigen::Index(m)] > threshold)
            break;
        est.x += db.locations[m].x;
        est.y += db.locations[m].y;
        ++est.k;
    }
    est.x /= est.k;
    est.y /= est.k;
    return est;
}

void save_fingerprint_db(const FingerprintDB &db, const std::filesystem::path &stem)
{
    auto bin_path = stem;
    bin_path += ".bin";
    auto json_path = stem;
    json_path += ".json";

    std::ofstream bin(bin_path, std::ios::binary);
    if (!bin)
        throw std::runtime_error("cannot open " + bin_path.string());
    for (const auto &p : db.locations)
    {
        const std::int32_t xy[2] = {p.x, p.y};
        bin.write(reinterpret_cast<const char *>(xy), sizeof xy);
    }
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = db.vectors;
    bin.write(reinterpret_cast<const char *>(rows.data()), std::streamsize(rows.size() * sizeof(double)));

    std::ofstream header(json_path);
    header << nlohmann::json{{"J", db.bs_count()}, {"M", db.size()}, {"stride", db.stride}, {"map_id", db.map_id}}.dump(2) << '\n';
    if (!bin || !header)
        throw std::runtime_error("write failed: " + stem.string());
}

FingerprintDB load_fingerprint_db(const std::filesystem::path &stem)
{
    auto bin_path = stem;
    bin_path += ".bin";
    auto json_path = stem;
    json_path += ".json";

    std::ifstream header(json_path);
    if (!header)
        throw std::runtime_error("cannot open " + json_path.string());
    const auto h = nlohmann::json::parse(header);
    FingerprintDB db;
    db.stride = h.at("stride").get<int>();
    db.map_id = h.at("map_id").get<std::string>();
    const auto m = h.at("M").get<std::size_t>();
    const auto j = h.at("J").get<int>();

    std::ifstream bin(bin_path, std::ios::binary);
    db.locations.resize(m);
    for (auto &p : db.locations)
    {
        std::int32_t xy[2];
        bin.read(reinterpret_cast<char *>(xy), sizeof xy);
        p = {xy[0], xy[1]};
    }
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(Eigen::Index(m), j);
    bin.read(reinterpret_cast<char *>(rows.data()), std::streamsize(rows.size() * sizeof(double)));
    if (!bin)
        throw std::runtime_error(bin_path.string() + ": truncated fingerprint database");
    db.vectors = rows;
    return db;
}

} // namespace radioloc
