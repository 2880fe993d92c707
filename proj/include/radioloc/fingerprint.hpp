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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace radioloc
{

// Reference fingerprints: one gray-level vector over the J radio maps per exterior lattice cell.
struct FingerprintDB
{
    int stride = 1;
    std::string map_id;
    std::vector<Pixel> locations;
    Eigen::MatrixXd vectors;  // M x J

    std::size_t size() const { return locations.size(); }
    int bs_count() const { return int(vectors.cols()); }
};

FingerprintDB build_fingerprint_db(std::span<const Grid<double>> gray_maps, const CityMap &city, int stride);
FingerprintDB build_fingerprint_db(std::span<const RadioMap> radio_maps, const CityMap &city, int stride);

struct LocationEstimate
{
    double x = 0.0;
    double y = 0.0;
    int k = 0;  // number of references averaged
};

// Unweighted centroid of the k nearest references; ties go to the lower database index.
LocationEstimate knn_localize(const FingerprintDB &db, const Eigen::VectorXd &query, int k, bool distance_weighted = false);

// References within alpha * d_min of the query, at most k_max of them.
LocationEstimate adaptive_knn_localize(const FingerprintDB &db, const Eigen::VectorXd &query, double alpha, int k_max);

// Binary layout: M x int32 (x, y) pairs then M*J float64 row-major. Header is JSON.
void save_fingerprint_db(const FingerprintDB &db, const std::filesystem::path &stem);
FingerprintDB load_fingerprint_db(const std::filesystem::path &stem);

} // namespace radioloc
