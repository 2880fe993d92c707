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

#include "radioloc/bench.hpp"
#include "radioloc/dataset.hpp"
#include "radioloc/dpm_sim.hpp"
#include "radioloc/fingerprint.hpp"
#include "radioloc/heatloc.hpp"
#include "radioloc/ranging.hpp"
#include "radioloc/scene.hpp"

#include <json.hpp>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace radioloc;

namespace
{

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;
using F64Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

int square_side(const py::buffer_info &b, const char *what)
{
    if (b.ndim != 2 || b.shape[0] != b.shape[1])
        throw std::invalid_argument(std::string(what) + ": expected a square 2-D array");
    return int(b.shape[0]);
}

// Arrays are indexed [y - 1, x - 1].
template <typename T>
py::array_t<T> to_numpy(const Grid<T> &g)
{
    py::array_t<T> out({g.size(), g.size()});
    std::copy(g.data().begin(), g.data().end(), out.mutable_data());
    return out;
}

template <typename T, typename A>
Grid<T> from_numpy(const A &a, const char *what)
{
    const auto b = a.request();
    Grid<T> g(square_side(b, what));
    const T *p = static_cast<const T *>(b.ptr);
    std::copy(p, p + g.cells(), g.data().begin());
    return g;
}

CityMap make_city(const U8Array &buildings, double cell_m, const std::optional<U8Array> &cars)
{
    CityMap m;
    m.buildings = from_numpy<std::uint8_t>(buildings, "buildings");
    m.size_px = m.buildings.size();
    m.cell_m = cell_m;
    m.cars = cars ? from_numpy<std::uint8_t>(*cars, "cars") : Grid<std::uint8_t>(m.size_px, 0);
    m.validate();
    return m;
}

RangingInstance make_instance(const F64Array &anchors, const F64Array &ranges)
{
    const auto a = anchors.request();
    const auto r = ranges.request();
    if (a.ndim != 2 || a.shape[1] != 2)
        throw std::invalid_argument("anchors: expected shape (J, 2)");
    if (r.ndim != 1 || r.shape[0] != a.shape[0])
        throw std::invalid_argument("ranges: expected shape (J,)");
    RangingInstance inst;
    const double *pa = static_cast<const double *>(a.ptr);
    const double *pr = static_cast<const double *>(r.ptr);
    for (py::ssize_t j = 0; j < a.shape[0]; ++j)
    {
        inst.anchors.emplace_back(pa[2 * j], pa[2 * j + 1]);
        inst.ranges_m.push_back(pr[j]);
    }
    return inst;
}

py::dict report_dict(const SolverReport &r)
{
    py::dict d;
    d["estimate"] = py::make_tuple(r.estimate.x(), r.estimate.y());
    d["iterations"] = r.iterations;
    d["converged"] = r.converged;
    d["residual"] = r.residual;
    return d;
}

FingerprintDB make_db(const F64Array &fingerprints, const py::array_t<int, py::array::c_style | py::array::forcecast> &locations)
{
    const auto f = fingerprints.request();
    const auto l = locations.request();
    if (f.ndim != 2 || l.ndim != 2 || l.shape[1] != 2 || l.shape[0] != f.shape[0])
        throw std::invalid_argument("fingerprint database: expected (M, J) vectors and (M, 2) locations");
    FingerprintDB db;
    db.vectors = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        static_cast<const double *>(f.ptr), f.shape[0], f.shape[1]);
    const int *pl = static_cast<const int *>(l.ptr);
    for (py::ssize_t i = 0; i < l.shape[0]; ++i)
        db.locations.push_back({pl[2 * i], pl[2 * i + 1]});
    return db;
}

Eigen::VectorXd to_vector(const F64Array &q)
{
    const auto b = q.request();
    if (b.ndim != 1)
        throw std::invalid_argument("query: expected a 1-D array");
    return Eigen::Map<const Eigen::VectorXd>(static_cast<const double *>(b.ptr), b.shape[0]);
}

MethodConfig method_from_json(const nlohmann::json &j)
{
    MethodConfig m;
    m.method = j.at("method").get<std::string>();
    m.k = j.value("k", m.k);
    m.weighted = j.value("weighted", m.weighted);
    m.alpha = j.value("alpha", m.alpha);
    m.k_max = j.value("kmax", m.k_max);
    m.sigma_gray = j.value("sigma", m.sigma_gray);
    m.argmax = j.value("argmax", m.argmax);
    m.checkpoint = j.value("checkpoint", std::string());
    m.mcc_sigma_m = j.value("mcc_sigma", m.mcc_sigma_m);
    m.max_iter = j.value("max_iter", m.max_iter);
    return m;
}

} // namespace

PYBIND11_MODULE(_radioloc, m)
{
    m.doc() = "Radio-map based localization core";

    py::class_<SimParams>(m, "SimParams")
        .def(py::init<>())
        .def_readwrite("l0_db", &SimParams::l0_db)
        .def_readwrite("path_exponent", &SimParams::path_exponent)
        .def_readwrite("wall_db_per_cell", &SimParams::wall_db_per_cell)
        .def_readwrite("corner_db_per_rad", &SimParams::corner_db_per_rad)
        .def_readwrite("pl_min_db", &SimParams::pl_min_db)
        .def_readwrite("pl_max_db", &SimParams::pl_max_db)
        .def_readwrite("meters_per_db", &SimParams::meters_per_db)
        .def_static("base", &SimParams::base)
        .def_static("perturbed", &SimParams::perturbed)
        .def("__eq__", [](const SimParams &a, const SimParams &b) { return a == b; });

    m.def(
        "generate_city_map",
        [](std::uint64_t seed, int size_px, int n_buildings, int min_side, int max_side) {
            return to_numpy(generate_city_map(seed, size_px, n_buildings, BuildingBounds{min_side, max_side}).buildings);
        },
        py::arg("seed"), py::arg("size_px"), py::arg("n_buildings"), py::arg("min_side") = 3, py::arg("max_side") = 12,
        "Building mask (uint8, indexed [y-1, x-1]).");

    m.def(
        "simulate_radio_map",
        [](const U8Array &buildings, std::pair<int, int> tx, const SimParams &params, double cell_m, std::optional<U8Array> cars) {
            const auto rm = simulate_radio_map(make_city(buildings, cell_m, cars), Pixel{tx.first, tx.second}, params);
            return py::make_tuple(to_numpy(rm.pl_db), to_numpy(rm.gray));
        },
        py::arg("buildings"), py::arg("tx"), py::arg("params") = SimParams{}, py::arg("cell_m") = 1.0, py::arg("cars") = py::none(),
        "Returns (pathloss_db, gray) for a transmitter at 1-indexed pixel (x, y).");

    m.def(
        "simulate_toa",
        [](const U8Array &buildings, std::pair<int, int> tx, const SimParams &params, double cell_m) {
            return to_numpy(simulate_toa(make_city(buildings, cell_m, std::nullopt), Pixel{tx.first, tx.second}, params).toa_s);
        },
        py::arg("buildings"), py::arg("tx"), py::arg("params") = SimParams{}, py::arg("cell_m") = 1.0);

    m.def("pathloss_to_gray", &pathloss_to_gray, py::arg("pl_db"), py::arg("params") = SimParams{});
    m.def("gray_to_pathloss", &gray_to_pathloss, py::arg("gray"), py::arg("params") = SimParams{});

    m.def(
        "center_of_mass",
        [](const F64Array &h) {
            const auto g = from_numpy<double>(h, "heat map");
            const auto c = center_of_mass(g);
            return py::make_tuple(c.x, c.y);
        },
        py::arg("heatmap"), "1-indexed (x, y) center of mass.");

    m.def(
        "knn_localize",
        [](const F64Array &fingerprints, const py::array_t<int, py::array::c_style | py::array::forcecast> &locations,
           const F64Array &query, int k, bool weighted) {
            const auto e = knn_localize(make_db(fingerprints, locations), to_vector(query), k, weighted);
            return py::make_tuple(e.x, e.y);
        },
        py::arg("fingerprints"), py::arg("locations"), py::arg("query"), py::arg("k"), py::arg("weighted") = false);

    m.def(
        "adaptive_knn_localize",
        [](const F64Array &fingerprints, const py::array_t<int, py::array::c_style | py::array::forcecast> &locations,
           const F64Array &query, double alpha, int k_max) {
            const auto e = adaptive_knn_localize(make_db(fingerprints, locations), to_vector(query), alpha, k_max);
            return py::make_tuple(e.x, e.y, e.k);
        },
        py::arg("fingerprints"), py::arg("locations"), py::arg("query"), py::arg("alpha"), py::arg("k_max"));

    m.def(
        "gtrs_localize", [](const F64Array &a, const F64Array &r) { return report_dict(gtrs_bisection_localize(make_instance(a, r))); },
        py::arg("anchors"), py::arg("ranges"));
    m.def(
        "pocs_localize",
        [](const F64Array &a, const F64Array &r, int max_iter) {
            PocsOptions o;
            o.max_iter = max_iter;
            return report_dict(pocs_localize(make_instance(a, r), o));
        },
        py::arg("anchors"), py::arg("ranges"), py::arg("max_iter") = 500);
    m.def(
        "correntropy_localize",
        [](const F64Array &a, const F64Array &r, double sigma_m) {
            CorrentropyOptions o;
            o.sigma_m = sigma_m;
            return report_dict(correntropy_localize(make_instance(a, r), o));
        },
        py::arg("anchors"), py::arg("ranges"), py::arg("sigma_m") = 5.0);

    m.def(
        "build_dataset",
        [](const std::string &config_json) {
            py::gil_scoped_release nogil;
            return to_json(build_dataset(dataset_config_from_json(nlohmann::json::parse(config_json)))).dump();
        },
        py::arg("config_json"), "Writes a dataset and returns its manifest as JSON.");

    m.def(
        "run_scenario",
        [](const std::string &dataset_dir, const std::string &scenario, const std::string &methods_json, std::uint64_t seed) {
            std::vector<MethodConfig> methods;
            for (const auto &j : nlohmann::json::parse(methods_json))
                methods.push_back(method_from_json(j));
            ScenarioRun run;
            {
                py::gil_scoped_release nogil;
                const auto manifest = load_manifest(dataset_dir);
                run = run_scenario(make_scenario(scenario, manifest), dataset_dir, manifest, methods, seed);
            }
            py::list rows;
            for (const auto &r : run.rows)
            {
                py::dict d;
                d["scenario"] = r.scenario;
                d["method"] = r.method;
                d["params"] = r.params;
                d["mae_m"] = r.mae_m;
                d["mean_runtime_ms"] = r.mean_runtime_ms;
                d["n_samples"] = r.n_samples;
                rows.append(d);
            }
            return rows;
        },
        py::arg("dataset_dir"), py::arg("scenario"), py::arg("methods_json"), py::arg("seed") = 1);
}
