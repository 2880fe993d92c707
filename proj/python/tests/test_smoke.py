# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------

import numpy as np
import pytest

import radioloc


def test_city_and_radio_map():
    b = radioloc.generate_city_map(3, 32, 6)
    assert b.shape == (32, 32)
    assert b.dtype == np.uint8
    free = np.argwhere(b == 0)[0]
    tx = (int(free[1]) + 1, int(free[0]) + 1)
    pl, gray = radioloc.simulate_radio_map(b, tx)
    assert pl.shape == gray.shape == (32, 32)
    assert pl.max() <= 0.0
    assert 0.0 <= gray.min() and gray.max() <= 1.0
    assert gray[tx[1] - 1, tx[0] - 1] == gray.max()


def test_free_space_toa_is_distance_over_c():
    b = np.zeros((16, 16), dtype=np.uint8)
    toa = radioloc.simulate_toa(b, (1, 1), cell_m=2.0)
    assert toa[4, 3] * 2.998e8 == pytest.approx(2.0 * 5.0)


def test_gray_round_trip():
    p = radioloc.SimParams.base()
    assert radioloc.gray_to_pathloss(radioloc.pathloss_to_gray(-90.0, p), p) == pytest.approx(-90.0)
    assert radioloc.SimParams.perturbed().path_exponent > p.path_exponent


def test_center_of_mass_of_a_delta():
    h = np.zeros((8, 8))
    h[2, 5] = 3.0
    assert radioloc.center_of_mass(h) == pytest.approx((6.0, 3.0))


def test_ranging_solvers_recover_exact_ranges():
    rng = np.random.default_rng(0)
    anchors = rng.uniform(0, 100, size=(5, 2))
    truth = np.array([40.0, 55.0])
    ranges = np.linalg.norm(anchors - truth, axis=1)
    for rep in (radioloc.gtrs_localize(anchors, ranges), radioloc.correntropy_localize(anchors, ranges)):
        assert np.allclose(rep["estimate"], truth, atol=1e-5)
    assert np.linalg.norm(np.array(radioloc.pocs_localize(anchors, ranges)["estimate"]) - truth) < 1.0


def test_knn_on_explicit_database():
    fp = np.array([[0.1, 0.9], [0.5, 0.5], [0.9, 0.1]])
    loc = np.array([[1, 1], [5, 5], [9, 9]], dtype=np.int32)
    assert radioloc.knn_localize(fp, loc, np.array([0.52, 0.5]), 1) == (5.0, 5.0)
    x, y, k = radioloc.adaptive_knn_localize(fp, loc, np.array([0.3, 0.7]), 1.01, 3)
    assert k == 2 and (x, y) == (3.0, 3.0)


def test_dataset_and_scenario(tmp_path):
    cfg = {
        "maps": 3, "split": [1, 1, 1], "bs_per_map": 3, "ues_per_scene": 4, "size_px": 24,
        "n_buildings": 5, "building_min_side": 3, "building_max_side": 6, "n_cars": 6, "seed": 2,
        "out_dir": str(tmp_path / "ds"),
    }
    manifest = radioloc.build_dataset(cfg)
    assert len(manifest["scenes"]) == 3
    rows = radioloc.run_scenario(tmp_path / "ds", "SIM-DPM2IRT-CARS", ["knn", {"method": "gtrs"}])
    assert {r["method"] for r in rows} == {"knn", "gtrs"}
    assert all(r["n_samples"] == 4 for r in rows)
    with pytest.raises(ValueError):
        radioloc.run_scenario(tmp_path / "ds", "SIM-DPM", ["svm"])
