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

"""Radio-map based UE localization."""

import json

from ._radioloc import (
    SimParams,
    adaptive_knn_localize,
    center_of_mass,
    correntropy_localize,
    generate_city_map,
    gray_to_pathloss,
    gtrs_localize,
    knn_localize,
    pathloss_to_gray,
    pocs_localize,
    simulate_radio_map,
    simulate_toa,
)
from . import _radioloc

SCENARIOS = ("SIM-DPM", "SIM-DPM2IRT", "SIM-DPM2IRT-CARS")


def build_dataset(config):
    """Generate a dataset from a config dict; returns the manifest dict."""
    return json.loads(_radioloc.build_dataset(json.dumps(config)))


def run_scenario(dataset_dir, scenario, methods, seed=1):
    """Evaluate methods (dicts with a "method" key plus options) on the test split."""
    methods = [{"method": m} if isinstance(m, str) else dict(m) for m in methods]
    return _radioloc.run_scenario(str(dataset_dir), scenario, json.dumps(methods), seed)


__all__ = [
    "SCENARIOS",
    "SimParams",
    "adaptive_knn_localize",
    "build_dataset",
    "center_of_mass",
    "correntropy_localize",
    "generate_city_map",
    "gray_to_pathloss",
    "gtrs_localize",
    "knn_localize",
    "pathloss_to_gray",
    "pocs_localize",
    "run_scenario",
    "simulate_radio_map",
    "simulate_toa",
]
