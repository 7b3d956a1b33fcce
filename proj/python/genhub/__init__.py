# Copyright 2026 The genhub Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Search, rank and run generative models listed in a genhub registry."""

import json

from ._core import HubError, fid_ratio, frechet_distance, sha256_hex
from . import _core

__all__ = [
    "Hub",
    "HubError",
    "fid_ratio",
    "fid_report",
    "frechet_distance",
    "sha256_hex",
    "validate_registry",
]


class Hub:
    def __init__(self, registry="", cache="", chunk_size=0):
        self._hub = _core.Hub(str(registry), str(cache), int(chunk_size))

    def model_ids(self):
        return self._hub.model_ids()

    def metadata(self, model_id):
        return json.loads(self._hub.metadata_json(model_id))

    def find_models(self, values, operator="AND"):
        if isinstance(values, str):
            values = [values]
        return self._hub.find_models(list(values), operator)

    def rank_models(self, metric, order="ascending", ids=None):
        return json.loads(self._hub.rank_models_json(metric, order, ids))

    def find_rank(self, values, metric, operator="AND", order="ascending"):
        if isinstance(values, str):
            values = [values]
        return json.loads(self._hub.find_rank_json(list(values), operator, metric, order))

    def generate(self, model_id, num_samples=1, output_path="", seed=None, chunk_size=None, **kwargs):
        doc = self._hub.generate_json(
            model_id, num_samples, str(output_path), seed, json.dumps(kwargs) if kwargs else "", chunk_size
        )
        return json.loads(doc)

    def test_model(self, model_id):
        return json.loads(self._hub.test_model_json(model_id))


def validate_registry(text):
    return json.loads(_core.validate_registry(text))


def fid_report(real, syn, split_seed=0):
    return json.loads(_core.fid_report_json(real, syn, split_seed))
