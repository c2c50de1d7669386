# Copyright 2026 The mmvir Authors
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

"""Hierarchical video representation, retrieval and evaluation.

Documents are exchanged as canonical JSON text; ``load_document`` turns one
into a plain dict.
"""

import json

from ._mmvir import (
    CaptionParseError,
    GatewayError,
    Index,
    InputError,
    Series,
    build_document,
    consecutive_similarity,
    hour_long_video,
    kts_changepoints,
    load_series,
    meteor,
    overlap_at_k,
    percentile_threshold,
    planted_series,
    precision_at_k,
    rouge2,
    rougeL,
    run_cli,
    segment,
    split_subsegments,
    validate_document,
)

__all__ = [
    "CaptionParseError",
    "GatewayError",
    "Index",
    "InputError",
    "Series",
    "build_document",
    "consecutive_similarity",
    "hour_long_video",
    "kts_changepoints",
    "load_document",
    "load_series",
    "meteor",
    "overlap_at_k",
    "percentile_threshold",
    "planted_series",
    "precision_at_k",
    "rouge2",
    "rougeL",
    "run_cli",
    "segment",
    "split_subsegments",
    "validate_document",
]


def load_document(text):
    """Parses canonical document JSON into a dict."""
    return json.loads(text)
