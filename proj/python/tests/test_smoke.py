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

import numpy as np
import pytest

import mmvir


def test_series_roundtrip_and_normalization():
    v = np.array([[3.0, 4.0], [0.0, 2.0], [1.0, 0.0]])
    s = mmvir.Series(v, fps=0.5, video_id="tiny")
    assert len(s) == 3
    assert s.timestamps == [0.0, 2.0, 4.0]
    assert s.duration == pytest.approx(6.0)
    np.testing.assert_allclose(np.linalg.norm(s.vectors, axis=1), 1.0)


def test_zero_row_is_input_error():
    with pytest.raises(mmvir.InputError):
        mmvir.Series(np.zeros((3, 2)))
    with pytest.raises(ValueError):
        mmvir.Series(np.zeros((3, 2)))


def test_kts_recovers_planted_boundaries():
    series, planted = mmvir.planted_series(seed=3, frames=300, regimes=3, min_len=40, noise=0.01)
    found = mmvir.segment(series, method="kts", min_clip_s=30, sub_max_s=10)
    assert len(found) == len(planted)
    for a, b in zip(found, planted):
        assert abs(a - b) <= 2.0


def test_percentile_threshold_matches_sorted_rank():
    rng = np.random.default_rng(0)
    for _ in range(200):
        v = rng.uniform(-1, 1, size=rng.integers(1, 50)).tolist()
        q = float(rng.uniform(0.5, 99.5))
        rank = int(np.ceil(q / 100 * len(v))) - 1
        assert mmvir.percentile_threshold(v, q) == sorted(v)[max(rank, 0)]


def test_split_subsegments_tiles():
    pieces = mmvir.split_subsegments(0.0, 350.0, 100.0)
    assert len(pieces) == 3
    assert pieces[0][0] == 0.0 and pieces[-1][1] == 350.0


def test_build_is_deterministic_and_valid():
    series = mmvir.hour_long_video(seed=7)
    a = mmvir.build_document(series)
    b = mmvir.build_document(series, parallelism=1)
    assert a == b
    assert mmvir.validate_document(a) == []
    doc = mmvir.load_document(a)
    assert doc["video_id"] == "synth_hour"
    assert len(doc["clips"]) >= 2


def test_index_self_match_and_ask():
    doc = mmvir.build_document(mmvir.hour_long_video(seed=7))
    index = mmvir.Index([doc])
    clips = mmvir.load_document(doc)["clips"]
    assert len(index) == len(clips)
    summary = clips[1]["timeline"]["summary"]
    top = index.retrieve(summary, k=1)[0]
    assert top["clip_id"] == 2
    assert top["score"] == pytest.approx(1.0, abs=1e-5)
    res = index.ask("What happens first?", ["cooking", "reading", "walking"], k=3)
    assert res["choice"] in {"A", "B", "C", None}
    assert res["context_blocks"] > 0
    with pytest.raises(mmvir.InputError):
        index.retrieve("anything", k=0)


def test_metric_fixtures():
    r2 = mmvir.rouge2("the cat sat on the mat", "the cat was on the mat")
    rl = mmvir.rougeL("the cat sat on the mat", "the cat was on the mat")
    assert r2["f1"] == pytest.approx(0.6, abs=1e-4)
    assert rl["f1"] == pytest.approx(5 / 6, abs=1e-4)
    assert mmvir.meteor("the cat sat on the mat", "the cat sat on the mat") == pytest.approx(0.99769, abs=1e-4)


def test_temporal_metrics():
    cases = [{"retrieved": [(150.0, 300.0)], "frames": [125.0], "interval": (100.0, 200.0)}]
    assert mmvir.overlap_at_k(cases, 1) == pytest.approx(0.5)
    assert mmvir.overlap_at_k(cases, 1, mode="iou") == pytest.approx(50 / 200)
    assert mmvir.precision_at_k(cases, 1) == 0.0


def test_cli_entry_point(tmp_path):
    series, _ = mmvir.planted_series(seed=1, frames=200, regimes=2, min_len=50)
    path = tmp_path / "s.txt"
    path.write_text(series.to_text())
    code, _, _ = mmvir.run_cli(["segment", str(path), "-o", str(tmp_path / "b.json"), "--min-clip-s", "60",
                                "--set", "sub_max_s=20"])
    assert code == 0
    assert (tmp_path / "b.json").exists()
    code, _, err = mmvir.run_cli(["segment", str(tmp_path / "missing.txt"), "-o", str(tmp_path / "x.json")])
    assert code == 2 and err
