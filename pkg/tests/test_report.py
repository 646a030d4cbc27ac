from __future__ import annotations

import json

import numpy as np

from app.core.report import Report, Stopwatch, depth_histogram


def test_stopwatch_summarises_repeated_sections():
    watch = Stopwatch()
    for _ in range(3):
        with watch.section("step"):
            pass
    watch.record("manual", 0.5)
    out = watch.as_dict()
    assert out["step"]["calls"] == 3
    assert out["manual"] == {"calls": 1, "total_s": 0.5, "median_s": 0.5, "p95_s": 0.5}
    assert out["total_s"] >= 0


def test_depth_histogram():
    assert depth_histogram([], 2) == [0, 0, 0]
    assert depth_histogram([0, 2, 2, 1], 3) == [1, 1, 2, 0]


def test_structured_rendering_is_plain_json():
    report = Report("classify", verdicts={"pair": (1, 2), "tags": {"b", "a"}, "n": np.int64(4)})
    data = json.loads(report.render("structured"))
    assert data["verdicts"] == {"pair": [1, 2], "tags": ["a", "b"], "n": 4}
    assert data["ok"] is True
    assert "timings" in data
    assert "timings" not in report.as_dict(with_timings=False)


def test_text_rendering():
    report = Report("lift", ok=False, verdicts={"F": {"i_hpoints": {"ok": False, "problems": 1}}})
    report.witnesses.append({"input": "F", "inclusion": "i_hpoints"})
    text = report.render("text")
    assert text.splitlines()[0].endswith("lift: FAILED")
    assert "    i_hpoints:" in text
    assert "ok: false" in text
    assert "witnesses:" in text
