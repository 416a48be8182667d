"""Tests for CSV, JSON and SVG writers."""

from __future__ import annotations

import json
import math
from pathlib import Path

from dyadnorm.output import svg, tables
from dyadnorm.profile.evaluate import profile_rows
from dyadnorm.profile.models import LambdaProfile
from dyadnorm.verify.report import ClaimReport


class TestTables:
    def test_header_lines_sorted(self) -> None:
        assert tables.header_lines({"p": 1.0, "command": "norm"}) == ["# command=norm", "# p=1"]
        assert tables.header_lines(None) == []

    def test_cells(self) -> None:
        text = tables.dumps_csv(["a", "b", "c"], [[0.5, True, [1, 2]], [math.inf, False, "x"]])
        assert text == "a,b,c\n0.5,true,1 2\n+inf,false,x\n"

    def test_digits(self) -> None:
        assert tables.dumps_csv(["v"], [[1 / 3]], digits=4) == "v\n0.3333\n"

    def test_profile_csv(self) -> None:
        profile = LambdaProfile.from_entries([(1.0, 1.0), (2.0, 0.5)])
        text = tables.profile_csv(profile_rows(profile, 1.0), {"p": 1.0})
        assert text.splitlines() == [
            "# p=1",
            "lambda,W,lambda_p_W,source",
            "2,0.5,1,step",
            "1,1.5,1.5,step",
        ]

    def test_samples_csv(self) -> None:
        text = tables.samples_csv([((0.5, 0.25), 1.0, 2.0)])
        assert text.splitlines() == ["x1,x2,t,a", "0.5,0.25,1,2"]

    def test_trend_columns_in_order_of_appearance(self) -> None:
        report = ClaimReport(claim="2", series=[{"K": 1, "x": 0.5}, {"K": 2, "y": 1.0}])
        assert tables.trend_csv(report).splitlines() == ["K,x,y", "1,0.5,", "2,,1"]

    def test_suite_json(self) -> None:
        reports = [ClaimReport(claim="1", checks={"ok": True}), ClaimReport(claim="2", checks={"ok": False})]
        body = json.loads(tables.suite_json(reports, {"command": "verify"}))
        assert body["verdict"] == "inconsistent"
        assert body["config"] == {"command": "verify"}
        assert [r["claim"] for r in body["reports"]] == ["1", "2"]

    def test_json_infinity(self) -> None:
        body = json.loads(tables.dumps_json({"value": math.inf}))
        assert body == {"value": "+inf"}

    def test_write_text_creates_parents(self, tmp_path: Path) -> None:
        path = tables.write_text(tmp_path / "a" / "b.txt", "hi")
        assert path.read_text(encoding="utf-8") == "hi"


class TestSvg:
    def test_loglog(self) -> None:
        text = svg.loglog_svg([(0.1, 1.0), (1.0, 2.0), (10.0, 4.0)], "λ < 1")
        assert text.startswith("<svg")
        assert text.rstrip().endswith("</svg>")
        assert "<polyline" in text
        assert text.count("<circle") == 3
        assert "λ &lt; 1" in text

    def test_loglog_drops_nonpositive_points(self) -> None:
        text = svg.loglog_svg([(0.0, 1.0), (1.0, math.inf)])
        assert "no positive values" in text

    def test_heatmap(self) -> None:
        text = svg.heatmap_svg([((0.0,), 1.0, 2.0), ((1.0,), 2.0, -1.0)])
        assert text.count("<rect") == 3
        assert "max |a| = 2" in text
        assert "no samples" in svg.heatmap_svg([])
