"""Bridge check: the plot tool's slope annotations match this package's fits.

Skipped when the frontend is not built; the frontend's own vitest suite is
the authoritative test there.
"""

import json
import shutil
import subprocess
from pathlib import Path

import pytest

FRONTEND = Path(__file__).resolve().parents[1] / "frontend"


@pytest.mark.skipif(
    shutil.which("node") is None or not (FRONTEND / "dist" / "cli.js").exists(),
    reason="frontend not built")
def test_rendered_slopes_match_primary_fit_summary(tmp_path):
    proc = subprocess.run(
        ["node", str(FRONTEND / "dist" / "cli.js"), "render",
         "--spec", str(FRONTEND / "fixtures" / "lookup_scaling.plot.json"),
         "--out", str(tmp_path)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    rendered = json.loads((tmp_path / "lookup_scaling.summary.json")
                          .read_text())
    agg = json.loads(
        (FRONTEND / "fixtures" / "lookup_scaling.json").read_text())[
            "aggregates"]
    pairs = {"P_flag": "flag_slope", "P_post": "post_slope",
             "P_L": "logical_slope"}
    for series, key in pairs.items():
        assert abs(float(rendered[series]["slope"]) - agg[key]) < 1e-9
    assert (tmp_path / "lookup_scaling.svg").read_text().startswith("<svg")
