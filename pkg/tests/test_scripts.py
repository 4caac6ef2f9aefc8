import csv
import pathlib
import subprocess
import sys

import pytest

SCRIPTS = pathlib.Path(__file__).resolve().parents[1] / "scripts"


@pytest.mark.parametrize("name,rows", [("reproduce_fig2.py", 500), ("reproduce_fig3.py", 420)])
def test_gap_scripts_write_csv(tmp_path, name, rows):
    out = tmp_path / "gap.csv"
    proc = subprocess.run([sys.executable, str(SCRIPTS / name), "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    with out.open() as fh:
        data = list(csv.DictReader(fh))
    assert len(data) == rows
    assert all(float(r["gap"]) >= 0 for r in data)


@pytest.mark.slow
def test_mc_validation_script(tmp_path):
    proc = subprocess.run([sys.executable, str(SCRIPTS / "mc_validation.py"), "--trials", "200",
                           "--block-length", "500", "--out", str(tmp_path / "mc.csv")],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout + proc.stderr
