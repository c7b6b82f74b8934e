r"""
Command line tour
=================

The ``opcalc`` command reads and writes JSON operator specs.  This script
runs each subcommand in a scratch directory and prints a short summary.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path


def opcalc(*args, check=True):
    cmd = [sys.executable, "-m", "opcalc.cli", *map(str, args)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if check and proc.returncode:
        raise SystemExit(proc.stderr)
    return proc


work = Path(tempfile.mkdtemp(prefix="opcalc-demo-"))
spec = work / "random.json"

###############################################################################
# A reproducible random spec, its spectrum, and the oracle cross-check.

opcalc("generate-random", "--seed", 7, "--N", 2, "--S", 3, "--M", 1, "--out", spec)
doc = json.loads(spec.read_text())
print(f"spec: N={doc['N']} S={doc['S']} M={doc['M']} with {len(doc['terms'])} terms")

spectrum = json.loads(opcalc("spectrum", spec).stdout)
print("union of block spectra:", len(spectrum["union"]), "values")

report = json.loads(opcalc("verify", spec).stdout)
print("oracle checks passed:", report["passed"])

###############################################################################
# ``apply-fn`` writes a new spec, so results can be chained.

inv = work / "inv.json"
opcalc("apply-fn", spec, "--fn", "inverse", "--out", inv)
back = json.loads(opcalc("apply-fn", inv, "--fn", "inverse").stdout)
worst = max(
    abs(a[0] - b[0]) + abs(a[1] - b[1])
    for s, t in zip(doc["terms"], back["terms"])
    for ra, rb in zip(s["matrix"], t["matrix"])
    for a, b in zip(ra, rb)
)
print("inverse of the inverse differs by", f"{worst:.1e}")

###############################################################################
# Solving ``X u = 1`` on a 2 x 2 subgrid of every cell.

rhs = work / "rhs.json"
rhs.write_text(json.dumps({"q": 2, "values": [[1.0, 0.0]] * (doc["S"] * doc["M"] * 4)}))
solution = json.loads(opcalc("solve", spec, "--rhs", rhs).stdout)
print("solve residual:", solution["residual"])

###############################################################################
# Kernel sampling and the lattice defect problem.

disc = json.loads(opcalc("discretize", "--kernel", "linear-sum", "--p", 4, "--measure").stdout)
print(f"linear-sum at p=4: bound {disc['bound']:.4f}, measured {disc['measured_gap']:.4f}")

sch = json.loads(
    opcalc("schrodinger", "--lambda", 1, "--eps", 0.5, "--v1", 2, "--v2", -1, "--v3", 0.5, "--p", 2, "--verify").stdout
)
print("schrodinger residual:", sch["verify"]["relative_residual"])

###############################################################################
# Failures map to exit codes: 2 for bad input, 3 for numerical trouble,
# 4 when a dense check would be too large.

bad = work / "bad.json"
bad.write_text("{")
print("malformed input exit code:", opcalc("spectrum", bad, check=False).returncode)
