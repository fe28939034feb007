"""Fixtures: synthetic CSV/VTK inputs plus real solver outputs.

Criterion-level tests consume the solver only through its command-line
interface and file formats.  If the primary acceptance suite has already
produced artifacts (artifacts/acceptance/... at the repository root), they
are reused; otherwise smaller runs of the same kind are generated here.
"""

from __future__ import annotations

import os
import pathlib
import subprocess
import sys

import pytest

REPO_ROOT = pathlib.Path(__file__).resolve().parents[2]
ARTIFACTS = REPO_ROOT / "artifacts" / "acceptance"

SHAPE_CFG = """
grid.nx = 24
grid.ny = 24
grid.nz = 24
grid.lx = 2.4
grid.ly = 2.4
grid.lz = 2.4
elastic.k11 = 1.0
elastic.k22 = 1.0
elastic.k33 = 1.0
elastic.k24 = 1.0
surface.gamma = 1.0
surface.lambda = 0.0
constraint.m = 0.7634
init.shape = ellipsoid:0.9,0.45,0.45
init.director = uniform:z
opt.max_outer_iters = 60
opt.tol_rel_energy = 1e-9
run.seed = 0
"""

SWEEP_CFG = """
grid.nx = 16
grid.ny = 16
grid.nz = 16
grid.lx = 2.4
grid.ly = 2.4
grid.lz = 2.4
elastic.k11 = 0.5
elastic.k22 = 0.5
elastic.k33 = 0.5
elastic.k24 = 0.5
surface.gamma = 1.0
surface.lambda = 1.0
constraint.m = 1.4368
init.shape = ball:0.7
init.director = uniform:x
opt.max_outer_iters = 40
run.seed = 5
"""


def _run_cli(args: list[str]) -> int:
    return subprocess.run([sys.executable, "-m", "lcdo.cli", *args], capture_output=True).returncode


@pytest.fixture(scope="session")
def shape_run_dir(tmp_path_factory) -> pathlib.Path:
    """trace.csv + final.vtk of a shape-optimality run (item 8 kind)."""
    existing = ARTIFACTS / "item8"
    if (existing / "trace.csv").exists() and (existing / "final.vtk").exists():
        return existing
    outdir = tmp_path_factory.mktemp("shape_run")
    cfg = outdir / "shape.cfg"
    cfg.write_text(SHAPE_CFG)
    code = _run_cli(["minimize", str(cfg), "--outdir", str(outdir)])
    assert code in (0, 4), f"solver run failed with exit {code}"
    return outdir


@pytest.fixture(scope="session")
def sweep_run_dir(tmp_path_factory) -> pathlib.Path:
    """sweep.csv of a warm-started anchoring ladder (item 10 kind)."""
    existing = ARTIFACTS / "item10"
    if (existing / "sweep.csv").exists():
        return existing
    outdir = tmp_path_factory.mktemp("sweep_run")
    cfg = outdir / "sweep.cfg"
    cfg.write_text(SWEEP_CFG)
    code = _run_cli(["sweep-lambda", str(cfg), "--ladder", "1,8,64", "--outdir", str(outdir)])
    assert code == 0, f"sweep run failed with exit {code}"
    return outdir


GOOD_TRACE = """iter,e_total,e_bulk,e_perimeter,e_anchor_outer,e_inner_isotropic,e_inner_anchor,volume,grad_norm_n,grad_norm_phi,grad_norm_v,tau_n,tau_phi,tau_v,eps_phi,eps_v
1,10.0,1.0,8.0,1.0,0.0,0.0,1.4,0.5,2.0,0.0,0.001,0.001,0.001,0.1,0.1
2,9.0,0.5,7.5,1.0,0.0,0.0,1.4,0.4,1.5,0.0,0.001,0.001,0.001,0.1,0.1
3,8.5,0.5,7.0,1.0,0.0,0.0,1.4,0.3,1.2,0.0,0.001,0.001,0.001,0.1,0.1
"""

GOOD_SWEEP = """lambda,e_total,e_bulk,e_perimeter,e_anchor_outer,e_inner_isotropic,e_inner_anchor,volume,max_n_dot_nu,nondecreasing
1,8.0,1.0,6.0,1.0,0.0,0.0,1.4,0.5,1
4,8.5,1.2,6.0,1.3,0.0,0.0,1.4,0.3,1
16,8.8,1.3,6.0,1.5,0.0,0.0,1.4,0.1,1
"""


@pytest.fixture
def good_trace(tmp_path) -> str:
    p = tmp_path / "trace.csv"
    p.write_text(GOOD_TRACE)
    return str(p)


@pytest.fixture
def good_sweep(tmp_path) -> str:
    p = tmp_path / "sweep.csv"
    p.write_text(GOOD_SWEEP)
    return str(p)
