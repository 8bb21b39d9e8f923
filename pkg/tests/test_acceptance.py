"""Acceptance criteria, one printed PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` or ``python tests/test_acceptance.py``.
The large Monte Carlo criteria are marked ``slow``; they are part of the default run.
"""
from __future__ import annotations

import json
import math
import os
import sys
import time
from contextlib import contextmanager
from dataclasses import replace

import numpy as np
import pytest

from esdlab.cli import main as cli_main
from esdlab.ensembles import CovFamilySpec, EnsembleConfig, build
from esdlab.experiment import ExperimentConfig, run_trials
from esdlab.limits import (AdjacencyGeneralLaw, BlockLaplacian, EffectiveMedium, MarchenkoPastur,
                           ShiftedSemicircle, adjacency_general_stieltjes, block_laplacian_density,
                           density_from_stieltjes, effective_medium_stieltjes,
                           fixed_point_stieltjes, mp_density, mp_stieltjes,
                           shifted_semicircle_stieltjes, stieltjes_violations)
from esdlab.measure import WeightMeasure, XiSpec
from esdlab.metrics import esd_moments, ks_distance
from esdlab.spectra import eigenvalues_symmetric


@contextmanager
def timer():
    box = {}
    start = time.perf_counter()
    yield box
    box["s"] = time.perf_counter() - start


def pooled(model, xi, trials, seed, **kw):
    ens = EnsembleConfig(model, xi, **kw)
    return np.sort(np.concatenate(run_trials(ExperimentConfig(ens, trials=trials, seed=seed))))


# ---------------------------------------------------------------- criteria

def criterion_1():
    lam, eta = np.meshgrid(np.linspace(-5, 5, 20), np.geomspace(1e-2, 1e2, 20))
    z = (lam + 1j * eta).ravel()
    measures = [WeightMeasure.from_pairs([(1.0, 1.0)]),
                WeightMeasure.from_pairs([(0.1, 5.0), (-0.1, -5.0)]),
                WeightMeasure.from_pairs([(0.5, 0.3), (2.0, 0.8), (-1.0, -0.2)])]
    worst_res, violations = 0.0, 0
    with timer() as t:
        runs = [(mp_stieltjes(1, 1, z), ()), (mp_stieltjes(2, 0.5, z), ()),
                (shifted_semicircle_stieltjes(0.5, 1, z), ()),
                (effective_medium_stieltjes(1, z), ()), (effective_medium_stieltjes(0.4, z), ())]
        for mu in measures:
            runs.append((fixed_point_stieltjes(mu, 1, z), mu.xi))
            runs.append((adjacency_general_stieltjes(mu, z), mu.xi))
    for rep, xi in runs:
        worst_res = max(worst_res, rep.max_residual)
        violations += int(np.sum(stieltjes_violations(rep.f, z, xi)))
    ok = worst_res <= 1e-10 and violations == 0 and t["s"] < 1.0
    return ok, f"{len(runs)} solvers x 400 z: max residual {worst_res:.2e}, {violations} violations, {t['s']:.2f}s"


def criterion_2():
    zs = [x + 1j * y for x, y in zip(np.linspace(-5, 5, 20), np.geomspace(1e-2, 1e2, 20))]
    with timer() as t:
        fp = max(abs(fixed_point_stieltjes(WeightMeasure.from_pairs([(b, c)]), 1, z).f
                     - mp_stieltjes(b, c, z).f)
                 for b, c in [(1, 1), (2, 0.5), (0.5, 3)] for z in zs)
        adj = max(abs(adjacency_general_stieltjes(WeightMeasure.from_pairs([(1.0, c)]), z).f
                      - effective_medium_stieltjes(2 * c, z).f)
                  for c in (0.25, 0.5, 1.5) for z in zs)
        grid = np.linspace(-1, 8, 200)
        same = all(np.array_equal(block_laplacian_density(c, grid), mp_density(2, c, grid))
                   for c in (0.5, 1, 2))
    ok = fp <= 1e-10 and adj <= 1e-10 and same and t["s"] < 1.0
    return ok, f"fixed-point vs MP {fp:.1e}, adjacency vs cubic {adj:.1e}, block==MP(2,c) {same}, {t['s']:.2f}s"


def criterion_3():
    law = MarchenkoPastur(1, 1)
    with timer() as t:
        eigs = pooled("general-l", XiSpec.const(1), 3, 3, n=2000, m=2000,
                      cov=CovFamilySpec("diag-paired", 0.5))
        ks = ks_distance(eigs, law)
    emp, theo = esd_moments(eigs, 2), law.moments(2)
    rel = [abs(e - m) / abs(m) for e, m in zip(emp, theo)]
    ok = ks <= 0.03 and max(rel) <= 0.03 and t["s"] <= 120
    return ok, f"KS {ks:.4f}, moment rel. errors {rel[0]:.4f}, {rel[1]:.4f}, {t['s']:.1f}s"


def criterion_4():
    n, m = 1000, 20000
    with timer() as t:
        eigs = pooled("general-l", XiSpec.rademacher(math.sqrt(n / m)), 2, 4, n=n, m=m)
        ks = ks_distance(eigs, ShiftedSemicircle(0, 1))
    ok = ks <= 0.05 and t["s"] <= 300
    return ok, f"KS {ks:.4f}, {t['s']:.1f}s"


def _block_l(r, d, p, seed):
    s = build(EnsembleConfig("block-l", XiSpec.bernoulli(p), r=r, d=d, seed=seed))
    tr = float(np.trace(s.matrix))
    return eigenvalues_symmetric(s), tr, len(s.edges)


def criterion_5_reduced():
    with timer() as t:
        eigs, tr, edges = _block_l(100, 25, 0.25, 5)
        ks = ks_distance(eigs, BlockLaplacian(100 * 0.25 / 25))
    ok = ks <= 0.08 and tr == 2 * edges and t["s"] <= 60
    return ok, f"r=100 d=25: KS {ks:.4f}, Tr {tr!r} vs 2*edges {2 * edges}, {t['s']:.1f}s"


def criterion_5():
    with timer() as t:
        eigs, tr, edges = _block_l(200, 40, 0.2, 5)
        ks = ks_distance(eigs, BlockLaplacian(1))
    ok = ks <= 0.05 and tr == 2 * edges and t["s"] <= 600
    return ok, f"r=200 d=40: KS {ks:.4f}, Tr {tr!r} vs 2*edges {2 * edges}, {t['s']:.1f}s"


def criterion_6():
    with timer() as t:
        s = build(EnsembleConfig("block-a", XiSpec.bernoulli(0.2), r=200, d=40, seed=6))
        tr = float(np.trace(s.matrix))
        ks = ks_distance(eigenvalues_symmetric(s), EffectiveMedium(1))
    ok = ks <= 0.05 and tr == 0.0
    return ok, f"KS {ks:.4f}, Tr {tr!r}, {t['s']:.1f}s"


def criterion_7():
    r, d = 400, 20
    with timer() as t:
        s = build(EnsembleConfig("block-a", XiSpec.rademacher(math.sqrt(d / r)), r=r, d=d, seed=7))
        ks = ks_distance(eigenvalues_symmetric(s), ShiftedSemicircle(0, 1))
    return ks <= 0.06, f"KS {ks:.4f}, {t['s']:.1f}s"


def criterion_8():
    with timer() as t:
        step = MarchenkoPastur(0, 1.7)
        t_grid = np.array([-1, 0, 1.7 - 1e-12, 1.7, 1.7 + 1e-12, 5])
        want = (t_grid >= 1.7).astype(float)
        step_ok = (np.array_equal(step.cdf(t_grid), want) and step.cdf_left(1.7) == 0.0
                   and step.atoms()[0].weight == 1.0 and step.intervals() == [])
        em = EffectiveMedium(0)
        em_ok = (em.mass() - sum(a.weight for a in em.atoms()) == 0.0
                 and [(a.location, a.weight) for a in em.atoms()] == [(0.0, 1.0)]
                 and not np.any(em.density(np.linspace(-3, 3, 101))))
    ok = step_ok and em_ok and t["s"] < 1.0
    return ok, f"MP(0,c1) unit step {step_ok}, EffectiveMedium(0) density mass 0 + atom 1 {em_ok}, {t['s']:.2f}s"


def criterion_9():
    law = MarchenkoPastur(1, 1)
    lam = np.linspace(0.05, 3.95, 50)
    with timer() as t:
        err = float(np.max(np.abs(density_from_stieltjes(law, lam) - mp_density(1, 1, lam))))
    ok = err <= 1e-6 and t["s"] < 5
    return ok, f"max error {err:.2e} at 50 points, {t['s']:.2f}s"


def criterion_10(tmp_dir):
    args = ["simulate", "--model", "general-l", "--n", "300", "--m", "500",
            "--xi", "atoms:1@0.5,-0.25@0.5", "--cov", "diag-paired:0.4", "--trials", "4",
            "--seed", "10"]
    blobs = []
    old = os.environ.get("ESL_THREADS")
    try:
        for k, threads in enumerate(("1", "3", "4")):
            os.environ["ESL_THREADS"] = threads
            out = os.path.join(tmp_dir, f"run{k}")
            code = cli_main(args + ["--out", out])
            blobs.append(open(os.path.join(out, "report.json"), "rb").read() if code == 0 else b"")
    finally:
        if old is None:
            os.environ.pop("ESL_THREADS", None)
        else:
            os.environ["ESL_THREADS"] = old
    ok = bool(blobs[0]) and all(b == blobs[0] for b in blobs)
    return ok, f"ESL_THREADS=1,3,4 report.json identical: {ok}"


CRITERIA = [
    ("1 solver certification", criterion_1),
    ("2 reduction identities", criterion_2),
    ("3 Marchenko-Pastur reproduction", criterion_3),
    ("4 modified-regime semicircle", criterion_4),
    ("5 block Laplacian (reduced tier)", criterion_5_reduced),
    ("5 block Laplacian (full tier)", criterion_5),
    ("6 effective medium", criterion_6),
    ("7 semicircle from signed block adjacency", criterion_7),
    ("8 degenerate atoms", criterion_8),
    ("9 inversion consistency", criterion_9),
    ("10 determinism across thread counts", criterion_10),
]


def _line(name, ok, detail):
    return f"[{'PASS' if ok else 'FAIL'}] criterion {name}: {detail}"


def _check(capsys, name, fn, *args):
    ok, detail = fn(*args)
    with capsys.disabled():
        print("\n" + _line(name, ok, detail))
    assert ok, detail


def test_criterion_1(capsys):
    _check(capsys, *CRITERIA[0])


def test_criterion_2(capsys):
    _check(capsys, *CRITERIA[1])


@pytest.mark.slow
def test_criterion_3(capsys):
    _check(capsys, *CRITERIA[2])


@pytest.mark.slow
def test_criterion_4(capsys):
    _check(capsys, *CRITERIA[3])


@pytest.mark.slow
def test_criterion_5_reduced(capsys):
    _check(capsys, *CRITERIA[4])


@pytest.mark.slow
def test_criterion_5_full(capsys):
    _check(capsys, *CRITERIA[5])


@pytest.mark.slow
def test_criterion_6(capsys):
    _check(capsys, *CRITERIA[6])


@pytest.mark.slow
def test_criterion_7(capsys):
    _check(capsys, *CRITERIA[7])


def test_criterion_8(capsys):
    _check(capsys, *CRITERIA[8])


def test_criterion_9(capsys):
    _check(capsys, *CRITERIA[9])


def test_criterion_10(capsys, tmp_path):
    _check(capsys, *CRITERIA[10], str(tmp_path))


if __name__ == "__main__":
    import tempfile

    failed = 0
    for name, fn in CRITERIA:
        if fn is criterion_10:
            with tempfile.TemporaryDirectory() as tmp:
                ok, detail = fn(tmp)
        else:
            ok, detail = fn()
        failed += not ok
        print(_line(name, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
