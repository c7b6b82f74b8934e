"""Acceptance criteria, one test each.

Every test prints a single ``[ACCEPTANCE n] PASS|FAIL`` line with the measured
worst-case error and runtime, then asserts.
"""

import json
import time

import numpy as np
import pytest

from opcalc import calculus as calc
from opcalc.algebra import PartitionGeometry, adjoint, apply, multiply, represent, unrepresent
from opcalc.cli import main
from opcalc.discretize import approximation_bound, builtin_kernel, measured_gap
from opcalc.fredholm import StepFredholmOperator, closed_form_function, closed_form_spectrum, to_element
from opcalc.oracle import block_spectrum_multiset, match_multisets, oracle_norm, oracle_spectrum, projector
from opcalc.schrodinger import (
    GAP_CONSTANT,
    SchrodingerConfig,
    build_operator,
    l2_distance,
    solve_wavefunction,
)
from opcalc.serialize import dumps, element_from_json, element_to_json, loads
from opcalc.testing import random_element, random_geometry


@pytest.fixture
def report(capsys):
    def _report(n, title, passed, detail):
        with capsys.disabled():
            print(f"\n[ACCEPTANCE {n}] {'PASS' if passed else 'FAIL'} {title}: {detail}")

    return _report


def random_instances(count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        N = int(rng.integers(1, 4))
        S = int(rng.integers(1, 5))
        M = int(rng.integers(1, 3))
        g = random_geometry(rng, N, S, M)
        yield random_element(rng, g), random_element(rng, g)


def rel_err(a, b):
    return np.abs(a - b).max() / max(np.abs(b).max(), 1e-300)


def test_1_isomorphism(report):
    t0 = time.perf_counter()
    worst_rt = worst_hom = 0.0
    star_exact = True
    for X, Y in random_instances(200, seed=1):
        R = represent(X)
        worst_rt = max(worst_rt, rel_err(unrepresent(R).coeffs, X.coeffs))
        worst_hom = max(worst_hom, rel_err(represent(multiply(X, Y)).blocks, R.blocks @ represent(Y).blocks))
        star_exact &= np.array_equal(represent(adjoint(X)).blocks, np.conj(np.swapaxes(R.blocks, 1, 2)))
    dt = time.perf_counter() - t0
    ok = worst_rt <= 1e-13 and worst_hom <= 1e-12 and star_exact and dt < 10
    report(1, "isomorphism suite", ok,
           f"roundtrip {worst_rt:.2e}, homomorphism {worst_hom:.2e}, star exact {star_exact}, {dt:.2f}s")
    assert ok


def test_2_3_oracle_spectrum_and_norm(report):
    t0 = time.perf_counter()
    worst_spec = worst_norm = 0.0
    for X, _ in random_instances(100, seed=2):
        dense_eigs = oracle_spectrum(X, 2)
        scale = max(1.0, np.abs(dense_eigs).max())
        worst_spec = max(worst_spec, match_multisets(dense_eigs, block_spectrum_multiset(X, 2)) / scale)
        block_norm = max(np.linalg.norm(B, 2) for B in represent(X).blocks)
        worst_norm = max(worst_norm, abs(oracle_norm(X, 2) - block_norm) / max(1.0, block_norm))
    dt = time.perf_counter() - t0
    ok2 = worst_spec <= 1e-9 and dt < 60
    ok3 = worst_norm <= 1e-9
    report(2, "oracle spectrum equality", ok2, f"worst matched distance / scale {worst_spec:.2e}, {dt:.2f}s")
    report(3, "norm law", ok3, f"worst relative gap {worst_norm:.2e}")
    assert ok2 and ok3


def test_4_idempotents(report):
    worst = 0.0
    for N in (1, 2, 3):
        g = PartitionGeometry.uniform(N, 2 if N < 3 else 1, M=2)
        for q in (2, 3):
            P = [projector(g, a, q).matrix for a in range(1 << N)]
            eye = np.eye(P[0].shape[0])
            worst = max(worst, np.abs(sum(P) - eye).max())
            for a in range(1 << N):
                for b in range(1 << N):
                    target = P[a] if a == b else 0
                    worst = max(worst, np.abs(P[a] @ P[b] - target).max())
    ok = worst <= 1e-12
    report(4, "idempotent projectors", ok, f"worst entry error {worst:.2e}")
    assert ok


def hausdorff(a, b):
    d = np.abs(np.ravel(a)[:, None] - np.ravel(b)[None, :])
    return max(d.min(axis=1).max(), d.min(axis=0).max())


def test_5_fredholm_closed_forms(report):
    rng = np.random.default_rng(5)
    worst_f = worst_s = 0.0
    for _ in range(50):
        S = int(rng.integers(1, 7))
        A = 2.0 + rng.uniform(0, 1, S) + 0.5j * rng.standard_normal(S)
        B = 0.3 * (rng.standard_normal((S, S)) + 1j * rng.standard_normal((S, S))) / np.sqrt(S)
        op = StepFredholmOperator(A, B)
        X = to_element(op)
        poly = calc.polynomial(rng.standard_normal(6) + 1j * rng.standard_normal(6))
        for f in (calc.inverse(), calc.exp(), calc.sqrt(), poly):
            closed = to_element(closed_form_function(op, f)).coeffs
            general = calc.apply_function(X, f).coeffs
            worst_f = max(worst_f, rel_err(closed, general))
        worst_s = max(worst_s, hausdorff(calc.spectrum(X, 1e-12).union, closed_form_spectrum(op)))
    ok = worst_f <= 1e-10 and worst_s <= 1e-10
    report(5, "step Fredholm closed forms", ok, f"function rel err {worst_f:.2e}, spectrum set distance {worst_s:.2e}")
    assert ok


def test_6_discretization_bound(report):
    t0 = time.perf_counter()
    lines = []
    ok = True
    for name in ("demo", "linear-sum", "sin2"):
        spec = builtin_kernel(name)
        gaps, bounds = [], []
        for p in (2, 4, 8, 16):
            gaps.append(measured_gap(spec, p, 16))
            bounds.append(approximation_bound(spec, p))
        ratios = [b / a for a, b in zip(gaps, gaps[1:])]
        ok &= all(g <= b for g, b in zip(gaps, bounds)) and all(0.3 <= r <= 0.8 for r in ratios)
        lines.append(f"{name}: gaps {', '.join(f'{g:.3e}' for g in gaps)} "
                     f"(bounds {', '.join(f'{b:.3e}' for b in bounds)}), ratios {', '.join(f'{r:.2f}' for r in ratios)}")
    dt = time.perf_counter() - t0
    ok &= dt < 120
    report(6, "midpoint discretization bound", ok, "; ".join(lines) + f"; {dt:.2f}s")
    assert ok


def test_7_schrodinger(report):
    t0 = time.perf_counter()
    worst_herm = worst_res = worst_c = 0.0
    worst_ratio = 0.0
    cache = {}

    def solution(cfg):
        if cfg not in cache:
            cache[cfg] = solve_wavefunction(cfg)
        return cache[cfg]

    for lam in (-3.0, 1.3, 6.0):
        for eps in (0.5, 1.0, 2.0):
            for V in ((0.0, 0.0, 0.0), (1.0, -0.5, 2.0), (-2.0, 2.0, 0.3)):
                for p in (1, 2, 4):
                    cfg = SchrodingerConfig(lam, eps, V, p)
                    X = build_operator(cfg)
                    R = represent(X)
                    for B in R.blocks:
                        H = B + 1j * eps * np.eye(B.shape[0])
                        worst_herm = max(worst_herm, np.abs(H - H.conj().T).max())
                    sol = solution(cfg)
                    u = sol.on_grid(2)
                    resid = np.linalg.norm(apply(X, u).values - 1) / np.sqrt(u.values.size)
                    worst_res = max(worst_res, resid)
                    ref = unrepresent(R.map(lambda a, B: np.linalg.inv(B)))
                    worst_c = max(worst_c, max(np.abs(sol.C[a] - ref.coeffs[a]).max() for a in range(8)))
                    fine = solution(SchrodingerConfig(lam, eps, V, 2 * p))
                    d = l2_distance(sol, fine)
                    worst_ratio = max(worst_ratio, d / (2 * GAP_CONSTANT * cfg.h / eps**2))
    dt = time.perf_counter() - t0
    ok = worst_herm <= 1e-13 and worst_res <= 1e-9 and worst_c <= 1e-12 and worst_ratio <= 1 and dt < 120
    report(7, "Schroedinger solver", ok,
           f"hermitian defect {worst_herm:.1e}, residual {worst_res:.1e}, C vs Moebius {worst_c:.1e}, "
           f"max L2 gap / (48 pi h / eps^2) {worst_ratio:.2e}, {dt:.2f}s")
    assert ok


def test_8_cli_contract(report, capsys, tmp_path, monkeypatch):
    def run(*argv):
        code = main([str(a) for a in argv])
        return code, capsys.readouterr().out

    roundtrip = verify_ok = True
    for seed in range(20):
        spec = tmp_path / f"r{seed}.json"
        code, _ = run("generate-random", "--seed", seed, "--out", spec)
        text = spec.read_text()
        roundtrip &= code == 0 and dumps(element_to_json(element_from_json(loads(text)))) == text
        _, out = run("apply-fn", spec, "--fn", "poly:1,0.5,0.25")
        roundtrip &= dumps(element_to_json(element_from_json(loads(out)))) == out
        code, out = run("verify", spec)
        verify_ok &= code == 0 and json.loads(out)["passed"]

    bad = tmp_path / "bad.json"
    bad.write_text('{"N": 1, "S": ')
    singular = tmp_path / "singular.json"
    singular.write_text(dumps(element_to_json(to_element(StepFredholmOperator([1.0, 1.0], [[0, -1], [-1, 0]])))))
    big = tmp_path / "big.json"
    run("generate-random", "--seed", 3, "--N", 3, "--S", 4, "--M", 2, "--out", big)
    codes = {
        "ok": run("spectrum", singular)[0],
        "input": run("spectrum", bad)[0],
        "numeric": run("apply-fn", singular, "--fn", "inverse")[0],
    }
    monkeypatch.setenv("OPCALC_MAX_DENSE", "16")
    codes["size"] = run("verify", big)[0]
    codes_ok = codes == {"ok": 0, "input": 2, "numeric": 3, "size": 4}
    ok = roundtrip and verify_ok and codes_ok
    report(8, "CLI contract", ok, f"byte-identical round trip {roundtrip}, verify green on 20 specs {verify_ok}, exit codes {codes}")
    assert ok
