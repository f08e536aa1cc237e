"""End-to-end acceptance checks, one test per criterion at full size.

Each test prints a single ``criterion N: PASS|FAIL`` line, visible even
without ``-s``.
"""
from __future__ import annotations

import json
import time

import pytest

from freechaos import verify
from freechaos.cli import main


def _report(capsys, number: int, result: verify.CheckResult, elapsed: float, limit: float | None = None) -> bool:
    within = limit is None or elapsed <= limit
    ok = result.passed and within
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} [{result.name}] {elapsed:.1f}s"
    if limit is not None:
        line += f" (limit {limit:.0f}s)"
    if not ok:
        line += f" detail={json.dumps(result.detail, default=str)}"
    with capsys.disabled():
        print("\n" + line)
    return ok


def _timed(fn):
    t0 = time.perf_counter()
    res = fn()
    return res, time.perf_counter() - t0


def test_criterion_01_product_vs_pairings(capsys):
    res, dt = _timed(lambda: verify.check_product_vs_pairings(0, trials=100))
    assert _report(capsys, 1, res, dt, 30)


def test_criterion_02_fourth_moment_identity(capsys):
    res, dt = _timed(lambda: verify.check_fourth_moment(0, trials=100))
    assert _report(capsys, 2, res, dt)


def test_criterion_03_contraction_bound_dominance(capsys):
    res, dt = _timed(lambda: verify.check_contraction_bound(0, trials=100, min_strict=90))
    assert _report(capsys, 3, res, dt)


def test_criterion_04_stein_pipeline(capsys):
    res, dt = _timed(verify.check_stein_pipeline)
    assert _report(capsys, 4, res, dt)


def test_criterion_05_schwinger_dyson(capsys):
    res, dt = _timed(lambda: verify.check_schwinger_dyson(0, trials=50))
    assert _report(capsys, 5, res, dt)


def test_criterion_06_q_engine(capsys):
    res, dt = _timed(lambda: verify.check_q_engine(0))
    assert _report(capsys, 6, res, dt)


def test_criterion_07_xi_q(capsys):
    res, dt = _timed(verify.check_xi_q)
    assert _report(capsys, 7, res, dt)


def test_criterion_08_matrix_identities(capsys):
    res, dt = _timed(lambda: verify.check_matrix_identities(0, trials=20))
    assert _report(capsys, 8, res, dt)


def test_criterion_09_hsi_le_lsi(capsys):
    res, dt = _timed(lambda: verify.check_hsi_lsi(0, trials=100))
    assert _report(capsys, 9, res, dt)


def test_criterion_10_breuer_major_rates(capsys):
    res, dt = _timed(lambda: verify.check_breuer_major(max_log2=11, soft=True))
    assert _report(capsys, 10, res, dt, 600)


def test_criterion_11_gue_monte_carlo(capsys):
    res, dt = _timed(lambda: verify.check_gue(0, N=1024, reps=20))
    assert _report(capsys, 11, res, dt, 120)


def test_criterion_12_haagerup(capsys):
    # includes the 2% tightness requirement for e(x)e
    res, dt = _timed(lambda: verify.check_haagerup(0, trials=50, tightness=True))
    assert _report(capsys, 12, res, dt)


def test_criterion_13_multivariate_fourth_moment(capsys):
    res, dt = _timed(verify.check_nps)
    assert _report(capsys, 13, res, dt)


def test_criterion_14_cli_determinism(capsys, tmp_path):
    def run_twice(command: str, config: dict) -> bool:
        cfg = tmp_path / f"{command}.cfg.json"
        cfg.write_text(json.dumps(config))
        blobs = []
        for i in (1, 2):
            out = tmp_path / f"{command}-{i}"
            code = main([command, "--config", str(cfg), "--out", str(out), "--seed", "7"])
            stem = command.replace("-", "_")
            blobs.append((code, (out / f"{stem}.json").read_bytes(), (out / f"{stem}.csv").read_bytes()))
        return blobs[0] == blobs[1] and blobs[0][0] == 0

    def check() -> verify.CheckResult:
        a = run_twice("verify", {"profile": "quick"})
        b = run_twice("breuer-major", {"H": 0.7, "q": 2, "n_list": [64, 128, 256, 512]})
        return verify.CheckResult("cli_determinism", a and b, {"verify": a, "breuer-major": b})

    res, dt = _timed(check)
    capsys.readouterr()
    assert _report(capsys, 14, res, dt)
