"""Oracle and invariant checks, shared by ``freechaos verify`` and the acceptance tests.

Each check is a plain function returning a :class:`CheckResult`; sizes
are arguments so the CLI can run a quick profile and the tests the full
one.  Every check is seeded and deterministic.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .breuer_major import bm_rate_experiment
from .combinatorics import crossing_number, enumerate_pair_partitions, noncrossing_respecting_pairings
from .kernels import random_kernel, rank_one, unit_vector
from .ncpoly import random_polynomial, schwinger_dyson_residual
from .nps import nps_sequence
from .randmat import mc_compare
from .spd import ou_covariance, ou_covariance_quadrature
from .stein import gamma_discrepancy_sq, hsi_rhs, lemma8_rhs, lsi_rhs, m_of_f, stein_upper, xi_q_hs_norm_sq
from .wigner import (
    WignerVector,
    fourth_moment_identity,
    haagerup_bound,
    opnorm_estimate,
    q_family_moment,
    wigner_joint_moment,
    wigner_joint_moment_pairings,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _rng(seed: int, salt: int) -> np.random.Generator:
    return np.random.default_rng([seed, salt])


def _random_spd(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.normal(size=(n, n))
    return a @ a.T + 0.5 * np.eye(n)


def check_product_vs_pairings(seed: int = 0, trials: int = 100) -> CheckResult:
    rng = _rng(seed, 1)
    worst = 0.0
    for _ in range(trials):
        r = int(rng.integers(1, 5))
        N = int(rng.integers(1, 4))
        h = float(rng.uniform(0.2, 1.5))
        orders = [int(o) for o in rng.integers(1, 4, size=r)]
        if sum(orders) % 2:
            orders[-1] = orders[-1] % 3 + 1 if orders[-1] < 3 else 2
        fs = [random_kernel(rng, o, N, h) for o in orders]
        worst = max(worst, abs(wigner_joint_moment(fs) - wigner_joint_moment_pairings(fs)))
    return CheckResult("product_vs_pairings", worst <= 1e-9, {"max_abs_diff": worst, "trials": trials})


def check_fourth_moment(seed: int = 0, trials: int = 100) -> CheckResult:
    rng = _rng(seed, 2)
    worst, min_excess = 0.0, math.inf
    for _ in range(trials):
        f = random_kernel(rng, int(rng.integers(1, 4)), int(rng.integers(1, 4)), float(rng.uniform(0.3, 1.0)), mirror=True)
        lhs, rhs = fourth_moment_identity(f)
        worst = max(worst, abs(lhs - rhs))
        from .kernels import inner
        min_excess = min(min_excess, rhs - 2 * inner(f, f).real ** 2)
    ok = worst <= 1e-10 and min_excess >= -1e-12
    return CheckResult("fourth_moment_identity", ok, {"max_abs_diff": worst, "min_excess": min_excess})


def check_contraction_bound(seed: int = 0, trials: int = 100, min_strict: int = 90) -> CheckResult:
    rng = _rng(seed, 3)
    violations, strict, cases = 0, 0, set()
    worst_ratio = 0.0
    for _ in range(trials):
        p, q = sorted(int(o) for o in rng.integers(1, 4, size=2))
        N = int(rng.integers(2, 4))
        h = float(rng.uniform(0.3, 1.0))
        f = random_kernel(rng, p, N, h, mirror=True)
        g = random_kernel(rng, q, N, h, mirror=True)
        a = float(rng.normal())
        lhs, rhs = gamma_discrepancy_sq(f, g, a), lemma8_rhs(f, g, a)
        cases.add("p=q" if p == q else "p<q")
        violations += lhs > rhs * (1 + 1e-10) + 1e-12
        strict += lhs < rhs * (1 - 1e-9)
        worst_ratio = max(worst_ratio, lhs / rhs if rhs else 0.0)
    ok = violations == 0 and strict >= min_strict and cases == {"p=q", "p<q"}
    return CheckResult("contraction_bound_dominance", ok, {"violations": violations, "strict": strict,
                                                "cases": sorted(cases), "max_ratio": worst_ratio})


def check_stein_pipeline() -> CheckResult:
    e = unit_vector(1, 1.0)
    F = WignerVector.of([rank_one([e, e], 1.0)])
    m = m_of_f(F)
    su, _ = stein_upper(F)
    # exact first-chaos family: orthonormal order-1 kernels
    N = 3
    G = WignerVector.of([rank_one([unit_vector(N, 0.5, i)], 0.5) for i in range(N)])
    m0 = m_of_f(G)
    su0, _ = stein_upper(G)
    ok = (abs(m - 2**0.75) <= 1e-12 and abs(su**2 - 2) <= 1e-10 and m0 == 0.0 and abs(su0) <= 1e-10)
    return CheckResult("stein_pipeline", ok, {"m_of_f": m, "stein_upper_sq": su**2,
                                                 "first_chaos_m": m0, "first_chaos_stein": su0})


def check_schwinger_dyson(seed: int = 0, trials: int = 50) -> CheckResult:
    rng = _rng(seed, 5)
    worst = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 4))
        C = _random_spd(rng, n)
        P = [random_polynomial(rng, n, 5, 4) for _ in range(n)]
        worst = max(worst, schwinger_dyson_residual(P, C))
    return CheckResult("schwinger_dyson", worst <= 1e-10, {"max_residual": worst})


def check_q_engine(seed: int = 0, trials: int = 20) -> CheckResult:
    rng = _rng(seed, 6)
    worst_free = worst_wick = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 4))
        C = _random_spd(rng, n)
        L = 2 * int(rng.integers(1, 4))
        word = [int(i) for i in rng.integers(1, n + 1, size=L)]
        nc = sum(math.prod(C[word[a - 1] - 1, word[b - 1] - 1] for a, b in p)
                 for p in enumerate_pair_partitions(L // 2) if crossing_number(p) == 0)
        wick = sum(math.prod(C[word[a - 1] - 1, word[b - 1] - 1] for a, b in p)
                   for p in enumerate_pair_partitions(L // 2))
        worst_free = max(worst_free, abs(q_family_moment(C, 0.0, word) - nc))
        worst_wick = max(worst_wick, abs(q_family_moment(C, 1.0, word) - wick))
    worst_poly = 0.0
    one = np.eye(1)
    for q in (-0.9, -0.3, 0.0, 0.4, 0.8):
        worst_poly = max(worst_poly,
                         abs(q_family_moment(one, q, [1] * 4) - (2 + q)),
                         abs(q_family_moment(one, q, [1] * 6) - (5 + 6 * q + 3 * q**2 + q**3)))
    scale = 1e-12
    ok = worst_free <= scale * 10 and worst_wick <= scale * 10 and worst_poly <= 1e-12
    return CheckResult("q_engine", ok, {"free": worst_free, "wick": worst_wick, "polynomial_in_q": worst_poly})


def check_xi_q() -> CheckResult:
    worst = 0.0
    for q, n in ((0.1, 4), (0.2, 3), (0.3, 2)):
        series = sum(q ** (2 * N) * n**N for N in range(1, 51))
        worst = max(worst, abs(xi_q_hs_norm_sq(q, n) - series))
    try:
        xi_q_hs_norm_sq(0.5, 4)
        domain_ok = False
    except ValueError:
        domain_ok = True
    return CheckResult("xi_q_closed_form", worst <= 1e-10 and domain_ok, {"max_abs_diff": worst, "domain_error": domain_ok})


def check_matrix_identities(seed: int = 0, trials: int = 20) -> CheckResult:
    from scipy.integrate import quad

    rng = _rng(seed, 8)
    worst = 0.0
    for _ in range(trials):
        C = _random_spd(rng, int(rng.integers(1, 6)))
        for t in (0.1, 1.0, 10.0):
            worst = max(worst, float(np.max(np.abs(ou_covariance(C, t) - ou_covariance_quadrature(C, t)))))
    worst_int = 0.0
    for c in (1.0, 2.0, 5.0):
        val, _ = quad(lambda t: math.exp(-2 * t / c) / math.sqrt(-math.expm1(-2 * t / c)), 0, math.inf,
                      epsabs=1e-12, epsrel=1e-12, limit=200)
        worst_int = max(worst_int, abs(val - c))
    ok = worst <= 1e-8 and worst_int <= 1e-6
    return CheckResult("matrix_identities", ok, {"ou_max_diff": worst, "fisher_integral_max_diff": worst_int})


def check_hsi_lsi(seed: int = 0, trials: int = 100) -> CheckResult:
    rng = _rng(seed, 9)
    violations = 0
    for _ in range(trials):
        C = _random_spd(rng, int(rng.integers(1, 4)))
        sigma = float(rng.uniform(0.0, 2.0))
        phi = float(rng.uniform(0.0, 5.0))
        violations += hsi_rhs(sigma, phi, C) > lsi_rhs(phi, C) * (1 + 1e-12)
    C = _random_spd(rng, 2)
    ratios = [hsi_rhs(1.0, u, C) / lsi_rhs(u, C) for u in (1e-2, 1e-4, 1e-6)]
    approach = ratios[-1] > ratios[0] and abs(ratios[-1] - 1) < 1e-5
    return CheckResult("hsi_le_lsi", violations == 0 and approach, {"violations": violations, "ratios": ratios})


def check_breuer_major(max_log2: int = 11, soft: bool = True) -> CheckResult:
    ns = [2**k for k in range(5, max_log2 + 1)]
    half = bm_rate_experiment(0.5, 2, ns)
    detail = {"H=0.5,q=2": {"slopes": [r.slope for r in half.rows[1:]]}}
    ok = all(abs(r.slope + 0.25) <= 1e-12 for r in half.rows[1:])
    for H, q in ((0.3, 3), (0.6, 3)):
        res = bm_rate_experiment(H, q, ns)
        good = abs(res.aitken_slope - res.theoretical) <= 0.10
        detail[f"H={H},q={q}"] = {"aitken": res.aitken_slope, "last": res.last_slope,
                                  "theoretical": res.theoretical, "pass": good}
        ok &= good
    if soft:
        res = bm_rate_experiment(0.8, 3, ns)
        ms = [r.m_of_f for r in res.rows]
        mono = all(b < a for a, b in zip(ms, ms[1:]))
        good = mono and abs(res.aitken_slope - res.theoretical) <= 0.05
        detail["H=0.8,q=3"] = {"aitken": res.aitken_slope, "last": res.last_slope,
                               "theoretical": res.theoretical, "monotone": mono, "pass": good}
        ok &= good
    return CheckResult("breuer_major_rates", bool(ok), detail)


def check_gue(seed: int = 0, N: int = 1024, reps: int = 20) -> CheckResult:
    single = mc_compare(np.eye(1), [(1, 1, 1, 1)], N, reps, seed)[0]
    C = np.array([[2.0, 1.0], [1.0, 2.0]])
    words = [(1, 2, 1, 2), (1, 1, 2, 2), (1, 2, 2, 1), (2, 2, 2, 2), (1, 1, 1, 2)]
    rows = mc_compare(C, words, N, reps, seed + 1)
    ok = abs(single.estimate - 2.0) <= 0.05 and all(r.passed for r in rows)
    return CheckResult("gue_monte_carlo", ok, {"fourth_moment": single.estimate,
                                               "rows": [r.to_dict() for r in rows]})


def check_haagerup(seed: int = 0, trials: int = 50, tightness: bool = True) -> CheckResult:
    rng = _rng(seed, 12)
    violations = 0
    for _ in range(trials):
        f = random_kernel(rng, int(rng.integers(1, 4)), int(rng.integers(1, 4)), float(rng.uniform(0.3, 1.0)))
        violations += opnorm_estimate(f) > haagerup_bound(f) * (1 + 1e-9)
    detail: dict = {"violations": violations}
    ok = violations == 0
    if tightness:
        e = unit_vector(1, 1.0)
        f = rank_one([e, e], 1.0)
        est, bound = opnorm_estimate(f), haagerup_bound(f)
        tight = abs(est - bound) <= 0.02 * bound
        detail.update({"e(x)e_estimate": est, "bound": bound, "within_2pct": tight})
        ok &= tight
    return CheckResult("haagerup", bool(ok), detail)


def check_nps() -> CheckResult:
    steps = nps_sequence()
    ms = [s.m_of_f for s in steps]
    mono = all(b < a for a, b in zip(ms, ms[1:]))
    final = steps[-1].max_moment_error
    return CheckResult("nps_fourth_moment", mono and final <= 1e-2,
                       {"k": [s.k for s in steps], "m_of_f": ms,
                        "moment_error": [s.max_moment_error for s in steps]})


def check_respecting_counts() -> CheckResult:
    # (1,1,1,1) -> 2 non-crossing pairings, (2,2) -> 1, (2,1,1) -> 1
    got = [len(noncrossing_respecting_pairings(s)) for s in ((1, 1, 1, 1), (2, 2), (2, 1, 1))]
    return CheckResult("respecting_counts", got == [2, 1, 1], {"counts": got})


Profile = list[tuple[str, Callable[[int], CheckResult]]]


def profile(name: str) -> Profile:
    """``quick`` for the CLI default, ``full`` for acceptance-sized runs.

    Neither includes the Haagerup tightness sub-check, which cannot be met
    under the moment-order cap (see the README); the acceptance suite runs it.
    """
    if name == "quick":
        return [
            ("respecting_counts", lambda s: check_respecting_counts()),
            ("product_vs_pairings", lambda s: check_product_vs_pairings(s, 20)),
            ("fourth_moment_identity", lambda s: check_fourth_moment(s, 20)),
            ("contraction_bound_dominance", lambda s: check_contraction_bound(s, 30, 25)),
            ("stein_pipeline", lambda s: check_stein_pipeline()),
            ("schwinger_dyson", lambda s: check_schwinger_dyson(s, 10)),
            ("q_engine", lambda s: check_q_engine(s, 10)),
            ("xi_q_closed_form", lambda s: check_xi_q()),
            ("matrix_identities", lambda s: check_matrix_identities(s, 5)),
            ("hsi_le_lsi", lambda s: check_hsi_lsi(s, 100)),
            ("breuer_major_half", lambda s: _bm_half()),
            ("gue_monte_carlo", lambda s: check_gue(s, 256, 8)),
            ("haagerup", lambda s: check_haagerup(s, 20, tightness=False)),
            ("nps_fourth_moment", lambda s: check_nps()),
        ]
    if name == "full":
        return [
            ("respecting_counts", lambda s: check_respecting_counts()),
            ("product_vs_pairings", lambda s: check_product_vs_pairings(s)),
            ("fourth_moment_identity", lambda s: check_fourth_moment(s)),
            ("contraction_bound_dominance", lambda s: check_contraction_bound(s)),
            ("stein_pipeline", lambda s: check_stein_pipeline()),
            ("schwinger_dyson", lambda s: check_schwinger_dyson(s)),
            ("q_engine", lambda s: check_q_engine(s)),
            ("xi_q_closed_form", lambda s: check_xi_q()),
            ("matrix_identities", lambda s: check_matrix_identities(s)),
            ("hsi_le_lsi", lambda s: check_hsi_lsi(s)),
            ("breuer_major_rates", lambda s: check_breuer_major()),
            ("gue_monte_carlo", lambda s: check_gue(s)),
            ("haagerup", lambda s: check_haagerup(s, tightness=False)),
            ("nps_fourth_moment", lambda s: check_nps()),
        ]
    raise ValueError(f"unknown profile {name!r}")


def _bm_half() -> CheckResult:
    res = bm_rate_experiment(0.5, 2, [2**k for k in range(3, 8)])
    slopes = [r.slope for r in res.rows[1:]]
    return CheckResult("breuer_major_half", all(abs(s + 0.25) <= 1e-12 for s in slopes), {"slopes": slopes})


def run_profile(name: str, seed: int = 0) -> list[CheckResult]:
    return [fn(seed) for _, fn in profile(name)]
