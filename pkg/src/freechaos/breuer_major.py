"""Free Breuer-Major experiment for non-commutative fractional Brownian motion.

The increments ``X_k = S_{k+1} - S_k`` form a stationary semicircular
sequence with correlation ``rho_H``.  A block functional
``c sum_k U_q(X_k)`` is the order-``q`` chaos element with kernel
``c sum_k e_k^{(x) q}``, and every norm we need reduces to sums of powers
of ``rho_H`` in the Gram inner product ``<e_k, e_l> = rho_H(k - l)``.
No grid discretization of the fractional kernel is involved.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import binom, zeta

from .spd import as_spd

MAX_EXACT_N = 2**11
MAX_CHEBYSHEV = 12
_SERIES_FROM = 10  # rho_h switches to its large-|r| series beyond this
_MAX_TAIL_R = 2**22


def _check_h(H: float) -> None:
    if not 0.0 < H < 1.0:
        raise ValueError(f"H must lie in (0, 1), got {H}")


def rho_h(r, H: float):
    """``(|r+1|^{2H} + |r-1|^{2H} - 2|r|^{2H}) / 2``; accepts scalars or arrays.

    For ``|r| >= 10`` the even Taylor series in ``1/r`` is used, which avoids
    the cancellation of the direct formula at large lags.
    """
    _check_h(H)
    r_arr = np.abs(np.asarray(r, dtype=float))
    out = np.empty_like(r_arr)
    near = r_arr < _SERIES_FROM
    rn = r_arr[near]
    out[near] = 0.5 * (np.abs(rn + 1) ** (2 * H) + np.abs(rn - 1) ** (2 * H) - 2 * rn ** (2 * H))
    rf = r_arr[~near]
    if rf.size:
        x2 = (1.0 / rf) ** 2
        acc = np.zeros_like(rf)
        power = np.ones_like(rf)
        for k in range(1, 14):
            power = power * x2
            acc += binom(2 * H, 2 * k) * power
        out[~near] = rf ** (2 * H) * acc
    return float(out) if np.ndim(r) == 0 else out


def chebyshev_u(q: int) -> list[int]:
    """Ascending coefficients of ``U_q`` (``U_0 = 1``, ``U_1 = x``, ``U_{n+1} = x U_n - U_{n-1}``)."""
    if not 0 <= q <= MAX_CHEBYSHEV:
        raise ValueError(f"q must lie in 0..{MAX_CHEBYSHEV}")
    prev, cur = [1], [0, 1]
    if q == 0:
        return prev
    for _ in range(q - 1):
        nxt = [0] + cur
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return cur


def _check_hypothesis(q: int, H: float) -> None:
    _check_h(H)
    if q < 1:
        raise ValueError("q must be at least 1")
    if not H < 1 - 1 / (2 * q):
        raise ValueError(f"H = {H} violates H < 1 - 1/(2q) = {1 - 1 / (2 * q)}: sum of rho^q diverges")


def _tail(q: int, H: float, R: int) -> float:
    # leading-order tail 2 sum_{r>R} (H(2H-1) r^{2H-2})^q
    a = H * (2 * H - 1)
    if a == 0:
        return 0.0
    return 2.0 * a**q * float(zeta(q * (2 - 2 * H), R + 1))


def sigma_sq(q: int, H: float, tail_tol: float = 1e-12) -> float:
    """``sum_{r in Z} rho_H(r)^q``.

    Partial sums over ``|r| <= R`` plus the asymptotic tail; ``R`` doubles
    until two successive corrected sums agree to ``tail_tol``.
    """
    _check_hypothesis(q, H)
    R = 1024
    r = np.arange(1, R + 1)
    partial = 1.0 + 2.0 * float(np.sum(rho_h(r, H) ** q))
    prev = partial + _tail(q, H, R)
    while R < _MAX_TAIL_R:
        r = np.arange(R + 1, 2 * R + 1)
        partial += 2.0 * float(np.sum(rho_h(r, H) ** q))
        R *= 2
        cur = partial + _tail(q, H, R)
        if abs(cur - prev) < tail_tol:
            return cur
        prev = cur
    return prev


def _toeplitz_powers(n: int, H: float, exps: Sequence[int]) -> dict[int, np.ndarray]:
    lags = rho_h(np.arange(n), H)
    idx = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    base = lags[idx]
    return {e: base**e for e in set(exps)}


def bm_contraction_norm_sq(n: int, q: int, H: float, r: int, block: tuple[int, int] | None = None,
                           sigma2: float | None = None, dt: float = 1.0) -> float:
    """``||f ⌢_r f||^2`` for ``f = c sum_{k in block} e_k^{(x) q}``, ``c = 1/(sigma sqrt(n dt))``.

    Equals ``c^4 tr(A B A B)`` with ``A = [rho^r]`` and ``B = [rho^{q-r}]``
    over the block.  ``block`` defaults to ``(0, n)``.
    """
    if not 1 <= r <= q - 1:
        raise ValueError(f"r must lie in 1..{q - 1}")
    lo, hi = block if block is not None else (0, n)
    m = hi - lo
    if m > MAX_EXACT_N:
        raise ValueError(f"block of {m} increments exceeds the exact-mode cap {MAX_EXACT_N}")
    s2 = sigma_sq(q, H) if sigma2 is None else sigma2
    c2 = 1.0 / (s2 * n * dt)
    mats = _toeplitz_powers(m, H, (r, q - r))
    AB = mats[r] @ mats[q - r]
    return c2 * c2 * float(np.sum(AB * AB.T))


@dataclass(frozen=True)
class BmConfig:
    H: float
    q: int
    n: int
    times: tuple[float, ...] = (0.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        _check_hypothesis(self.q, self.H)
        if self.q < 2:
            raise ValueError("q must be at least 2")
        if self.n < 1:
            raise ValueError("n must be positive")
        t = self.times
        if len(t) < 2 or t[0] != 0.0 or any(b <= a for a, b in zip(t, t[1:])):
            raise ValueError("times must be increasing and start at 0")

    def blocks(self) -> list[tuple[int, int]]:
        return [(math.floor(self.n * a), math.floor(self.n * b)) for a, b in zip(self.times, self.times[1:])]


@dataclass
class BmReport:
    n: int
    x: list[float]
    y: list[float]
    covariance: list[list[float]]
    m_of_f: float
    dw_thm8: float | None
    extras: dict = field(default_factory=dict)


def bm_vector_report(cfg: BmConfig, sigma2: float | None = None) -> BmReport:
    """Fourth cumulants, variances and cross-covariances of the block vector."""
    from .stein import dw_from, psi

    q, H, n = cfg.q, cfg.H, cfg.n
    s2 = sigma_sq(q, H) if sigma2 is None else sigma2
    blocks = cfg.blocks()
    if any(b - a < 1 for a, b in blocks):
        raise ValueError("a time block contains no increments; increase n")
    end = blocks[-1][1]
    if end > MAX_EXACT_N:
        raise ValueError(f"{end} increments exceed the exact-mode cap {MAX_EXACT_N}")
    dts = [b - a for a, b in zip(cfg.times, cfg.times[1:])]
    cs = [1.0 / math.sqrt(s2 * n * dt) for dt in dts]
    mats = _toeplitz_powers(end, H, list(range(1, q + 1)))
    d = len(blocks)
    C = np.zeros((d, d))
    for i, (a, b) in enumerate(blocks):
        for j, (c, e) in enumerate(blocks):
            C[i, j] = cs[i] * cs[j] * float(np.sum(mats[q][a:b, c:e]))
    xs = []
    for i, (a, b) in enumerate(blocks):
        total = 0.0
        for r in range(1, q):
            AB = mats[r][a:b, a:b] @ mats[q - r][a:b, a:b]
            total += cs[i] ** 4 * float(np.sum(AB * AB.T))
        xs.append(total)
    ys = [float(C[i, i]) for i in range(d)]
    m = psi(xs, ys, [q] * d)
    try:
        dw = dw_from(m, as_spd(C))
    except ValueError:
        dw = None
    return BmReport(n=n, x=xs, y=ys, covariance=C.tolist(), m_of_f=m, dw_thm8=dw)


def theoretical_rate(q: int, H: float) -> float:
    """Exponent of ``n`` in the d_W bound for the three regimes of ``H``."""
    _check_hypothesis(q, H)
    if H <= 0.5:
        return -0.25
    if H <= (2 * q - 3) / (2 * q - 2):
        return (H - 1) / 2
    return (2 * q * H - 2 * q + 1) / 4


def aitken(seq: Sequence[float]) -> float:
    """Aitken delta-squared extrapolation from the last three terms."""
    if len(seq) < 3:
        return float(seq[-1])
    a, b, c = seq[-3:]
    denom = (c - b) - (b - a)
    if abs(denom) < 1e-15:
        return float(c)
    return float(c - (c - b) ** 2 / denom)


@dataclass
class RateRow:
    n: int
    m_of_f: float
    dw_thm8: float | None
    x: list[float]
    slope: float | None


@dataclass
class RateResult:
    q: int
    H: float
    rows: list[RateRow]
    last_slope: float
    aitken_slope: float
    theoretical: float


def bm_rate_experiment(H: float, q: int, n_list: Sequence[int], times: Sequence[float] = (0.0, 1.0)) -> RateResult:
    """``M(F_n)`` over dyadic ``n`` with slopes ``log2(M(2n) / M(n))``."""
    n_list = sorted(int(n) for n in n_list)
    if len(n_list) < 2:
        raise ValueError("need at least two sample sizes")
    for a, b in zip(n_list, n_list[1:]):
        if b != 2 * a:
            raise ValueError("n_list must be consecutive powers of two")
    s2 = sigma_sq(q, H)
    reports = [bm_vector_report(BmConfig(H, q, n, tuple(times)), s2) for n in n_list]
    slopes = [math.log2(b.m_of_f / a.m_of_f) for a, b in zip(reports, reports[1:])]
    rows = [RateRow(rep.n, rep.m_of_f, rep.dw_thm8, rep.x, slopes[i - 1] if i else None)
            for i, rep in enumerate(reports)]
    return RateResult(q=q, H=H, rows=rows, last_slope=slopes[-1], aitken_slope=aitken(slopes),
                      theoretical=theoretical_rate(q, H))
