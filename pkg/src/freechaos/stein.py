"""Malliavin-Stein discrepancy of Wigner vectors and the bounds built on it.

``gamma_discrepancy_sq`` evaluates ``|| int (id(x)tau)(nabla_t I_p(f)) . (nabla_t I_q(g))* dt - a 1(x)1 ||^2``
exactly at kernel level.  Expanding the integrand gives one kernel per
``(m, l)``:

    term(m, l) = int f_t^p ⌢_l g~_t^m dt,     read in I_{p+m-2-2l} (x) I_{q-m},

and distinct ``(m, l)`` land in orthogonal bi-chaoses, so the squared
norm is the sum of the squared kernel norms, with ``a`` subtracted from
the single scalar term (present only when ``p == q``).
"""
from __future__ import annotations

import math
import string
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .kernels import Kernel, all_slices, all_tilde_slices, contract, inner
from .spd import SpdCovariance, as_spd
from .wigner import WignerVector, _require_mirror, contraction_excess


# -- Gamma discrepancy -------------------------------------------------------------

def gamma_terms(f: Kernel, g: Kernel) -> dict[tuple[int, int], Kernel]:
    """``{(m, l): int f_t^p ⌢_l g~_t^m dt}`` over the double sum of the expansion."""
    p, q = f.order, g.order
    if p < 1 or q < 1:
        raise ValueError("orders must be at least 1")
    if f.h != g.h or f.grid_n != g.grid_n:
        raise ValueError("kernels must share grid and cell width")
    h = f.h
    F = all_slices(f, p)  # (t, t_1..t_{p-1})
    letters = iter(string.ascii_letters)
    out = {}
    for m in range(1, q + 1):
        G = all_tilde_slices(g, m)  # (t, q-1 slots)
        for l in range(min(p, m)):
            T = next(letters)
            xs = [next(letters) for _ in range(p - 1 - l)]
            ss = [next(letters) for _ in range(l)]
            ys = [next(letters) for _ in range(q - 1 - l)]
            f_sub = T + "".join(xs) + "".join(reversed(ss))
            g_sub = T + "".join(ss) + "".join(ys)
            expr = f"{f_sub},{g_sub}->{''.join(xs + ys)}"
            val = np.einsum(expr, F, G, optimize=True) * h ** (l + 1)
            out[(m, l)] = Kernel(val, h)
            letters = iter(string.ascii_letters)
    return out


def gamma_discrepancy_terms(f: Kernel, g: Kernel, a: float) -> dict[tuple[int, int], float]:
    """Squared-norm contribution of each ``(m, l)`` term; key ``(0, 0)`` holds ``a^2`` when no scalar term exists."""
    _require_mirror(f)
    _require_mirror(g)
    contributions = {}
    has_scalar = False
    for (m, l), k in gamma_terms(f, g).items():
        if k.order == 0:
            has_scalar = True
            contributions[(m, l)] = abs(k.scalar() - a) ** 2
        else:
            contributions[(m, l)] = inner(k, k).real
    if not has_scalar:
        contributions[(0, 0)] = float(a) ** 2
    return contributions


def gamma_discrepancy_sq(f: Kernel, g: Kernel, a: float) -> float:
    return float(sum(gamma_discrepancy_terms(f, g, a).values()))


def _self_contraction_norm(f: Kernel, r: int) -> float:
    return contract(f, f, r).norm()


def lemma8_rhs(f: Kernel, g: Kernel, a: float) -> float:
    """Upper bound for :func:`gamma_discrepancy_sq` from contraction norms.

    ``A(f, g; p, l) = ||f ⌢_{p-l-1} f|| ||g||^2``; each ``(m, l)`` term is
    bounded by the smaller of the ``f``-side and ``g``-side quantities.
    For ``p > q`` the roles of ``f`` and ``g`` are swapped.
    """
    _require_mirror(f)
    _require_mirror(g)
    p, q = f.order, g.order
    if p > q:
        return lemma8_rhs(g, f, a)
    nf2, ng2 = inner(f, f).real, inner(g, g).real

    def A_f(l):  # A_{f,g}^{p,l}
        return _self_contraction_norm(f, p - l - 1) * ng2

    def A_g(top, m):  # A_{g,f}^{top,m}
        return _self_contraction_norm(g, top - m - 1) * nf2

    total = 0.0
    if p == q:
        total += abs(a - inner(f, g)) ** 2
        for m in range(1, p):
            for l in range(m):
                total += min(A_f(l), A_g(p + 1, m))
        for l in range(p - 1):
            total += min(A_f(l), A_g(p + 1, p))
    else:
        total += a**2 + nf2 * _self_contraction_norm(g, q - p)
        for m in range(1, q + 1):
            if m == p:
                continue
            for l in range(min(p, m)):
                total += min(A_f(l), A_g(q + 1, m))
        for l in range(p - 1):
            total += min(A_f(l), A_g(q + 1, p))
    return float(total)


# -- psi, M(F) and Wasserstein bounds -------------------------------------------------

def psi(xs: Sequence[float], ys: Sequence[float], orders: Sequence[int]) -> float:
    """Sum over ``j, k`` of ``w_jk min(|x_k|^{1/4} y_j^{1/2}, |x_j|^{1/4} y_k^{1/2})``.

    ``w_jk = q^{3/4}`` when the orders agree and ``max(q_j, q_k)^{3/4}`` otherwise.
    """
    n = len(xs)
    if len(ys) != n or len(orders) != n:
        raise ValueError("xs, ys and orders must have equal length")
    if any(y < 0 for y in ys):
        raise ValueError("ys must be nonnegative")
    total = 0.0
    for j in range(n):
        for k in range(n):
            w = max(orders[j], orders[k]) ** 0.75
            total += w * min(abs(xs[k]) ** 0.25 * ys[j] ** 0.5, abs(xs[j]) ** 0.25 * ys[k] ** 0.5)
    return total


def cumulant_inputs(F: WignerVector, route: str = "contractions") -> tuple[list[float], list[float]]:
    """``x_i = tau(F_i^4) - 2 tau(F_i^2)^2`` and ``y_i = tau(F_i^2)``.

    ``route="contractions"`` uses the contraction side of the fourth-moment
    identity; ``route="moments"`` multiplies out ``tau(F_i^4)`` with the
    product formula (only feasible on small grids).
    """
    from .wigner import wigner_joint_moment

    xs, ys = [], []
    for _, f in F.components:
        _require_mirror(f)
        y = inner(f, f).real
        if route == "contractions":
            x = contraction_excess(f)
        elif route == "moments":
            x = wigner_joint_moment([f] * 4).real - 2 * y**2
        else:
            raise ValueError(f"unknown route {route!r}")
        xs.append(x)
        ys.append(y)
    return xs, ys


def m_of_f(F: WignerVector, route: str = "contractions") -> float:
    xs, ys = cumulant_inputs(F, route)
    return psi(xs, ys, F.orders)


def stein_upper(F: WignerVector, C=None) -> tuple[float, np.ndarray]:
    """``||C^{-1}||_op sqrt(sum_ij gamma_discrepancy_sq(f_i, f_j, C_ij))`` and the matrix of squares."""
    C = as_spd(F.real_gram() if C is None else C)
    n = len(F)
    sq = np.zeros((n, n))
    for i, (_, fi) in enumerate(F.components):
        for j, (_, fj) in enumerate(F.components):
            sq[i, j] = gamma_discrepancy_sq(fi, fj, C.matrix[i, j])
    return C.inv_op_norm * math.sqrt(sq.sum()), sq


def dw_bounds(F: WignerVector, C=None) -> tuple[float, float]:
    """``(||C||^{1/2} ||C^{-1}|| M(F), ||C|| ||C^{-1}||^{1/2} stein_upper)``."""
    C = as_spd(F.real_gram() if C is None else C)
    m = m_of_f(F)
    su, _ = stein_upper(F, C)
    return dw_from(m, C), C.op_norm * math.sqrt(C.inv_op_norm) * su


def dw_from(m: float, C: SpdCovariance) -> float:
    return math.sqrt(C.op_norm) * C.inv_op_norm * m


# -- functional inequalities ---------------------------------------------------------

def fisher_decay_bound(t: float, sigma: float, C) -> float:
    """``e^{-2t/||C||} / sqrt(1 - e^{-2t/||C||}) ||C^{-1}||^{1/2} sigma``."""
    if t <= 0:
        raise ValueError("t must be positive")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    C = as_spd(C)
    u = math.exp(-2.0 * t / C.op_norm)
    return u / math.sqrt(-math.expm1(-2.0 * t / C.op_norm)) * math.sqrt(C.inv_op_norm) * sigma


def hsi_rhs(sigma: float, phi: float, C) -> float:
    """``(k(C)/2) sigma^2 log(1 + phi / (||C^{-1}|| sigma^2))``, zero at ``sigma = 0``."""
    if sigma < 0 or phi < 0:
        raise ValueError("sigma and phi must be nonnegative")
    C = as_spd(C)
    if sigma == 0:
        return 0.0
    s2 = sigma * sigma
    return 0.5 * C.condition_number * s2 * math.log1p(phi / (C.inv_op_norm * s2))


def lsi_rhs(phi: float, C) -> float:
    if phi < 0:
        raise ValueError("phi must be nonnegative")
    return as_spd(C).op_norm * phi / 2.0


def xi_q_discrepancy(q: float, n: int) -> float:
    """``sqrt(n) ||Xi_q - P_0||_HS = |q| n / sqrt(1 - q^2 n)``, defined for ``q^2 n < 1``."""
    _check_xi_domain(q, n)
    return abs(q) * n / math.sqrt(1.0 - q * q * n)


def xi_q_hs_norm_sq(q: float, n: int) -> float:
    """``||Xi_q - P_0||_HS^2 = sum_{N>=1} q^{2N} n^N = q^2 n / (1 - q^2 n)``.

    ``Xi_q`` acts as ``q^N`` on the ``n^N``-dimensional rank-``N`` tensors.
    """
    _check_xi_domain(q, n)
    return q * q * n / (1.0 - q * q * n)


def _check_xi_domain(q: float, n: int) -> None:
    if n < 1:
        raise ValueError("n must be positive")
    if q * q * n >= 1:
        raise ValueError(f"q^2 n = {q * q * n} >= 1: Xi_q - P_0 is not Hilbert-Schmidt")


def semicircular_entropy(n: int, rho: float) -> float:
    """Free entropy ``(n/2) log(2 pi e / rho)`` of ``n`` free semicirculars of variance ``1/rho``."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    return 0.5 * n * math.log(2 * math.pi * math.e / rho)


# -- report ----------------------------------------------------------------------

@dataclass
class BoundReport:
    orders: list[int]
    covariance: list[list[float]]
    x: list[float]
    y: list[float]
    gamma_discrepancy_sq: list[list[float]]
    gamma_terms: dict[str, float]
    lemma8_rhs: list[list[float]]
    stein_upper: float
    m_of_f: float
    dw_thm8: float
    dw_lemma: float
    cov_op_norm: float
    cov_inv_op_norm: float
    condition_number: float
    fisher: float | None = None
    hsi_rhs: float | None = None
    lsi_rhs: float | None = None
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def bound_report(F: WignerVector, fisher: float | None = None) -> BoundReport:
    """Evaluate the full pipeline for ``F`` with ``C`` its Gram matrix.

    HSI/LSI right-hand sides need the free Fisher information, which is
    not computed here; pass it as ``fisher`` to have them filled in.
    """
    C = as_spd(F.real_gram())
    xs, ys = cumulant_inputs(F)
    n = len(F)
    sq = np.zeros((n, n))
    rhs = np.zeros((n, n))
    terms = {}
    for i, (_, fi) in enumerate(F.components):
        for j, (_, fj) in enumerate(F.components):
            contrib = gamma_discrepancy_terms(fi, fj, C.matrix[i, j])
            sq[i, j] = sum(contrib.values())
            rhs[i, j] = lemma8_rhs(fi, fj, C.matrix[i, j])
            for (m, l), v in sorted(contrib.items()):
                terms[f"{i + 1},{j + 1}:m={m},l={l}"] = float(v)
    su = C.inv_op_norm * math.sqrt(sq.sum())
    m = psi(xs, ys, F.orders)
    report = BoundReport(
        orders=list(F.orders),
        covariance=C.matrix.tolist(),
        x=[float(v) for v in xs],
        y=[float(v) for v in ys],
        gamma_discrepancy_sq=sq.tolist(),
        gamma_terms=terms,
        lemma8_rhs=rhs.tolist(),
        stein_upper=su,
        m_of_f=m,
        dw_thm8=dw_from(m, C),
        dw_lemma=C.op_norm * math.sqrt(C.inv_op_norm) * su,
        cov_op_norm=C.op_norm,
        cov_inv_op_norm=C.inv_op_norm,
        condition_number=C.condition_number,
    )
    if fisher is not None:
        report.fisher = float(fisher)
        report.hsi_rhs = hsi_rhs(su, fisher, C)
        report.lsi_rhs = lsi_rhs(fisher, C)
    return report
