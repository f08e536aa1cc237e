"""A second-chaos vector sequence converging to a correlated semicircular pair.

Component kernels are diagonal on ``k`` cells:

    a_j = eps_j / sqrt(k),    b_j = (c eps_j + s delta_j) / sqrt(k),   s = sqrt(1 - c^2),

with sign patterns ``eps = (+,+,-,-)`` and ``delta = (+,-,+,-)`` repeated.
Odd joint cumulants vanish identically, ``C = [[1, c], [c, 1]]``, and the
fourth cumulants decay like ``1/k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import Kernel
from .stein import psi
from .wigner import SecondChaosMoments, family_moment, words_up_to

_EPS = np.array([1.0, 1.0, -1.0, -1.0])
_DELTA = np.array([1.0, -1.0, 1.0, -1.0])


def nps_diagonals(k: int, c: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    if k < 4 or k % 4:
        raise ValueError("k must be a positive multiple of 4")
    if not -1 < c < 1:
        raise ValueError("correlation must lie in (-1, 1)")
    eps = np.tile(_EPS, k // 4)
    delta = np.tile(_DELTA, k // 4)
    s = math.sqrt(1 - c * c)
    a = eps / math.sqrt(k)
    b = (c * eps + s * delta) / math.sqrt(k)
    return a, b


def nps_kernels(k: int, c: float = 0.5) -> tuple[Kernel, Kernel]:
    """Dense kernels of :func:`nps_diagonals`; only sensible for small ``k``."""
    a, b = nps_diagonals(k, c)
    return Kernel(np.diag(a), 1.0), Kernel(np.diag(b), 1.0)


def nps_m_of_f(mom: SecondChaosMoments) -> float:
    """``M(F)`` with ``x_i = kappa_4(F_i)`` and ``y_i = kappa_2(F_i)`` read off the cumulants."""
    n = len(mom.mats)
    xs = [mom.cumulant((i,) * 4).real for i in range(n)]
    ys = [mom.cumulant((i, i)).real for i in range(n)]
    return psi(xs, ys, [2] * n)


@dataclass
class NpsStep:
    k: int
    m_of_f: float
    max_moment_error: float


def nps_sequence(ks=(4, 16, 64, 256, 1024, 4096), c: float = 0.5, max_len: int = 6) -> list[NpsStep]:
    """Largest joint-moment gap to the semicircular family and ``M(F_k)`` per step."""
    C = np.array([[1.0, c], [c, 1.0]])
    words = words_up_to(2, max_len)
    targets = {w: family_moment(C, w) for w in words}
    steps = []
    for k in ks:
        mom = SecondChaosMoments.from_diagonals(nps_diagonals(k, c))
        err = max(abs(mom.moment(w) - targets[w]) for w in words)
        steps.append(NpsStep(k, nps_m_of_f(mom), float(err)))
    return steps
