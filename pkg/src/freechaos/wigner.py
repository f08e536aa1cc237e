"""Moments of semicircular families and of multiple Wigner integrals.

The production route for joint moments of Wigner integrals is the
product formula ``I_n(f) I_m(g) = sum_p I_{n+m-2p}(f ⌢_p g)`` applied
left to right, keeping only the order-0 coefficient at the end.  The sum
over non-crossing respecting pairings is shipped alongside as an oracle.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .combinatorics import (
    MAX_PAIRING_POINTS,
    SizeError,
    catalan,
    inversions,
    noncrossing_partitions,
    noncrossing_respecting_pairings,
)
from .kernels import Kernel, adjoint, contract, inner, is_mirror_symmetric, pairing_integral
from .ncpoly import pairing_moment
from .spd import as_spd

MIRROR_TOL = 1e-10


class PreconditionError(ValueError):
    pass


def semicircle_moment(k: int, var: float = 1.0) -> float:
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k % 2:
        return 0.0
    return catalan(k // 2) * var ** (k // 2)


def family_moment(C, indices: Sequence[int]) -> float:
    """Mixed moment of a semicircular family: sum over NC pairings of products of ``C``."""
    return pairing_moment(indices, as_spd(C).matrix, None)


def q_family_moment(C, q: float, indices: Sequence[int]) -> float:
    """Mixed moment of a q-semicircular family: all pairings weighted by ``q**crossings``."""
    return pairing_moment(indices, as_spd(C).matrix, q)


def q_fock_inner(g_words: Sequence[Sequence[complex]], h_words: Sequence[Sequence[complex]], q: float) -> complex:
    """``<g_1 (x)..(x) g_n, h_1 (x)..(x) h_m>_q = delta_nm sum_sigma q^inv(sigma) prod <g_i, h_sigma(i)>``."""
    n, m = len(g_words), len(h_words)
    if n != m:
        return 0j
    if n > 8:
        raise SizeError("q-Fock inner product capped at 8 tensor factors")
    if n == 0:
        return 1 + 0j
    gram = np.array([[np.vdot(np.asarray(g, dtype=complex), np.asarray(h, dtype=complex))
                      for h in h_words] for g in g_words])
    total = 0j
    for sigma in itertools.permutations(range(n)):
        w = q ** inversions([s + 1 for s in sigma])
        total += w * math.prod(gram[i, sigma[i]] for i in range(n))
    return complex(total)


# -- Wigner integrals ----------------------------------------------------------

Chaos = dict[int, Kernel]  # order -> kernel of a non-homogeneous chaos element


def wigner_product(f: Kernel, g: Kernel) -> list[Kernel]:
    """Kernels ``f ⌢_p g`` for ``p = 0..min(n, m)``; ``I_n(f) I_m(g)`` is the sum of their integrals."""
    return [contract(f, g, p) for p in range(min(f.order, g.order) + 1)]


def _chaos_times(x: Chaos, g: Kernel, max_order: int) -> Chaos:
    out: Chaos = {}
    for f in x.values():
        for p in range(min(f.order, g.order) + 1):
            order = f.order + g.order - 2 * p
            if order > max_order:
                continue
            k = contract(f, g, p)
            out[order] = out[order] + k if order in out else k
    return out


def _as_kernels(fs: Iterable) -> list[Kernel]:
    out = []
    for item in fs:
        if isinstance(item, Kernel):
            out.append(item)
        else:
            q, f = item
            if f.order != q:
                raise ValueError(f"declared order {q} but kernel has order {f.order}")
            out.append(f)
    return out


def wigner_joint_moment(fs: Sequence) -> complex:
    """``tau(I_{n_1}(f_1) ... I_{n_r}(f_r))`` via iterated product formula.

    Items are kernels or ``(order, kernel)`` pairs.  Odd total order gives 0.
    """
    ks = _as_kernels(fs)
    if not ks:
        return 1 + 0j
    total = sum(f.order for f in ks)
    if total % 2:
        return 0j
    if total > MAX_PAIRING_POINTS:
        raise SizeError(f"total order {total} exceeds cap {MAX_PAIRING_POINTS}")
    remaining = total - ks[0].order
    x: Chaos = {ks[0].order: ks[0]}
    for g in ks[1:]:
        remaining -= g.order
        x = _chaos_times(x, g, remaining)
    return x[0].scalar() if 0 in x else 0j


def wigner_joint_moment_pairings(fs: Sequence) -> complex:
    """Oracle: sum of pairing integrals over non-crossing respecting pairings."""
    ks = _as_kernels(fs)
    if not ks:
        return 1 + 0j
    sizes = [f.order for f in ks]
    if sum(sizes) % 2:
        return 0j
    if any(s == 0 for s in sizes):
        scalars = math.prod(f.scalar() for f in ks if f.order == 0)
        rest = [f for f in ks if f.order > 0]
        return complex(scalars * wigner_joint_moment_pairings(rest))
    return complex(sum(pairing_integral(ks, p) for p in noncrossing_respecting_pairings(sizes)))


def fourth_moment_identity(f: Kernel) -> tuple[complex, float]:
    """``(tau(I_n(f)^4), 2 ||f||^4 + sum_{p=1}^{n-1} ||f ⌢_p f*||^2)`` for mirror-symmetric ``f``."""
    _require_mirror(f)
    lhs = wigner_joint_moment([f, f, f, f])
    return lhs, fourth_moment_rhs(f)


def fourth_moment_rhs(f: Kernel) -> float:
    norm_sq = inner(f, f).real
    fs = adjoint(f)
    return 2.0 * norm_sq**2 + contraction_excess(f, fs)


def contraction_excess(f: Kernel, fs: Kernel | None = None) -> float:
    """``sum_{p=1}^{n-1} ||f ⌢_p f*||^2``: the fourth free cumulant of ``I_n(f)``."""
    fs = adjoint(f) if fs is None else fs
    total = 0.0
    for p in range(1, f.order):
        c = contract(f, fs, p)
        total += inner(c, c).real
    return total


def _require_mirror(f: Kernel) -> None:
    scale = max(float(np.max(np.abs(f.entries), initial=0.0)), 1.0)
    if not is_mirror_symmetric(f, MIRROR_TOL * scale):
        raise PreconditionError("kernel is not mirror-symmetric")


def max_power(order: int) -> int:
    return MAX_PAIRING_POINTS // (2 * order) if order else 1


def opnorm_estimate(f: Kernel, m: int | None = None) -> float:
    """``tau((F* F)^m)^(1/2m)`` for ``F = I_n(f)``; increases to ``||F||`` as ``m`` grows."""
    n = f.order
    m = max_power(n) if m is None else m
    if 2 * m * n > MAX_PAIRING_POINTS:
        raise SizeError(f"2*m*n = {2 * m * n} exceeds cap {MAX_PAIRING_POINTS}")
    if n == 0:
        return abs(f.scalar())
    fs = adjoint(f)
    val = wigner_joint_moment([fs, f] * m).real
    return max(val, 0.0) ** (1.0 / (2 * m))


def haagerup_bound(f: Kernel) -> float:
    return (f.order + 1) * f.norm()


def haagerup_check(f: Kernel, m: int | None = None) -> bool:
    return opnorm_estimate(f, m) <= haagerup_bound(f) * (1 + 1e-9)


def grad_norm_sq(q: int, f: Kernel) -> float:
    """``||nabla I_q(f)||^2 = q ||f||^2``: the ``q`` slice families are orthogonal."""
    if f.order != q:
        raise ValueError(f"declared order {q} but kernel has order {f.order}")
    return q * inner(f, f).real


# -- vectors of Wigner integrals ----------------------------------------------

@dataclass(frozen=True, eq=False)
class WignerVector:
    """``(I_{q_1}(f_1), ..., I_{q_n}(f_n))`` with its Gram covariance."""

    components: tuple[tuple[int, Kernel], ...]
    gram: np.ndarray = field(init=False, repr=False)
    mirror: tuple[bool, ...] = field(init=False)

    def __post_init__(self):
        comps = tuple((int(q), f) for q, f in self.components)
        for q, f in comps:
            if f.order != q:
                raise ValueError(f"declared order {q} but kernel has order {f.order}")
        n = len(comps)
        gram = np.zeros((n, n), dtype=complex)
        for i, (qi, fi) in enumerate(comps):
            for j, (qj, fj) in enumerate(comps):
                if qi == qj:
                    gram[i, j] = inner(fj, fi)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "mirror", tuple(
            is_mirror_symmetric(f, MIRROR_TOL * max(float(np.max(np.abs(f.entries), initial=0.0)), 1.0))
            for _, f in comps))

    @classmethod
    def of(cls, kernels: Sequence[Kernel]) -> "WignerVector":
        return cls(tuple((f.order, f) for f in kernels))

    def __len__(self):
        return len(self.components)

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.components)

    @property
    def kernels(self) -> tuple[Kernel, ...]:
        return tuple(f for _, f in self.components)

    def real_gram(self) -> np.ndarray:
        if np.max(np.abs(self.gram.imag), initial=0.0) > 1e-10:
            raise ValueError("Gram matrix is not real")
        return self.gram.real.copy()

    def joint_moment(self, word: Sequence[int]) -> complex:
        """Joint moment of the components named by 1-based indices in ``word``."""
        return wigner_joint_moment([self.components[i - 1] for i in word])


# -- second chaos: free cumulants as traces ----------------------------------

class SecondChaosMoments:
    """Exact joint moments of ``I_2`` elements for large grids.

    For order-2 kernels the joint free cumulants are cyclic traces,
    ``kappa_n(I_2(f_1),...,I_2(f_n)) = int f_1(t_1,t_2) f_2(t_2,t_3) ... f_n(t_n,t_1)``
    for ``n >= 2`` (``kappa_1 = 0``), and moments follow from the sum over
    NC(n).  Cost is a handful of N x N matrix products instead of order-2r
    tensors, which is what makes grids of ~10^3 cells tractable.
    """

    def __init__(self, kernels: Sequence[Kernel]):
        if any(f.order != 2 for f in kernels):
            raise ValueError("all kernels must have order 2")
        self.h = kernels[0].h
        self.diagonal = False
        self.mats = [np.asarray(f.entries) * f.h for f in kernels]
        self._prefix: dict[tuple[int, ...], np.ndarray] = {}
        self._kappa: dict[tuple[int, ...], complex] = {}

    @classmethod
    def from_diagonals(cls, diagonals: Sequence[Sequence[complex]], h: float = 1.0) -> "SecondChaosMoments":
        """Kernels supported on the diagonal cells ``f(t_j, t_j) = d_j``, stored as vectors."""
        self = cls.__new__(cls)
        self.h = float(h)
        self.diagonal = True
        self.mats = [np.asarray(d, dtype=complex) * h for d in diagonals]
        self._prefix, self._kappa = {}, {}
        return self

    def _product(self, word: tuple[int, ...]) -> np.ndarray:
        if len(word) == 1:
            return self.mats[word[0]]
        if word not in self._prefix:
            head, last = self._product(word[:-1]), self.mats[word[-1]]
            self._prefix[word] = head * last if self.diagonal else head @ last
        return self._prefix[word]

    def cumulant(self, word: Sequence[int]) -> complex:
        """Joint free cumulant for 0-based component indices ``word``."""
        word = tuple(word)
        if len(word) < 2:
            return 0j
        if word not in self._kappa:
            head, last = self._product(word[:-1]), self.mats[word[-1]]
            self._kappa[word] = complex(np.sum(head * (last if self.diagonal else last.T)))
        return self._kappa[word]

    def moment(self, word: Sequence[int]) -> complex:
        """Joint moment for 1-based component indices ``word``."""
        w = tuple(i - 1 for i in word)
        n = len(w)
        if n == 0:
            return 1 + 0j
        total = 0j
        for p in noncrossing_partitions(n):
            if any(len(b) == 1 for b in p.blocks):
                continue
            term = 1 + 0j
            for b in p.blocks:
                term *= self.cumulant(tuple(w[i - 1] for i in b))
                if term == 0:
                    break
            total += term
        return total


@lru_cache(maxsize=None)
def words_up_to(n_components: int, max_len: int) -> tuple[tuple[int, ...], ...]:
    return tuple(w for k in range(1, max_len + 1)
                 for w in itertools.product(range(1, n_components + 1), repeat=k))

