"""Discretized kernels in L^2(R_+^n) on a uniform grid.

A kernel of order ``n`` is a complex tensor of shape ``(N,) * n`` whose
entries are function values on cells of width ``h``; integrals become
``h``-weighted sums, so ``inner`` and ``contract`` are quadratures of the
continuous operations.
"""
from __future__ import annotations

import string
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .combinatorics import PairPartition

DEFAULT_MAX_ORDER = 4
DEFAULT_MAX_GRID = 8


@dataclass(frozen=True, eq=False)
class Kernel:
    entries: np.ndarray
    h: float

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim and len(set(a.shape)) != 1:
            raise ValueError(f"kernel tensor must be cubic, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("kernel entries must be finite")
        if self.h <= 0:
            raise ValueError("cell width must be positive")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "h", float(self.h))

    @property
    def order(self) -> int:
        return self.entries.ndim

    @property
    def grid_n(self) -> int:
        return self.entries.shape[0] if self.order else 0

    def scalar(self) -> complex:
        if self.order:
            raise ValueError("not an order-0 kernel")
        return complex(self.entries)

    def with_entries(self, entries) -> "Kernel":
        return Kernel(entries, self.h)

    def __add__(self, other: "Kernel") -> "Kernel":
        _check_compatible(self, other, same_order=True)
        return Kernel(self.entries + other.entries, self.h)

    def __sub__(self, other: "Kernel") -> "Kernel":
        _check_compatible(self, other, same_order=True)
        return Kernel(self.entries - other.entries, self.h)

    def __mul__(self, c) -> "Kernel":
        return Kernel(self.entries * c, self.h)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.sqrt(max(inner(self, self).real, 0.0)))


def _check_compatible(f: Kernel, g: Kernel, same_order: bool = False) -> None:
    if f.h != g.h:
        raise ValueError(f"cell widths differ: {f.h} vs {g.h}")
    if f.order and g.order and f.grid_n != g.grid_n:
        raise ValueError(f"grid sizes differ: {f.grid_n} vs {g.grid_n}")
    if same_order and f.order != g.order:
        raise ValueError(f"orders differ: {f.order} vs {g.order}")


def scalar_kernel(value: complex, h: float) -> Kernel:
    return Kernel(np.asarray(value, dtype=complex), h)


def zeros(order: int, grid_n: int, h: float) -> Kernel:
    return Kernel(np.zeros((grid_n,) * order, dtype=complex), h)


def adjoint(f: Kernel) -> Kernel:
    """``f*(t_1..t_n) = conj f(t_n..t_1)``."""
    return Kernel(np.conj(f.entries.transpose(tuple(reversed(range(f.order))))), f.h)


def is_mirror_symmetric(f: Kernel, tol: float = 1e-12) -> bool:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return bool(np.max(np.abs(f.entries - adjoint(f).entries), initial=0.0) <= tol)


def symmetrize_mirror(f: Kernel) -> Kernel:
    return Kernel(0.5 * (f.entries + adjoint(f).entries), f.h)


def inner(f: Kernel, g: Kernel) -> complex:
    """``h^n sum conj(f) g``; conjugate-linear in ``f``."""
    _check_compatible(f, g, same_order=True)
    return complex(f.h ** f.order * np.vdot(f.entries, g.entries))


def contract(f: Kernel, g: Kernel, p: int) -> Kernel:
    """Contraction of order ``p``: the last ``p`` slots of ``f`` taken in reverse
    order are integrated against the first ``p`` slots of ``g``."""
    _check_compatible(f, g)
    n, m = f.order, g.order
    if not 0 <= p <= min(n, m):
        raise ValueError(f"contraction order {p} outside 0..{min(n, m)}")
    if p == 0:
        return Kernel(np.multiply.outer(f.entries, g.entries), f.h)
    f_axes = list(range(n - 1, n - p - 1, -1))
    g_axes = list(range(p))
    return Kernel(f.h**p * np.tensordot(f.entries, g.entries, axes=(f_axes, g_axes)), f.h)


def _letters(k: int) -> str:
    letters = string.ascii_letters
    if k > len(letters):
        raise ValueError("too many distinct indices for einsum")
    return letters[:k]


def pairing_integral(fs: Sequence[Kernel], p: PairPartition) -> complex:
    """Integral of ``f_1 (x) ... (x) f_r`` with time slots identified along ``p``."""
    if not fs:
        return 1.0 + 0j
    for f in fs[1:]:
        _check_compatible(fs[0], f)
    total = sum(f.order for f in fs)
    if p.size != total:
        raise ValueError(f"pairing has {p.size} points, kernels have {total} slots")
    letter = {}
    names = _letters(len(p.pairs))
    for (a, b), ch in zip(p.pairs, names):
        letter[a] = ch
        letter[b] = ch
    subs, pos = [], 1
    for f in fs:
        subs.append("".join(letter[pos + i] for i in range(f.order)))
        pos += f.order
    expr = ",".join(subs) + "->"
    value = np.einsum(expr, *[f.entries for f in fs], optimize=True)
    return complex(fs[0].h ** (total // 2) * value)


def slice_kernel(f: Kernel, k: int, t: int) -> Kernel:
    """Fix slot ``k`` (1-based) at grid index ``t``."""
    if not 1 <= k <= f.order:
        raise IndexError(f"slot {k} outside 1..{f.order}")
    if not 0 <= t < f.grid_n:
        raise IndexError(f"grid index {t} outside 0..{f.grid_n - 1}")
    return Kernel(np.take(f.entries, t, axis=k - 1), f.h)


def _tilde_perm(n: int, k: int) -> tuple[int, ...]:
    # remaining axes (t_1..t_{k-1}, t_{k+1}..t_n) reordered to (t_{k-1}..t_1, t_n..t_{k+1})
    first = list(range(k - 2, -1, -1))
    second = list(range(n - 2, k - 2, -1))
    return tuple(first + second)


def tilde_slice(f: Kernel, k: int, t: int) -> Kernel:
    """``conj f(t_1..t_{k-1}, t, t_{k+1}..t_n)`` read as a function of
    ``(t_{k-1},..,t_1, t_n,..,t_{k+1})``."""
    s = slice_kernel(f, k, t)
    return Kernel(np.conj(s.entries.transpose(_tilde_perm(f.order, k))), f.h)


def all_slices(f: Kernel, k: int) -> np.ndarray:
    """Stack of ``slice_kernel(f, k, t)`` over ``t`` on axis 0."""
    return np.moveaxis(f.entries, k - 1, 0)


def all_tilde_slices(f: Kernel, k: int) -> np.ndarray:
    """Stack of ``tilde_slice(f, k, t)`` over ``t`` on axis 0."""
    s = all_slices(f, k)
    perm = (0,) + tuple(i + 1 for i in _tilde_perm(f.order, k))
    return np.conj(s.transpose(perm))


# -- constructors ----------------------------------------------------------

def rank_one(vectors: Sequence[Sequence[complex]], h: float) -> Kernel:
    vs = [np.asarray(v, dtype=complex) for v in vectors]
    out = np.asarray(1.0 + 0j)
    for v in vs:
        out = np.multiply.outer(out, v)
    return Kernel(out, h)


def unit_vector(grid_n: int, h: float, index: int = 0) -> np.ndarray:
    """Indicator of one cell scaled to unit L^2 norm."""
    e = np.zeros(grid_n, dtype=complex)
    e[index] = 1.0 / np.sqrt(h)
    return e


def random_kernel(rng: np.random.Generator, order: int, grid_n: int, h: float,
                  mirror: bool = False, real: bool = False) -> Kernel:
    shape = (grid_n,) * order
    a = rng.normal(size=shape)
    if not real:
        a = a + 1j * rng.normal(size=shape)
    f = Kernel(a, h)
    return symmetrize_mirror(f) if mirror else f


def from_spec(spec: dict) -> Kernel:
    """Build a kernel from a generator description.

    Kinds: ``rank_one`` (``vectors``), ``symmetrized`` (``vectors``; the
    mirror symmetrization of their tensor product), ``random`` (``order``,
    ``grid_n``, ``seed``, optional ``mirror``/``real``), ``unit_power``
    (``order``, ``grid_n``, optional ``index``: ``e^{(x) order}`` for a
    unit cell indicator ``e``), ``file`` (``path``).  ``h`` defaults to 1.
    """
    kind = spec.get("kind")
    h = float(spec.get("h", 1.0))
    scale = spec.get("scale", 1.0)
    if kind == "rank_one":
        f = rank_one(spec["vectors"], h)
    elif kind == "symmetrized":
        f = symmetrize_mirror(rank_one(spec["vectors"], h))
    elif kind == "random":
        rng = np.random.default_rng(int(spec["seed"]))
        f = random_kernel(rng, int(spec["order"]), int(spec["grid_n"]), h,
                          mirror=bool(spec.get("mirror", False)), real=bool(spec.get("real", False)))
    elif kind == "unit_power":
        e = unit_vector(int(spec["grid_n"]), h, int(spec.get("index", 0)))
        f = rank_one([e] * int(spec["order"]), h)
    elif kind == "file":
        f = load_kernel(spec["path"])
    else:
        raise ValueError(f"unknown kernel kind {kind!r}")
    return f * scale if scale != 1.0 else f


# -- text format -------------------------------------------------------------

def dumps_kernel(f: Kernel) -> str:
    """Header ``order N h`` then one ``re im`` line per entry, row-major."""
    lines = [f"{f.order} {f.grid_n if f.order else 1} {f.h!r}"]
    for z in np.ravel(f.entries):
        lines.append(f"{float(z.real)!r} {float(z.imag)!r}")
    return "\n".join(lines) + "\n"


def loads_kernel(text: str) -> Kernel:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty kernel file")
    head = lines[0].split()
    if len(head) != 3:
        raise ValueError(f"bad header {lines[0]!r}, expected 'order N h'")
    order, grid_n, h = int(head[0]), int(head[1]), float(head[2])
    count = grid_n**order
    if len(lines) - 1 != count:
        raise ValueError(f"expected {count} entries, found {len(lines) - 1}")
    vals = np.empty(count, dtype=complex)
    for i, ln in enumerate(lines[1:]):
        parts = ln.split()
        vals[i] = complex(float(parts[0]), float(parts[1]) if len(parts) > 1 else 0.0)
    return Kernel(vals.reshape((grid_n,) * order), h)


def save_kernel(f: Kernel, path) -> None:
    Path(path).write_text(dumps_kernel(f))


def load_kernel(path) -> Kernel:
    return loads_kernel(Path(path).read_text())
