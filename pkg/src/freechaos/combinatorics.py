"""Pair partitions, set partitions and free cumulants.

Indices are 1-based throughout, matching the usual way pairings of
``{1, ..., 2m}`` are written down.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

MAX_PAIRING_POINTS = 16
MAX_CATALAN = 30
MAX_CUMULANT_ORDER = 10


class SizeError(ValueError):
    """Raised when an enumeration would exceed its hard cap."""


@dataclass(frozen=True)
class PairPartition:
    """A perfect matching of ``{1..2m}`` stored as sorted ``(a, b)`` pairs, ``a < b``."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple(sorted((min(a, b), max(a, b)) for a, b in self.pairs))
        seen = sorted(x for p in pairs for x in p)
        if seen != list(range(1, len(seen) + 1)):
            raise ValueError(f"pairs {self.pairs!r} do not cover 1..{len(seen)} exactly once")
        object.__setattr__(self, "pairs", pairs)

    @property
    def size(self) -> int:
        return 2 * len(self.pairs)

    def partner(self) -> dict[int, int]:
        out = {}
        for a, b in self.pairs:
            out[a] = b
            out[b] = a
        return out

    def reflect(self) -> "PairPartition":
        n = self.size
        return PairPartition(tuple((n + 1 - b, n + 1 - a) for a, b in self.pairs))

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


@dataclass(frozen=True)
class SetPartition:
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        if any(len(b) == 0 for b in blocks):
            raise ValueError("empty block")
        seen = sorted(x for b in blocks for x in b)
        if seen != list(range(1, len(seen) + 1)):
            raise ValueError(f"blocks {self.blocks!r} do not partition 1..{len(seen)}")
        object.__setattr__(self, "blocks", blocks)

    def is_noncrossing(self) -> bool:
        label = {}
        for i, b in enumerate(self.blocks):
            for x in b:
                label[x] = i
        n = len(label)
        # a < b < c < d with a,c in one block and b,d in another
        for a in range(1, n + 1):
            for b in range(a + 1, n + 1):
                if label[b] == label[a]:
                    continue
                for c in range(b + 1, n + 1):
                    if label[c] != label[a]:
                        continue
                    for d in range(c + 1, n + 1):
                        if label[d] == label[b]:
                            return False
        return True


def _check_points(n_points: int) -> None:
    if n_points > MAX_PAIRING_POINTS:
        raise SizeError(f"pairing enumeration capped at {MAX_PAIRING_POINTS} points, got {n_points}")


def iter_pair_partitions(m: int) -> Iterator[PairPartition]:
    """Yield all (2m-1)!! matchings of ``{1..2m}``.

    Order: the smallest unpaired element is matched first, partners in
    ascending order.
    """
    if m < 0:
        raise ValueError("m must be nonnegative")
    _check_points(2 * m)

    def rec(free: tuple[int, ...], acc: list[tuple[int, int]]):
        if not free:
            yield PairPartition(tuple(acc))
            return
        a = free[0]
        for idx in range(1, len(free)):
            b = free[idx]
            acc.append((a, b))
            yield from rec(free[1:idx] + free[idx + 1:], acc)
            acc.pop()

    yield from rec(tuple(range(1, 2 * m + 1)), [])


def enumerate_pair_partitions(m: int) -> list[PairPartition]:
    return list(iter_pair_partitions(m))


def crossing_number(p: PairPartition) -> int:
    """Number of pairs-of-pairs ``(a, b), (c, d)`` with ``a < c < b < d``."""
    pairs = p.pairs
    count = 0
    for i, (a, b) in enumerate(pairs):
        for c, d in pairs[i + 1:]:
            if a < c < b < d:
                count += 1
    return count


def is_noncrossing(p: PairPartition) -> bool:
    return crossing_number(p) == 0


def interval_labels(interval_sizes: Sequence[int]) -> list[int]:
    labels = []
    for j, n in enumerate(interval_sizes):
        if n <= 0:
            raise ValueError("interval sizes must be positive")
        labels.extend([j] * n)
    return labels


def is_respecting(p: PairPartition, interval_sizes: Sequence[int]) -> bool:
    """True iff no pair has both endpoints in the same consecutive interval."""
    if sum(interval_sizes) != p.size:
        raise ValueError(f"interval sizes sum to {sum(interval_sizes)}, matching has {p.size} points")
    labels = interval_labels(interval_sizes)
    return all(labels[a - 1] != labels[b - 1] for a, b in p.pairs)


def noncrossing_respecting_pairings(interval_sizes: Sequence[int]) -> list[PairPartition]:
    total = sum(interval_sizes)
    if total % 2:
        return []
    return [
        p for p in iter_pair_partitions(total // 2)
        if is_respecting(p, interval_sizes) and is_noncrossing(p)
    ]


def inversions(s: Sequence[int]) -> int:
    """Number of ``i < j`` with ``s[i] > s[j]`` for a permutation of ``{1..k}``."""
    if sorted(s) != list(range(1, len(s) + 1)):
        raise ValueError(f"{s!r} is not a permutation of 1..{len(s)}")
    return sum(1 for i in range(len(s)) for j in range(i + 1, len(s)) if s[i] > s[j])


def catalan(m: int) -> int:
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m > MAX_CATALAN:
        raise SizeError(f"catalan capped at m={MAX_CATALAN}")
    return math.comb(2 * m, m) // (m + 1)


def double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


# -- set partitions and free cumulants ------------------------------------

def iter_set_partitions(k: int) -> Iterator[SetPartition]:
    """All set partitions of ``{1..k}`` via restricted growth strings."""
    if k == 0:
        yield SetPartition(())
        return

    def rec(i: int, rgs: list[int], nblocks: int):
        if i == k:
            blocks: list[list[int]] = [[] for _ in range(nblocks)]
            for x, b in enumerate(rgs, start=1):
                blocks[b].append(x)
            yield SetPartition(tuple(tuple(b) for b in blocks))
            return
        for b in range(nblocks + 1):
            rgs.append(b)
            yield from rec(i + 1, rgs, max(nblocks, b + 1))
            rgs.pop()

    yield from rec(0, [], 0)


@lru_cache(maxsize=None)
def noncrossing_partitions(k: int) -> tuple[SetPartition, ...]:
    """NC(k), obtained by filtering all set partitions."""
    if k > MAX_CUMULANT_ORDER:
        raise SizeError(f"NC(k) enumeration capped at k={MAX_CUMULANT_ORDER}")
    return tuple(p for p in iter_set_partitions(k) if p.is_noncrossing())


@lru_cache(maxsize=None)
def _nc_block_profiles(k: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    # multiset of block sizes -> number of NC partitions with that profile
    counts: dict[tuple[int, ...], int] = {}
    for p in noncrossing_partitions(k):
        key = tuple(sorted(len(b) for b in p.blocks))
        counts[key] = counts.get(key, 0) + 1
    return tuple(sorted(counts.items()))


def free_cumulants_to_moments(cumulants: Sequence[float], k: int | None = None) -> list[float]:
    """Moments ``m_1..m_k`` from free cumulants via the sum over NC(n)."""
    k = len(cumulants) if k is None else k
    if len(cumulants) < k:
        raise ValueError(f"need {k} cumulants, got {len(cumulants)}")
    kappa = [0.0] + [cumulants[i] for i in range(k)]
    moments = []
    for n in range(1, k + 1):
        total = 0.0
        for sizes, mult in _nc_block_profiles(n):
            total += mult * math.prod(kappa[s] for s in sizes)
        moments.append(total)
    return moments


def moments_to_free_cumulants(moments: Sequence[float], k: int | None = None) -> list[float]:
    """Invert the NC moment-cumulant relation order by order.

    ``kappa_n = m_n - sum over NC(n) \\ {1_n}`` of products of lower cumulants.
    """
    k = len(moments) if k is None else k
    if len(moments) < k:
        raise ValueError(f"need {k} moments, got {len(moments)}")
    if k > MAX_CUMULANT_ORDER:
        raise SizeError(f"cumulant order capped at {MAX_CUMULANT_ORDER}")
    kappa = [0.0]
    for n in range(1, k + 1):
        rest = 0.0
        for sizes, mult in _nc_block_profiles(n):
            if sizes == (n,):
                continue
            rest += mult * math.prod(kappa[s] for s in sizes)
        kappa.append(moments[n - 1] - rest)
    return kappa[1:]
