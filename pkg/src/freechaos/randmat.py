"""GUE Monte Carlo check of semicircular family moments."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .spd import as_spd
from .wigner import family_moment

MAX_N = 4096
MAX_WORD = 8


def _generator(seed: int, stream: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


def _gue(rng: np.random.Generator, N: int) -> np.ndarray:
    a = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / math.sqrt(2.0)
    return (a + a.conj().T) / math.sqrt(2.0 * N)


def _check_n(N: int) -> None:
    if not 1 <= N <= MAX_N:
        raise ValueError(f"N must lie in 1..{MAX_N}")


def sample_gue(N: int, seed: int, stream: int = 0) -> np.ndarray:
    """``(A + A^*) / sqrt(2N)`` with standard complex Gaussian ``A``: normalized traces tend to the semicircle."""
    _check_n(N)
    return _gue(_generator(seed, stream), N)


def sample_family(C, N: int, seed: int, stream: int = 0) -> list[np.ndarray]:
    """``Y = C^{1/2} X`` for independent GUE matrices ``X_1..X_k``."""
    _check_n(N)
    C = as_spd(C)
    rng = _generator(seed, stream)
    xs = [_gue(rng, N) for _ in range(C.dim)]
    root = C.sqrt
    return [sum(root[i, j] * xs[j] for j in range(C.dim)) for i in range(C.dim)]


def trace_word(mats: Sequence[np.ndarray], word: Sequence[int]) -> complex:
    """``(1/N) Tr(Y_{w_1} ... Y_{w_k})`` for 1-based ``word``."""
    N = mats[0].shape[0]
    if not word:
        return 1 + 0j
    prod = mats[word[0] - 1]
    for i in word[1:-1]:
        prod = prod @ mats[i - 1]
    if len(word) == 1:
        return complex(np.trace(prod) / N)
    last = mats[word[-1] - 1]
    return complex(np.sum(prod * last.T) / N)


@dataclass
class McRow:
    word: list[int]
    prediction: float
    estimate: float
    stderr: float
    passed: bool

    def to_dict(self) -> dict:
        return {"word": self.word, "prediction": self.prediction, "estimate": self.estimate,
                "stderr": self.stderr, "pass": self.passed}


def _word_traces(mats: Sequence[np.ndarray], words: Sequence[Sequence[int]]) -> list[float]:
    N = mats[0].shape[0]
    prefix: dict[tuple[int, ...], np.ndarray] = {}

    def prod(w: tuple[int, ...]) -> np.ndarray:
        if len(w) == 1:
            return mats[w[0] - 1]
        if w not in prefix:
            prefix[w] = prod(w[:-1]) @ mats[w[-1] - 1]
        return prefix[w]

    out = []
    for w in words:
        w = tuple(w)
        if not w:
            out.append(1.0)
        elif len(w) == 1:
            out.append(float(np.trace(mats[w[0] - 1]).real / N))
        else:
            out.append(float(np.sum(prod(w[:-1]) * mats[w[-1] - 1].T).real / N))
    return out


def mc_compare(C, words: Sequence[Sequence[int]], N: int, reps: int, seed: int,
               threads: int = 1) -> list[McRow]:
    """Average word traces over ``reps`` seeded draws and compare with the pairing formula.

    Repetition ``r`` draws from stream ``r`` of ``seed``, so results do not
    depend on ``threads``.  A row fails when
    ``|estimate - prediction| > 3 stderr + 10/N^2``.
    """
    C = as_spd(C)
    for w in words:
        if len(w) > MAX_WORD:
            raise ValueError(f"word {w} longer than {MAX_WORD}")
        if any(not 1 <= i <= C.dim for i in w):
            raise ValueError(f"word {w} has indices outside 1..{C.dim}")
    if reps < 2:
        raise ValueError("need at least two repetitions for a standard error")
    def one(rep: int) -> list[float]:
        return _word_traces(sample_family(C, N, seed, stream=rep), words)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            samples = np.array(list(pool.map(one, range(reps))))
    else:
        samples = np.array([one(rep) for rep in range(reps)])
    means = samples.mean(axis=0)
    errs = samples.std(axis=0, ddof=1) / math.sqrt(reps)
    rows = []
    for k, w in enumerate(words):
        pred = float(family_moment(C, w)) if w else 1.0
        ok = abs(means[k] - pred) <= 3 * errs[k] + 10.0 / N**2
        rows.append(McRow(list(w), pred, float(means[k]), float(errs[k]), bool(ok)))
    return rows
