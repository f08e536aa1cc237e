"""Noncommutative polynomials in ``t_1..t_n``: derivatives, text form, and moments.

A monomial is a tuple of 1-based variable indices; ``()`` is the unit.
Expectations under a (q-)semicircular family are computed monomial by
monomial as pairing sums, never through an operator model.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .combinatorics import MAX_PAIRING_POINTS, SizeError
from .spd import SpdCovariance, as_spd

Word = tuple[int, ...]


def _clean(terms: Mapping, tol: float = 0.0) -> dict:
    return {k: complex(v) for k, v in terms.items() if abs(v) > tol}


@dataclass(frozen=True, eq=False)
class NcPolynomial:
    terms: Mapping[Word, complex]
    n_vars: int

    def __post_init__(self):
        if self.n_vars < 1:
            raise ValueError("n_vars must be positive")
        terms = _clean({tuple(int(i) for i in w): c for w, c in self.terms.items()})
        for w in terms:
            if any(i < 1 or i > self.n_vars for i in w):
                raise ValueError(f"word {w} uses a variable outside t1..t{self.n_vars}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def var(cls, j: int, n_vars: int) -> "NcPolynomial":
        return cls({(j,): 1.0}, n_vars)

    @classmethod
    def constant(cls, c: complex, n_vars: int) -> "NcPolynomial":
        return cls({(): c}, n_vars)

    @property
    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def _coerce(self, other) -> "NcPolynomial":
        if isinstance(other, NcPolynomial):
            if other.n_vars != self.n_vars:
                raise ValueError("polynomials live in different variable counts")
            return other
        return NcPolynomial.constant(other, self.n_vars)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return NcPolynomial(out, self.n_vars)

    __radd__ = __add__

    def __neg__(self):
        return NcPolynomial({w: -c for w, c in self.terms.items()}, self.n_vars)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, NcPolynomial):
            return NcPolynomial({w: c * other for w, c in self.terms.items()}, self.n_vars)
        other = self._coerce(other)
        out: dict[Word, complex] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                out[w] = out.get(w, 0) + c1 * c2
        return NcPolynomial(out, self.n_vars)

    def __rmul__(self, other):
        return NcPolynomial({w: other * c for w, c in self.terms.items()}, self.n_vars)

    def __pow__(self, k: int):
        out = NcPolynomial.constant(1.0, self.n_vars)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, NcPolynomial):
            return NotImplemented
        return self.n_vars == other.n_vars and self.terms == other.terms

    def almost_equal(self, other: "NcPolynomial", tol: float = 1e-12) -> bool:
        diff = self - other
        return all(abs(c) <= tol for c in diff.terms.values())

    def adjoint(self) -> "NcPolynomial":
        return NcPolynomial({w[::-1]: c.conjugate() for w, c in self.terms.items()}, self.n_vars)

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"NcPolynomial({format_polynomial(self)!r}, n_vars={self.n_vars})"


@dataclass(frozen=True, eq=False)
class NcBiPolynomial:
    """Element of ``P (x) P^op``: map from ``(left word, right word)`` to coefficient."""

    terms: Mapping[tuple[Word, Word], complex]
    n_vars: int

    def __post_init__(self):
        object.__setattr__(self, "terms", _clean(self.terms))

    def __eq__(self, other):
        if not isinstance(other, NcBiPolynomial):
            return NotImplemented
        return self.n_vars == other.n_vars and self.terms == other.terms

    def flip_multiply(self) -> NcPolynomial:
        """``a (x) b -> b a``."""
        out: dict[Word, complex] = {}
        for (a, b), c in self.terms.items():
            out[b + a] = out.get(b + a, 0) + c
        return NcPolynomial(out, self.n_vars)

    def multiply(self) -> NcPolynomial:
        out: dict[Word, complex] = {}
        for (a, b), c in self.terms.items():
            out[a + b] = out.get(a + b, 0) + c
        return NcPolynomial(out, self.n_vars)

    def __repr__(self):
        parts = [f"{c!r}*[{_word_str(a) or '1'} (x) {_word_str(b) or '1'}]" for (a, b), c in self.terms.items()]
        return "NcBiPolynomial(" + " + ".join(parts or ["0"]) + ")"


def _check_index(p: NcPolynomial, j: int) -> None:
    if not 1 <= j <= p.n_vars:
        raise IndexError(f"variable index {j} outside 1..{p.n_vars}")


def cyclic_derivative(p: NcPolynomial, j: int) -> NcPolynomial:
    """``D_j(a t_j b) = b a``, extended linearly."""
    _check_index(p, j)
    out: dict[Word, complex] = {}
    for w, c in p.terms.items():
        for k, v in enumerate(w):
            if v == j:
                new = w[k + 1:] + w[:k]
                out[new] = out.get(new, 0) + c
    return NcPolynomial(out, p.n_vars)


def difference_quotient(p: NcPolynomial, j: int) -> NcBiPolynomial:
    """``d_j(a t_j b) = a (x) b``, extended linearly."""
    _check_index(p, j)
    out: dict[tuple[Word, Word], complex] = {}
    for w, c in p.terms.items():
        for k, v in enumerate(w):
            if v == j:
                key = (w[:k], w[k + 1:])
                out[key] = out.get(key, 0) + c
    return NcBiPolynomial(out, p.n_vars)


def jacobian(P: Sequence[NcPolynomial]) -> list[list[NcBiPolynomial]]:
    if not P:
        return []
    n = P[0].n_vars
    if any(p.n_vars != n for p in P):
        raise ValueError("all entries of the tuple must share n_vars")
    return [[difference_quotient(p, j) for j in range(1, n + 1)] for p in P]


# -- text form --------------------------------------------------------------

def _word_str(w: Word) -> str:
    return "*".join(f"t{i}" for i in w)


def _coef_str(c: complex) -> str:
    if c.imag == 0:
        return repr(float(c.real))
    return repr(c)


def format_polynomial(p: NcPolynomial) -> str:
    """Text form such as ``0.5*t1*t2 + -1.0*t2*t1``; parsed back exactly by :func:`parse_polynomial`."""
    if not p.terms:
        return "0"
    parts = []
    for w in sorted(p.terms, key=lambda w: (len(w), w)):
        coef = _coef_str(p.terms[w])
        parts.append(coef if not w else f"{coef}*{_word_str(w)}")
    return " + ".join(parts)


_VAR = re.compile(r"^t(\d+)(?:\^(\d+))?$")


def _split_terms(text: str) -> list[str]:
    terms, depth, start = [], 0, 0
    s = text.replace(" ", "")
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > start:
            prev = s[i - 1]
            if prev in "eE" and i >= 2 and (s[i - 2].isdigit() or s[i - 2] == "."):
                continue  # exponent of a float literal
            if prev in "*+-":
                continue  # sign of the following factor
            terms.append(s[start:i])
            start = i
    terms.append(s[start:])
    return [t for t in terms if t not in ("", "+")]


def parse_polynomial(text: str, n_vars: int | None = None) -> NcPolynomial:
    """Parse sums of products of numbers and ``t<k>`` (optionally ``t<k>^e``)."""
    monomials: list[tuple[complex, Word]] = []
    for term in _split_terms(text):
        sign = 1.0
        while term and term[0] in "+-":
            if term[0] == "-":
                sign = -sign
            term = term[1:]
        coef: complex = sign
        word: list[int] = []
        for factor in term.split("*"):
            if not factor:
                raise ValueError(f"empty factor in {text!r}")
            m = _VAR.match(factor)
            if m:
                word.extend([int(m.group(1))] * int(m.group(2) or 1))
                continue
            f = factor
            if f.startswith("(") and f.endswith(")"):
                f = f[1:-1]
            try:
                coef *= complex(f)
            except ValueError:
                raise ValueError(f"cannot parse factor {factor!r} in {text!r}") from None
        monomials.append((coef, tuple(word)))
    max_var = max((max(w) for _, w in monomials if w), default=1)
    n = n_vars if n_vars is not None else max_var
    out: dict[Word, complex] = {}
    for c, w in monomials:
        out[w] = out.get(w, 0) + c
    return NcPolynomial(out, n)


# -- moments under (q-)semicircular laws --------------------------------------

@dataclass(frozen=True, eq=False)
class FamilyLaw:
    """Semicircular family with covariance ``C``; ``q`` set means the q-deformed law."""

    cov: SpdCovariance
    q: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "cov", as_spd(self.cov))
        if self.q is not None and not -1.0 <= self.q <= 1.0:
            raise ValueError("q must lie in [-1, 1]")

    @property
    def n_vars(self) -> int:
        return self.cov.dim


def pairing_moment(word: Sequence[int], C, q: float | None = None) -> float:
    """Sum over matchings of ``prod C[i_a, i_b]``, weighted by ``q**crossings``.

    ``q is None`` keeps only non-crossing matchings. Matchings are built
    left to right: a point either opens an arc or closes one of the open
    arcs; closing the arc that has ``k`` younger open arcs above it adds
    exactly ``k`` crossings. States ``(position, open arcs)`` are memoized.
    """
    word = tuple(int(i) for i in word)
    n = len(word)
    if n > MAX_PAIRING_POINTS:
        raise SizeError(f"word length {n} exceeds cap {MAX_PAIRING_POINTS}")
    if n % 2:
        return 0.0
    C = np.asarray(C.matrix if isinstance(C, SpdCovariance) else C, dtype=float)
    if word and (min(word) < 1 or max(word) > C.shape[0]):
        raise IndexError(f"word {word} indexes outside covariance of size {C.shape[0]}")
    free = q is None or q == 0

    @lru_cache(maxsize=None)
    def rec(pos: int, stack: tuple[int, ...]) -> float:
        remaining = n - pos
        if len(stack) > remaining:
            return 0.0
        if remaining == 0:
            return 1.0
        v = word[pos]
        total = rec(pos + 1, stack + (v,)) if len(stack) < remaining - 1 else 0.0
        if stack:
            top = len(stack) - 1
            total += C[stack[top] - 1, v - 1] * rec(pos + 1, stack[:top])
            if not free:
                for k in range(1, len(stack)):
                    idx = top - k
                    c = C[stack[idx] - 1, v - 1]
                    if c != 0.0:
                        total += q**k * c * rec(pos + 1, stack[:idx] + stack[idx + 1:])
        return total

    return float(rec(0, ()))


def expectation(p: NcPolynomial, law: FamilyLaw) -> complex:
    if p.n_vars != law.n_vars:
        raise ValueError(f"polynomial has {p.n_vars} variables, law has {law.n_vars}")
    if p.degree > MAX_PAIRING_POINTS:
        raise SizeError(f"degree {p.degree} exceeds cap {MAX_PAIRING_POINTS}")
    return complex(sum(c * pairing_moment(w, law.cov, law.q) for w, c in p.terms.items()))


def bi_expectation(b: NcBiPolynomial, law: FamilyLaw) -> complex:
    """``(tau (x) tau)`` of a bi-polynomial."""
    return complex(sum(
        c * pairing_moment(a, law.cov, law.q) * pairing_moment(bb, law.cov, law.q)
        for (a, bb), c in b.terms.items()
    ))


def conjugate_variables(C) -> list[NcPolynomial]:
    """``(C^{-1} t)_j``: the conjugate system of a covariance-C semicircular family."""
    C = as_spd(C)
    n = C.dim
    return [NcPolynomial({(k + 1,): C.inverse[j, k] for k in range(n)}, n) for j in range(n)]


def semicircular_potential(C) -> NcPolynomial:
    """``V_C = 1/2 sum_kl (C^{-1})_kl t_k t_l``."""
    C = as_spd(C)
    n = C.dim
    return NcPolynomial({(k + 1, l + 1): 0.5 * C.inverse[k, l] for k in range(n) for l in range(n)}, n)


def schwinger_dyson_residual(P: Sequence[NcPolynomial], C) -> float:
    """``max_j |tau((C^{-1} S)_j P_j) - (tau (x) tau)(d_j P_j)|`` under the covariance-C law."""
    law = FamilyLaw(C)
    if len(P) != law.n_vars:
        raise ValueError(f"need {law.n_vars} polynomials, got {len(P)}")
    xi = conjugate_variables(law.cov)
    worst = 0.0
    for j, pj in enumerate(P, start=1):
        lhs = expectation(xi[j - 1] * pj, law)
        rhs = bi_expectation(difference_quotient(pj, j), law)
        worst = max(worst, abs(lhs - rhs))
    return worst


def random_polynomial(rng: np.random.Generator, n_vars: int, max_degree: int, n_terms: int) -> NcPolynomial:
    terms: dict[Word, complex] = {}
    for _ in range(n_terms):
        deg = int(rng.integers(0, max_degree + 1))
        w = tuple(int(x) for x in rng.integers(1, n_vars + 1, size=deg))
        terms[w] = terms.get(w, 0) + float(rng.normal())
    return NcPolynomial(terms, n_vars)
