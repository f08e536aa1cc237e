"""Symmetric positive definite covariance matrices and their functional calculus."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SYMMETRY_TOL = 1e-10
EIGEN_FLOOR = 1e-12


class NotPositiveDefinite(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SpdCovariance:
    """A real SPD matrix with its eigendecomposition cached.

    Build it with :func:`spd_analyze`; all derived matrices come from the
    symmetric eigendecomposition ``C = V diag(w) V^T``.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    inverse: np.ndarray = field(repr=False)
    sqrt: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def op_norm(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def inv_op_norm(self) -> float:
        return float(1.0 / self.eigenvalues[0])

    @property
    def condition_number(self) -> float:
        return float(self.eigenvalues[-1] / self.eigenvalues[0])

    def func(self, fn) -> np.ndarray:
        """Apply a scalar function through the spectrum."""
        w, v = self.eigenvalues, self.eigenvectors
        return (v * fn(w)) @ v.T

    def inv_func(self, fn) -> np.ndarray:
        """``fn`` applied to ``C^{-1}``."""
        return self.func(lambda w: fn(1.0 / w))


def spd_analyze(C) -> SpdCovariance:
    C = np.atleast_2d(np.asarray(C, dtype=float))
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError(f"covariance must be square, got shape {C.shape}")
    scale = max(np.abs(C).max(), 1.0)
    if np.abs(C - C.T).max() > SYMMETRY_TOL * scale:
        raise ValueError("covariance is not symmetric")
    C = 0.5 * (C + C.T)
    w, v = np.linalg.eigh(C)
    if w[0] <= EIGEN_FLOOR * max(abs(w[-1]), EIGEN_FLOOR):
        raise NotPositiveDefinite(f"not positive definite (smallest eigenvalue {w[0]:.3e})")
    inverse = (v / w) @ v.T
    sqrt = (v * np.sqrt(w)) @ v.T
    inverse = 0.5 * (inverse + inverse.T)
    sqrt = 0.5 * (sqrt + sqrt.T)
    for a in (C, w, v, inverse, sqrt):
        a.setflags(write=False)
    return SpdCovariance(C, w, v, inverse, sqrt)


def as_spd(C) -> SpdCovariance:
    return C if isinstance(C, SpdCovariance) else spd_analyze(C)


def ou_covariance(C, t: float) -> np.ndarray:
    """Covariance ``(I - exp(-t C^{-1})) C`` of the Ornstein-Uhlenbeck noise part."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    C = as_spd(C)
    return C.func(lambda w: (1.0 - np.exp(-t / w)) * w)


def ou_covariance_quadrature(C, t: float) -> np.ndarray:
    """Same quantity as ``exp(-t C^{-1}) * int_0^t exp(v C^{-1}) dv`` by adaptive quadrature.

    Kept separate from :func:`ou_covariance`: uses ``scipy.linalg.expm``
    rather than the eigendecomposition.
    """
    from scipy.integrate import quad_vec
    from scipy.linalg import expm

    C = as_spd(C)
    A = np.asarray(C.inverse)
    if t == 0:
        return np.zeros_like(A)
    integral, _ = quad_vec(lambda v: expm(v * A), 0.0, t, epsabs=1e-13, epsrel=1e-12)
    return expm(-t * A) @ integral
