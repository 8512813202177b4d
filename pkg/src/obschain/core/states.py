"""Pure states, density matrices and generalized Bloch vectors.

A qudit state is parametrized as ``rho = (1/d) (1 + kappa_d n.T)`` with
``kappa_d = sqrt(2 d (d-1))``, generators ``T_a`` normalized to
``Tr[T_a T_b] = delta_ab / 2`` and ``n`` a real vector of length ``d^2 - 1``.
For pure states ``n`` has unit Euclidean norm and the overlap of two pure
states is ``Tr[psi phi] = (1 + (d-1) n.m) / d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import DomainError

_NORM_TOL = 1e-12
_HERM_TOL = 1e-12
_EIG_TOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class PureState:
    """A normalized pure state of a ``dim``-dimensional system."""

    dim: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise DomainError(f"dimension must be >= 1, got {self.dim}")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.dim,):
            raise DomainError(f"amplitudes must have shape ({self.dim},), got {amps.shape}")
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > _NORM_TOL:
            raise DomainError(f"state not normalized: |psi|^2 = {norm_sq!r}")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def basis(cls, dim: int, index: int) -> "PureState":
        amps = np.zeros(dim, dtype=complex)
        amps[index] = 1.0
        return cls(dim, amps)


@dataclass(frozen=True)
class DensityMatrix:
    """A positive, unit-trace Hermitian matrix."""

    dim: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise DomainError(f"dimension must be >= 1, got {self.dim}")
        m = np.asarray(self.entries, dtype=complex)
        if m.shape != (self.dim, self.dim):
            raise DomainError(f"entries must have shape ({self.dim}, {self.dim}), got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > _HERM_TOL:
            raise DomainError("matrix is not Hermitian")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > _NORM_TOL:
            raise DomainError(f"trace must be 1, got {tr!r}")
        if float(np.linalg.eigvalsh(m).min()) < -_EIG_TOL:
            raise DomainError("matrix has a significantly negative eigenvalue")
        object.__setattr__(self, "entries", _frozen(m))


@dataclass(frozen=True)
class BlochVector:
    """Generalized Bloch vector of a ``dim``-dimensional system."""

    dim: int
    components: np.ndarray

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise DomainError(f"Bloch vectors need dimension >= 2, got {self.dim}")
        c = np.asarray(self.components, dtype=float)
        want = self.dim * self.dim - 1
        if c.shape != (want,):
            raise DomainError(f"components must have shape ({want},), got {c.shape}")
        object.__setattr__(self, "components", _frozen(c))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.components))


@lru_cache(maxsize=None)
def gell_mann(d: int) -> np.ndarray:
    """Generalized Gell-Mann generators ``T_a``, shape ``(d^2-1, d, d)``.

    Ordering: symmetric off-diagonal pairs, antisymmetric off-diagonal pairs,
    then the ``d - 1`` diagonal generators; the last entry is proportional to
    ``diag(1, ..., 1, 1-d)``. Normalization is ``Tr[T_a T_b] = delta_ab / 2``.
    """
    if d < 2:
        raise DomainError(f"generators need dimension >= 2, got {d}")
    mats = []
    for k in range(1, d):
        for j in range(k):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = 0.5
            m[k, j] = 0.5
            mats.append(m)
    for k in range(1, d):
        for j in range(k):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = -0.5j
            m[k, j] = 0.5j
            mats.append(m)
    for ell in range(1, d):
        m = np.zeros((d, d), dtype=complex)
        m[np.arange(ell), np.arange(ell)] = 1.0
        m[ell, ell] = -float(ell)
        mats.append(m / math.sqrt(2.0 * ell * (ell + 1.0)))
    return _frozen(np.stack(mats))


def kappa(d: int) -> float:
    """Scale factor ``sqrt(2 d (d-1))`` of the Bloch parametrization."""
    return math.sqrt(2.0 * d * (d - 1.0))


def bloch_from_pure(psi: PureState) -> BlochVector:
    """Bloch vector of a pure state; unit norm for any normalized input."""
    return bloch_from_density(density_from_pure(psi))


def density_from_pure(psi: PureState) -> DensityMatrix:
    """Rank-one projector ``|psi><psi|`` as a density matrix."""
    return DensityMatrix(psi.dim, np.outer(psi.amplitudes, psi.amplitudes.conj()))


def bloch_from_density(rho: DensityMatrix) -> BlochVector:
    """Bloch vector with components ``n_a = sqrt(2d/(d-1)) Tr[rho T_a]``."""
    d = rho.dim
    if d < 2:
        raise DomainError("Bloch decomposition needs dimension >= 2")
    t = gell_mann(d)
    comps = np.einsum("aij,ji->a", t, rho.entries).real * math.sqrt(2.0 * d / (d - 1.0))
    return BlochVector(d, comps)


def density_from_bloch(n: BlochVector) -> DensityMatrix:
    """Inverse of :func:`bloch_from_density`; input must describe a valid state."""
    d = n.dim
    t = gell_mann(d)
    m = (np.eye(d, dtype=complex) + kappa(d) * np.einsum("a,aij->ij", n.components, t)) / d
    return DensityMatrix(d, m)


def pure_overlap_from_bloch(n: BlochVector, m: BlochVector) -> float:
    """Overlap ``Tr[psi phi] = (1 + (d-1) n.m) / d`` of two pure states."""
    if n.dim != m.dim:
        raise DomainError(f"dimension mismatch: {n.dim} vs {m.dim}")
    d = n.dim
    return (1.0 + (d - 1.0) * float(np.dot(n.components, m.components))) / d
