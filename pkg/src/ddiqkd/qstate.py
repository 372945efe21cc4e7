"""Minimal complex linear algebra for pure states and density matrices.

Everything here lives in tiny labeled tensor-product spaces (a handful of
two-level factors), stored dense.  Basis ordering is fixed globally: the
first label is the slowest-varying index, so for a polarization+path state
the amplitude order is (H,inp1), (H,inp2), (V,inp1), (V,inp2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NORM_TOL = 1e-12

__all__ = [
    "PureState",
    "DensityMatrix",
    "tensor",
    "partial_trace",
    "reduce_density",
    "trace_distance",
    "haar_amplitudes",
    "random_unitary",
]


@dataclass(frozen=True)
class PureState:
    """Unit-norm state vector over named two-level factors.

    amps   -- complex amplitudes, length 2**len(labels)
    labels -- ordered factor names, e.g. ("pol",) or ("pol", "path")
    """

    amps: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "labels", tuple(self.labels))
        if amps.ndim != 1:
            raise ValueError("amplitudes must be a vector")
        if amps.size != 2 ** len(self.labels):
            raise ValueError(
                f"dimension {amps.size} does not match factors {self.labels}"
            )
        if abs(np.linalg.norm(amps) - 1.0) > NORM_TOL:
            raise ValueError("state is not normalized")

    @property
    def dim(self) -> int:
        return self.amps.size

    def density(self) -> "DensityMatrix":
        """Rank-one projector |psi><psi| as a DensityMatrix."""
        return DensityMatrix(np.outer(self.amps, self.amps.conj()), self.labels)

    def overlap(self, other: "PureState") -> complex:
        """Inner product <self|other>."""
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return complex(np.vdot(self.amps, other.amps))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix (2x2 or 4x4).

    labels names the tensor factors when the operator acts on a labeled
    product space; it may be None for anonymous matrices.
    """

    mat: np.ndarray
    labels: tuple[str, ...] | None = field(default=None)

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        object.__setattr__(self, "mat", mat)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("density matrix must be square")
        if self.labels is not None and mat.shape[0] != 2 ** len(self.labels):
            raise ValueError("dimension does not match factor labels")
        if np.max(np.abs(mat - mat.conj().T)) > NORM_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(mat).real - 1.0) > NORM_TOL or abs(np.trace(mat).imag) > NORM_TOL:
            raise ValueError("density matrix trace is not 1")
        if np.min(np.linalg.eigvalsh(mat)) < -NORM_TOL:
            raise ValueError("density matrix has a negative eigenvalue")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Real spectrum in ascending order."""
        return np.linalg.eigvalsh(self.mat)


def tensor(a: PureState, b: PureState) -> PureState:
    """Kronecker product of two pure states; labels concatenate."""
    if a.dim * b.dim > 16:
        raise ValueError("combined dimension exceeds 16")
    shared = set(a.labels) & set(b.labels)
    if shared:
        raise ValueError(f"duplicate factor labels {sorted(shared)}")
    return PureState(np.kron(a.amps, b.amps), a.labels + b.labels)


def reduce_density(mat: np.ndarray, dims: tuple[int, ...], keep: tuple[int, ...]) -> np.ndarray:
    """Trace a dense matrix over all factors not listed in ``keep``.

    dims gives the factor dimensions in index order; keep lists the factor
    positions to retain (in their original order).
    """
    mat = np.asarray(mat, dtype=complex)
    n = len(dims)
    if mat.shape != (int(np.prod(dims)), int(np.prod(dims))):
        raise ValueError("matrix shape does not match factor dimensions")
    keep = tuple(keep)
    traced = [i for i in range(n) if i not in keep]
    tens = mat.reshape(*dims, *dims)
    # contract each traced factor's row index with its column index
    for offset, i in enumerate(sorted(traced)):
        ax = i - offset  # row-side axis after previous contractions
        ncur = tens.ndim // 2
        tens = np.trace(tens, axis1=ax, axis2=ax + ncur)
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return tens.reshape(d_keep, d_keep)


def partial_trace(rho: DensityMatrix, keep: str) -> DensityMatrix:
    """Reduce a labeled density matrix to the single named factor."""
    if rho.labels is None:
        raise ValueError("density matrix has no factor labels")
    if keep not in rho.labels:
        raise ValueError(f"unknown factor name {keep!r}")
    idx = rho.labels.index(keep)
    dims = (2,) * len(rho.labels)
    reduced = reduce_density(rho.mat, dims, (idx,))
    return DensityMatrix(reduced, (keep,))


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Half the sum of absolute eigenvalues of a - b; in [0, 1]."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    eigs = np.linalg.eigvalsh(a.mat - b.mat)
    return 0.5 * float(np.sum(np.abs(eigs)))


def haar_amplitudes(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector in C^dim."""
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    # fix the phase ambiguity of QR so the distribution is Haar
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))
