"""Dense complex linear algebra over small multipartite Hilbert spaces.

Conventions used throughout the package:

- kets are 1-D complex ndarrays, local operators are square 2-D complex
  ndarrays;
- subsystems are indexed from 0, and site 0 is the *leftmost* factor in
  every Kronecker product (so ``|e0 e1 ... >`` orders basis labels the same
  way as ``kron``).

All functions here are pure and safe to call concurrently.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionCap, DimensionMismatch, NegativeSpectrum, NonHermitian

#: Largest full-space dimension the dense fallback paths will materialize.
DIMENSION_CAP = 2**14

#: Default tolerance for Hermiticity checks and eigenvalue clamping.
DEFAULT_TOL = 1e-10


def dag(op: np.ndarray) -> np.ndarray:
    """Hermitian adjoint."""
    return op.conj().T


def as_ket(vec) -> np.ndarray:
    """Coerce to a finite 1-D complex vector."""
    ket = np.asarray(vec, dtype=complex)
    if ket.ndim != 1 or ket.size == 0:
        raise DimensionMismatch(f"ket must be a nonempty 1-D vector, got shape {ket.shape}")
    if not np.all(np.isfinite(ket.view(float))):
        raise ValueError("ket has non-finite amplitudes")
    return ket


def as_operator(op) -> np.ndarray:
    """Coerce to a finite square complex matrix."""
    mat = np.asarray(op, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] == 0:
        raise DimensionMismatch(f"operator must be square, got shape {mat.shape}")
    if not np.all(np.isfinite(mat.view(float))):
        raise ValueError("operator has non-finite entries")
    return mat


def basis_ket(dim: int, index: int) -> np.ndarray:
    """Computational basis vector |index> in a dim-level system."""
    if not 0 <= index < dim:
        raise DimensionMismatch(f"basis index {index} outside dimension {dim}")
    ket = np.zeros(dim, dtype=complex)
    ket[index] = 1.0
    return ket


def qubit_lowering_op() -> np.ndarray:
    """|0><1| on a single qubit."""
    return np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


def qubit_raising_op() -> np.ndarray:
    """|1><0| on a single qubit."""
    return np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)


def annihilation_op(dim: int) -> np.ndarray:
    """Truncated bosonic annihilation operator, a|m> = sqrt(m)|m-1>."""
    if dim < 1:
        raise DimensionMismatch("annihilation operator needs dim >= 1")
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def matelem(bra, op, ket) -> complex:
    """Matrix element <bra|op|ket>; the bra is conjugated here."""
    bra = as_ket(bra)
    ket = as_ket(ket)
    mat = as_operator(op)
    if mat.shape != (bra.size, ket.size):
        raise DimensionMismatch(
            f"operator {mat.shape} incompatible with <{bra.size}|.|{ket.size}>"
        )
    return complex(np.vdot(bra, mat @ ket))


def total_dimension(dims) -> int:
    return math.prod(int(d) for d in dims)


def kron_embed(op, site: int, dims, cap: int = DIMENSION_CAP) -> np.ndarray:
    """Embed a local operator at one site of a multipartite space.

    Returns ``I ⊗ ... ⊗ op ⊗ ... ⊗ I`` with ``op`` at position ``site``
    (site 0 leftmost).  Raises :class:`DimensionCap` if the full space
    exceeds ``cap``.
    """
    dims = tuple(int(d) for d in dims)
    mat = as_operator(op)
    if not 0 <= site < len(dims):
        raise DimensionMismatch(f"site {site} outside {len(dims)} subsystems")
    if mat.shape[0] != dims[site]:
        raise DimensionMismatch(
            f"operator dim {mat.shape[0]} != subsystem dim {dims[site]} at site {site}"
        )
    total = total_dimension(dims)
    if total > cap:
        raise DimensionCap(f"full-space dimension {total} exceeds cap {cap}")
    left = total_dimension(dims[:site])
    right = total_dimension(dims[site + 1 :])
    out = mat
    if left > 1:
        out = np.kron(np.eye(left, dtype=complex), out)
    if right > 1:
        out = np.kron(out, np.eye(right, dtype=complex))
    return out


def kron_product(ops, cap: int = DIMENSION_CAP) -> np.ndarray:
    """Kronecker product ``ops[0] ⊗ ops[1] ⊗ ...`` with a size guard."""
    mats = [as_operator(op) for op in ops]
    if not mats:
        raise DimensionMismatch("need at least one operator")
    if total_dimension(m.shape[0] for m in mats) > cap:
        raise DimensionCap("full product operator exceeds dimension cap")
    out = mats[0]
    for mat in mats[1:]:
        out = np.kron(out, mat)
    return out


def psd_power(op, power: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Fractional power of a Hermitian positive-semidefinite matrix.

    Computed spectrally: eigenvalues are clamped at zero (round-off from
    truncated operators routinely produces eigenvalues like -1e-15) and
    raised to ``power``.  Eigenvalues below ``-tol * max(1, spectral
    radius)`` are treated as genuinely negative and raise
    :class:`NegativeSpectrum`; a Hermiticity defect above ``tol`` raises
    :class:`NonHermitian`.
    """
    mat = as_operator(op)
    if power <= 0:
        raise ValueError(f"power must be positive, got {power}")
    defect = float(np.max(np.abs(mat - dag(mat))))
    if defect > tol:
        raise NonHermitian(f"Hermiticity defect {defect:.3e} exceeds tol {tol:.3e}")
    evals, vecs = np.linalg.eigh(mat)
    radius = float(np.max(np.abs(evals)))
    if evals[0] < -tol * max(1.0, radius):
        raise NegativeSpectrum(f"eigenvalue {evals[0]:.3e} below -tol for tol {tol:.3e}")
    clamped = np.maximum(evals, 0.0)
    return (vecs * clamped**power) @ dag(vecs)
