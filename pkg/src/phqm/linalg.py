"""Dense complex linear-algebra primitives shared by every module.

All tolerances are relative to the spectral norm of the input operator.
Eigenpairs follow a deterministic convention: eigenvalues sorted by
(real part, imaginary part), and each eigenvector phase-fixed so that its
largest-magnitude entry is real and positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DefectiveOperatorError,
    DimensionMismatchError,
    NotHermitianError,
    SpectrumOutOfDomainError,
)

DEFAULT_TOL = 1e-10
CONDITION_THRESHOLD = 1e12


def as_matrix(a) -> np.ndarray:
    """Coerce to a square, finite complex matrix."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(a.T)


def opnorm(a: np.ndarray) -> float:
    """Spectral norm (largest singular value)."""
    return float(np.linalg.norm(a, 2))


def is_hermitian(a: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    scale = max(opnorm(a), 1e-300)
    return opnorm(a - dagger(a)) <= tol * scale


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        k = int(np.argmax(np.abs(out[:, j])))
        pivot = out[k, j]
        if np.abs(pivot) > 0:
            out[:, j] *= np.abs(pivot) / pivot
    return out


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenpairs of a general complex matrix.

    values are sorted by (real, imag); right_vectors holds unit-norm,
    phase-fixed eigenvectors as columns.  condition estimates the
    eigenvector-matrix conditioning, which doubles as the
    exceptional-point diagnostic.
    """

    values: np.ndarray
    right_vectors: np.ndarray
    condition: float
    diagonalizable: bool

    @property
    def dim(self) -> int:
        return len(self.values)


def eig_nonhermitian(
    a,
    tol: float = DEFAULT_TOL,
    condition_threshold: float = CONDITION_THRESHOLD,
    check: bool = True,
) -> EigenDecomposition:
    """Eigendecomposition of a general complex matrix.

    Raises DefectiveOperatorError when the eigenvector matrix condition
    number exceeds ``condition_threshold`` (a numerical exceptional
    point), unless ``check`` is False in which case the flag is recorded
    on the result instead.
    """
    m = as_matrix(a)
    values, vectors = np.linalg.eig(m)
    order = np.lexsort((values.imag, values.real))
    values = values[order]
    vectors = fix_phases(vectors[:, order])

    condition = float(np.linalg.cond(vectors))
    diagonalizable = bool(np.isfinite(condition) and condition < condition_threshold)
    if check and not diagonalizable:
        raise DefectiveOperatorError(
            f"eigenvector matrix condition {condition:.3e} exceeds "
            f"threshold {condition_threshold:.1e}"
        )

    scale = max(opnorm(m), 1e-300)
    residual = opnorm(m @ vectors - vectors * values[None, :])
    if diagonalizable and residual > 100 * max(tol, 1e-14) * scale:
        raise DefectiveOperatorError(
            f"eigenpair residual {residual:.3e} above {tol:.1e} * |A|"
        )
    return EigenDecomposition(values, vectors, condition, diagonalizable)


def hermitian_function(h, f, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum.

    f is evaluated on the real eigenvalues; non-finite values mean the
    spectrum leaves the domain of f (e.g. sqrt of a non-positive-definite
    matrix) and raise SpectrumOutOfDomainError.
    """
    m = as_matrix(h)
    if not is_hermitian(m, tol):
        raise NotHermitianError("input is not Hermitian within tolerance")
    values, vectors = np.linalg.eigh(m)
    with np.errstate(all="ignore"):
        fvals = np.asarray(f(values))
    if not np.all(np.isfinite(fvals)):
        raise SpectrumOutOfDomainError(
            "function returned non-finite values on the spectrum"
        )
    result = (vectors * fvals[None, :]) @ dagger(vectors)
    if np.isrealobj(fvals) or np.all(np.abs(fvals.imag) == 0):
        result = 0.5 * (result + dagger(result))
    return result


def sqrtm_pd(h, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Positive square root of a positive-definite Hermitian matrix."""
    return hermitian_function(h, np.sqrt, tol)


def commutator(a, b) -> np.ndarray:
    """[A, B] = AB - BA."""
    ma, mb = as_matrix(a), as_matrix(b)
    if ma.shape != mb.shape:
        raise DimensionMismatchError(f"shapes {ma.shape} and {mb.shape} differ")
    return ma @ mb - mb @ ma


def anticommutator(a, b) -> np.ndarray:
    ma, mb = as_matrix(a), as_matrix(b)
    if ma.shape != mb.shape:
        raise DimensionMismatchError(f"shapes {ma.shape} and {mb.shape} differ")
    return ma @ mb + mb @ ma
