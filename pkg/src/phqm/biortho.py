"""Biorthonormal systems {(psi_n, phi_n)} built from an eigendecomposition.

The left family is phi = (Psi^{-1})^dagger, so <phi_m|psi_n> = delta_mn and
sum_n |psi_n><phi_n| = I hold by construction up to conditioning.  Nonreal
eigenvalues are matched into conjugate pairs, which later feeds the paired
pseudo-metric construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DefectiveOperatorError
from .linalg import EigenDecomposition, dagger

PAIR_TOL = 1e-8


@dataclass(frozen=True)
class BiorthonormalSystem:
    """Eigenvalues with right vectors psi_n and left-system vectors phi_n.

    reality_mask[n] is True when a_n is treated as real.  conj_partner[n]
    is the index of the conjugate-pair partner for nonreal eigenvalues,
    -1 for real ones, and -2 when no partner could be matched.
    """

    values: np.ndarray
    psis: np.ndarray
    phis: np.ndarray
    reality_mask: np.ndarray
    conj_partner: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.values)

    @property
    def all_real(self) -> bool:
        return bool(np.all(self.reality_mask))

    def real_indices(self) -> np.ndarray:
        return np.flatnonzero(self.reality_mask)

    def pair_indices(self) -> list[tuple[int, int]]:
        """Conjugate pairs (nu, -nu), each listed once with Im a_nu > 0."""
        pairs = []
        for n in np.flatnonzero(~self.reality_mask):
            p = self.conj_partner[n]
            if p >= 0 and self.values[n].imag > 0:
                pairs.append((int(n), int(p)))
        return pairs

    def unpaired_indices(self) -> np.ndarray:
        return np.flatnonzero((~self.reality_mask) & (self.conj_partner == -2))


def _match_conjugate_pairs(values: np.ndarray, real_mask: np.ndarray, tol: float):
    """Greedy nearest-conjugate matching; ties broken by index order."""
    partner = np.full(len(values), -1, dtype=int)
    nonreal = [int(i) for i in np.flatnonzero(~real_mask)]
    unused = set(nonreal)
    scale = max(1.0, float(np.max(np.abs(values))) if len(values) else 1.0)
    for i in nonreal:
        if i not in unused:
            continue
        target = np.conj(values[i])
        best, best_dist = -1, np.inf
        for j in sorted(unused):
            if j == i:
                continue
            d = abs(values[j] - target)
            if d < best_dist - 1e-15:
                best, best_dist = j, d
        if best >= 0 and best_dist <= tol * scale:
            partner[i] = best
            partner[best] = i
            unused.discard(i)
            unused.discard(best)
        else:
            partner[i] = -2
            unused.discard(i)
    return partner


def _orthonormalize_degenerate_blocks(values: np.ndarray, psis: np.ndarray, tol: float):
    """Gram-Schmidt (QR) within numerically degenerate eigenvalue clusters.

    Gauge choice for repeated eigenvalues; leaves nondegenerate columns
    untouched.
    """
    psis = psis.copy()
    n = len(values)
    scale = max(1.0, float(np.max(np.abs(values))) if n else 1.0)
    used = np.zeros(n, dtype=bool)
    for i in range(n):
        if used[i]:
            continue
        block = [i] + [
            j
            for j in range(i + 1, n)
            if not used[j] and abs(values[j] - values[i]) <= tol * scale
        ]
        used[block] = True
        if len(block) > 1:
            q, _ = np.linalg.qr(psis[:, block])
            psis[:, block] = q
    return psis


def biorthonormal_extension(
    eig: EigenDecomposition,
    real_tol: float = PAIR_TOL,
    degeneracy_tol: float = 1e-10,
) -> BiorthonormalSystem:
    """Extend right eigenvectors to a complete biorthonormal system."""
    if not eig.diagonalizable:
        raise DefectiveOperatorError("cannot extend a defective eigendecomposition")
    values = eig.values.copy()
    psis = _orthonormalize_degenerate_blocks(values, eig.right_vectors, degeneracy_tol)
    phis = dagger(np.linalg.inv(psis))

    scale = max(1.0, float(np.max(np.abs(values))))
    real_mask = np.abs(values.imag) <= real_tol * scale
    partner = _match_conjugate_pairs(values, real_mask, real_tol)
    return BiorthonormalSystem(values, psis, phis, real_mask, partner)


def from_right_vectors(values, psis, real_tol: float = PAIR_TOL) -> BiorthonormalSystem:
    """Build a system from explicitly normalized right eigenvectors.

    Used by model constructors that fix the normalization constants c_n
    themselves instead of relying on the default phase convention.
    """
    values = np.asarray(values, dtype=complex)
    psis = np.asarray(psis, dtype=complex)
    phis = dagger(np.linalg.inv(psis))
    scale = max(1.0, float(np.max(np.abs(values))))
    real_mask = np.abs(values.imag) <= real_tol * scale
    partner = _match_conjugate_pairs(values, real_mask, real_tol)
    return BiorthonormalSystem(values, psis, phis, real_mask, partner)


def spectral_assembly(bs: BiorthonormalSystem) -> np.ndarray:
    """Reassemble A = sum_n a_n |psi_n><phi_n| from the system."""
    return (bs.psis * bs.values[None, :]) @ dagger(bs.phis)
