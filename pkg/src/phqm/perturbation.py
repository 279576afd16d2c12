"""Perturbative metric eta_+ = exp(-Q) for H = H0 + eps*H1.

The exponent solves the commutator hierarchy [H0, Q_j] = R_j with
R_1 = -2 H1 and higher R_j assembled from nested commutators; even-order
Q_j are set to zero, which the hierarchy permits.  Everything acts on
finite matrix truncations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

from .linalg import as_matrix, commutator, opnorm, hermitian_function
from .metric import MetricOperator
from .errors import DimensionMismatchError, NotHermitianError, UnsolvableCommutatorError

DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class PerturbationProblem:
    """H0 Hermitian, H1 anti-Hermitian, expansion parameter and max order."""

    H0: np.ndarray
    H1: np.ndarray
    epsilon: float
    order: int
    tol: float = 1e-9

    def __post_init__(self):
        H0 = as_matrix(self.H0)
        H1 = as_matrix(self.H1)
        if H0.shape != H1.shape:
            raise DimensionMismatchError("H0 and H1 must share a shape")
        scale0 = max(opnorm(H0), 1e-300)
        scale1 = max(opnorm(H1), 1e-300)
        if opnorm(H0 - np.conj(H0.T)) > self.tol * scale0:
            raise NotHermitianError("H0 must be Hermitian")
        if opnorm(H1 + np.conj(H1.T)) > self.tol * scale1:
            raise NotHermitianError("H1 must be anti-Hermitian")
        if self.order < 1 or self.order % 2 == 0:
            raise ValueError("order must be a positive odd integer")
        object.__setattr__(self, "H0", H0)
        object.__setattr__(self, "H1", H1)


@dataclass(frozen=True)
class QSeries:
    """Map j -> Hermitian Q_j; even orders are stored as zero matrices."""

    terms: dict = field(default_factory=dict)

    def q(self, j: int) -> np.ndarray:
        return self.terms[j]

    @property
    def order(self) -> int:
        return max(self.terms)

    def exponent(self, epsilon: float) -> np.ndarray:
        """Q(eps) = sum_j eps^j Q_j."""
        dim = self.terms[1].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for j, qj in self.terms.items():
            total += (epsilon ** j) * qj
        return total


def solve_commutator(h0, r, degeneracy_tol: float = DEGENERACY_TOL) -> np.ndarray:
    """Solve [H0, Q] = R for Hermitian H0 in its eigenbasis.

    Q_mn = R_mn / (E_m - E_n) off degenerate blocks; Q is set to zero on
    degenerate blocks (minimal-norm gauge).  A nonzero R entry on a
    degenerate block means no solution exists.
    """
    H0 = as_matrix(h0)
    R = as_matrix(r)
    if H0.shape != R.shape:
        raise DimensionMismatchError("H0 and R must share a shape")
    energies, basis = np.linalg.eigh(0.5 * (H0 + np.conj(H0.T)))
    scale = max(float(np.max(np.abs(energies))), 1.0)
    r_tilde = np.conj(basis.T) @ R @ basis
    gaps = energies[:, None] - energies[None, :]
    degenerate = np.abs(gaps) <= degeneracy_tol * scale

    r_scale = max(opnorm(R), 1e-300)
    blocked = np.abs(r_tilde[degenerate])
    if blocked.size and blocked.max() > 1e-8 * r_scale:
        raise UnsolvableCommutatorError(
            "R has a nonzero entry on a degenerate block of H0 "
            f"(max {blocked.max():.3e})"
        )
    q_tilde = np.zeros_like(r_tilde)
    np.divide(r_tilde, gaps, out=q_tilde, where=~degenerate)
    return basis @ q_tilde @ np.conj(basis.T)


@lru_cache(maxsize=None)
def _q_coefficient(k: int) -> Fraction:
    """q_k in the nested-commutator recursion (exact rational)."""
    total = Fraction(0)
    for m in range(1, k + 1):
        for n in range(1, m + 1):
            total += Fraction(
                (-1) ** n * n ** k * factorial(m),
                factorial(k) * 2 ** (m - 1) * factorial(n) * factorial(m - n),
            )
    return total


def _compositions(total: int, parts: int):
    """All tuples of positive integers of given length summing to total."""
    if parts == 1:
        yield (total,)
        return
    for head in range(1, total - parts + 2):
        for tail in _compositions(total - head, parts - 1):
            yield (head,) + tail


def _nested(h0: np.ndarray, qs: dict, indices) -> np.ndarray:
    out = h0
    for s in indices:
        out = commutator(out, qs[s])
    return out


def _rhs_general(j: int, h0: np.ndarray, h1: np.ndarray, qs: dict) -> np.ndarray:
    """R_j = sum_{k=2}^{j} q_k Z_kj for j >= 2."""
    dim = h0.shape[0]
    rhs = np.zeros((dim, dim), dtype=complex)
    for k in range(2, j + 1):
        coeff = _q_coefficient(k)
        if coeff == 0:
            continue
        z = np.zeros((dim, dim), dtype=complex)
        for comp in _compositions(j, k):
            if any(qs[s] is None for s in comp):
                continue
            z += _nested(h0, qs, comp)
        rhs += float(coeff) * z
    return rhs


def _rhs_literal(j: int, h1: np.ndarray, qs: dict) -> np.ndarray:
    """Explicit low-order right-hand sides with Q_even = 0."""
    if j == 1:
        return -2.0 * h1
    if j == 3:
        return -commutator(commutator(h1, qs[1]), qs[1]) / 6.0
    if j == 5:
        c4 = h1
        for _ in range(4):
            c4 = commutator(c4, qs[1])
        mixed = commutator(commutator(h1, qs[1]), qs[3]) + commutator(
            commutator(h1, qs[3]), qs[1]
        )
        return c4 / 360.0 - mixed / 6.0
    raise ValueError(f"no literal form for order {j}")


def q_series(prob: PerturbationProblem) -> QSeries:
    """Solve the hierarchy up to prob.order, odd orders only.

    Orders 1, 3, 5 use the explicit commutator forms; beyond that the
    general nested-commutator recursion takes over.
    """
    dim = prob.H0.shape[0]
    zero = np.zeros((dim, dim), dtype=complex)
    terms: dict[int, np.ndarray] = {}
    qs: dict[int, np.ndarray] = {}
    for j in range(1, prob.order + 1):
        if j % 2 == 0:
            terms[j] = zero.copy()
            qs[j] = zero
            continue
        if j <= 5:
            rhs = _rhs_literal(j, prob.H1, qs)
        else:
            rhs = _rhs_general(j, prob.H0, prob.H1, qs)
        qj = solve_commutator(prob.H0, rhs)
        qj = 0.5 * (qj + np.conj(qj.T))
        terms[j] = qj
        qs[j] = qj
    return QSeries(terms)


def metric_from_q(qs: QSeries, epsilon: float) -> MetricOperator:
    """eta_+ = exp(-Q(eps)); positive-definite by construction."""
    q_total = qs.exponent(epsilon)
    eta = hermitian_function(q_total, lambda x: np.exp(-x))
    return MetricOperator(eta)


def metric_residual(prob: PerturbationProblem, qs: QSeries, epsilon: float) -> float:
    """|e^-Q H e^Q - H^dagger| / |H| at the given epsilon."""
    q_total = qs.exponent(epsilon)
    e_minus = hermitian_function(q_total, lambda x: np.exp(-x))
    e_plus = hermitian_function(q_total, np.exp)
    H = prob.H0 + epsilon * prob.H1
    return opnorm(e_minus @ H @ e_plus - np.conj(H.T)) / max(opnorm(H), 1e-300)


def oscillator_basis(n_max: int, mass: float = 1.0, hbar: float = 1.0, omega: float = 1.0):
    """Position and momentum matrices in the n_max-dim oscillator basis."""
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    n = np.arange(1, n_max)
    lower = np.zeros((n_max, n_max), dtype=complex)
    lower[n - 1, n] = np.sqrt(n)
    raise_ = lower.T.conj()
    x = np.sqrt(hbar / (2.0 * mass * omega)) * (lower + raise_)
    p = 1j * np.sqrt(mass * hbar * omega / 2.0) * (raise_ - lower)
    return x, p


def ladder_operators(n_max: int):
    """(a, a_dagger) in the n_max-dim truncation."""
    n = np.arange(1, n_max)
    a = np.zeros((n_max, n_max), dtype=complex)
    a[n - 1, n] = np.sqrt(n)
    return a, a.T.conj()
