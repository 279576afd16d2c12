"""Metric operators, symmetry generators, and Hermitian representations.

Spectral constructions from a biorthonormal system:

    eta_+      = sum_n |phi_n><phi_n|                 (positive metric)
    eta_sigma  = sum_n sigma_n |phi_n><phi_n| + conjugate-pair terms
    C_sigma    = sum_n sigma_n |psi_n><phi_n|
    S zeta     = M zeta*,  M = sum_n psi_n phi_n^T    (antilinear symmetry)

and the similarity bundle (H, eta_+, rho = sqrt(eta_+), h = rho H rho^-1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .biortho import BiorthonormalSystem
from .errors import (
    ComplexSpectrumError,
    LengthMismatchError,
    NotHermitianError,
    NotPositiveDefiniteError,
    NotPseudoHermitianError,
    SingularOperatorError,
    UnpairedComplexEigenvalueError,
)
from .linalg import DEFAULT_TOL, as_matrix, dagger, opnorm, sqrtm_pd

PSEUDO_HERMITICITY_TOL = 1e-8


@dataclass(frozen=True)
class MetricOperator:
    """Positive-definite Hermitian invertible matrix defining <.|eta .>."""

    eta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eta", as_matrix(self.eta))

    @property
    def dim(self) -> int:
        return self.eta.shape[0]

    def inner(self, x, y) -> complex:
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        return complex(np.conj(x) @ (self.eta @ y))


@dataclass(frozen=True)
class PseudoMetric:
    """Hermitian invertible eta with its sign sequence on the real sector."""

    eta: np.ndarray
    sigma: np.ndarray


@dataclass(frozen=True)
class AntilinearSymmetry:
    """Antilinear involution acting as S zeta = M conj(zeta)."""

    M: np.ndarray

    def __call__(self, zeta) -> np.ndarray:
        return self.M @ np.conj(np.asarray(zeta, dtype=complex))


@dataclass(frozen=True)
class QuasiHermitianSystem:
    """Bundle (H, eta_+, rho, h) realizing the Hermitian representation."""

    H: np.ndarray
    eta_plus: MetricOperator
    rho: np.ndarray
    rho_inv: np.ndarray
    h: np.ndarray

    @property
    def dim(self) -> int:
        return self.H.shape[0]


def _check_sigma(sigma, n_real: int) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=float).ravel()
    if len(sigma) != n_real:
        raise LengthMismatchError(
            f"sigma has length {len(sigma)}, expected {n_real} (one per real eigenvalue)"
        )
    if not np.all(np.isin(sigma, (-1.0, 1.0))):
        raise ValueError("sigma entries must be +1 or -1")
    return sigma


def _normalized(eta: np.ndarray) -> np.ndarray:
    top = float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (eta + dagger(eta))))))
    return eta / top


def metric_from_spectrum(bs: BiorthonormalSystem, normalize: bool = False) -> MetricOperator:
    """eta_+ = sum_n |phi_n><phi_n|; needs an all-real spectrum."""
    if not bs.all_real:
        raise ComplexSpectrumError(
            "spectrum has nonreal eigenvalues; no positive-definite metric exists"
        )
    eta = bs.phis @ dagger(bs.phis)
    eta = 0.5 * (eta + dagger(eta))
    if normalize:
        eta = _normalized(eta)
    return MetricOperator(eta)


def pseudo_metric_family(
    bs: BiorthonormalSystem, sigma, normalize: bool = False
) -> PseudoMetric:
    """Pseudo-metric with arbitrary signs on the real sector and the
    off-diagonal pairing |phi_nu><phi_-nu| + h.c. on conjugate pairs."""
    if len(bs.unpaired_indices()) > 0:
        raise UnpairedComplexEigenvalueError(
            f"eigenvalues at indices {bs.unpaired_indices().tolist()} have no "
            "conjugate partner"
        )
    real_idx = bs.real_indices()
    sigma = _check_sigma(sigma, len(real_idx))

    eta = np.zeros((bs.dim, bs.dim), dtype=complex)
    for s, n in zip(sigma, real_idx):
        phi = bs.phis[:, n]
        eta += s * np.outer(phi, np.conj(phi))
    for nu, mnu in bs.pair_indices():
        a, b = bs.phis[:, nu], bs.phis[:, mnu]
        eta += np.outer(a, np.conj(b)) + np.outer(b, np.conj(a))
    eta = 0.5 * (eta + dagger(eta))
    if normalize:
        eta = _normalized(eta)
    return PseudoMetric(eta, sigma)


def charge_operator(bs: BiorthonormalSystem, sigma) -> np.ndarray:
    """Grading operator C_sigma = sum_n sigma_n |psi_n><phi_n|."""
    if not bs.all_real:
        raise ComplexSpectrumError("charge operator requires a real spectrum")
    sigma = _check_sigma(sigma, bs.dim)
    return (bs.psis * sigma[None, :]) @ dagger(bs.phis)


def antilinear_symmetry(bs: BiorthonormalSystem, phases=None) -> AntilinearSymmetry:
    """Antilinear generator S with S zeta = M conj(zeta), M = sum psi_n phi_n^T.

    M depends on the eigenvector phases; ``phases`` (radians, one per
    eigenvalue) rotates psi_n -> e^{i theta_n} psi_n with the compensating
    phi rotation, exposing that freedom explicitly.
    """
    if not bs.all_real:
        raise ComplexSpectrumError("exact antilinear symmetry requires a real spectrum")
    psis, phis = bs.psis, bs.phis
    if phases is not None:
        rot = np.exp(1j * np.asarray(phases, dtype=float))
        if len(rot) != bs.dim:
            raise LengthMismatchError("need one phase per eigenvalue")
        psis = psis * rot[None, :]
        phis = phis * rot[None, :]
    return AntilinearSymmetry(psis @ phis.T)


def pseudo_hermiticity_residual(h, eta) -> float:
    """Relative residual |eta H eta^-1 - H^dagger| / |H|."""
    h = as_matrix(h)
    eta = as_matrix(eta)
    try:
        eta_inv = np.linalg.inv(eta)
    except np.linalg.LinAlgError as exc:
        raise SingularOperatorError("eta is singular") from exc
    return opnorm(eta @ h @ eta_inv - dagger(h)) / max(opnorm(h), 1e-300)


def build_system(
    h_op, eta, tol: float = PSEUDO_HERMITICITY_TOL
) -> QuasiHermitianSystem:
    """Assemble (H, eta_+, rho, h) after certifying the inputs.

    Raises NotPseudoHermitianError when the relative residual
    |eta H eta^-1 - H^dagger|/|H| exceeds tol, and
    NotPositiveDefiniteError when eta is not a metric.
    """
    H = as_matrix(h_op)
    eta_m = eta.eta if isinstance(eta, MetricOperator) else as_matrix(eta)
    evals = np.linalg.eigvalsh(0.5 * (eta_m + dagger(eta_m)))
    if evals.min() <= 0:
        raise NotPositiveDefiniteError(
            f"eta has non-positive eigenvalue {evals.min():.3e}"
        )
    residual = pseudo_hermiticity_residual(H, eta_m)
    if residual > tol:
        raise NotPseudoHermitianError(
            f"pseudo-Hermiticity residual {residual:.3e} exceeds tol {tol:.1e}"
        )
    rho = sqrtm_pd(eta_m)
    rho_inv = hermitian_inverse(rho)
    h = rho @ H @ rho_inv
    return QuasiHermitianSystem(H, MetricOperator(eta_m), rho, rho_inv, h)


def hermitian_inverse(a) -> np.ndarray:
    m = as_matrix(a)
    try:
        inv = np.linalg.inv(m)
    except np.linalg.LinAlgError as exc:
        raise SingularOperatorError("matrix is singular") from exc
    return 0.5 * (inv + dagger(inv))


def observable_map(o, sys: QuasiHermitianSystem, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Physical observable O = rho^-1 o rho from a Hermitian o."""
    o = as_matrix(o)
    if opnorm(o - dagger(o)) > tol * max(opnorm(o), 1e-300):
        raise NotHermitianError("observable source must be Hermitian")
    return sys.rho_inv @ o @ sys.rho


def pseudo_adjoint(l_op, eta) -> np.ndarray:
    """eta-pseudo-adjoint L^# = eta^-1 L^dagger eta."""
    L = as_matrix(l_op)
    eta_m = eta.eta if isinstance(eta, MetricOperator) else as_matrix(getattr(eta, "eta", eta))
    try:
        eta_inv = np.linalg.inv(eta_m)
    except np.linalg.LinAlgError as exc:
        raise SingularOperatorError("eta is singular") from exc
    return eta_inv @ dagger(L) @ eta_m
