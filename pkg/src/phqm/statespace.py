"""Projective state-space geometry and time-optimal evolutions.

Covers rank-1 projectors, the (eta-deformed) Fubini-Study metric, geodesic
distances, the optimal-speed Hamiltonian with its minimal travel time
tau_min = hbar * s / E, and a spectral propagator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    IdenticalStatesError,
    NotPositiveDefiniteError,
    ZeroVectorError,
)
from .linalg import as_matrix, eig_nonhermitian
from .metric import MetricOperator


def _eta_matrix(eta, dim: int) -> np.ndarray:
    if eta is None:
        return np.eye(dim, dtype=complex)
    if isinstance(eta, MetricOperator):
        return eta.eta
    return as_matrix(eta)


def _vector(psi) -> np.ndarray:
    v = np.asarray(psi, dtype=complex).ravel()
    if np.linalg.norm(v) == 0:
        raise ZeroVectorError("state vector must be nonzero")
    return v


@dataclass(frozen=True)
class ProjectiveState:
    """Rank-1 projector onto the ray of its representative vector."""

    Lambda: np.ndarray
    representative: np.ndarray


def projector(psi, eta=None) -> ProjectiveState:
    """Lambda = |psi><psi| eta / <psi|eta psi> (eta = I when omitted)."""
    v = _vector(psi)
    eta_m = _eta_matrix(eta, len(v))
    w = eta_m @ v
    norm = complex(np.conj(v) @ w)
    lam = np.outer(v, np.conj(w)) / norm
    return ProjectiveState(lam, v)


def fs_metric(psi, eta=None) -> np.ndarray:
    """Fubini-Study metric g[a, b] with ds^2 = sum g[a,b] dz_a conj(dz_b).

    With eta supplied this is the physical-inner-product deformation; it
    reduces to the standard Fubini-Study metric at eta = I.
    """
    v = _vector(psi)
    eta_m = _eta_matrix(eta, len(v))
    w = eta_m @ v                     # (eta z)_b
    wc = np.conj(v) @ eta_m           # sum_c eta_cb z*_c, row vector
    norm = complex(wc @ v)
    g = (norm * eta_m.T - np.outer(wc, w)) / norm**2
    return g


@dataclass(frozen=True)
class TwoLevelLineElement:
    """Coefficients of the two-level eta-deformed line element.

    ds^2 = k1 (dtheta^2 + sin^2 theta dphi^2)
           / (1 + k2 cos theta + k3 cos(phi - beta) sin theta)^2
    """

    k1: float
    k2: float
    k3: float
    beta: float

    def conformal_factor(self, theta, phi):
        """k1 / (1 + k2 cos t + k3 cos(p - beta) sin t)^2 at (theta, phi)."""
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        denom = 1.0 + self.k2 * np.cos(theta) + self.k3 * np.cos(phi - self.beta) * np.sin(theta)
        return self.k1 / denom**2

    def ds2(self, theta, phi, dtheta, dphi):
        return self.conformal_factor(theta, phi) * (
            np.asarray(dtheta) ** 2 + np.sin(theta) ** 2 * np.asarray(dphi) ** 2
        )


def two_level_geometry(eta) -> TwoLevelLineElement:
    """Line-element coefficients (k1, k2, k3, beta) of a 2x2 metric."""
    eta_m = _eta_matrix(eta, 2)
    if eta_m.shape != (2, 2):
        raise ValueError("two_level_geometry requires a 2x2 metric")
    a = float(eta_m[0, 0].real)
    c = float(eta_m[1, 1].real)
    b1 = float(eta_m[0, 1].real)
    b2 = float(-eta_m[0, 1].imag)
    trace = a + c
    det = a * c - (b1**2 + b2**2)
    if trace <= 0 or det <= 0:
        raise NotPositiveDefiniteError("eta must be positive definite")
    k1 = det / trace**2
    k2 = (a - c) / trace
    k3 = 2.0 * np.hypot(b1, b2) / trace
    beta = float(np.arctan2(b2, b1))
    return TwoLevelLineElement(k1, k2, k3, beta)


def geodesic_distance(psi_i, psi_f, eta=None) -> float:
    """Geodesic distance s in [0, pi/2] on the (eta-deformed) state space."""
    vi, vf = _vector(psi_i), _vector(psi_f)
    eta_m = _eta_matrix(eta, len(vi))
    p = complex(np.conj(vi) @ eta_m @ vf)
    ni = float(np.real(np.conj(vi) @ eta_m @ vi))
    nf = float(np.real(np.conj(vf) @ eta_m @ vf))
    cos_s = np.clip(abs(p) / np.sqrt(ni * nf), 0.0, 1.0)
    return float(np.arccos(cos_s))


@dataclass(frozen=True)
class BrachistochroneProblem:
    psi_i: np.ndarray
    psi_f: np.ndarray
    energy: float
    hbar: float = 1.0
    eta: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "psi_i", _vector(self.psi_i))
        object.__setattr__(self, "psi_f", _vector(self.psi_f))
        if self.energy <= 0:
            raise ValueError("energy scale E must be positive")


@dataclass(frozen=True)
class OptimalEvolution:
    H_star: np.ndarray
    tau_min: float
    distance: float


def optimal_hamiltonian(
    prob: BrachistochroneProblem,
    antipodal_tol: float = 1e-12,
    relative_phase: float = 0.0,
) -> OptimalEvolution:
    """Traceless Hamiltonian with eigenvalues +-E evolving psi_i -> psi_f
    along a geodesic in the minimal time tau_min = hbar * s / E.

    For (eta-)orthogonal endpoints the generic formula degenerates; the
    pre-limit form with unit representatives and relative phase
    ``relative_phase`` (all choices optimal) is used instead.
    """
    vi, vf = prob.psi_i, prob.psi_f
    eta_m = _eta_matrix(prob.eta, len(vi))
    ni = float(np.real(np.conj(vi) @ eta_m @ vi))
    nf = float(np.real(np.conj(vf) @ eta_m @ vf))
    ui = vi / np.sqrt(ni)
    uf = vf / np.sqrt(nf)
    q = complex(np.conj(ui) @ eta_m @ uf)
    cos_s = min(abs(q), 1.0)
    s = float(np.arccos(cos_s))
    if s <= antipodal_tol:
        raise IdenticalStatesError("initial and final states coincide")

    if abs(q) < antipodal_tol:
        uf_hat = np.exp(1j * relative_phase) * uf
    else:
        uf_hat = uf * (abs(q) / q)       # make <ui|eta uf_hat> real positive
    outer_fi = np.outer(uf_hat, np.conj(eta_m @ ui))
    outer_if = np.outer(ui, np.conj(eta_m @ uf_hat))
    h_star = 1j * prob.energy * (outer_fi - outer_if) / np.sin(s)
    tau_min = prob.hbar * s / prob.energy
    return OptimalEvolution(h_star, tau_min, s)


def three_stage_switching_demo(psi_i, psi_f, energy: float, k1: float,
                               hbar: float = 1.0) -> dict:
    """Demonstrate the apparent sub-bound travel time of metric switching.

    Stage 2 evolves between two nearly antipodal intermediate states with
    an eta-deformed optimal Hamiltonian whose k1 makes the deformed
    distance, and hence the stage time, arbitrarily small.  The report
    flags that the scheme requires switching the physical inner product
    midway, which is what invalidates it as a unitary evolution; no
    unitarity claim is made.
    """
    vi, vf = _vector(psi_i), _vector(psi_f)
    s_flat = geodesic_distance(vi, vf)
    tau_flat = hbar * s_flat / energy
    trace_target = 1.0 / np.sqrt(k1)
    a = 0.5 * (trace_target + np.sqrt(max(trace_target**2 - 4.0, 0.0)))
    eta = np.diag([a, 1.0 / a]).astype(complex)
    inter = optimal_hamiltonian(
        BrachistochroneProblem(vi, vf, energy, hbar, eta)
    )
    return {
        "tau_min_hermitian": tau_flat,
        "stage_time_deformed": inter.tau_min,
        "violates_hermitian_bound": bool(inter.tau_min < tau_flat),
        "requires_metric_switching": True,
    }


def evolve(h_op, psi0, t, hbar: float = 1.0, eta=None) -> np.ndarray:
    """psi(t) = exp(-i t H / hbar) psi0 through the eigendecomposition.

    When eta is supplied the (conserved, for pseudo-Hermitian H) eta-norm
    of the result is returned implicitly via the state; conservation is a
    property of the dynamics, not enforced here.
    """
    H = as_matrix(h_op)
    v = _vector(psi0)
    dec = eig_nonhermitian(H, check=True)
    coeff = np.linalg.solve(dec.right_vectors, v)
    phases = np.exp(-1j * np.asarray(t) * dec.values / hbar)
    return dec.right_vectors @ (phases * coeff)


def projective_fidelity(psi, target, eta=None) -> float:
    """|<psi|eta target>|^2 / (<psi|eta psi><target|eta target>)."""
    v, w = _vector(psi), _vector(target)
    eta_m = _eta_matrix(eta, len(v))
    num = abs(complex(np.conj(v) @ eta_m @ w)) ** 2
    den = float(np.real(np.conj(v) @ eta_m @ v)) * float(np.real(np.conj(w) @ eta_m @ w))
    return num / den


def energy_uncertainty(h_op, psi, eta=None) -> float:
    """Delta E = sqrt(<H^2> - <H>^2) in the eta inner product."""
    H = as_matrix(h_op)
    v = _vector(psi)
    eta_m = _eta_matrix(eta, len(v))
    norm = complex(np.conj(v) @ eta_m @ v)
    hv = H @ v
    mean = complex(np.conj(v) @ eta_m @ hv) / norm
    mean2 = complex(np.conj(v) @ eta_m @ (H @ hv)) / norm
    variance = float(np.real(mean2 - mean**2))
    return float(np.sqrt(max(variance, 0.0)))
