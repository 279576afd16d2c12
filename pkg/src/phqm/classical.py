"""Complex classical mechanics of analytic potentials.

Flows of m dz/dt = p, dp/dt = -V'(z), generalized Poisson brackets on
R^4 = C^2, the Darboux chart for the a=b=c=d=0 structure, the equivalent
real Hamiltonian K = 2 Re(h) with its integral of motion H_i = Im(h), and
the H_i-generated symmetry flow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStructureError, StepOverflowError

OVERFLOW_GUARD = 1e12

J_STANDARD = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]
)


@dataclass(frozen=True)
class SymplecticParams:
    """Parameters (a, b, c, d) of the dynamically compatible structures."""

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    def matrix(self) -> np.ndarray:
        if abs(self.c**2 + self.d**2 - self.a * self.b - 1.0) < 1e-12:
            raise DegenerateStructureError("c^2 + d^2 - a b must differ from 1")
        a, b, c, d = self.a, self.b, self.c, self.d
        return 0.5 * np.array(
            [
                [0.0, 1.0 + c, -a, -d],
                [-(1.0 + c), 0.0, -d, -b],
                [a, d, 0.0, -1.0 + c],
                [d, b, 1.0 - c, 0.0],
            ]
        )


@dataclass(frozen=True)
class ComplexPhasePoint:
    z: complex
    p: complex


@dataclass(frozen=True)
class DarbouxPoint:
    """Canonical chart for the a=b=c=d=0 structure."""

    x1: float
    p1: float
    x2: float
    p2: float

    def to_complex(self) -> ComplexPhasePoint:
        return ComplexPhasePoint(
            (self.x1 + 1j * self.p2) / np.sqrt(2.0),
            (self.p1 + 1j * self.x2) / np.sqrt(2.0),
        )

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.p1, self.x2, self.p2])


def to_darboux(pt: ComplexPhasePoint) -> DarbouxPoint:
    """(x1, p1, x2, p2) = sqrt(2) (Re z, Re p, Im p, Im z)."""
    s = np.sqrt(2.0)
    return DarbouxPoint(s * pt.z.real, s * pt.p.real, s * pt.p.imag, s * pt.z.imag)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    z: np.ndarray
    p: np.ndarray


def flow(v_prime, m: float, s0: ComplexPhasePoint, t_end: float, dt: float,
         sample_every: int = 1) -> Trajectory:
    """Fixed-step RK4 integration of m dz/dt = p, dp/dt = -V'(z)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    n_steps = int(round(t_end / dt))
    z, p = complex(s0.z), complex(s0.p)
    times = [0.0]
    zs = [z]
    ps = [p]

    def rhs(zz, pp):
        return pp / m, -v_prime(zz)

    for step in range(1, n_steps + 1):
        k1z, k1p = rhs(z, p)
        k2z, k2p = rhs(z + 0.5 * dt * k1z, p + 0.5 * dt * k1p)
        k3z, k3p = rhs(z + 0.5 * dt * k2z, p + 0.5 * dt * k2p)
        k4z, k4p = rhs(z + dt * k3z, p + dt * k3p)
        z = z + dt * (k1z + 2 * k2z + 2 * k3z + k4z) / 6.0
        p = p + dt * (k1p + 2 * k2p + 2 * k3p + k4p) / 6.0
        if abs(z) > OVERFLOW_GUARD or abs(p) > OVERFLOW_GUARD:
            raise StepOverflowError(f"trajectory diverged at step {step}")
        if step % sample_every == 0 or step == n_steps:
            times.append(step * dt)
            zs.append(z)
            ps.append(p)
    return Trajectory(np.array(times), np.array(zs), np.array(ps))


def _gradient(func, w: np.ndarray, h: float):
    grad = np.empty(4, dtype=complex)
    for j in range(4):
        e = np.zeros(4)
        e[j] = h
        grad[j] = (func(w + e) - func(w - e)) / (2.0 * h)
    return grad


def bracket(params: SymplecticParams, func_a, func_b, pt, h: float = 1e-5):
    """Generalized bracket sum_jk J_jk dA/dw_j dB/dw_k by central differences.

    Functions take the real 4-vector w = (x, p, y, q) and may return
    complex values.
    """
    J = params.matrix()
    w = np.asarray(pt, dtype=float)
    ga = _gradient(func_a, w, h)
    gb = _gradient(func_b, w, h)
    return complex(ga @ J @ gb)


def standard_bracket(func_a, func_b, pt, h: float = 1e-5):
    """Standard Poisson bracket on R^4 (pairs (x, p) and (y, q))."""
    w = np.asarray(pt, dtype=float)
    ga = _gradient(func_a, w, h)
    gb = _gradient(func_b, w, h)
    return complex(ga @ J_STANDARD @ gb)


def phase_functions(potential, m: float):
    """Complex coordinate, momentum and Hamilton functions of w = (x,p,y,q)."""

    def z_of(w):
        return w[0] + 1j * w[2]

    def p_of(w):
        return w[1] + 1j * w[3]

    def h_of(w):
        return p_of(w) ** 2 / (2.0 * m) + potential(z_of(w))

    return z_of, p_of, h_of


def cauchy_riemann_residual(potential, z: complex, h: float = 1e-5) -> float:
    """Max finite-difference violation of the Cauchy-Riemann conditions."""
    x, y = z.real, z.imag

    def vr(xx, yy):
        return potential(xx + 1j * yy).real

    def vi(xx, yy):
        return potential(xx + 1j * yy).imag

    vr_x = (vr(x + h, y) - vr(x - h, y)) / (2 * h)
    vr_y = (vr(x, y + h) - vr(x, y - h)) / (2 * h)
    vi_x = (vi(x + h, y) - vi(x - h, y)) / (2 * h)
    vi_y = (vi(x, y + h) - vi(x, y - h)) / (2 * h)
    return max(abs(vr_x - vi_y), abs(vr_y + vi_x))


def real_hamiltonians(potential, pt: DarbouxPoint, m: float,
                      cr_tol: float = 1e-4) -> dict:
    """K = 2 Re(h) and the integral of motion H_i = Im(h) at a Darboux point.

    Evaluated at the corresponding complex phase-space point
    z = (x1 + i p2)/sqrt(2), p = (p1 + i x2)/sqrt(2); the analyticity of V
    is gated by a finite-difference Cauchy-Riemann check.
    """
    cpt = pt.to_complex()
    cr = cauchy_riemann_residual(potential, cpt.z)
    scale = max(abs(potential(cpt.z)), 1.0)
    if cr > cr_tol * scale:
        raise ValueError(
            f"potential fails the Cauchy-Riemann check at {cpt.z} (residual {cr:.2e})"
        )
    h_val = cpt.p**2 / (2.0 * m) + potential(cpt.z)
    return {"K": 2.0 * h_val.real, "H_i": h_val.imag}


def integrability_report(potential, points, m: float, fd_step: float = 1e-5) -> dict:
    """Report (not assert) functional independence of K and H_i.

    The Jacobian of (K, H_i) is sampled at the given Darboux points; rank
    2 everywhere is the generic integrable situation, degenerate
    potentials may lose it.
    """
    ranks = []
    for pt in points:
        w = pt.as_array() if isinstance(pt, DarbouxPoint) else np.asarray(pt, dtype=float)
        jac = np.zeros((2, 4))
        for j in range(4):
            e = np.zeros(4)
            e[j] = fd_step
            up = real_hamiltonians(potential, DarbouxPoint(*(w + e)), m)
            dn = real_hamiltonians(potential, DarbouxPoint(*(w - e)), m)
            jac[0, j] = (up["K"] - dn["K"]) / (2 * fd_step)
            jac[1, j] = (up["H_i"] - dn["H_i"]) / (2 * fd_step)
        ranks.append(int(np.linalg.matrix_rank(jac, tol=1e-8)))
    return {"ranks": ranks, "independent_everywhere": all(r == 2 for r in ranks)}


def symmetry_flow(potential, pt: DarbouxPoint, xi: float, m: float,
                  fd_step: float = 1e-6) -> DarbouxPoint:
    """One explicit-Euler step of the H_i-generated flow.

    delta x1 = xi x2 / 2m, delta p2 = -xi p1 / 2m, and the V_r-gradient
    terms for x2, p1; K and H_i are invariant to O(xi^2).
    """

    def vr_tilde(x1, p2):
        z = (x1 + 1j * p2) / np.sqrt(2.0)
        return potential(z).real

    dvr_dx1 = (vr_tilde(pt.x1 + fd_step, pt.p2) - vr_tilde(pt.x1 - fd_step, pt.p2)) / (2 * fd_step)
    dvr_dp2 = (vr_tilde(pt.x1, pt.p2 + fd_step) - vr_tilde(pt.x1, pt.p2 - fd_step)) / (2 * fd_step)
    return DarbouxPoint(
        pt.x1 + xi * pt.x2 / (2.0 * m),
        pt.p1 + xi * dvr_dp2,
        pt.x2 + xi * dvr_dx1,
        pt.p2 - xi * pt.p1 / (2.0 * m),
    )
