"""1D electromagnetic propagation in z-stratified dispersionless media.

The wave operator Omega^2 = -eps^-1 d_z mu^-1 d_z is eps-pseudo-Hermitian,
which underwrites a WKB closed-form propagator in terms of the optical
path u(z) = int_0^z sqrt(eps mu); a leapfrog finite-difference solver of
E_tt + Omega^2 E = 0 serves as the independent oracle.  Units set the
vacuum speed to 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import CFLViolationError, OutOfDomainError, OutOfRangeError

QUAD_EPSABS = 1e-12


@dataclass(frozen=True)
class MediumProfile:
    """Relative permittivity and permeability as functions of z.

    Outside [z_min, z_max] the profile is extended by its boundary values
    (strict callers may forbid that; see propagate).
    """

    eps: callable
    mu: callable
    z_min: float
    z_max: float

    def eps_at(self, z):
        return self.eps(np.clip(z, self.z_min, self.z_max))

    def mu_at(self, z):
        return self.mu(np.clip(z, self.z_min, self.z_max))

    def index(self, z):
        """sqrt(eps mu), the inverse local speed."""
        return np.sqrt(self.eps_at(z) * self.mu_at(z))

    def slow_variation_diagnostic(self, scale: float, n_samples: int = 400) -> float:
        """max |eps'| * scale / eps over the domain (finite differences)."""
        z = np.linspace(self.z_min, self.z_max, n_samples)
        h = (self.z_max - self.z_min) / (4 * n_samples)
        deriv = (self.eps_at(z + h) - self.eps_at(z - h)) / (2 * h)
        return float(np.max(np.abs(deriv) * scale / self.eps_at(z)))


def vacuum(z_min: float = -10.0, z_max: float = 10.0) -> MediumProfile:
    return MediumProfile(lambda z: np.ones_like(np.asarray(z, dtype=float)),
                         lambda z: np.ones_like(np.asarray(z, dtype=float)),
                         z_min, z_max)


def constant_medium(eps: float, mu: float = 1.0, z_min: float = -10.0,
                    z_max: float = 10.0) -> MediumProfile:
    return MediumProfile(lambda z: eps * np.ones_like(np.asarray(z, dtype=float)),
                         lambda z: mu * np.ones_like(np.asarray(z, dtype=float)),
                         z_min, z_max)


def sampled_profile(z_samples, eps_samples, mu_samples) -> MediumProfile:
    """Profile from sampled arrays with linear interpolation."""
    z = np.asarray(z_samples, dtype=float)
    ev = np.asarray(eps_samples, dtype=float)
    mv = np.asarray(mu_samples, dtype=float)
    if np.any(ev <= 0) or np.any(mv <= 0):
        raise ValueError("eps and mu samples must be strictly positive")
    return MediumProfile(
        lambda zz: np.interp(zz, z, ev),
        lambda zz: np.interp(zz, z, mv),
        float(z[0]),
        float(z[-1]),
    )


@dataclass(frozen=True)
class InitialFields:
    """Initial transverse field E0(z) and its time derivative."""

    E0: callable
    E0_dot: callable


def gaussian_pulse(center: float, width: float, amplitude: float = 1.0) -> InitialFields:
    def e0(z):
        return amplitude * np.exp(-((np.asarray(z) - center) ** 2) / (2.0 * width**2))

    return InitialFields(e0, lambda z: np.zeros_like(np.asarray(z, dtype=float)))


def optical_path(profile: MediumProfile, z: float) -> float:
    """u(z) = int_0^z sqrt(eps mu) by adaptive quadrature.

    full_output silences the roundoff chatter quad emits on piecewise
    (sampled) profiles; the achieved error estimate is checked instead.
    """
    if z < profile.z_min or z > profile.z_max:
        raise OutOfDomainError(f"z = {z} outside [{profile.z_min}, {profile.z_max}]")
    out = quad(lambda t: float(profile.index(t)), 0.0, z,
               epsabs=QUAD_EPSABS, epsrel=1e-12, limit=200, full_output=1)
    val, abserr = out[0], out[1]
    # sampled profiles have a kink per panel; the conservative estimate
    # then sits well above the smooth-profile roundoff floor
    if abserr > 1e-6 * max(1.0, abs(val)):
        raise ValueError(f"optical path quadrature error {abserr:.2e} too large")
    return float(val)


def invert_u(profile: MediumProfile, s: float) -> float:
    """Monotone inversion of u; raises OutOfRangeError beyond the domain image."""
    lo, hi = optical_path(profile, profile.z_min), optical_path(profile, profile.z_max)
    if s < lo or s > hi:
        raise OutOfRangeError(f"s = {s} outside [{lo:.6g}, {hi:.6g}]")
    if s == lo:
        return profile.z_min
    if s == hi:
        return profile.z_max
    return float(brentq(lambda z: optical_path(profile, z) - s, profile.z_min,
                        profile.z_max, xtol=1e-12, rtol=1e-14))


def _invert_u_extended(profile: MediumProfile, s: float) -> float:
    """Inversion with the constant extension beyond the domain."""
    lo = optical_path(profile, profile.z_min)
    hi = optical_path(profile, profile.z_max)
    if s < lo:
        return profile.z_min + (s - lo) / float(profile.index(profile.z_min))
    if s > hi:
        return profile.z_max + (s - hi) / float(profile.index(profile.z_max))
    return invert_u(profile, s)


class _PathTable:
    """Dense optical-path table for fast u and u^-1 evaluation.

    Trapezoid accumulation on a fine grid with one Richardson step; exact
    for the piecewise-constant and affine ingredient profiles, and far
    below the WKB error for smooth ones.
    """

    def __init__(self, profile: MediumProfile, n: int = 20001):
        self.profile = profile
        z = np.linspace(profile.z_min, profile.z_max, n)
        idx = np.asarray(profile.index(z), dtype=float)
        dz = z[1] - z[0]
        coarse = np.concatenate(([0.0], np.cumsum(0.5 * (idx[1:] + idx[:-1]) * dz)))
        mid = np.asarray(profile.index(z[:-1] + 0.5 * dz), dtype=float)
        fine = np.concatenate(
            ([0.0], np.cumsum((idx[:-1] + 4.0 * mid + idx[1:]) * dz / 6.0))
        )
        u = fine + (fine - coarse) / 15.0
        if profile.z_min <= 0.0 <= profile.z_max:
            offset = float(np.interp(0.0, z, u))
        elif profile.z_min > 0.0:
            # constant extension back to the origin
            offset = -profile.z_min * float(profile.index(profile.z_min))
        else:
            offset = u[-1] - profile.z_max * float(profile.index(profile.z_max))
        self.z = z
        self.u = u - offset
        self.u_min = float(self.u[0])
        self.u_max = float(self.u[-1])

    def forward(self, z):
        return np.interp(z, self.z, self.u)

    def inverse(self, s, strict: bool):
        s = np.asarray(s, dtype=float)
        if strict and (np.any(s < self.u_min) or np.any(s > self.u_max)):
            raise OutOfDomainError("characteristics leave the profile domain")
        core = np.interp(np.clip(s, self.u_min, self.u_max), self.u, self.z)
        below = s < self.u_min
        above = s > self.u_max
        if np.any(below):
            v = float(self.profile.index(self.profile.z_min))
            core = np.where(below, self.profile.z_min + (s - self.u_min) / v, core)
        if np.any(above):
            v = float(self.profile.index(self.profile.z_max))
            core = np.where(above, self.profile.z_max + (s - self.u_max) / v, core)
        return core


def propagate(profile: MediumProfile, init: InitialFields, z, t: float,
              strict: bool = False) -> np.ndarray:
    """WKB closed-form field E(z, t).

    Quarter-power impedance factors multiply the two translated initial
    pulses, plus the mu^{1/4} eps^{3/4}-weighted integral of E0_dot
    between the characteristics w_-(z,t) and w_+(z,t).
    """
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z_arr < profile.z_min) or np.any(z_arr > profile.z_max):
        raise OutOfDomainError("evaluation points outside the profile domain")
    table = _PathTable(profile)
    u_z = table.forward(z_arr)
    w_minus = table.inverse(u_z - t, strict)
    w_plus = table.inverse(u_z + t, strict)
    local = (np.asarray(profile.mu_at(z_arr)) / np.asarray(profile.eps_at(z_arr))) ** 0.25
    left = (np.asarray(profile.eps_at(w_minus)) / np.asarray(profile.mu_at(w_minus))) ** 0.25
    right = (np.asarray(profile.eps_at(w_plus)) / np.asarray(profile.mu_at(w_plus))) ** 0.25
    dot_terms = _cumulative(profile, init, w_plus) - _cumulative(profile, init, w_minus)
    out = 0.5 * local * (
        left * np.asarray(init.E0(w_minus)) + right * np.asarray(init.E0(w_plus)) + dot_terms
    )
    return out if np.ndim(z) else float(out[0])


def _cumulative(profile: MediumProfile, init: InitialFields, w, n: int = 20001):
    """Antiderivative of mu^{1/4} eps^{3/4} E0_dot, tabulated once.

    Outside the domain the integrand continues with the boundary medium
    values (consistent with the constant profile extension).
    """
    w = np.asarray(w, dtype=float)
    lo = min(float(np.min(w)), profile.z_min)
    hi = max(float(np.max(w)), profile.z_max)
    grid = np.linspace(lo, hi, n)
    f = (
        np.asarray(profile.mu_at(grid)) ** 0.25
        * np.asarray(profile.eps_at(grid)) ** 0.75
        * np.asarray(init.E0_dot(grid))
    )
    if not np.any(f):
        return np.zeros_like(w)
    dz = grid[1] - grid[0]
    mid = (
        np.asarray(profile.mu_at(grid[:-1] + 0.5 * dz)) ** 0.25
        * np.asarray(profile.eps_at(grid[:-1] + 0.5 * dz)) ** 0.75
        * np.asarray(init.E0_dot(grid[:-1] + 0.5 * dz))
    )
    simpson = np.concatenate(
        ([0.0], np.cumsum((f[:-1] + 4.0 * mid + f[1:]) * dz / 6.0))
    )
    return np.interp(w, grid, simpson)


def wave_operator(profile: MediumProfile, z: np.ndarray) -> np.ndarray:
    """Discretized Omega^2 = -eps^-1 d_z mu^-1 d_z (clamped boundaries).

    Staggered mu sampling keeps eps * Omega^2 exactly Hermitian, i.e. the
    matrix is eps-pseudo-Hermitian by construction.
    """
    dz = z[1] - z[0]
    n = len(z)
    mu_half = np.asarray(profile.mu_at(z[:-1] + 0.5 * dz), dtype=float)
    inv_mu = 1.0 / mu_half
    main = np.zeros(n)
    main[:-1] += inv_mu
    main[1:] += inv_mu
    lap = np.diag(main) - np.diag(inv_mu, 1) - np.diag(inv_mu, -1)
    eps_z = np.asarray(profile.eps_at(z), dtype=float)
    return (lap / dz**2) / eps_z[:, None]


@dataclass(frozen=True)
class FdtdResult:
    z: np.ndarray
    times: np.ndarray
    fields: np.ndarray          # shape (len(times), len(z))


def fdtd_oracle(profile: MediumProfile, init: InitialFields, t_end: float,
                n: int = 2000, cfl: float = 0.5,
                n_snapshots: int = 2, boundary: str = "clamped") -> FdtdResult:
    """Second-order leapfrog integration of E_tt + Omega^2 E = 0.

    Time step dt = cfl * dz * min(sqrt(eps mu)); cfl must not exceed the
    stability bound 1.
    """
    if cfl > 1.0 or cfl <= 0.0:
        raise CFLViolationError(f"cfl = {cfl} outside (0, 1]")
    z = np.linspace(profile.z_min, profile.z_max, n)
    dz = z[1] - z[0]
    v_max = float(np.max(1.0 / profile.index(z)))
    dt = cfl * dz / v_max
    n_steps = max(1, int(np.ceil(t_end / dt)))
    dt = t_end / n_steps

    inv_mu = 1.0 / np.asarray(profile.mu_at(z[:-1] + 0.5 * dz), dtype=float)
    inv_eps = 1.0 / np.asarray(profile.eps_at(z), dtype=float)

    def apply_omega2(e):
        flux = inv_mu * (e[1:] - e[:-1]) / dz
        out = np.zeros_like(e)
        out[1:-1] = -(flux[1:] - flux[:-1]) / dz
        out[0] = -flux[0] / dz
        out[-1] = flux[-1] / dz
        return inv_eps * out

    e_prev = np.asarray(init.E0(z), dtype=float)
    e_curr = (
        e_prev
        + dt * np.asarray(init.E0_dot(z), dtype=float)
        - 0.5 * dt**2 * apply_omega2(e_prev)
    )
    if boundary == "clamped":
        e_curr[0] = e_curr[-1] = 0.0

    snap_steps = set(np.unique(np.linspace(0, n_steps, n_snapshots).round().astype(int)))
    snaps = {0: e_prev.copy()}
    if 1 in snap_steps or n_steps == 1:
        snaps[1] = e_curr.copy()
    for step in range(2, n_steps + 1):
        e_next = 2.0 * e_curr - e_prev - dt**2 * apply_omega2(e_curr)
        if boundary == "clamped":
            e_next[0] = e_next[-1] = 0.0
        elif boundary == "mur":
            c0 = 1.0 / float(profile.index(z[0]))
            c1 = 1.0 / float(profile.index(z[-1]))
            k0 = (c0 * dt - dz) / (c0 * dt + dz)
            k1 = (c1 * dt - dz) / (c1 * dt + dz)
            e_next[0] = e_curr[1] + k0 * (e_next[1] - e_curr[0])
            e_next[-1] = e_curr[-2] + k1 * (e_next[-2] - e_curr[-1])
        else:
            raise ValueError(f"unknown boundary {boundary!r}")
        e_prev, e_curr = e_curr, e_next
        if step in snap_steps or step == n_steps:
            snaps[step] = e_curr.copy()
    times = np.array(sorted(snaps)) * dt
    fields = np.vstack([snaps[k] for k in sorted(snaps)])
    return FdtdResult(z, times, fields)
