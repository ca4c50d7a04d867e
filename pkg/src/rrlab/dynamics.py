"""Unperturbed nonrelativistic motion through a static potential.

The trajectory comes from the energy integral t(z) = int dz / v_p(z), which is
tabulated with Gauss-Legendre panels and inverted with Newton steps on a
uniform time grid. A fixed-step RK4 integrator of m z'' = -V'(z) is kept as
an independent oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._quad import CumulativeIntegral, subdivide
from .constants import PhysicalConstants
from .errors import GridTooCoarse, OutOfGrid, TurningPoint

PANELS_PER_SEGMENT = 64


@dataclass(frozen=True)
class GridSpec:
    n_points: int = 2**14
    pad_factor: float = 10.0  # pad = pad_factor * half_width / v_i on each side of the pulse
    min_pulse_samples: int = 64


def _half_width(potential) -> float:
    lo, hi = potential.support()
    return getattr(potential, "half_width", 0.5 * (hi - lo))


def check_no_turning_point(consts: PhysicalConstants, potential, p: float) -> None:
    if not p > 0:
        raise TurningPoint(f"momentum must be positive, got {p}")
    vmax = potential.sup()
    if p * p <= 2.0 * consts.m * vmax:
        raise TurningPoint(f"p^2 = {p * p:.6g} <= 2 m sup V = {2 * consts.m * vmax:.6g}")


def v_of_z(consts: PhysicalConstants, potential, p: float, z):
    """Classical speed sqrt(p^2 - 2 m V(z)) / m of the particle with final momentum p."""
    check_no_turning_point(consts, potential, p)
    V = potential(z)[0]
    out = np.sqrt(p * p - 2.0 * consts.m * np.asarray(V)) / consts.m
    return float(out) if np.ndim(out) == 0 else out


class Clock:
    """Time/position map of the classical particle with z(0) = z0.

    For z >= hi the motion is free with v_f; for z <= lo it is free with v_i;
    on the ramp t(z) is the tabulated energy integral.
    """

    def __init__(self, consts: PhysicalConstants, potential, p: float, z0: float):
        check_no_turning_point(consts, potential, p)
        self.consts, self.potential, self.p, self.z0 = consts, potential, float(p), float(z0)
        self.m = consts.m
        self.lo, self.hi = potential.support()
        if not self.z0 >= self.hi:
            raise ValueError(f"z0 = {z0} must lie past the ramp (z0 >= {self.hi})")
        self.v_f = self.p / self.m
        self.v_i = math.sqrt(self.p**2 - 2.0 * self.m * potential.v_left) / self.m
        self.edges = subdivide(potential.breakpoints(), PANELS_PER_SEGMENT)
        self._inv_v = CumulativeIntegral(lambda z: 1.0 / self.velocity(z), self.edges)
        self._inv_v3 = CumulativeIntegral(lambda z: self.velocity(z) ** -3, self.edges)
        self.t_out = (self.hi - self.z0) / self.v_f
        self.t_in = self.t_out - self._inv_v.total
        self._t_edges = self.t_in + self._inv_v.values

    def velocity(self, z):
        V = self.potential(z)[0]
        return np.sqrt(self.p**2 - 2.0 * self.m * V) / self.m

    def acceleration(self, z):
        return -self.potential(z)[1] / self.m

    def time_of(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=float))
        t = np.empty_like(z)
        right, left = z >= self.hi, z <= self.lo
        mid = ~(right | left)
        t[right] = (z[right] - self.z0) / self.v_f
        t[left] = self.t_in + (z[left] - self.lo) / self.v_i
        if np.any(mid):
            t[mid] = self.t_in + self._inv_v(z[mid])
        return t

    def position_at(self, t, iterations: int = 8):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        z = np.empty_like(t)
        right, left = t >= self.t_out, t <= self.t_in
        mid = ~(right | left)
        z[right] = self.z0 + self.v_f * t[right]
        z[left] = self.lo + self.v_i * (t[left] - self.t_in)
        if np.any(mid):
            tm = t[mid]
            zm = np.interp(tm, self._t_edges, self.edges)
            for _ in range(iterations):
                resid = self.t_in + self._inv_v(zm) - tm
                zm = np.clip(zm - resid * self.velocity(zm), self.lo, self.hi)
            resid = self.t_in + self._inv_v(zm) - tm
            scale = max(1.0, abs(self.t_in), abs(self.t_out))
            if np.max(np.abs(resid)) > 1e-11 * scale:
                raise GridTooCoarse(f"time inversion did not converge (residual {np.max(np.abs(resid)):.2e})")
            z[mid] = zm
        return z

    def inv_v2_integral(self, z):
        """int_0^t dtau / v(tau)^2 = int_{z0}^{z(t)} dz / v^3."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        out = np.empty_like(z)
        at_hi = (self.hi - self.z0) / self.v_f**3
        at_lo = at_hi - self._inv_v3.total
        right, left = z >= self.hi, z <= self.lo
        mid = ~(right | left)
        out[right] = (z[right] - self.z0) / self.v_f**3
        out[left] = at_lo + (z[left] - self.lo) / self.v_i**3
        if np.any(mid):
            out[mid] = at_lo + self._inv_v3(z[mid])
        return out


@dataclass(frozen=True)
class Trajectory:
    t_grid: np.ndarray
    z_of_t: np.ndarray
    v_of_t: np.ndarray
    a_of_t: np.ndarray
    inv_v2_cum: np.ndarray  # int_0^t dtau / v^2 on the grid
    p: float
    m: float
    z0: float
    T0: float
    v_i: float
    v_f: float
    t_in: float
    t_out: float
    i_zero: int  # t_grid[i_zero] == 0 exactly
    clock: Clock = field(repr=False, compare=False)

    @property
    def dt(self) -> float:
        return float(self.t_grid[1] - self.t_grid[0])

    def sample(self, t):
        """z, v, a and int_0^t dtau/v^2 evaluated at arbitrary times inside the grid."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        tol = 1e-9 * self.dt
        if np.any(t < self.t_grid[0] - tol) or np.any(t > self.t_grid[-1] + tol):
            raise OutOfGrid(f"t outside trajectory grid [{self.t_grid[0]:.6g}, {self.t_grid[-1]:.6g}]")
        z = self.clock.position_at(t)
        return z, self.clock.velocity(z), self.clock.acceleration(z), self.clock.inv_v2_integral(z)

    def to_csv(self, path) -> None:
        from .io import write_csv

        write_csv(path, ["t", "z", "v", "a"], [self.t_grid, self.z_of_t, self.v_of_t, self.a_of_t])


def _uniform_grid_with_zero(start: float, end: float, n: int) -> tuple[np.ndarray, int]:
    dt = (end - start) / (n - 1)
    i0 = int(round(-start / dt))
    if not 0 <= i0 < n:
        raise ValueError("time grid must contain t = 0")
    t = (np.arange(n) - i0) * dt
    t[i0] = 0.0
    return t, i0


def solve_trajectory(consts: PhysicalConstants, potential, p: float, z0: float,
                     grid: GridSpec = GridSpec()) -> Trajectory:
    clock = Clock(consts, potential, p, z0)
    pad = grid.pad_factor * _half_width(potential) / clock.v_i
    start = clock.t_in - pad
    end = max(clock.t_out + pad, 0.0)
    t, i0 = _uniform_grid_with_zero(start, end, grid.n_points)
    dt = t[1] - t[0]
    if (clock.t_out - clock.t_in) / dt < grid.min_pulse_samples:
        raise GridTooCoarse(f"acceleration window resolved by fewer than {grid.min_pulse_samples} samples")
    if t[0] >= clock.t_in or t[-1] <= clock.t_out:
        raise GridTooCoarse("acceleration window not strictly inside the grid")
    z = clock.position_at(t)
    v = clock.velocity(z)
    a = clock.acceleration(z)
    V = potential(z)[0]
    energy = 0.5 * consts.m * v**2 + V
    e_ref = 0.5 * consts.m * clock.v_f**2
    if np.max(np.abs(energy - e_ref)) > 1e-9 * e_ref:
        raise GridTooCoarse("energy conservation violated beyond 1e-9")
    arrays = [t, z, v, a, clock.inv_v2_integral(z)]
    for arr in arrays:
        arr.setflags(write=False)
    return Trajectory(*arrays, p=float(p), m=consts.m, z0=float(z0),
                      T0=float(clock.time_of(potential_center(potential))[0]),
                      v_i=clock.v_i, v_f=clock.v_f, t_in=clock.t_in, t_out=clock.t_out,
                      i_zero=i0, clock=clock)


def potential_center(potential) -> float:
    if hasattr(potential, "center"):
        return potential.center
    lo, hi = potential.support()
    return 0.5 * (lo + hi)


def dv_dp(traj: Trajectory, t=None):
    """Momentum derivative of v_p(t) at fixed t (with z(0) = z0 held fixed).

    dv/dp = (v_f/m) [1/v(t) + a(t) int_0^t dtau / v(tau)^2]
    """
    if t is None:
        v, a, b = traj.v_of_t, traj.a_of_t, traj.inv_v2_cum
    else:
        _, v, a, b = traj.sample(t)
    out = (traj.v_f / traj.m) * (1.0 / v + a * b)
    return float(out[0]) if t is not None and np.ndim(t) == 0 else out


def ld_rapidity_rhs(consts: PhysicalConstants, F_ext: float, beta_ddot: float) -> float:
    """Right-hand side of the 1-D Lorentz-Dirac equation in rapidity form, d beta / d tau."""
    return F_ext / (consts.m * consts.c) + consts.e2 / (6.0 * math.pi * consts.m * consts.c**3) * beta_ddot


def integrate_rk4(consts: PhysicalConstants, potential, z_start: float, v_start: float,
                  t_samples, substeps: int = 4):
    """Integrate m z'' = -V'(z) with classical RK4 from (t_samples[0], z_start, v_start).

    ``t_samples`` must be uniform; each interval is split into ``substeps`` RK4 steps.
    Returns (z, v) at the sample times.
    """
    t_samples = np.asarray(t_samples, dtype=float)
    h = (t_samples[1] - t_samples[0]) / substeps
    m = consts.m

    def force(z):
        return -potential(z)[1] / m

    zs = np.empty_like(t_samples)
    vs = np.empty_like(t_samples)
    z, v = float(z_start), float(v_start)
    zs[0], vs[0] = z, v
    for k in range(1, len(t_samples)):
        for _ in range(substeps):
            k1z, k1v = v, force(z)
            k2z, k2v = v + 0.5 * h * k1v, force(z + 0.5 * h * k1z)
            k3z, k3v = v + 0.5 * h * k2v, force(z + 0.5 * h * k2z)
            k4z, k4v = v + h * k3v, force(z + h * k3z)
            z += h * (k1z + 2 * k2z + 2 * k3z + k4z) / 6.0
            v += h * (k1v + 2 * k2v + 2 * k3v + k4v) / 6.0
        zs[k], vs[k] = z, v
    return zs, vs
