"""Order-e^2 forward-scattering corrections.

Three closed forms:
  * the position shift from a small potential perturbation dV,
    -hbar d_p Re F = -(m/p^2) int dV dz, checked against a classical re-solve;
  * the dimensionally regularized mass shift, reported as (pole, finite) in MS-bar;
  * the local correction d(V/mc^2) = C x ln x, x = m(z)^2/m^2 = 1 + 2V/(mc^2),
    C = 3 e^2 / (32 pi^2 hbar c).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from ._quad import integrate, subdivide
from .constants import PhysicalConstants
from .io import write_csv

MSBAR = "MS-bar"


@dataclass(frozen=True)
class RenormInputs:
    mu: float
    epsilon_dimreg: float | None = None  # bookkeeping only, never used to add the pole
    delta_V: object = None

    def __post_init__(self):
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise ValueError("mu must be positive")


class TabulatedPotential:
    """Cubic spline through samples (z_k, V_k); zero outside the table.

    The end samples must vanish so the perturbation is compactly supported.
    """

    def __init__(self, z, V):
        z = np.asarray(z, dtype=float)
        V = np.asarray(V, dtype=float)
        if z.ndim != 1 or z.shape != V.shape or len(z) < 4 or np.any(np.diff(z) <= 0):
            raise ValueError("need >= 4 strictly increasing samples of matching shape")
        if V[0] != 0.0 or V[-1] != 0.0:
            raise ValueError("tabulated perturbation must vanish at both ends")
        self.z, self.V = z, V
        self._s = CubicSpline(z, V, bc_type="clamped")

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        inside = (z >= self.z[0]) & (z <= self.z[-1])
        zc = np.clip(z, self.z[0], self.z[-1])
        out = tuple(np.where(inside, self._s(zc, k), 0.0) for k in range(3))
        if z.ndim == 0:
            return tuple(float(o) for o in out)
        return out

    compact_support = True
    v_minus_inf = 0.0
    v_left = 0.0

    def support(self):
        return float(self.z[0]), float(self.z[-1])

    def breakpoints(self):
        return self.z

    def sup(self) -> float:
        return max(float(np.max(self.V)), 0.0)


def _check_integrable(delta_V) -> None:
    if getattr(delta_V, "v_left", 0.0) != 0.0:
        raise ValueError("delta_V must vanish at both ends to be integrable")


def delta_v_area(delta_V) -> float:
    """int dV dz over its support."""
    _check_integrable(delta_V)
    return float(integrate(lambda z: delta_V(z)[0], subdivide(delta_V.breakpoints(), 16)))


@dataclass(frozen=True)
class ForwardShift:
    closed_form: float
    oracle: float | None

    @property
    def rel_diff(self) -> float:
        return abs(self.oracle - self.closed_form) / abs(self.closed_form)


def classical_shift_oracle(consts: PhysicalConstants, p: float, delta_V, margin: float = 50.0,
                           rtol: float = 1e-13) -> float:
    """Arrival-position difference at a fixed late time, with and without dV.

    The particle starts ``margin`` to the left of the support with momentum p;
    both runs are integrated to the same time well past the support.
    """
    m = consts.m
    v = p / m
    lo, hi = delta_V.support()
    z_start = lo - margin
    t_end = (hi + margin - z_start) / v

    # integrate the deviation (dz, dv) from free flight so the tolerances act on small numbers
    def rhs(t, y):
        return [y[1], -delta_V(z_start + v * t + y[0])[1] / m]

    scale = max(abs(delta_V.sup()), 1e-300) * m / p**2 * (hi - lo)
    sol = solve_ivp(rhs, (0.0, t_end), [0.0, 0.0], method="DOP853", rtol=rtol,
                    atol=1e-12 * scale, max_step=(hi - lo) / (8 * v))
    if not sol.success:
        raise RuntimeError(f"trajectory re-solve failed: {sol.message}")
    return float(sol.y[0, -1])


def forward_shift_from_delta_v(consts: PhysicalConstants, p: float, delta_V, oracle: bool = True) -> ForwardShift:
    """-(m/p^2) int dV dz, optionally with the classical oracle alongside."""
    if not p > 0:
        raise ValueError("p must be positive")
    closed = -consts.m / p**2 * delta_v_area(delta_V)
    return ForwardShift(closed, classical_shift_oracle(consts, p, delta_V) if oracle else None)


@dataclass(frozen=True)
class MassShift:
    pole_coefficient: float  # multiplies 1/epsilon
    finite_part: float
    scheme: str = MSBAR


def mass_shift_msbar(consts: PhysicalConstants, mass: float, mu: float) -> MassShift:
    """dm^2 = -K (3/eps - 3 gamma + 7 - 3 ln(m^2 / 4 pi mu^2)), K = e^2 m^2 / (16 pi^2 hbar c).

    MS-bar absorbs the pole together with -3 gamma + 3 ln 4 pi, leaving
    finite = -K (7 - 3 ln(m^2/mu^2)). The pole is returned separately and never added.
    """
    if not (mass > 0 and mu > 0):
        raise ValueError("mass and mu must be positive")
    K = consts.e2 * mass**2 / (16 * math.pi**2 * consts.hbar * consts.c)
    return MassShift(pole_coefficient=-3.0 * K, finite_part=-K * (7.0 - 3.0 * math.log(mass**2 / mu**2)))


def correction_coefficient(consts: PhysicalConstants) -> float:
    return 3.0 * consts.e2 / (32 * math.pi**2 * consts.hbar * consts.c)


def potential_correction(consts: PhysicalConstants, potential, z):
    """Return (d(V/mc^2), its z-derivative) at z."""
    V, Vp, _ = potential(z)
    V = np.asarray(V, dtype=float)
    mc2 = consts.m * consts.c**2
    y = 2.0 * V / mc2
    if np.any(y <= -1.0):
        raise ValueError("m(z)^2 must stay positive: 2V/(mc^2) > -1")
    C = correction_coefficient(consts)
    lnx = np.log1p(y)
    delta = C * (1.0 + y) * lnx
    ddelta = C * (lnx + 1.0) * 2.0 * np.asarray(Vp) / mc2
    if delta.ndim == 0:
        return float(delta), float(ddelta)
    return delta, ddelta


def correction_step(consts: PhysicalConstants, potential) -> float:
    """d(V/mc^2) at z = -inf minus z = +inf."""
    y = 2.0 * potential.v_left / (consts.m * consts.c**2)
    return correction_coefficient(consts) * (1.0 + y) * math.log1p(y)


def correction_table(consts: PhysicalConstants, potential, n: int = 401, pad: float = 1.0):
    """Samples across the support plus ``pad`` half-widths on each side."""
    lo, hi = potential.support()
    w = hi - lo
    z = np.linspace(lo - pad * w / 2, hi + pad * w / 2, n)
    d, dd = potential_correction(consts, potential, z)
    return z, d, dd


def write_renorm_csv(path, z, delta, ddelta) -> None:
    write_csv(path, ["z", "delta_v_over_mc2", "d_delta_v_dz"], [z, delta, ddelta])
