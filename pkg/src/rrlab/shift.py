"""Position shift at t = 0 caused by radiation, computed four ways.

* ``shift_ld_closed``: Lorentz-Dirac closed form, with m v replaced by the
  final momentum p in the second term (valid to second order in V).
* ``shift_ld_ode``: direct quadrature of the linearized Lorentz-Dirac energy
  balance, m d/dt(dz/v) = k a/v - (k/v^2) int_{-inf}^t a^2, k = e^2/(6 pi c^3).
* ``shift_quantum``: the small-hbar QED result (1/p) int t P_r(t) dt, which
  lacks the logarithmic term.
* ``shift_erratum``: the QED result with the surface terms kept, using a
  smooth time window chi(t) and the momentum derivative of v_p(t).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .constants import PhysicalConstants
from .dynamics import Trajectory, dv_dp
from .errors import ToleranceError, WindowTooNarrow
from .potential import smoothstep
from .radiation import larmor_power
from .spectral import I_functional, Spectrum, check_measured_after_pulse

QUANTUM_ROUTE_TOL = 1e-6


def log_term(consts: PhysicalConstants, traj: Trajectory) -> float:
    """(e^2 / 6 pi m c^3) v_f ln(v_f / v_i)."""
    return consts.larmor_coeff / consts.m * traj.v_f * math.log(traj.v_f / traj.v_i)


def shift_ld_closed(consts: PhysicalConstants, traj: Trajectory, spectrum: Spectrum) -> tuple[float, float, float]:
    """Return (dz, log_term, second_term) with second_term = -(e^2 / 6 pi p c^3) I."""
    _, I_freq = I_functional(spectrum, traj)
    lt = log_term(consts, traj)
    second = -consts.larmor_coeff / traj.p * I_freq
    return lt + second, lt, second


def shift_ld_ode(consts: PhysicalConstants, traj: Trajectory) -> float:
    t, a, v = traj.t_grid, traj.a_of_t, traj.v_of_t
    check_measured_after_pulse(t, a)
    k = consts.larmor_coeff
    j = traj.i_zero + 1
    absorbed = cumulative_trapezoid(a * a, t, initial=0.0)
    rhs = k * (a / v - absorbed / v**2)
    return float(traj.v_of_t[traj.i_zero] / consts.m * np.trapezoid(rhs[:j], t[:j]))


def shift_ld_nested(consts: PhysicalConstants, traj: Trajectory) -> float:
    """(e^2 v_f / 6 pi m c^3) {ln(v_f/v_i) - int_{-inf}^0 dtau/v^2 int_{-inf}^tau a^2 dt}.

    Same quantity as :func:`shift_ld_ode`, written in the nested form; the log
    is taken in closed form from the endpoint velocities.
    """
    t, a, v = traj.t_grid, traj.a_of_t, traj.v_of_t
    j = traj.i_zero + 1
    inner = cumulative_trapezoid(a[:j] ** 2, t[:j], initial=0.0)
    nested = np.trapezoid(inner / v[:j] ** 2, t[:j])
    return consts.larmor_coeff * traj.v_f / consts.m * (math.log(traj.v_f / traj.v_i) - nested)


def shift_quantum_frequency(consts: PhysicalConstants, traj: Trajectory, spectrum: Spectrum) -> float:
    _, I_freq = I_functional(spectrum, traj)
    return -consts.larmor_coeff / traj.p * I_freq


def shift_quantum_time(consts: PhysicalConstants, traj: Trajectory) -> float:
    check_measured_after_pulse(traj.t_grid, traj.a_of_t)
    P = larmor_power(consts, traj)
    return float(traj.dt * np.sum(traj.t_grid * P) / traj.p)


def shift_quantum(consts: PhysicalConstants, traj: Trajectory, spectrum: Spectrum,
                  tol: float = QUANTUM_ROUTE_TOL) -> float:
    """(1/p) int t P_r(t) dt; the frequency form must agree to ``tol``."""
    dz_t = shift_quantum_time(consts, traj)
    dz_f = shift_quantum_frequency(consts, traj, spectrum)
    if dz_t != 0.0:
        rel = abs(dz_f - dz_t) / abs(dz_t)
        if rel > tol:
            raise ToleranceError("shift_quantum time vs frequency form", rel, tol)
    return dz_t


@dataclass(frozen=True)
class WindowSpec:
    """C^2 smoothstep taper over ``taper_fraction`` of the grid span at each end."""

    taper_fraction: float = 0.1

    def chi(self, t):
        t = np.asarray(t, dtype=float)
        t0, t1 = t[0], t[-1]
        w = self.taper_fraction * (t1 - t0)
        s_l, ds_l, _ = smoothstep((t - t0) / w)
        s_r, ds_r, _ = smoothstep((t1 - t) / w)
        chi = s_l * s_r
        dchi = ds_l / w * s_r - s_l * ds_r / w
        return chi, dchi


def shift_erratum(consts: PhysicalConstants, traj: Trajectory, window: WindowSpec = WindowSpec()) -> float:
    """(e^2/6 pi c^3) int dt {a dv/dp + (1/2) v dv/dp d(chi^2)/dt}."""
    t, a, v = traj.t_grid, traj.a_of_t, traj.v_of_t
    chi, dchi = window.chi(t)
    if np.any((a != 0.0) & (chi < 1.0)):
        raise WindowTooNarrow("window tapers where the acceleration is nonzero")
    dvdp = dv_dp(traj)
    integrand = a * dvdp + v * dvdp * chi * dchi  # (1/2) d(chi^2)/dt = chi chi'
    return consts.larmor_coeff * float(np.trapezoid(integrand, t))


def gap_over_compton_direct(consts: PhysicalConstants, v_i: float, v_f: float) -> float:
    """(2 alpha / 3)(v_f / c) ln(v_f / v_i)."""
    return 2.0 * consts.alpha / 3.0 * (v_f / consts.c) * math.log(v_f / v_i)


@dataclass(frozen=True)
class ShiftReport:
    dz_ld_closed: float
    dz_ld_ode: float
    dz_quantum: float
    dz_erratum: float
    log_term: float
    I_term: float  # second term of the closed form, -(e^2/6 pi p c^3) I
    compton: float
    discrepancy_ratio: float
    gap_over_compton: float

    @property
    def erratum_agreement_rel_err(self) -> float:
        return rel_diff(self.dz_erratum, self.dz_ld_ode)


def rel_diff(x: float, ref: float) -> float:
    if ref == 0.0:
        return abs(x)
    return abs(x - ref) / abs(ref)


def shift_report(consts: PhysicalConstants, traj: Trajectory, spectrum: Spectrum,
                 window: WindowSpec = WindowSpec()) -> ShiftReport:
    dz_closed, lt, second = shift_ld_closed(consts, traj, spectrum)
    return ShiftReport(
        dz_ld_closed=dz_closed,
        dz_ld_ode=shift_ld_ode(consts, traj),
        dz_quantum=shift_quantum(consts, traj, spectrum),
        dz_erratum=shift_erratum(consts, traj, window),
        log_term=lt,
        I_term=second,
        compton=consts.compton,
        discrepancy_ratio=abs(lt) / consts.compton,
        gap_over_compton=lt / consts.compton,
    )
