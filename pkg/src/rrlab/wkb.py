"""WKB photon-emission amplitude G(k_z, P, p) and its small-hbar limit.

The direct amplitude is the integration-by-parts form

    G = -2i sqrt(P p) int dz K'(z) / K(z)^2 exp(i int_c^z K),
    K(z) = [kappa_p(z) - kappa_P(z)] / hbar - k_z,

whose integrand vanishes wherever V' = 0, so no regulator is needed. Phases
are referenced to the potential center c (the origin of the z axis). The
difference kappa_p - kappa_P is evaluated as 2 m hbar omega / (kappa_p + kappa_P),
which is exact and free of cancellation at small hbar.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from ._quad import CumulativeIntegral, subdivide
from .constants import PhysicalConstants
from .dynamics import check_no_turning_point, potential_center
from .errors import OmegaOutOfRange, PhaseStationary, QuadratureError, TurningPoint

# phase advance allowed per Gauss-Kronrod panel; 21 nodes per pi/8 is far above 16 per period
PANEL_PHASE = math.pi / 8
MIN_PANELS_PER_SEGMENT = 4


@dataclass(frozen=True)
class WkbProblem:
    consts: PhysicalConstants
    potential: object
    p: float
    omega: float
    k_z: float = 0.0
    hbar_ladder: tuple = ()

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if abs(self.k_z) > self.omega / self.consts.c * (1 + 1e-12):
            raise ValueError("|k_z| must not exceed omega / c")
        check_no_turning_point(self.consts, self.potential, self.p)
        # with a ladder, the base hbar is a placeholder and only the rungs must be physical
        for h in self.hbar_ladder or (self.consts.hbar,):
            if not h > 0:
                raise ValueError("hbar ladder entries must be positive")
            P2 = self.p**2 - 2.0 * self.consts.m * h * self.omega
            if not P2 > 0:
                raise TurningPoint(f"photon energy exceeds the kinetic energy at hbar = {h}: P^2 <= 0")
            check_no_turning_point(self.consts, self.potential, math.sqrt(P2))

    @property
    def P(self) -> float:
        """Final momentum from p^2 - P^2 = 2 m hbar omega."""
        return math.sqrt(self.p**2 - 2.0 * self.consts.m * self.consts.hbar * self.omega)

    @property
    def center(self) -> float:
        return potential_center(self.potential)

    def at_hbar(self, hbar: float) -> "WkbProblem":
        return replace(self, consts=self.consts.with_hbar(hbar), hbar_ladder=())

    def rungs(self):
        return [self.at_hbar(h) for h in self.hbar_ladder]


@dataclass(frozen=True)
class AmplitudeResult:
    hbar: float
    omega: float
    k_z: float
    G_direct: complex
    G_asymptotic: complex
    G0_direct: complex
    rel_error: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "rel_error", abs(self.G_direct - self.G_asymptotic) / abs(self.G_asymptotic))


def kappa(consts: PhysicalConstants, potential, q: float, z):
    """Local momentum sqrt(q^2 - 2 m V(z)) and its z-derivative."""
    V, Vp, _ = potential(z)
    k = np.sqrt(q * q - 2.0 * consts.m * V)
    return k, -consts.m * Vp / k


class _Phase:
    """K(z), K'(z) and the ramp phase Phi(z) = int_c^z K for one problem."""

    def __init__(self, prob: WkbProblem):
        self.prob = prob
        c = prob.consts
        self.m, self.hbar = c.m, c.hbar
        self.lo, self.hi = prob.potential.support()
        self.edges = subdivide(prob.potential.breakpoints(), 32)
        self._F = CumulativeIntegral(lambda z: self.K(z)[0], self.edges)
        self._F_center = float(self._F(prob.center)[0])
        self.K_minus = float(self.K(self.lo)[0][0])
        self.K_plus = float(self.K(self.hi)[0][0])
        zs = np.linspace(self.lo, self.hi, 4001)
        if np.min(np.abs(self.K(zs)[0])) <= 0.0:
            raise PhaseStationary("K(z) vanishes on the ramp")

    def kappas(self, z):
        pr = self.prob
        kp, dkp = kappa(pr.consts, pr.potential, pr.p, z)
        kP, dkP = kappa(pr.consts, pr.potential, pr.P, z)
        return kp, dkp, kP, dkP

    def K(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=float))
        pr = self.prob
        kp, dkp, kP, dkP = self.kappas(z)
        s = kp + kP
        K = 2.0 * self.m * pr.omega / s - pr.k_z
        dK = -2.0 * self.m * pr.omega * (dkp + dkP) / s**2
        return K, dK

    def phi(self, z):
        """Phase int_c^z K on the ramp, extended linearly over the plateaus."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        zc = np.clip(z, self.lo, self.hi)
        out = self._F(zc) - self._F_center
        out = out + np.where(z > self.hi, self.K_plus * (z - self.hi), 0.0)
        out = out + np.where(z < self.lo, self.K_minus * (z - self.lo), 0.0)
        return out

    def panels(self) -> np.ndarray:
        """Panel edges on the ramp with phase advance <= PANEL_PHASE each."""
        bp = self.prob.potential.breakpoints()
        out = []
        for a, b in zip(bp[:-1], bp[1:]):
            dphi = abs(float(self.phi(b)[0] - self.phi(a)[0]))
            n = max(MIN_PANELS_PER_SEGMENT, int(math.ceil(dphi / PANEL_PHASE)))
            out.append(np.linspace(a, b, n + 1)[:-1])
        out.append(bp[-1:])
        return np.concatenate(out)


def _oscillatory_integral(f, edges, epsrel: float = 1e-11, limit: int = 200) -> complex:
    """Adaptive Gauss-Kronrod (QUADPACK) over the given panels; raise if the budget runs out."""
    total = 0.0 + 0.0j
    for a, b in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("error", IntegrationWarning)
            try:
                val, _ = quad(lambda z: complex(f(z)[0]), a, b, complex_func=True,
                              epsabs=0.0, epsrel=epsrel, limit=limit)
            except IntegrationWarning as exc:
                raise QuadratureError(f"oscillatory quadrature failed on [{a:.6g}, {b:.6g}]: {exc}") from exc
        total += val
    return total


def amplitude_direct(prob: WkbProblem, method: str = "ibp", damping: float = 1e-3) -> complex:
    """G(k_z, P, p) by direct quadrature of the WKB matrix element.

    ``method="ibp"`` (default) integrates the compact-support form. ``"damped"``
    integrates the raw first-order-in-V form 2 sqrt(Pp) int exp(i Phi - eps |z - c|)
    with the plateau tails done in closed form; it approaches the same value as
    eps -> 0 and exists for comparison only.
    """
    ph = _Phase(prob)
    root = math.sqrt(prob.P * prob.p)
    edges = ph.panels()
    if method == "ibp":
        def f(z):
            K, dK = ph.K(z)
            return dK / K**2 * np.exp(1j * ph.phi(z))

        return -2j * root * _oscillatory_integral(f, edges)
    if method == "damped":
        eps, c = damping, prob.center

        def g(z):
            return np.exp(1j * ph.phi(z) - eps * np.abs(z - c))

        ramp = _oscillatory_integral(g, edges)
        right = np.exp(1j * ph.phi(ph.hi)[0] - eps * (ph.hi - c)) / (eps - 1j * ph.K_plus)
        left = np.exp(1j * ph.phi(ph.lo)[0] - eps * (c - ph.lo)) / (eps + 1j * ph.K_minus)
        return 2.0 * root * complex(ramp + right + left)
    raise ValueError(f"unknown method {method!r}")


def amplitude_full(prob: WkbProblem) -> complex:
    """G with the exact WKB prefactor [sqrt(kp/kP) + sqrt(kP/kp)] instead of 2.

    G = i sqrt(Pp) int (B/K)' exp(i Phi) dz, again compact-support.
    """
    ph = _Phase(prob)

    def f(z):
        z = np.atleast_1d(z)
        kp, dkp, kP, dkP = ph.kappas(z)
        K, dK = ph.K(z)
        r = kp / kP
        dr = (dkp * kP - kp * dkP) / kP**2
        B = np.sqrt(r) + 1.0 / np.sqrt(r)
        dB = 0.5 / np.sqrt(r) * (1.0 - 1.0 / r) * dr
        return (dB / K - B * dK / K**2) * np.exp(1j * ph.phi(z))

    return 1j * math.sqrt(prob.P * prob.p) * _oscillatory_integral(f, ph.panels())


def amplitude_time_component(prob: WkbProblem) -> complex:
    """Time component G_0 of the indefinite-metric amplitude.

    G_0 = -i sqrt(Pp) (p_0 + P_0)/c int d/dz {[kP kp]^(1/2) K}^(-1) exp(i Phi) dz
    """
    c = prob.consts
    ph = _Phase(prob)
    p0 = c.c * math.sqrt((c.m * c.c) ** 2 + prob.p**2)
    P0 = p0 - c.hbar * prob.omega

    def f(z):
        z = np.atleast_1d(z)
        kp, dkp, kP, dkP = ph.kappas(z)
        K, dK = ph.K(z)
        root = np.sqrt(kp * kP)
        Q = root * K
        dQ = 0.5 * (dkp * kP + kp * dkP) / root * K + root * dK
        return -dQ / Q**2 * np.exp(1j * ph.phi(z))

    return -1j * math.sqrt(prob.P * prob.p) * (p0 + P0) / c.c * _oscillatory_integral(f, ph.panels())


def effective_z0(prob: WkbProblem, traj) -> float:
    """Free-flight position at t = 0 implied by the trajectory: z0_eff = -P T0 / m.

    Equals z0 at zeroth order in V; with it exp(i m omega z0_eff / P) = exp(-i omega T0)
    is the exact phase of the small-hbar limit.
    """
    return -prob.P * traj.T0 / prob.consts.m


def amplitude_asymptotic(prob: WkbProblem, traj, spectrum, z0: float | None = None) -> complex:
    """(2 i p / omega) a_hat_p(omega) exp(i m omega z0 / P).

    ``z0=None`` uses :func:`effective_z0`.
    """
    if prob.omega > spectrum.omega_max:
        raise OmegaOutOfRange(f"omega = {prob.omega} beyond spectrum range {spectrum.omega_max}")
    if z0 is None:
        z0 = effective_z0(prob, traj)
    a_hat = complex(spectrum.evaluate(prob.omega))
    m = prob.consts.m
    return 2j * prob.p / prob.omega * a_hat * np.exp(1j * m * prob.omega * z0 / prob.P)


def polarization_z(consts: PhysicalConstants, omega: float, k_z: float) -> float:
    """z-component of the in-plane polarization eps1 for a photon with wave number k_z."""
    return math.sqrt(max(0.0, 1.0 - (consts.c * k_z / omega) ** 2))


def classical_current_amplitude(consts: PhysicalConstants, traj, omega: float, k_z: float = 0.0) -> complex:
    """e eps1_z int v(t) exp(i omega t - i k_z z(t)) dt, in integration-by-parts form

    i e eps1_z omega int v'(t) exp(i omega t - i k_z z(t)) / (omega - k_z v)^2 dt.
    """
    if abs(k_z) > omega / consts.c * (1 + 1e-12):
        raise ValueError("|k_z| must not exceed omega / c")
    e = math.sqrt(consts.e2)
    eps_z = polarization_z(consts, omega, k_z)
    t, z, v, a = traj.t_grid, traj.z_of_t, traj.v_of_t, traj.a_of_t
    nz = np.nonzero(a)[0]
    sl = slice(nz[0], nz[-1] + 1) if len(nz) else slice(0, 0)
    integrand = a[sl] * np.exp(1j * (omega * t[sl] - k_z * z[sl])) / (omega - k_z * v[sl]) ** 2
    return 1j * e * eps_z * omega * traj.dt * complex(np.sum(integrand))


def classical_current_limit(consts: PhysicalConstants, spectrum, omega: float, k_z: float = 0.0) -> complex:
    """Small-k_z limit (i e eps1_z / omega) a_hat(omega)."""
    e = math.sqrt(consts.e2)
    return 1j * e * polarization_z(consts, omega, k_z) / omega * complex(spectrum.evaluate(omega))


def _kappa_phase(consts, potential, p, z):
    """int_c^z kappa_p dz' with the plateaus in closed form."""
    lo, hi = potential.support()
    c = potential_center(potential)
    F = CumulativeIntegral(lambda x: kappa(consts, potential, p, x)[0], subdivide(potential.breakpoints(), 32))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    k_lo = kappa(consts, potential, p, lo)[0]
    k_hi = kappa(consts, potential, p, hi)[0]
    out = F(np.clip(z, lo, hi)) - F(c)
    out = out + np.where(z > hi, k_hi * (z - hi), 0.0) + np.where(z < lo, k_lo * (z - lo), 0.0)
    return out


def wkb_mode_parts(consts: PhysicalConstants, potential, p: float, z):
    """(amplitude sqrt(p / kappa_p), phase (1/hbar) int_c^z kappa_p) of the WKB mode."""
    check_no_turning_point(consts, potential, p)
    k = kappa(consts, potential, p, np.atleast_1d(np.asarray(z, dtype=float)))[0]
    return np.sqrt(p / k), _kappa_phase(consts, potential, p, z) / consts.hbar


def wkb_mode(consts: PhysicalConstants, potential, p: float, z):
    """phi_p(z) = sqrt(p / kappa_p) exp((i/hbar) int_c^z kappa_p), with the O(hbar) correction g = 0."""
    amp, phase = wkb_mode_parts(consts, potential, p, z)
    out = amp * np.exp(1j * phase)
    return complex(out[0]) if np.ndim(z) == 0 else out


def k_approximation_error(prob: WkbProblem, n: int = 2001) -> float:
    """max_z |K_exact(z) + k_z - omega / v_p(z)| over the ramp and plateaus."""
    ph = _Phase(prob)
    z = np.linspace(ph.lo, ph.hi, n)
    K, _ = ph.K(z)
    kp = kappa(prob.consts, prob.potential, prob.p, z)[0]
    return float(np.max(np.abs(K + prob.k_z - prob.omega * prob.consts.m / kp)))


def amplitude_ladder(prob: WkbProblem, traj, spectrum) -> list[AmplitudeResult]:
    """Direct vs asymptotic amplitude along ``prob.hbar_ladder``."""
    out = []
    for rung in prob.rungs():
        out.append(AmplitudeResult(
            hbar=rung.consts.hbar, omega=rung.omega, k_z=rung.k_z,
            G_direct=amplitude_direct(rung),
            G_asymptotic=amplitude_asymptotic(rung, traj, spectrum),
            G0_direct=amplitude_time_component(rung),
        ))
    return out


def ladder_rows(results):
    """Rows for ``wkb_ladder.csv``."""
    return [(r.hbar, r.omega, r.k_z, r.G_direct.real, r.G_direct.imag,
             r.G_asymptotic.real, r.G_asymptotic.imag, r.rel_error) for r in results]
