"""Larmor power, radiated energy, soft-photon emission probability and the
solid-angle averages of the photon polarization factors."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._quad import gauss_legendre
from .constants import PhysicalConstants
from .errors import NonpositiveCutoff
from .spectral import Spectrum, parseval_energy

POLARIZATION = "polarization"
INDEFINITE_METRIC = "indefinite_metric"


def larmor_power(consts: PhysicalConstants, traj) -> np.ndarray:
    return consts.larmor_coeff * traj.a_of_t**2


def radiated_energy(consts: PhysicalConstants, traj) -> float:
    """E_r = int P dt (trapezoid; the samples vanish at both grid ends)."""
    return float(traj.dt * np.sum(larmor_power(consts, traj)))


def radiated_energy_spectral(consts: PhysicalConstants, spec: Spectrum) -> float:
    """E_r from the spectrum: (e^2 / 6 pi c^3) int |a_hat|^2 d omega / 2 pi."""
    return consts.larmor_coeff * parseval_energy(spec)[1]


def sphere_grid(n_theta: int):
    """Product grid on the unit sphere: Gauss-Legendre in cos(theta) times uniform phi.

    Returns unit vectors (n, 3) and weights summing to 1.
    """
    if n_theta < 2:
        raise ValueError("need at least 2 polar nodes")
    x, w = gauss_legendre(n_theta)
    n_phi = 2 * n_theta
    phi = 2.0 * math.pi * (np.arange(n_phi) + 0.5) / n_phi
    cos_t = np.repeat(x, n_phi)
    sin_t = np.sqrt(1.0 - cos_t**2)
    ph = np.tile(phi, n_theta)
    khat = np.stack([sin_t * np.cos(ph), sin_t * np.sin(ph), cos_t], axis=1)
    weights = np.repeat(w, n_phi) / (2.0 * n_phi)
    return khat, weights


def polarization_vectors(khat):
    """Real transverse polarizations with eps2_z = 0; eps1 = eps2 x khat."""
    khat = np.atleast_2d(khat)
    zhat = np.array([0.0, 0.0, 1.0])
    e2 = np.cross(zhat, khat)
    norm = np.linalg.norm(e2, axis=1)
    polar = norm < 1e-14
    e2[polar] = [0.0, 1.0, 0.0]
    norm[polar] = 1.0
    e2 /= norm[:, None]
    e1 = np.cross(e2, khat)
    return e1, e2


def polarization_solid_angle_average(direction_samples: int = 64) -> tuple[float, float]:
    """Solid-angle averages of |eps1_z|^2 and of 1 - k_z^2 / |k|^2."""
    khat, w = sphere_grid(direction_samples)
    e1, _ = polarization_vectors(khat)
    avg_eps = float(np.sum(w * e1[:, 2] ** 2))
    avg_metric = float(np.sum(w * (1.0 - khat[:, 2] ** 2 / np.sum(khat**2, axis=1))))
    return avg_eps, avg_metric


def log_frequency_integral(spec: Spectrum, omega_min: float, omega_max: float | None = None,
                           order: int = 24) -> float:
    """int_{omega_min}^{omega_max} |a_hat(omega)|^2 d omega / omega.

    Gauss-Legendre panels in log(omega) up to ~1/duration, then panels of
    width <= pi / duration (half a ripple period of |a_hat|^2).
    """
    if not omega_min > 0:
        raise NonpositiveCutoff(f"omega_min must be positive, got {omega_min}")
    w_hi = spec.omega_max if omega_max is None else omega_max
    if omega_min >= w_hi:
        return 0.0
    duration = max(spec.t_support[-1] - spec.t_support[0], spec.dt)
    w_split = min(max(1.0 / duration, omega_min), w_hi)
    x, w = gauss_legendre(order)
    total = 0.0
    n_dec = max(1, int(math.ceil(math.log10(w_split / omega_min))))
    if w_split > omega_min:
        edges = np.linspace(math.log(omega_min), math.log(w_split), n_dec + 1)
        a, b = edges[:-1], edges[1:]
        half = 0.5 * (b - a)
        u = 0.5 * (a + b)[:, None] + half[:, None] * x[None, :]
        vals = np.abs(spec.evaluate(np.exp(u))) ** 2  # d omega / omega = du
        total += float(np.sum(half * (vals @ w)))
    if w_hi > w_split:
        n_pan = max(1, int(math.ceil((w_hi - w_split) * duration / math.pi)))
        edges = np.linspace(w_split, w_hi, n_pan + 1)
        a, b = edges[:-1], edges[1:]
        half = 0.5 * (b - a)
        om = 0.5 * (a + b)[:, None] + half[:, None] * x[None, :]
        vals = np.abs(spec.evaluate(om)) ** 2 / om
        total += float(np.sum(half * (vals @ w)))
    return total


def emission_probability(consts: PhysicalConstants, spec: Spectrum, omega_min: float,
                         route: str = POLARIZATION, direction_samples: int = 64) -> float:
    """One-photon emission probability with photon frequencies above omega_min.

    P = (e^2 / hbar) int d^3k / (2 omega^3 (2 pi)^3) <angular factor> |a_hat|^2
      = e^2 <factor> / (4 pi^2 hbar c^3) int |a_hat|^2 d omega / omega,
    where <factor> is the solid-angle average of |eps1_z|^2 (physical
    polarizations) or of 1 - k_z^2 c^2/omega^2 (indefinite-metric route).
    """
    avg_eps, avg_metric = polarization_solid_angle_average(direction_samples)
    if route == POLARIZATION:
        factor = avg_eps
    elif route == INDEFINITE_METRIC:
        factor = avg_metric
    else:
        raise ValueError(f"unknown route {route!r}")
    prefactor = consts.e2 * factor / (4.0 * math.pi**2 * consts.hbar * consts.c**3)
    return prefactor * log_frequency_integral(spec, omega_min)


def ir_log_coefficient(consts: PhysicalConstants, delta_v: float) -> float:
    """Leading soft-photon coefficient dP / d ln(1/omega_min) = e^2 |a_hat(0)|^2 / (6 pi^2 hbar c^3)."""
    return consts.e2 * delta_v**2 / (6.0 * math.pi**2 * consts.hbar * consts.c**3)


@dataclass(frozen=True)
class RadiationReport:
    P_of_t: np.ndarray
    E_r: float
    E_r_spectral: float
    emission_probability: float
    ir_cutoff: float
    ir_log_slope: float


def radiation_report(consts: PhysicalConstants, traj, spec: Spectrum, omega_min: float = 1e-5) -> RadiationReport:
    P = larmor_power(consts, traj)
    prob = emission_probability(consts, spec, omega_min)
    prob10 = emission_probability(consts, spec, 10.0 * omega_min)
    return RadiationReport(P_of_t=P, E_r=radiated_energy(consts, traj),
                           E_r_spectral=radiated_energy_spectral(consts, spec),
                           emission_probability=prob, ir_cutoff=omega_min,
                           ir_log_slope=(prob - prob10) / math.log(10.0))
