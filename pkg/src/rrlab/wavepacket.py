"""Gaussian momentum-space wave packet and its t = 0 position expectation.

f(p) = N exp(-[(p - p_bar)^2 + |p_perp|^2] / (2 dp^2)) exp(-i h(p) / hbar),
h(p) = z0 p + chirp (p - p_bar)^2, restricted to p > 0.

The transverse Gaussian factorizes and is integrated in closed form, so every
numeric integral here is one-dimensional in p or z.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import erfc

from ._quad import gauss_legendre
from .constants import PhysicalConstants
from .errors import GridTooSmall, WidthTooLarge
from .io import write_csv

MAX_WIDTH_RATIO = 0.1
P_SPAN = 14.0  # momentum window half-width in units of dp; exp(-196) is far below double precision


@dataclass(frozen=True)
class WavePacketSpec:
    p_bar: float
    delta_p: float
    z0: float = 0.0
    norm: float | None = None
    chirp: float = 0.0

    def __post_init__(self):
        if not (self.p_bar > 0 and self.delta_p > 0):
            raise ValueError("p_bar and delta_p must be positive")
        if self.delta_p > MAX_WIDTH_RATIO * self.p_bar * (1 + 1e-12):
            raise WidthTooLarge(f"delta_p = {self.delta_p} exceeds p_bar/10 = {self.p_bar / 10}")

    @property
    def truncation(self) -> float:
        """Fraction of the untruncated Gaussian |f|^2 weight lying at p < 0."""
        return 0.5 * float(erfc(self.p_bar / self.delta_p))

    def h_prime(self, p):
        return self.z0 + 2.0 * self.chirp * (p - self.p_bar)

    def p_window(self) -> tuple[float, float]:
        return max(0.0, self.p_bar - P_SPAN * self.delta_p), self.p_bar + P_SPAN * self.delta_p


@dataclass(frozen=True)
class DensityGrid:
    n_z: int = 4001
    n_p: int = 2049
    span: float = 12.0  # half-width of the z window in density standard deviations
    z_min: float | None = None
    z_max: float | None = None


def _require_norm(spec: WavePacketSpec) -> float:
    if spec.norm is None:
        raise ValueError("wave packet is not normalized; call normalize() first")
    return spec.norm


def normalize(consts: PhysicalConstants, spec: WavePacketSpec) -> WavePacketSpec:
    """Set N so that int d^3p |f|^2 / (2 pi hbar)^3 = 1 over the half-space p > 0."""
    dp = spec.delta_p
    n2 = (2 * math.pi * consts.hbar) ** 3 / (math.pi**1.5 * dp**3 * (1.0 - spec.truncation))
    return replace(spec, norm=math.sqrt(n2))


def _transverse_weight(consts, spec) -> float:
    """int d^2p_perp / (2 pi hbar)^2 of the transverse |f|^2 factor, times N^2."""
    return _require_norm(spec) ** 2 * math.pi * spec.delta_p**2 / (2 * math.pi * consts.hbar) ** 2


def _longitudinal(spec, p):
    """Gaussian modulus along p (without N) and its p-derivative."""
    g = np.exp(-((p - spec.p_bar) ** 2) / (2 * spec.delta_p**2))
    return g, -(p - spec.p_bar) / spec.delta_p**2 * g


def normalization_integral(consts: PhysicalConstants, spec: WavePacketSpec, order: int = 96) -> float:
    """Quadrature value of int d^3p |f|^2 / (2 pi hbar)^3."""
    x, w = gauss_legendre(order)
    a, b = spec.p_window()
    p = 0.5 * (b - a) * x + 0.5 * (a + b)
    g, _ = _longitudinal(spec, p)
    return _transverse_weight(consts, spec) * 0.5 * (b - a) * float(np.sum(w * g * g)) / (2 * math.pi * consts.hbar)


def position_expectation(consts: PhysicalConstants, spec: WavePacketSpec, order: int = 96) -> float:
    """<z> = (i hbar / 2) int d^3p/(2 pi hbar)^3 [f* d_p f - (d_p f*) f] by Gauss-Legendre."""
    hbar = consts.hbar
    x, w = gauss_legendre(order)
    a, b = spec.p_window()
    p = 0.5 * (b - a) * x + 0.5 * (a + b)
    g, dg = _longitudinal(spec, p)
    phase = np.exp(-1j * (spec.z0 * p + spec.chirp * (p - spec.p_bar) ** 2) / hbar)
    f = g * phase
    df = (dg - 1j * spec.h_prime(p) / hbar * g) * phase
    integrand = 0.5j * hbar * (np.conj(f) * df - np.conj(df) * f)
    val = 0.5 * (b - a) * np.sum(w * integrand.real)
    return float(_transverse_weight(consts, spec) * val / (2 * math.pi * hbar))


def _quadratic_phase(consts, spec, t) -> float:
    # free evolution exp(-i p^2 t / 2 m hbar) adds t/2m to the chirp, up to terms linear in p
    return spec.chirp + t / (2.0 * consts.m)


def density_width(consts: PhysicalConstants, spec: WavePacketSpec, t: float = 0.0) -> float:
    """Standard deviation of rho(z) at free-flight time t (Gaussian, untruncated)."""
    q = _quadratic_phase(consts, spec, t)
    return math.sqrt(consts.hbar**2 / (2 * spec.delta_p**2) + 2.0 * (q * spec.delta_p) ** 2)


def spread_estimate(consts: PhysicalConstants, spec: WavePacketSpec, t: float) -> float:
    """(hbar/dp)^2 + (dp t / m)^2; equals twice the density variance for the unchirped packet."""
    return (consts.hbar / spec.delta_p) ** 2 + (spec.delta_p * t / consts.m) ** 2


def relativistic_weight_bound(consts: PhysicalConstants, spec: WavePacketSpec, n_sigma: float = 6.0) -> float:
    """Bound on |W/2 - 1| for W = sqrt(p0'/p0) + sqrt(p0/p0') across the occupied band.

    W/2 = cosh(u/2) with u = ln(p0'/p0), so W = 2 through first order in (p/mc)^2;
    this is the size of the dropped second-order term.
    """
    mc = consts.m * consts.c
    p_lo = max(0.0, spec.p_bar - n_sigma * spec.delta_p)
    p_hi = math.hypot(spec.p_bar + n_sigma * spec.delta_p, n_sigma * spec.delta_p)
    u = 0.5 * (math.log(mc**2 + p_hi**2) - math.log(mc**2 + p_lo**2))
    return math.cosh(0.5 * u) - 1.0


@dataclass(frozen=True)
class Density:
    z: np.ndarray
    rho: np.ndarray
    t: float

    @property
    def mass(self) -> float:
        return float(np.trapezoid(self.rho, self.z))

    def moment(self, k: int, about: float = 0.0) -> float:
        return float(np.trapezoid((self.z - about) ** k * self.rho, self.z))

    @property
    def mean(self) -> float:
        return self.moment(1) / self.mass

    @property
    def variance(self) -> float:
        return self.moment(2, self.mean) / self.mass

    def to_csv(self, path) -> None:
        write_csv(path, ["z", "rho"], [self.z, self.rho])


def charge_density(consts: PhysicalConstants, spec: WavePacketSpec, grid: DensityGrid = DensityGrid(),
                   t: float = 0.0) -> Density:
    """rho(t, z) from plane-wave modes, transverse directions integrated out.

    With the relativistic weight at first order (W = 2) the density is |psi(z)|^2,
    psi(z) = int dp/(2 pi hbar) g(p) exp(i p z / hbar), evaluated by the trapezoid rule.
    ``t != 0`` propagates each mode with the nonrelativistic free phase.
    """
    hbar = consts.hbar
    a, b = spec.p_window()
    p = np.linspace(a, b, grid.n_p)
    g, _ = _longitudinal(spec, p)
    amp = math.sqrt(_transverse_weight(consts, spec))
    h = spec.z0 * p + spec.chirp * (p - spec.p_bar) ** 2 + p * p * t / (2 * consts.m)
    coeff = amp * g * np.exp(-1j * h / hbar)
    w = np.full(grid.n_p, p[1] - p[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    coeff = coeff * w / (2 * math.pi * hbar)

    center = spec.z0 + spec.p_bar * t / consts.m
    half = grid.span * density_width(consts, spec, t)
    z_lo = center - half if grid.z_min is None else grid.z_min
    z_hi = center + half if grid.z_max is None else grid.z_max
    z = np.linspace(z_lo, z_hi, grid.n_z)
    psi = np.empty(grid.n_z, dtype=complex)
    for s in range(0, grid.n_z, 1024):
        psi[s:s + 1024] = np.exp(1j * np.outer(z[s:s + 1024], p) / hbar) @ coeff
    dens = Density(z=z, rho=np.abs(psi) ** 2, t=t)
    if dens.mass < 1.0 - 1e-6:
        raise GridTooSmall(f"density mass on grid is {dens.mass:.9g} < 1 - 1e-6")
    return dens


def charge_density_expectation(consts: PhysicalConstants, spec: WavePacketSpec,
                               grid: DensityGrid = DensityGrid()) -> float:
    """<z> = int z rho(0, z) dz on the z grid."""
    return charge_density(consts, spec, grid).moment(1)
