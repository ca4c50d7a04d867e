"""Fourier transform of the acceleration pulse and its frequency-domain identities.

Convention: a_hat(omega) = int a(t) exp(i omega t) dt, evaluated as a direct
trapezoid sum over the uniform time grid (the samples vanish at both ends, so
this is dt * sum). The omega grid is two-sided, symmetric and contains 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccelerationAfterMeasurement, GridTooCoarse, OmegaOutOfRange, SupportNotCompact

_CHUNK = 2048


@dataclass(frozen=True)
class FreqGridSpec:
    d_omega: float = 0.01
    omega_max: float | None = None  # None: adaptive
    threshold: float = 1e-6  # |a_hat| at omega_max relative to the peak
    safety: float = 2.0


@dataclass(frozen=True)
class Spectrum:
    omega_grid: np.ndarray
    a_hat: np.ndarray
    da_hat_domega: np.ndarray
    source_p: float
    dt: float
    t_support: np.ndarray  # time samples where a != 0
    a_support: np.ndarray
    t_center: float  # demodulation reference used for the derivative

    @property
    def d_omega(self) -> float:
        return float(self.omega_grid[1] - self.omega_grid[0])

    @property
    def omega_max(self) -> float:
        return float(self.omega_grid[-1])

    def evaluate(self, omega):
        """a_hat at arbitrary frequencies (same discrete sum as the grid values)."""
        omega = np.asarray(omega, dtype=float)
        return _dtft(self.t_support, self.a_support, self.dt, omega.ravel()).reshape(omega.shape)

    def evaluate_checked(self, omega):
        if np.any(np.abs(omega) > self.omega_max):
            raise OmegaOutOfRange(f"|omega| exceeds spectrum range {self.omega_max:.6g}")
        return self.evaluate(omega)

    def to_csv(self, path) -> None:
        from .io import write_csv

        write_csv(path, ["omega", "re_a_hat", "im_a_hat", "abs_a_hat"],
                  [self.omega_grid, self.a_hat.real, self.a_hat.imag, np.abs(self.a_hat)])


def _dtft(t, a, dt, omega, t_ref: float = 0.0):
    """dt * sum_k a_k exp(i omega (t_k - t_ref)), chunked over omega."""
    out = np.empty(len(omega), dtype=complex)
    s = t - t_ref
    for i in range(0, len(omega), _CHUNK):
        w = omega[i:i + _CHUNK]
        out[i:i + _CHUNK] = np.exp(1j * np.outer(w, s)) @ a
    return dt * out


def _adaptive_omega_max(t, a, dt, grid: FreqGridSpec, t_ref: float) -> float:
    nyquist = math.pi / dt
    scan = np.linspace(0.0, nyquist, 4097)
    mag = np.abs(_dtft(t, a, dt, scan, t_ref))
    peak = mag.max()
    above = np.nonzero(mag >= grid.threshold * peak)[0]
    w_last = scan[above[-1]] if len(above) else scan[1]
    return min(grid.safety * w_last, 0.95 * nyquist)


def fourier_transform_samples(t, a, grid: FreqGridSpec = FreqGridSpec(), source_p: float = float("nan")) -> Spectrum:
    """Spectrum of uniformly sampled acceleration data that vanishes at both ends."""
    t = np.asarray(t, dtype=float)
    a = np.asarray(a, dtype=float)
    dt = float(t[1] - t[0])
    amax = float(np.max(np.abs(a)))
    if amax > 0 and max(abs(a[0]), abs(a[-1])) > 1e-12 * amax:
        raise SupportNotCompact("acceleration does not vanish at the ends of the time grid")
    nz = np.nonzero(a)[0]
    if len(nz) == 0:
        nz = np.array([0, len(a) - 1])
    sl = slice(nz[0], nz[-1] + 1)
    ts, as_ = t[sl].copy(), a[sl].copy()
    t_c = 0.5 * (ts[0] + ts[-1])

    dw = grid.d_omega
    if grid.omega_max is not None:
        w_max = grid.omega_max
    elif amax == 0:
        w_max = 10 * dw
    else:
        w_max = _adaptive_omega_max(ts, as_, dt, grid, t_c)
    n_half = int(math.ceil(w_max / dw))
    k = np.arange(-n_half - 2, n_half + 3)
    omega_ext = k * dw
    b = _dtft(ts, as_, dt, omega_ext, t_c)
    # 4th-order central differences on the demodulated transform
    db = (b[:-4] - 8.0 * b[1:-3] + 8.0 * b[3:-1] - b[4:]) / (12.0 * dw)
    omega = omega_ext[2:-2]
    phase = np.exp(1j * omega * t_c)
    a_hat = phase * b[2:-2]
    da_hat = phase * (1j * t_c * b[2:-2] + db)
    if amax > 0:
        mag = np.abs(a_hat)
        if grid.omega_max is None and max(mag[0], mag[-1]) >= grid.threshold * mag.max():
            raise GridTooCoarse("spectrum does not decay below threshold before Nyquist; refine the time grid")
    for arr in (omega, a_hat, da_hat, ts, as_):
        arr.setflags(write=False)
    return Spectrum(omega, a_hat, da_hat, float(source_p), dt, ts, as_, t_c)


def fourier_acceleration(traj, grid: FreqGridSpec = FreqGridSpec()) -> Spectrum:
    return fourier_transform_samples(traj.t_grid, traj.a_of_t, grid, source_p=traj.p)


def _time_samples(spec: Spectrum, traj=None):
    if traj is not None:
        return traj.t_grid, traj.a_of_t, traj.dt
    return spec.t_support, spec.a_support, spec.dt


def parseval_energy(spec: Spectrum, traj=None) -> tuple[float, float]:
    """(int a^2 dt, int |a_hat|^2 d omega / 2 pi) over the two-sided grid."""
    t, a, dt = _time_samples(spec, traj)
    time_side = float(dt * np.sum(a * a))
    freq_side = float(np.trapezoid(np.abs(spec.a_hat) ** 2, spec.omega_grid) / (2.0 * math.pi))
    return time_side, freq_side


def I_frequency_complex(spec: Spectrum) -> complex:
    """i int (d omega / 2 pi) conj(a_hat) d a_hat / d omega, before taking the real part."""
    integrand = np.conj(spec.a_hat) * spec.da_hat_domega
    return complex(1j * np.trapezoid(integrand, spec.omega_grid) / (2.0 * math.pi))


def check_measured_after_pulse(t, a) -> None:
    amax = np.max(np.abs(a)) if len(a) else 0.0
    late = np.abs(a[t > 0])
    if amax > 0 and late.size and late.max() > 1e-10 * amax:
        raise AccelerationAfterMeasurement("acceleration is nonzero for t > 0")


def I_functional(spec: Spectrum, traj=None) -> tuple[float, float]:
    """(-int t a^2 dt, i int (d omega/2 pi) conj(a_hat) d_omega a_hat)."""
    t, a, dt = _time_samples(spec, traj)
    check_measured_after_pulse(t, a)
    time_side = float(-dt * np.sum(t * a * a))
    freq = I_frequency_complex(spec)
    if abs(freq.imag) > 1e-10 * abs(freq.real) + 1e-15:
        raise GridTooCoarse(f"frequency-side I has imaginary residue {freq.imag:.3e}")
    return time_side, freq.real
