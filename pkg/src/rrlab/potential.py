"""Static potentials V(z) with V(+inf) = 0.

The default shape is a quintic smoothstep ramp whose derivative has exact
compact support on [center - L, center + L]:

    V(z) = V_-inf * (1 - S(u)),   u = (z - center + L) / (2 L),
    S(u) = u**3 (10 - 15 u + 6 u**2)

``TANH_APPROX`` is a smooth C-infinity ramp without compact support (only for
smoothness studies), and ``BUMP_C2`` is a symmetric barrier with V(+-inf) = 0
used for the infrared-finite emission study.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

# tanh ramp is treated as flat beyond this many half-widths (|V'| < 1e-17 |V_-inf|/L)
TANH_CUTOFF = 20.0


class Shape(str, enum.Enum):
    SMOOTHSTEP_C2 = "SmoothstepC2"
    TANH_APPROX = "TanhApprox"
    BUMP_C2 = "BumpC2"

    @classmethod
    def parse(cls, value) -> "Shape":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for member in cls:
            if member.value.lower() == key or member.name.lower() == key:
                return member
        raise ValueError(f"unknown potential shape {value!r}")


def smoothstep(u):
    """Quintic smoothstep S(u) and its first two derivatives, clamped to [0, 1]."""
    u = np.clip(u, 0.0, 1.0)
    s = u**3 * (10.0 - 15.0 * u + 6.0 * u**2)
    ds = 30.0 * u**2 * (1.0 - u) ** 2
    d2s = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u)
    return s, ds, d2s


@dataclass(frozen=True)
class PotentialSpec:
    v_minus_inf: float = 0.0
    half_width: float = 1.0
    shape: Shape = Shape.SMOOTHSTEP_C2
    center: float = 0.0
    peak: float = 0.0  # barrier height, BUMP_C2 only

    def __post_init__(self):
        object.__setattr__(self, "shape", Shape.parse(self.shape))
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")
        if self.shape is Shape.BUMP_C2:
            if self.v_minus_inf != 0.0:
                raise ValueError("BumpC2 requires v_minus_inf == 0 (V vanishes on both sides)")
        elif self.peak != 0.0:
            raise ValueError("peak is only meaningful for BumpC2")

    @property
    def compact_support(self) -> bool:
        return self.shape is not Shape.TANH_APPROX

    def __call__(self, z):
        return evaluate(self, z)

    def support(self) -> tuple[float, float]:
        """Interval outside of which V' vanishes (numerically, for the tanh ramp)."""
        L = self.half_width
        if self.shape is Shape.TANH_APPROX:
            return self.center - TANH_CUTOFF * L, self.center + TANH_CUTOFF * L
        return self.center - L, self.center + L

    def breakpoints(self) -> np.ndarray:
        """Panel edges inside which V is analytic; quadratures split here."""
        lo, hi = self.support()
        if self.shape is Shape.BUMP_C2:
            return np.array([lo, self.center, hi])
        if self.shape is Shape.TANH_APPROX:
            return np.linspace(lo, hi, 81)
        return np.array([lo, hi])

    def sup(self) -> float:
        """Supremum of V."""
        if self.shape is Shape.BUMP_C2:
            return max(self.peak, 0.0)
        return max(self.v_minus_inf, 0.0)

    @property
    def v_left(self) -> float:
        return self.v_minus_inf


def evaluate(spec: PotentialSpec, z):
    """Return (V, V', V'') at z (scalar or array)."""
    z = np.asarray(z, dtype=float)
    L = spec.half_width
    if spec.shape is Shape.SMOOTHSTEP_C2:
        u = (z - spec.center + L) / (2.0 * L)
        s, ds, d2s = smoothstep(u)
        vm = spec.v_minus_inf
        V = vm * (1.0 - s)
        Vp = -vm * ds / (2.0 * L)
        Vpp = -vm * d2s / (4.0 * L**2)
    elif spec.shape is Shape.BUMP_C2:
        x = z - spec.center
        sgn = np.where(x >= 0.0, 1.0, -1.0)
        s, ds, d2s = smoothstep(np.abs(x) / L)
        V = spec.peak * (1.0 - s)
        Vp = -spec.peak * sgn * ds / L
        Vpp = -spec.peak * d2s / L**2
    else:
        th = np.tanh((z - spec.center) / L)
        sech2 = 1.0 - th**2
        vm = spec.v_minus_inf
        V = 0.5 * vm * (1.0 - th)
        Vp = -0.5 * vm * sech2 / L
        Vpp = vm * sech2 * th / L**2
    if V.ndim == 0:
        return float(V), float(Vp), float(Vpp)
    return V, Vp, Vpp


class SumPotential:
    """Pointwise sum of potentials, e.g. a ramp plus a small perturbation."""

    def __init__(self, parts: Sequence):
        if not parts:
            raise ValueError("SumPotential needs at least one part")
        self.parts = tuple(parts)

    def __call__(self, z):
        vals = [p(z) for p in self.parts]
        return tuple(sum(v[i] for v in vals) for i in range(3))

    def __repr__(self):
        return f"SumPotential({list(self.parts)!r})"

    @property
    def compact_support(self) -> bool:
        return all(p.compact_support for p in self.parts)

    @property
    def v_minus_inf(self) -> float:
        return sum(p.v_minus_inf for p in self.parts)

    @property
    def v_left(self) -> float:
        return self.v_minus_inf

    def support(self):
        los, his = zip(*(p.support() for p in self.parts))
        return min(los), max(his)

    def breakpoints(self):
        return np.unique(np.concatenate([p.breakpoints() for p in self.parts]))

    def sup(self) -> float:
        lo, hi = self.support()
        bp = self.breakpoints()
        z = np.unique(np.concatenate([np.linspace(lo, hi, 20001), bp]))
        return max(float(np.max(self(z)[0])), self.v_minus_inf, 0.0)
