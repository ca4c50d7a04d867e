"""Physical constants in code units.

All four constants are independent inputs so that hbar -> 0 ladders are just
loops over ``hbar``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class PhysicalConstants:
    m: float = 1.0
    c: float = 1.0
    e2: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("m", "c", "e2", "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"constant {name} must be positive and finite, got {value!r}")

    @property
    def alpha(self) -> float:
        """Fine structure constant e^2 / (4 pi hbar c)."""
        return self.e2 / (4.0 * math.pi * self.hbar * self.c)

    @property
    def larmor_coeff(self) -> float:
        """Prefactor of the nonrelativistic Larmor power, e^2 / (6 pi c^3)."""
        return self.e2 / (6.0 * math.pi * self.c**3)

    @property
    def compton(self) -> float:
        """Reduced Compton wavelength hbar / (m c)."""
        return self.hbar / (self.m * self.c)

    def with_hbar(self, hbar: float) -> "PhysicalConstants":
        return replace(self, hbar=hbar)

    def scaled(self, **factors: float) -> "PhysicalConstants":
        """Return a copy with the named constants multiplied by the given factors."""
        return replace(self, **{k: getattr(self, k) * v for k, v in factors.items()})


def natural_units() -> PhysicalConstants:
    return PhysicalConstants(m=1.0, c=1.0, e2=1.0, hbar=1.0)


def alpha(consts: PhysicalConstants) -> float:
    return consts.alpha


def larmor_coeff(consts: PhysicalConstants) -> float:
    return consts.larmor_coeff
