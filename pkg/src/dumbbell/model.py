"""Dumbbell parameters, states, kinetic energy and the billiard rescaling.

The dumbbell is two point masses ``m1`` and ``m2`` on a massless rod of unit
length.  Its configuration is the height ``y`` of the center of mass and the
rod angle ``phi``.  Rescaling the height by ``sqrt(m / I)`` turns the kinetic
energy into that of a free unit-mass particle, which is what makes the
billiard picture work.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import InadmissibleState

#: admissibility slack, in rod lengths
TOL_GEOM = 1e-9


@dataclass(frozen=True)
class DumbbellParams:
    """Masses of the two ends; everything else is derived.

    ``beta1`` and ``beta2`` are the mass fractions, which are also the
    distances from the center of mass to ``m2`` and ``m1`` respectively.
    """

    m1: float
    m2: float
    beta1: float = field(init=False)
    beta2: float = field(init=False)
    total_mass: float = field(init=False)
    inertia: float = field(init=False)
    # sqrt(m / I) = 1 / sqrt(beta1 * beta2); multiplies y into Y
    scale: float = field(init=False, repr=False)
    # amplitudes of the two boundary sinusoids in the billiard plane
    amp1: float = field(init=False, repr=False)
    amp2: float = field(init=False, repr=False)

    rod_length = 1.0

    def __post_init__(self):
        for name in ("m1", "m2"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        total = self.m1 + self.m2
        b1 = self.m1 / total
        b2 = 1.0 - b1
        if not (b1 > 0 and b2 > 0):
            raise ValueError("mass ratio too extreme to represent")
        object.__setattr__(self, "beta1", b1)
        object.__setattr__(self, "beta2", b2)
        object.__setattr__(self, "total_mass", total)
        object.__setattr__(self, "inertia", b1 * b2 * total)
        object.__setattr__(self, "scale", 1.0 / math.sqrt(b1 * b2))
        object.__setattr__(self, "amp1", math.sqrt(b2 / b1))
        object.__setattr__(self, "amp2", math.sqrt(b1 / b2))

    @classmethod
    def from_ratio(cls, ratio: float) -> DumbbellParams:
        """Unit light mass with ``m2 = ratio * m1``."""
        return cls(1.0, float(ratio))

    def swapped(self) -> DumbbellParams:
        return DumbbellParams(self.m2, self.m1)

    @property
    def boundary_max(self) -> float:
        """Largest value of the billiard boundary ``B(phi)``."""
        return max(self.amp1, self.amp2)

    @property
    def wedge_angle(self) -> float:
        """Interior angle of the straight wedge tangent to the tall boundary arc."""
        light, heavy = sorted((self.beta1, self.beta2))
        return math.pi - 2.0 * math.atan(math.sqrt(heavy / light))


class PhysState(NamedTuple):
    """Center-of-mass height, rod angle and their rates.

    ``phi`` is kept unreduced so the angle swept between bounces can be read
    off directly.
    """

    y: float
    phi: float
    y_dot: float
    phi_dot: float

    def heights(self, params: DumbbellParams) -> tuple[float, float]:
        """Heights of ``m1`` and ``m2`` above the floor."""
        s = math.sin(self.phi)
        return self.y + params.beta2 * s, self.y - params.beta1 * s

    def is_admissible(self, params: DumbbellParams, tol: float = TOL_GEOM) -> bool:
        y1, y2 = self.heights(params)
        return y1 >= -tol and y2 >= -tol

    def reversed(self) -> PhysState:
        return PhysState(self.y, self.phi, -self.y_dot, -self.phi_dot)


class BilliardState(NamedTuple):
    """State in the rescaled ``(Y, phi)`` plane, where flight is a straight line."""

    Y: float
    phi: float
    Y_dot: float
    phi_dot: float

    def speed(self) -> float:
        return math.hypot(self.Y_dot, self.phi_dot)


def check_admissible(params: DumbbellParams, s: PhysState, tol: float = TOL_GEOM):
    y1, y2 = s.heights(params)
    if y1 < -tol or y2 < -tol:
        raise InadmissibleState(
            f"mass below the floor: y1={y1:.3g}, y2={y2:.3g} (tolerance {tol:g})")


def kinetic_energy(params: DumbbellParams, s: PhysState) -> float:
    m = params.total_mass
    return 0.5 * m * s.y_dot ** 2 + 0.5 * params.beta1 * params.beta2 * m * s.phi_dot ** 2


def billiard_energy(params: DumbbellParams, b: BilliardState) -> float:
    """``(I/2)(Y_dot^2 + phi_dot^2)``; equals :func:`kinetic_energy` of the same state."""
    return 0.5 * params.inertia * (b.Y_dot ** 2 + b.phi_dot ** 2)


def to_billiard(params: DumbbellParams, s: PhysState) -> BilliardState:
    k = params.scale
    return BilliardState(s.y * k, s.phi, s.y_dot * k, s.phi_dot)


def from_billiard(params: DumbbellParams, b: BilliardState) -> PhysState:
    k = params.scale
    return PhysState(b.Y / k, b.phi, b.Y_dot / k, b.phi_dot)
