"""Adiabatic invariant, leading-order bounce map, collision bound and the
straight-wedge reference counts."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegenerateWedge, NearVertical, OnVertex, OutOfRange
from .geometry import Branch
from .model import TOL_GEOM, DumbbellParams, PhysState

TOL_VERTICAL = 1e-6
TOL_WEDGE = 1e-12


# --- adiabatic invariant ---------------------------------------------------

def invariant_profile(y: float) -> float:
    """``f(y) = pi - arccos(y)``; ``y`` is clamped to ``[-1, 1]`` first."""
    if abs(y) > 1.0 + TOL_GEOM:
        raise OutOfRange(f"height {y!r} outside [-1, 1]")
    return math.pi - math.acos(min(1.0, max(-1.0, y)))


def adiabatic_invariant(s: PhysState) -> float:
    """``|phi_dot| * f(y)``: angular speed times half the angle the light mass
    sweeps between two consecutive floor contacts."""
    return abs(s.phi_dot) * invariant_profile(s.y)


def invariant_drift_per_bounce(pre: PhysState, post: PhysState) -> float:
    """Change of the invariant between two consecutive light-mass contacts."""
    return adiabatic_invariant(post) - adiabatic_invariant(pre)


@dataclass(frozen=True)
class AdiabaticTrace:
    profile: tuple[float, ...]
    angular_speed: tuple[float, ...]
    invariant: tuple[float, ...]
    delta: float
    epsilon: float

    @property
    def initial(self) -> float:
        return self.invariant[0] if self.invariant else math.nan

    @property
    def final(self) -> float:
        return self.invariant[-1] if self.invariant else math.nan

    @property
    def drift(self) -> float:
        """``|I_N - I_0|``."""
        return abs(self.final - self.initial)

    @property
    def max_drift(self) -> float:
        if not self.invariant:
            return math.nan
        i0 = self.invariant[0]
        return max(abs(i - i0) for i in self.invariant)

    @classmethod
    def from_events(cls, events, delta: float = math.nan, epsilon: float = math.nan):
        """Invariant at the pre-impact state of every light-mass contact.

        Heavy-mass and corner contacts are skipped: the invariant is a property
        of the light-mass bounce sequence.
        """
        pres = [e.pre for e in events if e.mass_hit is Branch.MASS1]
        prof = tuple(invariant_profile(s.y) for s in pres)
        speed = tuple(abs(s.phi_dot) for s in pres)
        return cls(prof, speed, tuple(p * w for p, w in zip(prof, speed)), delta, epsilon)


# --- leading-order bounce map ----------------------------------------------

class BounceMap(NamedTuple):
    phi_dot: float  # angular velocity after the bounce
    y: float        # center-of-mass height at the next light-mass contact


def approx_bounce_map(params: DumbbellParams, pre: PhysState) -> BounceMap:
    """Leading-order map from one light-mass contact to the next.

    Valid for a light ``m1`` (``beta1`` small), slow descent and the rod away
    from vertical.  Written for either sense of rotation: with
    ``phi_dot < 0`` it reads

        phi_dot+ = -phi_dot- - 2 y_dot- / sqrt(1 - y-^2)
        y+       =  y- - (2 pi - 2 arccos y-) y_dot- / phi_dot-

    and the mirror image ``phi -> 3 pi - phi`` covers ``phi_dot > 0``.
    ``params`` is accepted for symmetry with the exact maps; the leading
    order does not depend on the masses.
    """
    y, _, yd, pd = pre
    if pd == 0.0:
        raise ValueError("angular velocity must be nonzero")
    if abs(y) > 1.0:
        raise OutOfRange(f"height {y!r} outside [-1, 1]")
    root = math.sqrt(1.0 - y * y)
    if root < TOL_VERTICAL:
        raise NearVertical(f"rod within {root:.2g} of vertical")
    sense = math.copysign(1.0, pd)
    sweep = 2.0 * math.pi - 2.0 * math.acos(y)
    return BounceMap(-pd + sense * 2.0 * yd / root, y + sweep * yd / abs(pd))


def bounce_map_error_orders(epsilon: float, delta: float, k: float = 0.5) -> tuple[float, float]:
    """Size of the dropped terms when ``|phi - 3 pi/2| >~ delta**k``:
    ``(eps / delta**(2k), delta**(2-k) + eps / delta**k)`` for angular
    velocity and height respectively."""
    if not 0.0 <= k <= 1.0:
        raise ValueError("k must lie in [0, 1]")
    return epsilon / delta ** (2 * k), delta ** (2 - k) + epsilon / delta ** k


# --- collision bound ---------------------------------------------------------

@dataclass(frozen=True)
class WedgeSpec:
    gamma: float

    def __post_init__(self):
        if not 0.0 < self.gamma <= math.pi:
            raise ValueError(f"wedge angle must lie in (0, pi], got {self.gamma!r}")

    @classmethod
    def from_params(cls, params: DumbbellParams) -> WedgeSpec:
        return cls(params.wedge_angle)

    @property
    def max_reflections(self) -> int:
        return _ceil_tol(math.pi / self.gamma)


def _ceil_tol(q: float, tol: float = TOL_WEDGE) -> int:
    k = round(q)
    if abs(q - k) <= tol:
        return int(k)
    return math.ceil(q)


def _floor_tol(q: float, tol: float = TOL_WEDGE) -> int:
    return -_ceil_tol(-q, tol)


def collision_bound(params: DumbbellParams) -> int:
    """``ceil(pi / gamma) + 1``; symmetric in the two masses."""
    gamma = params.wedge_angle
    if gamma <= TOL_WEDGE:
        raise DegenerateWedge(f"wedge angle {gamma!r} too small")
    return _ceil_tol(math.pi / gamma) + 1


def _reflect_line(d, u):
    k = 2.0 * (d[0] * u[0] + d[1] * u[1])
    return k * u[0] - d[0], k * u[1] - d[1]


def _check_start(gamma, start, direction):
    x, y = start
    theta = math.atan2(y, x)
    if not (0.0 < theta < gamma and math.hypot(x, y) > 0.0):
        raise ValueError("start point must lie strictly inside the wedge")
    if direction[0] == 0.0 and direction[1] == 0.0:
        raise ValueError("direction must be nonzero")
    return theta


def wedge_reflections(spec: WedgeSpec, start: Sequence[float], direction: Sequence[float],
                      tol: float = 1e-9) -> int:
    """Count specular reflections of a point inside the wedge
    ``{0 <= angle <= gamma}`` by following it side to side."""
    gamma = spec.gamma
    _check_start(gamma, start, direction)
    sides = ((1.0, 0.0), (math.cos(gamma), math.sin(gamma)))
    px, py = map(float, start)
    norm = math.hypot(*direction)
    dx, dy = direction[0] / norm, direction[1] / norm
    last = None
    count = 0
    for _ in range(spec.max_reflections + 2):
        hit = None
        for i, (ux, uy) in enumerate(sides):
            if i == last:
                continue
            # p + t d = r u  =>  t = (u x p) / (d x u)
            den = dx * uy - dy * ux
            if abs(den) <= TOL_WEDGE:
                # running parallel to this side: never reaches it
                continue
            t = (ux * py - uy * px) / den
            r = (px + t * dx) * ux + (py + t * dy) * uy
            if t > 0.0 and r >= -tol and (hit is None or t < hit[0]):
                hit = (t, i, r)
        if hit is None:
            return count
        t, i, r = hit
        if r <= tol:
            raise OnVertex("trajectory runs into the wedge apex")
        px, py = px + t * dx, py + t * dy
        dx, dy = _reflect_line((dx, dy), sides[i])
        last = i
        count += 1
    raise RuntimeError("reflection count exceeded ceil(pi/gamma)")


def unfolding_count(spec: WedgeSpec, start: Sequence[float], direction: Sequence[float]) -> int:
    """Reflections predicted by unfolding: the number of mirrored copies of the
    wedge boundary that the straight line crosses.

    The polar angle of ``start + t*direction`` moves monotonically from that
    of ``start`` to that of ``direction``; every multiple of ``gamma`` passed
    on the way is one reflection.  Landing exactly on a multiple means the
    line is parallel to that copy and never crosses it.
    """
    gamma = spec.gamma
    theta = _check_start(gamma, start, direction)
    x, y = start
    dx, dy = direction
    swing = math.atan2(x * dy - y * dx, x * dx + y * dy)
    end = (theta + swing) / gamma
    if swing >= 0.0:
        return max(0, _ceil_tol(end) - 1)
    return max(0, -_floor_tol(end))


def wedge_oracle(spec: WedgeSpec, start, direction) -> int:
    """Simulated reflection count, cross-checked against unfolding."""
    simulated = wedge_reflections(spec, start, direction)
    unfolded = unfolding_count(spec, start, direction)
    if simulated != unfolded:
        raise AssertionError(f"simulated {simulated} reflections, unfolding predicts {unfolded}")
    return simulated


# --- scaling fits ------------------------------------------------------------

class PowerLawFit(NamedTuple):
    exponent: float
    prefactor: float


def fit_power_law(x, y) -> PowerLawFit:
    """Least-squares fit of ``log y = exponent * log x + log prefactor``."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    if lx.size < 2:
        raise ValueError("need at least two points for a fit")
    slope, intercept = np.polyfit(lx, ly, 1)
    return PowerLawFit(float(slope), float(math.exp(intercept)))
