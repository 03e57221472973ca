"""Event-driven scattering of the dumbbell off the floor.

Between impacts the rescaled state moves on a straight line, so the only
numerical work is locating the next contact.  Along a flight the gap to each
boundary arc has the form ``c0 + c1*t + amp*sin(phi + omega*t)``; its critical
points are known in closed form, which splits the search window into
monotone pieces.  A sign change on a monotone piece brackets exactly one
root, which is then polished by a bracketed Newton iteration.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .collision import collide, collide_billiard
from .errors import CornerBranch, StationaryState
from .geometry import TOL_CORNER, Branch, horizon
from .model import (
    BilliardState,
    DumbbellParams,
    PhysState,
    check_admissible,
    from_billiard,
    kinetic_energy,
    to_billiard,
)

#: absolute tolerance on collision times
TOL_ROOT = 1e-12
#: contacts closer than this to the previous one are ignored
T_MIN = 1e-11

_TWO_PI = 2.0 * math.pi


class Termination(str, enum.Enum):
    ESCAPED = "Escaped"
    CORNER_HIT = "CornerHit"
    HORIZON_EXCEEDED = "HorizonExceeded"
    STATIONARY = "StationaryState"

    def __str__(self):
        return self.value


class Representation(str, enum.Enum):
    BILLIARD = "billiard"
    PHYSICAL = "physical"


class Contact(NamedTuple):
    time: float
    branch: Branch


@dataclass(frozen=True)
class Limits:
    max_bounces: int | None = None  # None: ten times the collision bound
    max_time: float = 1e6


@dataclass(frozen=True)
class BounceEvent:
    index: int
    time: float
    mass_hit: Branch
    pre: PhysState
    post: PhysState
    # angle swept by the rod since the previous event (or since the start)
    phi_travel: float


@dataclass(frozen=True)
class ScatterOutcome:
    params: DumbbellParams
    initial: PhysState
    events: tuple[BounceEvent, ...]
    termination: Termination
    final: PhysState
    final_time: float
    representation: Representation = field(default=Representation.BILLIARD)

    @property
    def collision_count(self) -> int:
        return len(self.events)

    def energy_drift(self) -> float:
        """Relative change of kinetic energy between the initial and final state."""
        e0 = kinetic_energy(self.params, self.initial)
        e1 = kinetic_energy(self.params, self.final)
        return abs(e1 - e0) / e0 if e0 > 0 else abs(e1 - e0)

    def count(self, branch: Branch) -> int:
        return sum(1 for e in self.events if e.mass_hit is branch)


def flight(b: BilliardState, t: float) -> BilliardState:
    return BilliardState(b.Y + b.Y_dot * t, b.phi + b.phi_dot * t, b.Y_dot, b.phi_dot)


def _critical_times(c1, amp, phi, omega, t_lo, t_hi):
    """Sorted times in ``(t_lo, t_hi)`` where ``c1 + amp*omega*cos(phi + omega*t)`` vanishes."""
    den = amp * omega
    if den == 0.0:
        return []
    r = -c1 / den
    if not -1.0 < r < 1.0:
        return []
    alpha = math.acos(r)
    th_a = phi + omega * t_lo
    th_b = phi + omega * t_hi
    lo, hi = (th_a, th_b) if omega > 0 else (th_b, th_a)
    out = []
    for base in (alpha, -alpha):
        k = math.ceil((lo - base) / _TWO_PI)
        th = base + k * _TWO_PI
        while th <= hi:
            t = (th - phi) / omega
            if t_lo < t < t_hi:
                out.append(t)
            k += 1
            th = base + k * _TWO_PI
    out.sort()
    return out


def _polish(c0, c1, amp, phi, omega, a, b, ha, hb):
    """Root of the gap on ``[a, b]`` given ``ha > 0 >= hb`` and monotonicity."""
    if hb == 0.0:
        return b
    t = a + ha * (b - a) / (ha - hb)
    for _ in range(200):
        th = phi + omega * t
        h = c0 + c1 * t + amp * math.sin(th)
        if h > 0.0:
            a = t
        elif h < 0.0:
            b = t
        else:
            return t
        if b - a <= TOL_ROOT:
            return b
        dh = c1 + amp * omega * math.cos(th)
        step = h / dh if dh != 0.0 else math.inf
        t_new = t - step
        if not a < t_new < b:
            t_new = 0.5 * (a + b)
        elif abs(step) <= 0.25 * TOL_ROOT:
            return t_new
        t = t_new
    return b


def first_crossing(c0, c1, amp, phi, omega, t_lo, t_hi):
    """First time in ``[t_lo, t_hi]`` where ``c0 + c1*t + amp*sin(phi + omega*t)``
    goes from positive to nonpositive, or ``None``."""
    if t_hi <= t_lo:
        return None
    a = t_lo
    ha = c0 + c1 * a + amp * math.sin(phi + omega * a)
    for b in _critical_times(c1, amp, phi, omega, t_lo, t_hi) + [t_hi]:
        hb = c0 + c1 * b + amp * math.sin(phi + omega * b)
        if ha > 0.0 and hb <= 0.0:
            return _polish(c0, c1, amp, phi, omega, a, b, ha, hb)
        a, ha = b, hb
    return None


def _find_contact(height, velocity, phi, omega, amp1, amp2, t_min=T_MIN):
    """Earliest contact for a straight flight ``height + velocity*t`` against
    the arcs ``-amp1*sin`` (mass 1) and ``amp2*sin`` (mass 2)."""
    top = max(amp1, amp2)
    t_hi = horizon(height, velocity, omega, top)
    if t_hi is None:
        return None
    if not math.isfinite(t_hi):
        raise StationaryState("motion too slow to resolve in floating point")
    t_lo = t_min
    if velocity < 0.0 and height > top:
        # nothing to hit while above the highest point of the boundary
        t_lo = max(t_lo, (height - top) / -velocity * (1.0 - 1e-12))
    if omega != 0.0:
        # the highest point of the boundary passes by within one revolution
        t_hi = min(t_hi, t_lo + _TWO_PI / abs(omega) * (1.0 + 1e-9) + TOL_ROOT)
    t1 = first_crossing(height, velocity, amp1, phi, omega, t_lo, t_hi)
    t2 = first_crossing(height, velocity, -amp2, phi, omega, t_lo, t_hi if t1 is None else t1)
    if t1 is None and t2 is None:
        return None
    if t2 is None or (t1 is not None and t1 <= t2):
        t, branch = t1, Branch.MASS1
    else:
        t, branch = t2, Branch.MASS2
    if abs(math.sin(phi + omega * t)) <= TOL_CORNER:
        branch = Branch.CORNER
    return Contact(t, branch)


def next_collision(params: DumbbellParams, b: BilliardState) -> Contact | None:
    """Time until the next floor contact along the straight billiard flight.

    Raises :class:`StationaryState` when the state does not move.
    """
    return _find_contact(b.Y, b.Y_dot, b.phi, b.phi_dot, params.amp1, params.amp2)


def next_collision_physical(params: DumbbellParams, s: PhysState) -> Contact | None:
    """Same search on the mass heights ``y +- beta * sin(phi)`` in physical units."""
    return _find_contact(s.y, s.y_dot, s.phi, s.phi_dot, params.beta2, params.beta1)


def default_limits(params: DumbbellParams) -> Limits:
    from .analysis import collision_bound

    return Limits(max_bounces=10 * collision_bound(params))


def _escape_point(height, velocity, top):
    """Flight time that lifts a departing state clear of the boundary."""
    if velocity <= 0.0 or height > top:
        return 0.0
    return (1.5 * top - height) / velocity


def scatter(params: DumbbellParams, initial: PhysState, limits: Limits | None = None,
            representation: Representation | str = Representation.BILLIARD) -> ScatterOutcome:
    """Run one scattering event from ``initial`` until the dumbbell leaves.

    Flights are exact straight lines in the rescaled plane.  With
    ``representation="physical"`` the same loop runs on physical coordinates
    with the closed-form impact law instead; both must give the same events.
    """
    representation = Representation(representation)
    check_admissible(params, initial)
    if limits is None:
        limits = default_limits(params)
    max_bounces = limits.max_bounces
    if max_bounces is None:
        max_bounces = default_limits(params).max_bounces
    physical = representation is Representation.PHYSICAL

    if physical:
        state = initial
        top = max(params.beta1, params.beta2)
    else:
        state = to_billiard(params, initial)
        top = params.boundary_max
    amp1, amp2 = (params.beta2, params.beta1) if physical else (params.amp1, params.amp2)

    def view(x):
        return x if physical else from_billiard(params, x)

    events = []
    now = 0.0
    termination = None
    while True:
        h, phi, v, omega = state
        try:
            contact = _find_contact(h, v, phi, omega, amp1, amp2)
        except StationaryState:
            termination = Termination.STATIONARY
            break
        if contact is None:
            dt = _escape_point(h, v, top)
            if now + dt <= limits.max_time:
                state = type(state)(h + v * dt, phi + omega * dt, v, omega)
                now += dt
            termination = Termination.ESCAPED
            break
        dt, branch = contact
        if len(events) >= max_bounces or now + dt > limits.max_time:
            termination = Termination.HORIZON_EXCEEDED
            break
        pre = type(state)(h + v * dt, phi + omega * dt, v, omega)
        now += dt
        travel = abs(omega) * dt
        if branch is Branch.CORNER:
            events.append(BounceEvent(len(events), now, branch, view(pre), view(pre), travel))
            state = pre
            termination = Termination.CORNER_HIT
            break
        try:
            if physical:
                post = collide(params, pre, branch).post
            else:
                post = collide_billiard(params, pre, branch)
        except CornerBranch:
            events.append(BounceEvent(len(events), now, Branch.CORNER, view(pre), view(pre), travel))
            state = pre
            termination = Termination.CORNER_HIT
            break
        events.append(BounceEvent(len(events), now, branch, view(pre), view(post), travel))
        state = post

    return ScatterOutcome(params, initial, tuple(events), termination, view(state), now,
                          representation)
