"""Impact maps for a single floor contact.

Two independent routes give the post-impact velocities:

* :func:`collide_billiard` reflects the rescaled velocity off the boundary
  curve (the reference route);
* :func:`collide_mass1` / :func:`collide_mass2` apply the closed-form impact law
  in physical coordinates.

They are expected to agree to rounding; the test suite checks that they do.
"""
from __future__ import annotations

import math
from typing import NamedTuple, Sequence

from .errors import CornerBranch, NotInContact, OutgoingState, ZeroNormal
from .geometry import TOL_CORNER, Branch, outward_normal
from .model import TOL_GEOM, BilliardState, DumbbellParams, PhysState

#: normal speeds within this band are grazing and leave the state unchanged
TOL_GRAZE = 1e-10


class ImpactResult(NamedTuple):
    post: PhysState
    mass_hit: Branch
    normal_speed_pre: float


def reflect(v: Sequence[float], n: Sequence[float]) -> tuple[float, float]:
    """Negate the component of ``v`` along ``n``; ``n`` need not be unit length."""
    nn = n[0] * n[0] + n[1] * n[1]
    if nn == 0.0:
        raise ZeroNormal("reflection normal has zero length")
    k = 2.0 * (v[0] * n[0] + v[1] * n[1]) / nn
    return v[0] - k * n[0], v[1] - k * n[1]


def _classify(normal_speed: float):
    if normal_speed > TOL_GRAZE:
        raise OutgoingState(f"contact point moves away from the floor (normal speed {normal_speed:.3g})")
    return normal_speed >= -TOL_GRAZE


def collide_mass1(params: DumbbellParams, pre: PhysState) -> ImpactResult:
    """Impact of ``m1`` on the floor, resolved in physical coordinates."""
    b1, b2 = params.beta1, params.beta2
    y, phi, yd, pd = pre
    s = math.sin(phi)
    if abs(y + b2 * s) > TOL_GEOM:
        raise NotInContact(f"m1 is {y + b2 * s:.3g} above the floor")
    if abs(s) <= TOL_CORNER:
        raise CornerBranch("both masses touch the floor")
    c = math.cos(phi)
    # billiard normal speed; the contact-point velocity y1_dot is proportional to it
    vn = (yd + b2 * c * pd) * params.scale / math.sqrt(1.0 + params.amp1 ** 2 * c * c)
    if _classify(vn):
        return ImpactResult(pre, Branch.MASS1, vn)
    d = b1 + b2 * c * c
    yd_post = yd * (-1.0 + 2.0 * b2 * c * c / d) - pd * (2.0 * b1 * b2 * c / d)
    pd_post = pd * (1.0 - 2.0 * b2 * c * c / d) - yd * (2.0 * c / d)
    return ImpactResult(PhysState(y, phi, yd_post, pd_post), Branch.MASS1, vn)


def collide_mass2(params: DumbbellParams, pre: PhysState) -> ImpactResult:
    """Impact of ``m2``: the ``m1`` law with the mass fractions swapped and ``cos`` negated."""
    b1, b2 = params.beta1, params.beta2
    y, phi, yd, pd = pre
    s = math.sin(phi)
    if abs(y - b1 * s) > TOL_GEOM:
        raise NotInContact(f"m2 is {y - b1 * s:.3g} above the floor")
    if abs(s) <= TOL_CORNER:
        raise CornerBranch("both masses touch the floor")
    c = -math.cos(phi)
    vn = (yd + b1 * c * pd) * params.scale / math.sqrt(1.0 + params.amp2 ** 2 * c * c)
    if _classify(vn):
        return ImpactResult(pre, Branch.MASS2, vn)
    d = b2 + b1 * c * c
    yd_post = yd * (-1.0 + 2.0 * b1 * c * c / d) - pd * (2.0 * b1 * b2 * c / d)
    pd_post = pd * (1.0 - 2.0 * b1 * c * c / d) - yd * (2.0 * c / d)
    return ImpactResult(PhysState(y, phi, yd_post, pd_post), Branch.MASS2, vn)


def collide(params: DumbbellParams, pre: PhysState, branch: Branch) -> ImpactResult:
    if branch is Branch.MASS1:
        return collide_mass1(params, pre)
    if branch is Branch.MASS2:
        return collide_mass2(params, pre)
    raise CornerBranch("both masses touch the floor")


def collide_billiard(params: DumbbellParams, b: BilliardState, branch: Branch) -> BilliardState:
    """Specular reflection of the rescaled velocity off the ``branch`` arc."""
    if branch is Branch.CORNER or abs(math.sin(b.phi)) <= TOL_CORNER:
        raise CornerBranch("both masses touch the floor")
    s = math.sin(b.phi)
    arc = -params.amp1 * s if branch is Branch.MASS1 else params.amp2 * s
    if abs(b.Y - arc) > TOL_GEOM * params.scale:
        raise NotInContact(f"state is {b.Y - arc:.3g} off the {branch} arc")
    n = outward_normal(params, b.phi, branch)
    vn = b.Y_dot * n[0] + b.phi_dot * n[1]
    if _classify(vn):
        return b
    Y_dot, phi_dot = reflect((b.Y_dot, b.phi_dot), n)
    return BilliardState(b.Y, b.phi, Y_dot, phi_dot)
