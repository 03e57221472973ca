"""The floor seen from the billiard plane.

In ``(Y, phi)`` coordinates the floor becomes the curve

    B(phi) = max(-sqrt(beta2/beta1) sin(phi), sqrt(beta1/beta2) sin(phi))

The first term is the contact locus of ``m1`` (active where ``sin(phi) < 0``),
the second that of ``m2``.  The two arcs meet in corners at ``phi = 0, pi``.
"""
from __future__ import annotations

import enum
import math

from .errors import CornerBranch, StationaryState
from .model import BilliardState, DumbbellParams

#: ``|sin(phi)|`` below this counts as a corner contact
TOL_CORNER = 1e-9


class Branch(str, enum.Enum):
    MASS1 = "Mass1"
    MASS2 = "Mass2"
    CORNER = "Corner"

    def __str__(self):
        return self.value


def branch_at(phi: float) -> Branch:
    s = math.sin(phi)
    if abs(s) <= TOL_CORNER:
        return Branch.CORNER
    return Branch.MASS1 if s < 0 else Branch.MASS2


def boundary(params: DumbbellParams, phi: float) -> tuple[float, Branch]:
    """Return ``(B(phi), active branch)``."""
    s = math.sin(phi)
    height = max(-params.amp1 * s, params.amp2 * s)
    return height, branch_at(phi)


def outward_normal(params: DumbbellParams, phi: float, branch: Branch) -> tuple[float, float]:
    """Unit normal of the active arc at ``phi``, pointing into the admissible side."""
    c = math.cos(phi)
    if branch is Branch.MASS1:
        n = (1.0, params.amp1 * c)
    elif branch is Branch.MASS2:
        n = (1.0, -params.amp2 * c)
    else:
        raise CornerBranch(f"no normal at the corner phi={phi!r}")
    norm = math.hypot(*n)
    return n[0] / norm, n[1] / norm


def branch_tangent(params: DumbbellParams, phi: float, branch: Branch) -> tuple[float, float]:
    """Derivative of ``phi -> (B_branch(phi), phi)``."""
    c = math.cos(phi)
    if branch is Branch.MASS1:
        return -params.amp1 * c, 1.0
    if branch is Branch.MASS2:
        return params.amp2 * c, 1.0
    raise CornerBranch(f"no tangent at the corner phi={phi!r}")


def horizon(height: float, velocity: float, omega: float, top: float) -> float | None:
    """Escape test on one axis; shared by the billiard and physical searches.

    ``top`` is the largest boundary height in the same units as ``height``.
    """
    if velocity < 0:
        # the boundary is nonnegative, so the line must meet it before height -1
        return (height + 1.0) / -velocity
    if height > top:
        return None
    if velocity > 0:
        return (top - height) / velocity
    if omega == 0:
        raise StationaryState("no motion below the top of the boundary")
    return 2.0 * math.pi / abs(omega)


def escape_horizon(params: DumbbellParams, b: BilliardState) -> float | None:
    """``None`` when no future collision is possible, otherwise a time that bounds it."""
    return horizon(b.Y, b.Y_dot, b.phi_dot, params.boundary_max)
