import math

import pytest
from hypothesis import settings, strategies as st

from dumbbell.geometry import Branch
from dumbbell.model import DumbbellParams, PhysState

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

masses = st.floats(min_value=1e-2, max_value=1e2, allow_nan=False)
params_st = st.builds(DumbbellParams, masses, masses)
velocity = st.floats(min_value=-10, max_value=10, allow_nan=False)
# angles kept clear of the corners at 0 and pi
off_corner = st.floats(min_value=1e-3, max_value=math.pi - 1e-3)


def contact_state(params, branch, phi, y_dot, phi_dot):
    """State with ``branch``'s mass on the floor at angle ``phi``."""
    s = math.sin(phi)
    y = -params.beta2 * s if branch is Branch.MASS1 else params.beta1 * s
    return PhysState(y, phi, y_dot, phi_dot)


def incoming(params, branch, phi, y_dot, phi_dot):
    """Flip the velocity, if needed, so the contact point moves into the floor."""
    c = math.cos(phi)
    vn = y_dot + (params.beta2 * c if branch is Branch.MASS1 else -params.beta1 * c) * phi_dot
    if vn > 0:
        y_dot, phi_dot = -y_dot, -phi_dot
    return contact_state(params, branch, phi, y_dot, phi_dot)


@st.composite
def contacts(draw, branch=None):
    """(params, branch, pre-impact contact state) with the contact point moving down."""
    params = draw(params_st)
    if branch is None:
        branch = draw(st.sampled_from([Branch.MASS1, Branch.MASS2]))
    u = draw(off_corner)
    # mass 1 touches where sin(phi) < 0, mass 2 where sin(phi) > 0
    phi = u + math.pi if branch is Branch.MASS1 else u
    phi += 2 * math.pi * draw(st.integers(-3, 3))
    yd, pd = draw(velocity), draw(velocity)
    return params, branch, incoming(params, branch, phi, yd, pd)


@pytest.fixture
def equal():
    return DumbbellParams(1.0, 1.0)
