"""Event-driven simulation of a two-mass dumbbell bouncing on a flat floor."""

__version__ = "0.1.0"

from .analysis import (
    AdiabaticTrace,
    WedgeSpec,
    adiabatic_invariant,
    approx_bounce_map,
    collision_bound,
    invariant_drift_per_bounce,
    unfolding_count,
    wedge_oracle,
)
from .collision import collide_billiard, collide_mass1, collide_mass2, reflect
from .geometry import Branch, boundary, escape_horizon, outward_normal
from .model import (
    BilliardState,
    DumbbellParams,
    PhysState,
    from_billiard,
    kinetic_energy,
    to_billiard,
)
from .simulate import (
    BounceEvent,
    Limits,
    ScatterOutcome,
    Termination,
    flight,
    next_collision,
    scatter,
)
