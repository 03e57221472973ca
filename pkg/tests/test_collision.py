import math

import pytest
from hypothesis import assume, given

from dumbbell.collision import collide, collide_billiard, collide_mass1, collide_mass2, reflect
from dumbbell.errors import CornerBranch, NotInContact, OutgoingState, ZeroNormal
from dumbbell.geometry import Branch
from dumbbell.model import DumbbellParams, PhysState, from_billiard, kinetic_energy, to_billiard

from .conftest import contacts


@pytest.mark.parametrize("v,n,expected", [
    ((1, 0), (1, 0), (-1, 0)),
    ((0, 1), (1, 0), (0, 1)),
    ((1, 1), (1, 0), (-1, 1)),
    ((1, 1), (2, 0), (-1, 1)),
])
def test_reflect(v, n, expected):
    assert reflect(v, n) == pytest.approx(expected, abs=1e-15)


def test_reflect_zero_normal():
    with pytest.raises(ZeroNormal):
        reflect((1, 0), (0, 0))


def test_vertical_impacts(equal):
    r = collide_mass1(equal, PhysState(0.5, 3 * math.pi / 2, -1.0, 5.0))
    assert r.post.y_dot == pytest.approx(1.0, abs=1e-15)
    assert r.post.phi_dot == pytest.approx(5.0, abs=1e-14)
    assert r.mass_hit is Branch.MASS1 and r.normal_speed_pre < 0
    r = collide_mass2(equal, PhysState(0.5, math.pi / 2, -1.0, 5.0))
    assert r.post.y_dot == pytest.approx(1.0, abs=1e-15)
    assert r.post.phi_dot == pytest.approx(5.0, abs=1e-14)


def test_oblique_impact(equal):
    phi = 7 * math.pi / 4
    r = collide_mass1(equal, PhysState(0.5 * math.sqrt(2) / 2, phi, -1.0, 0.0))
    assert r.post.y_dot == pytest.approx(1 / 3, rel=1e-14)
    assert r.post.phi_dot == pytest.approx(4 * math.sqrt(2) / 3, rel=1e-14)


def test_billiard_vertical_normal(equal):
    b = to_billiard(equal, PhysState(0.5, 3 * math.pi / 2, -1.0, 0.7))
    out = collide_billiard(equal, b, Branch.MASS1)
    assert out.Y_dot == pytest.approx(-b.Y_dot, abs=1e-15)
    assert out.phi_dot == pytest.approx(0.7, abs=1e-15)


def test_errors(equal):
    with pytest.raises(NotInContact):
        collide_mass1(equal, PhysState(1.0, 3 * math.pi / 2, -1, 0))
    with pytest.raises(OutgoingState):
        collide_mass1(equal, PhysState(0.5, 3 * math.pi / 2, 1, 0))
    with pytest.raises(CornerBranch):
        collide_mass1(equal, PhysState(0.0, 0.0, -1, 0))
    with pytest.raises(CornerBranch):
        collide(equal, PhysState(0.0, 0.0, -1, 0), Branch.CORNER)
    with pytest.raises(CornerBranch):
        collide_billiard(equal, to_billiard(equal, PhysState(0.0, math.pi, -1, 0)), Branch.MASS2)


def test_tangential_passes_through(equal):
    # contact point velocity y_dot + beta2*cos(phi)*phi_dot vanishes
    phi = 7 * math.pi / 4
    s = PhysState(0.5 * math.sqrt(2) / 2, phi, -0.5 * math.cos(phi), 1.0)
    assert collide_mass1(equal, s).post == s


@given(contacts())
def test_energy_conserved(case):
    p, branch, pre = case
    post = collide(p, pre, branch).post
    assert post.y == pre.y and post.phi == pre.phi
    e0 = kinetic_energy(p, pre)
    assert kinetic_energy(p, post) == pytest.approx(e0, rel=1e-12, abs=1e-300)


@given(contacts())
def test_billiard_speed_preserved(case):
    p, branch, pre = case
    b = to_billiard(p, pre)
    out = collide_billiard(p, b, branch)
    assert math.hypot(out.Y_dot, out.phi_dot) == pytest.approx(math.hypot(b.Y_dot, b.phi_dot), rel=1e-14)


@given(contacts())
def test_representations_agree(case):
    p, branch, pre = case
    post = collide(p, pre, branch).post
    via = from_billiard(p, collide_billiard(p, to_billiard(p, pre), branch))
    scale = max(1.0, abs(pre.y_dot), abs(pre.phi_dot))
    assert via.y_dot == pytest.approx(post.y_dot, abs=1e-10 * scale)
    assert via.phi_dot == pytest.approx(post.phi_dot, abs=1e-10 * scale)


@given(contacts())
def test_involution(case):
    p, branch, pre = case
    post = collide(p, pre, branch).post
    # undo: flip the outgoing velocity, apply the law, flip back
    again = collide(p, post.reversed(), branch).post.reversed()
    scale = max(1.0, abs(pre.y_dot), abs(pre.phi_dot))
    assert again.y_dot == pytest.approx(pre.y_dot, abs=1e-12 * scale)
    assert again.phi_dot == pytest.approx(pre.phi_dot, abs=1e-12 * scale)


@given(contacts())
def test_normal_velocity_reverses(case):
    p, branch, pre = case
    r = collide(p, pre, branch)
    assume(r.normal_speed_pre < -1e-9)
    c = math.cos(pre.phi)
    def contact_speed(s):
        return s.y_dot + (p.beta2 * c if branch is Branch.MASS1 else -p.beta1 * c) * s.phi_dot
    assert contact_speed(r.post) == pytest.approx(-contact_speed(pre), rel=1e-9, abs=1e-12)


def test_swapped_masses_mirror():
    p = DumbbellParams(0.3, 1.7)
    phi = 4.2
    pre = PhysState(-p.beta2 * math.sin(phi), phi, -0.8, 0.4)
    mirror = PhysState(pre.y, phi - math.pi, pre.y_dot, pre.phi_dot)
    a = collide_mass1(p, pre).post
    b = collide_mass2(p.swapped(), mirror).post
    assert (b.y_dot, b.phi_dot) == pytest.approx((a.y_dot, a.phi_dot), rel=1e-13)
