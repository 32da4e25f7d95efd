import cmath

import pytest
from hypothesis import HealthCheck, assume, given, settings

from operant import TrigRing
from operant.bezout import DegenerateRootError, LiftError, bezout_lift, coprime_step, gcd_pair
from operant.trigring import is_unit, laplace_eval
from strategies import SIGMA_S, elements

R = TrigRing(SIGMA_S)
s = R.poly([0, 1])


def coupled_pair():
    return R.C(1, 2) + R.S(1), R.C(2, 5) + R.S(2, 3)


def test_coupled_pair_lift():
    p1, p2 = coupled_pair()
    cert = bezout_lift(p1, p2)
    assert cert.coprime
    assert cert.h.degree == 1
    assert abs(cert.roots[0] - 7 / 20) < 1e-12
    report = cert.check(samples=20, seed=3)
    assert report["passed"], report
    assert report["identity_residual"] < 1e-8


def test_lifted_values_are_entire_at_the_removed_root():
    p1, p2 = coupled_pair()
    cert = bezout_lift(p1, p2)
    root = cert.roots[0]
    for eps in (1e-3, 1e-4j, -1e-5):
        z = root + eps
        lhs = cert.lifted_a(z) * laplace_eval(p1, z) + cert.lifted_b(z) * laplace_eval(p2, z)
        assert abs(lhs - 1) < 1e-8


def test_coprime_step_degenerate_root():
    # both vanish at the zeros of S_1, e.g. sigma = -pi^2
    p, q = R.S(1), R.S(1, 2)
    with pytest.raises(DegenerateRootError):
        coprime_step(R.scalar(1), R.zero(), p, q, -cmath.pi**2)


def test_lift_rejects_rational_coefficients():
    with pytest.raises(LiftError):
        bezout_lift(R.C(1, s.inverse()), R.S(1))
    with pytest.raises(LiftError):
        bezout_lift(R.zero(), R.S(1))


def test_non_coprime_pair_keeps_gcd():
    p, q = R.S(1) * R.C(1), R.S(1) * (R.C(2) + R.scalar(3))
    cert = bezout_lift(p, q)
    assert not cert.coprime
    assert cert.check(samples=10, seed=1)["identity_residual"] < 1e-8


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.filter_too_much, HealthCheck.too_slow])
@given(elements(SIGMA_S, poly=True, nonzero=True), elements(SIGMA_S, poly=True, nonzero=True))
def test_random_lift_identity(p, q):
    assume(not p.is_scalar() and not q.is_scalar())
    assume(is_unit(gcd_pair(p, q).g))
    try:
        cert = bezout_lift(p, q)
    except DegenerateRootError:
        assume(False)
    report = cert.check(samples=10, seed=0)
    assert report["passed"], report
