import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import assume, given, settings, strategies as st

from operant import TrigElement, TrigRing, exact_div, is_unit, mul
from operant.coeff import PoleError, RatFun, SigmaSpec
from operant.trigring import BOTTOM, TagMismatch, laplace_eval, make_term, norm
from strategies import SIGMA_DAMPED_WAVE, SIGMA_IRREDUCIBLE, SIGMA_S, SIGMA_WAVE, elements

FROZEN = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())
SIGMAS = [SIGMA_IRREDUCIBLE, SIGMA_S, SIGMA_WAVE, SIGMA_DAMPED_WAVE]
rationals = st.fractions(min_value=-3, max_value=3, max_denominator=6)


def test_normal_form_folds_negative_indices():
    R = TrigRing()
    assert R.C(-1) == R.C(1)
    assert R.S(-Fraction(1, 2)) == -R.S(Fraction(1, 2))
    assert R.S(0).is_zero()
    assert R.C(0) == R.scalar(1)


def test_norm_of_zero_is_bottom():
    R = TrigRing()
    assert norm(R.zero()) is BOTTOM
    assert BOTTOM < 0
    assert norm(R.C(Fraction(3, 2)) + R.S(1)) == Fraction(3, 2)


def test_tags_must_agree():
    with pytest.raises(TagMismatch):
        TrigRing(SIGMA_IRREDUCIBLE).C(1) + TrigRing(SIGMA_S).C(1)
    with pytest.raises(TagMismatch):
        TrigRing(SIGMA_S, ell=1).C(1) + TrigRing(SIGMA_S, ell=2).C(1)


def test_json_round_trip():
    R = TrigRing(SIGMA_DAMPED_WAVE)
    p = R.C(Fraction(1, 2), RatFun.constant(3, "s")) + R.S(2, R.poly([1, 1]))
    assert TrigElement.from_json(json.loads(json.dumps(p.to_json()))) == p


def test_units():
    R = TrigRing(SIGMA_IRREDUCIBLE)
    assert is_unit(R.scalar(5)) and not is_unit(R.C(1))
    W = TrigRing(SIGMA_WAVE)
    lam = W.poly([0, 1])
    assert is_unit(W.C(1) + W.S(1, lam))
    assert not is_unit(W.C(1) + W.scalar(1))


@pytest.mark.parametrize("case", range(len(FROZEN["products"])))
def test_products_match_oracle(case):
    row = FROZEN["products"][case]
    p, q, expected = (TrigElement.from_json(row[k]) for k in ("p", "q", "product"))
    assert mul(p, q) == expected


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(SIGMAS).flatmap(lambda s: st.tuples(elements(s), elements(s), elements(s))))
def test_ring_axioms(triple):
    x, y, z = triple
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + (-x) == x.zero()


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(SIGMAS), rationals)
def test_pythagorean_identity(sigma, a):
    R = TrigRing(sigma)
    lhs = R.C(a) * R.C(a) - (R.S(a) * R.S(a)).scale(sigma.as_ratfun())
    assert lhs == R.scalar(1)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(SIGMAS), rationals, rationals)
def test_addition_formula(sigma, a, b):
    R = TrigRing(sigma)
    assert R.C(a) * R.C(b) + (R.S(a) * R.S(b)).scale(sigma.as_ratfun()) == R.C(a + b)
    assert R.S(a) * R.C(b) + R.C(a) * R.S(b) == R.S(a + b)


@settings(max_examples=150, deadline=None)
@given(elements(SIGMA_IRREDUCIBLE, nonzero=True), elements(SIGMA_IRREDUCIBLE, nonzero=True))
def test_norm_additive_irreducible(p, q):
    assert norm(p * q) == norm(p) + norm(q)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(SIGMAS).flatmap(lambda s: st.tuples(elements(s, nonzero=True), elements(s))))
def test_exact_div_inverts_mul(pair):
    d, x = pair
    assert exact_div(d * x, d) == x


@settings(max_examples=100, deadline=None)
@given(
    st.sampled_from([SIGMA_S, SIGMA_WAVE, SIGMA_DAMPED_WAVE]).flatmap(lambda s: st.tuples(elements(s), elements(s))),
    st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
)
def test_laplace_eval_is_homomorphism(pair, z):
    p, q = pair
    try:
        vp, vq, vpq, vs = laplace_eval(p, z), laplace_eval(q, z), laplace_eval(p * q, z), laplace_eval(p + q, z)
    except PoleError:
        assume(False)
    scale = max(1.0, abs(vp) * abs(vq), abs(vp) + abs(vq))
    assert abs(vpq - vp * vq) <= 1e-10 * scale
    assert abs(vs - (vp + vq)) <= 1e-10 * scale


def test_make_term_rejects_bad_kind():
    with pytest.raises(ValueError):
        make_term("X", 1)
