import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from operant.coeff import Poly, SigmaSpec
from operant.modalg import decompose
from operant.network import (
    NetworkSpec,
    NetworkValidationError,
    assemble_presentation,
    companion,
    coupled_pair_spec,
    phi,
    pinned_string_spec,
    psi,
    reduce_example,
    validate,
)
from operant.trigring import TrigRing, are_associates, is_unit

ROOT = Path(__file__).resolve().parents[1]
FROZEN = json.loads((ROOT / "tests" / "oracles" / "frozen.json").read_text())
SIG = SigmaSpec.polynomial(0, 1, 0)
RING = TrigRing(SIG)
displacements = st.fractions(min_value=-2, max_value=2, max_denominator=4)


def test_spec_files_match_builders():
    for name, spec in (("coupled_pair", coupled_pair_spec()), ("pinned_string", pinned_string_spec())):
        loaded = NetworkSpec.from_json(json.loads((ROOT / "specs" / f"{name}.json").read_text()))
        assert loaded.to_json() == spec.to_json()


def test_json_round_trip():
    spec = coupled_pair_spec()
    assert NetworkSpec.from_json(json.loads(json.dumps(spec.to_json()))).to_json() == spec.to_json()


def test_sigma_zero_rejected():
    with pytest.raises(NetworkValidationError) as err:
        NetworkSpec.from_json(json.loads((ROOT / "specs" / "sigma_zero.json").read_text()))
    assert any("nonzero" in e for e in err.value.errors)


def test_integral_terms_rejected():
    data = coupled_pair_spec().to_json()
    data["integral_terms"] = []
    with pytest.raises(NetworkValidationError):
        NetworkSpec.from_json(data)


def test_bad_companion_rejected():
    data = coupled_pair_spec().to_json()
    data["branches"][0]["A"][1][0] = {"var": "s", "coeffs": ["2"]}
    with pytest.raises(NetworkValidationError) as err:
        validate(NetworkSpec.from_json(data))
    assert any("det(A)" in e for e in err.value.errors)


@settings(max_examples=100, deadline=None)
@given(displacements, displacements)
def test_phi_semigroup(x, y):
    A = companion(SIG)
    assert phi(A, x, RING) @ phi(A, y, RING) == phi(A, x + y, RING)


def test_integral_elimination_entry():
    A = companion(SIG)
    B = [[Poly.constant(0)], [Poly.constant(1)]]
    Psi = psi(A, B, 1, RING)
    s = RING.poly([0, 1])
    assert Psi[0, 0] == (RING.C(1) - RING.scalar(1)).scale(s.inverse())
    assert Psi[1, 0] == RING.S(1)


@pytest.mark.parametrize("row", FROZEN["phi_psi"], ids=lambda r: f"{r['sigma']}-{r['s']}-{r['dx']}")
def test_phi_psi_match_matrix_exponential(row):
    spec = SigmaSpec.polynomial(*row["sigma"])
    ring = TrigRing(spec)
    A = companion(spec)
    B = [[Poly.constant(0)], [Poly.constant(1)]]
    z = complex(*row["s"])
    dx = Fraction(row["dx"]).limit_denominator(8)
    want_phi = np.array([[complex(*v) for v in r] for r in row["phi"]])
    want_psi = np.array([[complex(*v) for v in r] for r in row["psi"]])
    assert np.allclose(phi(A, dx, ring).evaluate(z), want_phi, atol=1e-10)
    assert np.allclose(psi(A, B, dx, ring).evaluate(z), want_psi, atol=1e-10)


@pytest.mark.parametrize("xi", ["left", "right"])
def test_column_count(xi):
    for spec in (coupled_pair_spec(), pinned_string_spec()):
        pres = assemble_presentation(spec, xi)
        assert pres.P.shape[1] == 2 * len(spec.branches) + spec.inputs


def test_coupled_pair_reduces_to_p1_minus_p2():
    red = reduce_example(assemble_presentation(coupled_pair_spec(), "right"))
    p1 = RING.C(1, 2) + RING.S(1)
    p2 = RING.C(2, 5) + RING.S(2, 3)
    assert red.P.shape == (1, 2)
    assert red.P[0, 0] == p1 and red.P[0, 1] == -p2
    assert is_unit(red.col_det)


def test_reduction_transforms_are_inverse():
    pres = assemble_presentation(coupled_pair_spec(), "right")
    red = reduce_example(pres)
    # each kept generator expressed in the originals and back
    assert (red.from_original @ red.to_original).is_identity()


@pytest.mark.parametrize("builder", [coupled_pair_spec, pinned_string_spec])
def test_torsion_invariants_independent_of_xi(builder):
    invs = []
    for xi in ("left", "right"):
        dec = decompose(reduce_example(assemble_presentation(builder(), xi)).P)
        invs.append(dec.torsion_invariants)
    assert len(invs[0]) == len(invs[1])
    assert all(are_associates(a, b) for a, b in zip(*invs))
