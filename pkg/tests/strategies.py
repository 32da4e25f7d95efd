"""Hypothesis strategies for ring elements."""

from fractions import Fraction

from hypothesis import strategies as st

from operant import RatFun, SigmaSpec, TrigRing

INDICES = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2))

SIGMA_IRREDUCIBLE = SigmaSpec.indeterminate()
SIGMA_S = SigmaSpec.polynomial(0, 1, 0)
SIGMA_WAVE = SigmaSpec.polynomial(1, 0, 0)
SIGMA_DAMPED_WAVE = SigmaSpec.polynomial(1, 2, 1)
SIGMA_CONST = SigmaSpec.polynomial(0, 0, 4)

small_ints = st.integers(min_value=-3, max_value=3)


@st.composite
def coefficients(draw, var, poly=False):
    """Small rational functions: constants, linear polynomials, or one simple pole."""
    kind = draw(st.sampled_from(("const", "const", "linear") + (() if poly else ("pole",))))
    c0 = draw(small_ints)
    if kind == "const":
        return RatFun.constant(c0, var)
    c1 = draw(small_ints)
    from operant import Poly

    num = Poly([c0, c1], var)
    if kind == "linear":
        return RatFun(num)
    return RatFun(num, Poly([draw(st.integers(1, 3)), 1], var))


@st.composite
def elements(draw, sigma=SIGMA_IRREDUCIBLE, indices=INDICES, max_terms=3, poly=False, nonzero=False):
    ring = TrigRing(sigma)
    n = draw(st.integers(min_value=1 if nonzero else 0, max_value=max_terms))
    out = ring.zero()
    for _ in range(n):
        a = draw(st.sampled_from(indices))
        kind = draw(st.sampled_from("CS"))
        out = out + ring.make_term(kind, a, draw(coefficients(sigma.var, poly)))
    if nonzero and out.is_zero():
        out = ring.scalar(1)
    return out


@st.composite
def s_elements(draw, sigma=SIGMA_IRREDUCIBLE, max_norm=4):
    """Elements with integer indices of one parity."""
    ring = TrigRing(sigma)
    n = draw(st.integers(1, max_norm))
    idx = [i for i in range(n, -1, -2)]
    out = ring.make_term(draw(st.sampled_from("CS")), n, draw(st.integers(1, 3)))
    for i in idx[1:]:
        for kind in "CS":
            c = draw(small_ints)
            if c:
                out = out + ring.make_term(kind, i, c)
    return out
