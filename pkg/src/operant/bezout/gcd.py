"""Greatest common divisors with Bezout certificates in k[G_Q].

Two engines:

* sigma a square in k: the ring is a Laurent polynomial ring, gcds come from the
  Euclidean algorithm in w (see :mod:`.laurent`).
* otherwise: indices are scaled by 2D so all of them are even integers, which puts
  every element in the multiplicative subset S of single-parity elements, and the
  three-case division step is iterated until the second entry vanishes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import NamedTuple, Optional, Sequence

from ..coeff import Poly, RatFun, poly_gcd, sqrt_sigma
from ..trigring import (
    TrigElement,
    TrigRing,
    exact_div,
    is_unit,
    mul,
    solve_leading,
)
from .laurent import LaurentPoly, from_laurent, kpoly_divmod, kpoly_mul, kpoly_sub, to_laurent

logger = logging.getLogger(__name__)

Mat2 = tuple  # ((a, b), (c, d)) of TrigElement


class PreconditionError(ValueError):
    pass


# -- 2x2 matrices over the ring --------------------------------------------------------


def mat2(a, b, c, d) -> Mat2:
    return ((a, b), (c, d))


def mat2_mul(x: Mat2, y: Mat2) -> Mat2:
    return (
        (mul(x[0][0], y[0][0]) + mul(x[0][1], y[1][0]), mul(x[0][0], y[0][1]) + mul(x[0][1], y[1][1])),
        (mul(x[1][0], y[0][0]) + mul(x[1][1], y[1][0]), mul(x[1][0], y[0][1]) + mul(x[1][1], y[1][1])),
    )


def mat2_det(x: Mat2) -> TrigElement:
    return mul(x[0][0], x[1][1]) - mul(x[0][1], x[1][0])


def mat2_apply(x: Mat2, p: TrigElement, q: TrigElement) -> tuple[TrigElement, TrigElement]:
    return mul(x[0][0], p) + mul(x[0][1], q), mul(x[1][0], p) + mul(x[1][1], q)


def mat2_map(x: Mat2, fn) -> Mat2:
    return tuple(tuple(fn(e) for e in row) for row in x)


def _identity(ring: TrigRing) -> Mat2:
    return mat2(ring.scalar(1), ring.zero(), ring.zero(), ring.scalar(1))


# -- certificates ----------------------------------------------------------------------


@dataclass(frozen=True)
class BezoutCertificate:
    """``sum(cofactors[i] * generators[i]) == g`` and g divides every generator.

    ``trail`` holds the 2x2 transforms (each with unit determinant) that carried the
    pair of generators to ``(g, 0)``; it is empty for folded multi-generator gcds.
    """

    generators: tuple
    g: TrigElement
    cofactors: tuple
    trail: tuple = ()
    engine: str = ""

    @property
    def cofactor_a(self) -> TrigElement:
        return self.cofactors[0]

    @property
    def cofactor_b(self) -> TrigElement:
        return self.cofactors[1]

    def identity_holds(self) -> bool:
        total = self.g.zero()
        for c, p in zip(self.cofactors, self.generators):
            total = total + mul(c, p)
        return total == self.g

    def quotients(self) -> Optional[list]:
        out = []
        for p in self.generators:
            x = exact_div(p, self.g)
            if x is None:
                return None
            out.append(x)
        return out

    def verify(self) -> bool:
        """Exact re-verification of identity, divisibility and unit trail determinants."""
        if not self.identity_holds():
            return False
        if self.g.is_zero():
            return all(p.is_zero() for p in self.generators)
        if self.quotients() is None:
            return False
        return all(is_unit(mat2_det(t)) for t in self.trail)

    def to_json(self) -> dict:
        return {
            "engine": self.engine,
            "generators": [p.to_json() for p in self.generators],
            "gcd": self.g.to_json(),
            "cofactors": [c.to_json() for c in self.cofactors],
            "trail": [[[e.to_json() for e in row] for row in t] for t in self.trail],
        }

    @classmethod
    def from_json(cls, data: dict) -> "BezoutCertificate":
        return cls(
            generators=tuple(TrigElement.from_json(p) for p in data["generators"]),
            g=TrigElement.from_json(data["gcd"]),
            cofactors=tuple(TrigElement.from_json(c) for c in data["cofactors"]),
            trail=tuple(
                tuple(tuple(TrigElement.from_json(e) for e in row) for row in t) for t in data.get("trail", [])
            ),
            engine=data.get("engine", ""),
        )


def primitive_unit(x: TrigElement) -> RatFun:
    """Scalar u with u*x primitive: polynomial coefficients, no common factor, monic lead."""
    var = x.var
    den = x.denominator_lcm()
    content = Poly.constant(0, var)
    for c in x.coefficients():
        if not c.is_zero():
            content = poly_gcd(content, c.num * (den // c.den))
            if content.degree == 0:
                break
    u = RatFun(den) / RatFun(content)
    c, s = x.leading()
    lead = (c if not c.is_zero() else s) * u
    return u / lead.num.lc


def normalize_unit(g: TrigElement) -> RatFun:
    """Scalar u such that u*g has leading C-coefficient 1 (else leading S-coefficient 1)."""
    c, s = g.leading()
    return c.inverse() if not c.is_zero() else s.inverse()


# -- the multiplicative subset S ---------------------------------------------------------


@dataclass(frozen=True)
class SElement:
    """Element with nonnegative integer indices all congruent to its norm mod 2."""

    elem: TrigElement
    parity: int = field(init=False)

    def __post_init__(self):
        e = self.elem
        if e.is_zero():
            raise PreconditionError("zero is not in S")
        idx = e.indices()
        if any(a.denominator != 1 for a in idx):
            raise PreconditionError("S elements need integer indices")
        n = int(e.norm())
        if any((int(a) - n) % 2 for a in idx):
            raise PreconditionError(f"indices of {e!r} mix parities")
        object.__setattr__(self, "parity", n % 2)

    @property
    def norm(self) -> int:
        return int(self.elem.norm())


class DivisionStep(NamedTuple):
    pbar: TrigElement
    qbar: TrigElement
    transform: Mat2
    case: int


def _order(p: TrigElement, q: TrigElement, t: Mat2) -> tuple:
    """Swap so that norm(first) >= norm(second)."""
    if p.norm() >= q.norm():
        return p, q, t
    return q, p, (t[1], t[0])


def division_step(p: SElement, q: SElement, allow_square: bool = False) -> DivisionStep:
    """One reduction of the pair (p, q) in S with norm(p) >= norm(q) > 0.

    Returns (pbar, qbar, T) with (pbar, qbar)^T = T (p, q)^T, det T a unit, and
    either norm(p) > norm(pbar) >= norm(qbar) or qbar == 0.
    """
    P, Q = p.elem, q.elem
    P._check(Q)
    if not allow_square and sqrt_sigma(P.sigma) is not None:
        raise PreconditionError("the division step needs sigma to be a non-square in k")
    n_p, n_q = p.norm, q.norm
    if not n_p >= n_q > 0:
        raise PreconditionError(f"need norm(p) >= norm(q) > 0, got {n_p}, {n_q}")
    ring = TrigRing(P.sigma, P.ell)
    one, zero = ring.scalar(1), ring.zero()
    sigma = P.sigma.as_ratfun()
    ap, bp = P.leading()
    aq, bq = Q.leading()

    if n_p > n_q:
        return _case1(P, Q, ring, sigma, mat2(one, zero, zero, one), case=1)

    # equal norms: proportional leading pairs?
    c = None
    if not ap.is_zero():
        c = aq / ap
    elif not bp.is_zero():
        c = bq / bp
    if c is not None and aq == c * ap and bq == c * bp:
        qbar = Q - P.scale(c)
        t = mat2(one, zero, ring.scalar(-c), one)
        if qbar.is_zero():
            return DivisionStep(P, qbar, t, 2)
        if qbar.norm() == 0:
            # a nonzero scalar generates the unit ideal
            u = exact_div(P, qbar)
            t2 = mat2(zero, one, one, -u)
            return DivisionStep(qbar, zero, mat2_mul(t2, t), 2)
        return _case1(P, qbar, ring, sigma, t, case=2)

    # case 3: (p, q)^T = A1 (pt, qt)^T and (pt, qt)^T = A2 (pbar, qbar)^T
    det1 = ap * bq - bp * aq
    if det1.is_zero():
        raise PreconditionError("singular leading block; sigma is a square for these coefficients")
    a1_inv = mat2(
        ring.scalar(bq / det1), ring.scalar(-bp / det1), ring.scalar(-aq / det1), ring.scalar(ap / det1)
    )
    c1, s1 = ring.C(1), ring.S(1)
    a2_inv = mat2(c1, s1.scale(-sigma), -s1, c1)
    t = mat2_mul(a2_inv, a1_inv)
    pbar, qbar = mat2_apply(t, P, Q)
    pbar, qbar, t = _order(pbar, qbar, t)
    return DivisionStep(pbar, qbar, t, 3)


def _case1(P, Q, ring, sigma, t_prev, case):
    """p = h q - r with norm(r) < norm(p); h = a C_delta + b S_delta."""
    delta = P.norm() - Q.norm()
    ap, bp = P.leading()
    aq, bq = Q.leading()
    sol = solve_leading(ap, bp, aq, bq, delta, Q.norm(), sigma)
    if sol is None:
        raise PreconditionError("leading coefficients admit no quotient term")
    ah, bh = sol
    h = ring.C(delta, ah) + ring.S(delta, bh)
    r = mul(h, Q) - P
    if not r.is_zero() and r.norm() >= P.norm():
        raise ArithmeticError("division step failed to lower the norm")
    one, zero = ring.scalar(1), ring.zero()
    # (q, r)^T = [[0, 1], [-1, h]] (p, q)^T
    t = mat2(zero, one, -one, h)
    pbar, qbar, t = _order(Q, r, t)
    return DivisionStep(pbar, qbar, mat2_mul(t, t_prev), case)


# -- Laurent engine -------------------------------------------------------------------------


def laurent_gcd(P: LaurentPoly, Q: LaurentPoly, lam: RatFun, ring: TrigRing, scale: int = 1) -> BezoutCertificate:
    """Extended Euclid in k[w, 1/w] after shifting both inputs to polynomials in w."""
    if P.is_zero() and Q.is_zero():
        raise PreconditionError("gcd of two zeros")
    var = ring.var
    one_k, zero_k = RatFun.one(var), RatFun.zero(var)
    back = lambda L: from_laurent(L, lam, ring, scale)  # noqa: E731
    lp = LaurentPoly({0: one_k}, var)

    def mono(k):
        return LaurentPoly({k: one_k}, var)

    trail = []
    # unit shifts: w^-low
    sp = mono(-P.low) if not P.is_zero() else lp
    sq = mono(-Q.low) if not Q.is_zero() else lp
    a = P.to_dense() if not P.is_zero() else []
    b = Q.to_dense() if not Q.is_zero() else []
    zero_l = LaurentPoly({}, var)
    trail.append((sp, zero_l, zero_l, sq))
    # cofactor rows in the dense polynomial ring
    ua, va = [one_k], []
    ub, vb = [], [one_k]
    while b:
        quo, rem = kpoly_divmod(a, b)
        trail.append((zero_l, lp, lp, -LaurentPoly.from_dense(quo, var)))
        a, b = b, rem
        ua, ub = ub, kpoly_sub(ua, kpoly_mul(quo, ub))
        va, vb = vb, kpoly_sub(va, kpoly_mul(quo, vb))
    inv = a[-1].inverse()
    a = [c * inv for c in a]
    ua = [c * inv for c in ua]
    va = [c * inv for c in va]
    trail.append((LaurentPoly({0: inv}, var), zero_l, zero_l, lp))

    G = LaurentPoly.from_dense(a, var)
    cof_a = LaurentPoly.from_dense(ua, var) * sp if ua else zero_l
    cof_b = LaurentPoly.from_dense(va, var) * sq if va else zero_l
    gens = (back(P), back(Q))
    mats = tuple(mat2(*(back(e) for e in t)) for t in trail)
    return BezoutCertificate(gens, back(G), (back(cof_a), back(cof_b)), mats, engine="laurent")


# -- pair and ideal gcds ---------------------------------------------------------------------


def gcd_pair(p: TrigElement, q: TrigElement, engine: Optional[str] = None) -> BezoutCertificate:
    """Normalized gcd g of p and q with cofactors a, b such that a p + b q = g.

    ``engine`` forces "laurent" or "division"; by default the square-root status of
    sigma picks one. Forcing "division" on a square sigma can raise PreconditionError
    when a leading block is singular.
    """
    p._check(q)
    if p.is_zero() and q.is_zero():
        raise PreconditionError("gcd of two zeros is undefined")
    lam = sqrt_sigma(p.sigma)
    ring = TrigRing(p.sigma, p.ell)
    if engine not in (None, "laurent", "division"):
        raise ValueError(f"unknown gcd engine {engine!r}")
    if engine == "laurent" and lam is None:
        raise PreconditionError("the Laurent engine needs a square root of sigma in k")
    if lam is not None and engine != "division":
        scale = lcm(p.index_denominator(), q.index_denominator())
        cert = laurent_gcd(to_laurent(p, lam, scale), to_laurent(q, lam, scale), lam, ring, scale)
        return BezoutCertificate((p, q), cert.g, cert.cofactors, cert.trail, cert.engine)
    return _gcd_irreducible(p, q, ring, allow_square=lam is not None)


def _gcd_irreducible(p: TrigElement, q: TrigElement, ring: TrigRing, allow_square: bool = False) -> BezoutCertificate:
    f = 2 * lcm(p.index_denominator(), q.index_denominator())
    P, Q = p.rescale(f), q.rescale(f)
    one, zero = ring.scalar(1), ring.zero()
    trail = []
    if P.norm() < Q.norm():
        P, Q = Q, P
        trail.append(mat2(zero, one, one, zero))
    steps = 0
    while not Q.is_zero():
        if Q.norm() == 0:
            u = exact_div(P, Q)
            trail.append(mat2(zero, one, one, -u))
            P, Q = Q, zero
            break
        step = division_step(SElement(P), SElement(Q), allow_square)
        P, Q = step.pbar, step.qbar
        # rescaling by k-scalars keeps coefficient growth in check; it is a unit step
        up = primitive_unit(P)
        uq = primitive_unit(Q) if not Q.is_zero() else RatFun.one(P.var)
        P, Q = P.scale(up), Q.scale(uq)
        trail.append(mat2_mul(mat2(ring.scalar(up), zero, zero, ring.scalar(uq)), step.transform))
        steps += 1
    u = normalize_unit(P)
    trail.append(mat2(ring.scalar(u), zero, zero, one))
    g = P.scale(u)
    total = _identity(ring)
    for t in trail:
        total = mat2_mul(t, total)
    logger.debug("irreducible gcd: %d division steps, scale %d", steps, f)
    inv = Fraction(1, f)
    back = lambda e: e.rescale(inv)  # noqa: E731
    return BezoutCertificate(
        (p, q),
        back(g),
        (back(total[0][0]), back(total[0][1])),
        tuple(mat2_map(t, back) for t in trail),
        engine="division",
    )


def ideal_gcd(gens: Sequence[TrigElement]) -> BezoutCertificate:
    """Principal generator of a finitely generated ideal, folding gcd_pair from the left."""
    gens = list(gens)
    if not gens:
        raise PreconditionError("empty generator list")
    if all(g.is_zero() for g in gens):
        raise PreconditionError("all generators are zero")
    first = gens[0]
    if len(gens) == 1:
        c = gcd_pair(first, first.zero())
        return BezoutCertificate((first,), c.g, (c.cofactor_a,), engine=c.engine)
    g = first
    cofs = [first.scalar(1)] + [first.zero() for _ in gens[1:]]
    engine = ""
    for i, r in enumerate(gens[1:], start=1):
        if g.is_zero() and r.is_zero():
            continue
        c = gcd_pair(g, r)
        engine = c.engine
        cofs = [mul(c.cofactor_a, x) for x in cofs]
        cofs[i] = cofs[i] + c.cofactor_b
        g = c.g
    return BezoutCertificate(tuple(gens), g, tuple(cofs), engine=engine)
