"""Laurent-polynomial model of the ring when sigma = lambda^2 has a root in k.

With w = z^(1/D) and integer exponents e = D*alpha the map

    C_alpha -> (w^-e + w^e) / 2,    S_alpha -> (w^-e - w^e) / (2 lambda)

is a ring isomorphism onto k[w, 1/w] (inverse: w^-e -> C + lambda S, w^e -> C - lambda S).
The halving keeps C_1^2 - sigma S_1^2 -> 1.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Optional

from ..coeff import CoeffError, RatFun
from ..trigring import TagMismatch, TrigElement, TrigRing


class LaurentPoly:
    """Sparse Laurent polynomial {exponent: coefficient in k} in w."""

    __slots__ = ("terms", "var")

    def __init__(self, terms: dict, var: str):
        self.var = var
        self.terms = {e: c for e, c in terms.items() if not c.is_zero()}

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def low(self) -> int:
        return min(self.terms)

    @property
    def high(self) -> int:
        return max(self.terms)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return LaurentPoly(out, self.var)

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self.terms.items()}, self.var)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, RatFun):
            return LaurentPoly({e: c * other for e, c in self.terms.items()}, self.var)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                out[e] = out[e] + c1 * c2 if e in out else c1 * c2
        return LaurentPoly(out, self.var)

    def shift(self, k: int) -> "LaurentPoly":
        return LaurentPoly({e + k: c for e, c in self.terms.items()}, self.var)

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c!r})*w^{e}" for e, c in sorted(self.terms.items()))

    # dense polynomial view ------------------------------------------------------------
    def to_dense(self) -> list:
        """Coefficients of w^-low * self, ascending, nonzero constant term."""
        lo, hi = self.low, self.high
        zero = RatFun.zero(self.var)
        return [self.terms.get(e, zero) for e in range(lo, hi + 1)]

    @classmethod
    def from_dense(cls, coeffs: list, var: str, shift: int = 0) -> "LaurentPoly":
        return cls({i + shift: c for i, c in enumerate(coeffs)}, var)


# -- dense polynomials over k (lists of RatFun, ascending) ---------------------------------


def _kstrip(a: list) -> list:
    a = list(a)
    while a and a[-1].is_zero():
        a.pop()
    return a


def kpoly_divmod(a: list, b: list) -> tuple[list, list]:
    b = _kstrip(b)
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    rem = _kstrip(a)
    db = len(b) - 1
    if len(rem) - 1 < db:
        return [], rem
    inv = b[-1].inverse()
    quot = [None] * (len(rem) - db)
    for k in range(len(rem) - 1 - db, -1, -1):
        f = rem[k + db] * inv
        quot[k] = f
        if not f.is_zero():
            for j in range(db + 1):
                rem[k + j] = rem[k + j] - f * b[j]
    return _kstrip(quot), _kstrip(rem[:db])


def kpoly_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    var = a[0].var
    out = [RatFun.zero(var) for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _kstrip(out)


def kpoly_sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    if n == 0:
        return []
    var = (a or b)[0].var
    z = RatFun.zero(var)
    return _kstrip([(a[i] if i < len(a) else z) - (b[i] if i < len(b) else z) for i in range(n)])


# -- the isomorphism ----------------------------------------------------------------------


def _scale_exponent(alpha: Fraction, scale: int) -> int:
    e = alpha * scale
    if e.denominator != 1:
        raise CoeffError(f"index {alpha} is not a multiple of 1/{scale}; rescale first")
    return int(e)


def to_laurent(p: TrigElement, lam: RatFun, scale: int = 1) -> LaurentPoly:
    """Image of p in k[w, 1/w] where w^scale corresponds to index 1."""
    if p.sigma.as_ratfun() != lam * lam:
        raise TagMismatch("lambda^2 != sigma: the Laurent model needs a square root of sigma in k")
    var = p.var
    half = Fraction(1, 2)
    inv2lam = (lam * 2).inverse()
    out: dict = {}

    def put(e, c):
        out[e] = out[e] + c if e in out else c

    for alpha, (c, s) in p.items():
        e = _scale_exponent(alpha, scale)
        if e == 0:
            put(0, c)
            continue
        if not c.is_zero():
            put(-e, c * half)
            put(e, c * half)
        if not s.is_zero():
            put(-e, s * inv2lam)
            put(e, -(s * inv2lam))
    return LaurentPoly(out, var)


def from_laurent(L: LaurentPoly, lam: RatFun, ring: TrigRing, scale: int = 1) -> TrigElement:
    out = ring.zero()
    for e, c in L.terms.items():
        alpha = Fraction(abs(e), scale)
        if e == 0:
            out = out + ring.scalar(c)
        elif e > 0:
            out = out + ring.C(alpha, c) - ring.S(alpha, c * lam)
        else:
            out = out + ring.C(alpha, c) + ring.S(alpha, c * lam)
    return out


def laurent_exact_div(p: TrigElement, d: TrigElement, lam: RatFun) -> Optional[TrigElement]:
    scale = lcm(p.index_denominator(), d.index_denominator())
    P = to_laurent(p, lam, scale)
    Dl = to_laurent(d, lam, scale)
    q, r = kpoly_divmod(P.to_dense(), Dl.to_dense())
    if r:
        return None
    Q = LaurentPoly.from_dense(q, p.var, P.low - Dl.low)
    return from_laurent(Q, lam, TrigRing(p.sigma, p.ell), scale)
