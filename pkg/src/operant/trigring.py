"""The ring k[G_Q] of finite sums  sum_a c_a C_a + s_a S_a  with rational indices.

The generators obey the addition formulas

    C_a C_b +- sigma S_a S_b = C_{a+-b},    S_a C_b +- C_a S_b = S_{a+-b},
    C_0 = 1,  S_0 = 0,

so every element has a unique normal form with nonnegative indices, which is what
:class:`TrigElement` stores.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import total_ordering
from math import lcm
from typing import Iterable, Iterator, Optional, Union

from .coeff import (
    CoeffError,
    Poly,
    RatFun,
    SigmaSpec,
    eval_ratfun,
    format_rational,
    parse_rational,
    poly_lcm,
    sqrt_sigma,
)

Scalar = Union[int, Fraction, RatFun, Poly]


class TagMismatch(ValueError):
    """Operands live in rings with different sigma, length or coefficient tags."""


@total_ordering
class _Bottom:
    """Norm of the zero element; compares below every finite norm."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return other is not self

    def __hash__(self):
        return 0

    def __repr__(self):
        return "BOTTOM"


BOTTOM = _Bottom()


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class TrigElement:
    """Immutable ring element in normal form.

    ``terms`` maps each index alpha >= 0 to a pair ``(c_alpha, s_alpha)`` of
    coefficients in k. The S-coefficient at alpha = 0 is always zero and pairs
    that vanish are never stored.
    """

    __slots__ = ("sigma", "ell", "_terms", "_hash")

    def __init__(self, sigma: SigmaSpec, ell=1, terms: Optional[dict] = None):
        self.sigma = sigma
        self.ell = _frac(ell)
        if self.ell <= 0:
            raise CoeffError("base length must be positive")
        self._terms = {}
        self._hash = None
        if terms:
            acc = _Accumulator(sigma.var)
            for alpha, (c, s) in terms.items():
                acc.add_c(alpha, _as_k(c, sigma.var))
                acc.add_s(alpha, _as_k(s, sigma.var))
            self._terms = acc.finish()

    @classmethod
    def _from_normal(cls, sigma: SigmaSpec, ell: Fraction, terms: dict) -> "TrigElement":
        obj = cls.__new__(cls)
        obj.sigma, obj.ell, obj._terms, obj._hash = sigma, ell, terms, None
        return obj

    # -- constructors ------------------------------------------------------------------
    def _like(self, terms: dict) -> "TrigElement":
        return TrigElement._from_normal(self.sigma, self.ell, terms)

    def zero(self) -> "TrigElement":
        return self._like({})

    def scalar(self, c: Scalar) -> "TrigElement":
        return TrigRing(self.sigma, self.ell).scalar(c)

    # -- structure ---------------------------------------------------------------------
    @property
    def var(self) -> str:
        return self.sigma.var

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Fraction, tuple[RatFun, RatFun]]]:
        return iter(sorted(self._terms.items()))

    def indices(self) -> list[Fraction]:
        return sorted(self._terms)

    def coeff(self, alpha) -> tuple[RatFun, RatFun]:
        z = RatFun.zero(self.var)
        return self._terms.get(_frac(alpha), (z, z))

    def coefficients(self) -> Iterator[RatFun]:
        for c, s in self._terms.values():
            yield c
            yield s

    def is_zero(self) -> bool:
        return not self._terms

    def is_scalar(self) -> bool:
        return all(a == 0 for a in self._terms)

    def scalar_value(self) -> RatFun:
        if not self.is_scalar():
            raise CoeffError("element is not a scalar")
        return self.coeff(0)[0]

    def norm(self):
        """Largest stored index, or BOTTOM for zero."""
        return max(self._terms) if self._terms else BOTTOM

    def leading(self) -> tuple[RatFun, RatFun]:
        if not self._terms:
            raise CoeffError("zero element has no leading pair")
        return self._terms[max(self._terms)]

    def index_denominator(self) -> int:
        return lcm(1, *(a.denominator for a in self._terms))

    def has_polynomial_coeffs(self) -> bool:
        return all(f.is_polynomial() for f in self.coefficients())

    def denominator_lcm(self) -> Poly:
        den = Poly.constant(1, self.var)
        for f in self.coefficients():
            if not f.den.is_one():
                den = poly_lcm(den, f.den)
        return den

    def compatible(self, other: "TrigElement") -> bool:
        return self.sigma == other.sigma and self.ell == other.ell

    def _check(self, other: "TrigElement") -> None:
        if not self.compatible(other):
            raise TagMismatch(
                f"incompatible ring tags: ({self.sigma}, ell={self.ell}) vs ({other.sigma}, ell={other.ell})"
            )

    def _coerce(self, other) -> "TrigElement":
        if isinstance(other, TrigElement):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, RatFun, Poly)):
            return self.scalar(other)
        return NotImplemented

    # -- arithmetic --------------------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        out = dict(self._terms)
        for a, (c, s) in other._terms.items():
            if a in out:
                c0, s0 = out[a]
                c, s = c0 + c, s0 + s
                if c.is_zero() and s.is_zero():
                    del out[a]
                    continue
            out[a] = (c, s)
        return self._like(out)

    __radd__ = __add__

    def __neg__(self):
        return self._like({a: (-c, -s) for a, (c, s) in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, f: Scalar) -> "TrigElement":
        """Multiply by a coefficient-field element."""
        f = _as_k(f, self.var)
        if f.is_zero():
            return self.zero()
        if f.is_one():
            return self
        return self._like({a: (c * f, s * f) for a, (c, s) in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, RatFun, Poly)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, RatFun, Poly)):
            return self.scale(_as_k(other, self.var).inverse())
        return NotImplemented

    def __pow__(self, n: int) -> "TrigElement":
        out = self.scalar(1)
        for _ in range(n):
            out = out * self
        return out

    def rescale(self, factor) -> "TrigElement":
        """Ring isomorphism alpha -> factor * alpha (same sigma and ell)."""
        factor = _frac(factor)
        if factor <= 0:
            raise CoeffError("rescale factor must be positive")
        return self._like({a * factor: cs for a, cs in self._terms.items()})

    def map_coeffs(self, fn) -> "TrigElement":
        return TrigElement(self.sigma, self.ell, {a: (fn(c), fn(s)) for a, (c, s) in self._terms.items()})

    # -- comparison --------------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, TrigElement):
            return self.compatible(other) and self._terms == other._terms
        if isinstance(other, (int, Fraction, RatFun, Poly)):
            return self == self.scalar(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.sigma, self.ell, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        if not self._terms:
            return "0"
        parts = []
        for a, (c, s) in self.items():
            idx = format_rational(a)
            if a == 0:
                parts.append(repr(c))
                continue
            for coef, sym in ((c, "C"), (s, "S")):
                if coef.is_zero():
                    continue
                if coef.is_one():
                    parts.append(f"{sym}{idx}")
                else:
                    parts.append(f"({coef!r})*{sym}{idx}")
        return " + ".join(parts)

    # -- serialisation -----------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "sigma": self.sigma.to_json(),
            "ell": format_rational(self.ell),
            "terms": [
                {"alpha": format_rational(a), "c": c.to_json(), "s": s.to_json()} for a, (c, s) in self.items()
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TrigElement":
        if not isinstance(data, dict):
            raise CoeffError("trig element must be a JSON object")
        try:
            sigma = SigmaSpec.from_json(data["sigma"])
            ell = parse_rational(data.get("ell", "1"))
            raw_terms = data["terms"]
        except KeyError as exc:
            raise CoeffError(f"trig element missing field {exc}") from None
        ring = TrigRing(sigma, ell)
        out = ring.zero()
        for t in raw_terms:
            alpha = parse_rational(t["alpha"])
            c = RatFun.from_json(t.get("c", "0"), sigma.var)
            s = RatFun.from_json(t.get("s", "0"), sigma.var)
            out = out + ring.make_term("C", alpha, c) + ring.make_term("S", alpha, s)
        return out


def _as_k(x, var: str) -> RatFun:
    if isinstance(x, RatFun):
        if x.var != var:
            raise TagMismatch(f"coefficient in {x.var!r}, ring over {var!r}")
        return x
    if isinstance(x, Poly):
        if x.var != var:
            raise TagMismatch(f"coefficient in {x.var!r}, ring over {var!r}")
        return RatFun(x)
    return RatFun.constant(_frac(x), var)


class _Accumulator:
    """Collects C/S contributions, folding negative indices by parity."""

    def __init__(self, var: str):
        self.var = var
        self.c: dict = {}
        self.s: dict = {}

    def add_c(self, alpha, coef: RatFun) -> None:
        if coef.is_zero():
            return
        alpha = abs(_frac(alpha))
        prev = self.c.get(alpha)
        self.c[alpha] = coef if prev is None else prev + coef

    def add_s(self, alpha, coef: RatFun) -> None:
        if coef.is_zero():
            return
        alpha = _frac(alpha)
        if alpha == 0:
            return
        if alpha < 0:
            alpha, coef = -alpha, -coef
        prev = self.s.get(alpha)
        self.s[alpha] = coef if prev is None else prev + coef

    def finish(self) -> dict:
        zero = RatFun.zero(self.var)
        out = {}
        for a in set(self.c) | set(self.s):
            c = self.c.get(a, zero)
            s = self.s.get(a, zero)
            if c.is_zero() and s.is_zero():
                continue
            out[a] = (c, s)
        return out


class TrigRing:
    """Factory for elements sharing one sigma and base length."""

    def __init__(self, sigma: Optional[SigmaSpec] = None, ell=1):
        self.sigma = sigma if sigma is not None else SigmaSpec.indeterminate()
        self.ell = _frac(ell)

    @property
    def var(self) -> str:
        return self.sigma.var

    def zero(self) -> TrigElement:
        return TrigElement._from_normal(self.sigma, self.ell, {})

    def scalar(self, c: Scalar) -> TrigElement:
        c = _as_k(c, self.var)
        if c.is_zero():
            return self.zero()
        return TrigElement._from_normal(self.sigma, self.ell, {Fraction(0): (c, RatFun.zero(self.var))})

    def make_term(self, kind: str, alpha, coeff: Scalar = 1) -> TrigElement:
        return make_term(kind, alpha, coeff, self.sigma, self.ell)

    def C(self, alpha, coeff: Scalar = 1) -> TrigElement:
        return self.make_term("C", alpha, coeff)

    def S(self, alpha, coeff: Scalar = 1) -> TrigElement:
        return self.make_term("S", alpha, coeff)

    def sigma_element(self) -> RatFun:
        return self.sigma.as_ratfun()

    def poly(self, coeffs: Iterable) -> RatFun:
        return RatFun(Poly(coeffs, self.var))

    def __call__(self, c: Scalar) -> TrigElement:
        return self.scalar(c)

    def __eq__(self, other):
        return isinstance(other, TrigRing) and (self.sigma, self.ell) == (other.sigma, other.ell)

    def __hash__(self):
        return hash((self.sigma, self.ell))

    def __repr__(self):
        return f"TrigRing({self.sigma}, ell={self.ell})"


def make_term(kind: str, alpha, coeff: Scalar = 1, sigma: Optional[SigmaSpec] = None, ell=1) -> TrigElement:
    """Single generator term ``coeff * C_alpha`` or ``coeff * S_alpha``.

    Negative indices fold by parity (C_{-a} = C_a, S_{-a} = -S_a); S_0 is zero and
    C_0 is the scalar ``coeff``.
    """
    sigma = sigma if sigma is not None else SigmaSpec.indeterminate()
    coef = _as_k(coeff, sigma.var)
    acc = _Accumulator(sigma.var)
    if kind == "C":
        acc.add_c(alpha, coef)
    elif kind == "S":
        acc.add_s(alpha, coef)
    else:
        raise CoeffError(f"term kind must be 'C' or 'S', got {kind!r}")
    return TrigElement._from_normal(sigma, _frac(ell), acc.finish())


def mul(p: TrigElement, q: TrigElement) -> TrigElement:
    """Product via 2C_aC_b = C_{a+b}+C_{a-b}, 2sigma S_aS_b = C_{a+b}-C_{a-b}, 2C_aS_b = S_{a+b}-S_{a-b}."""
    p._check(q)
    if p.is_zero() or q.is_zero():
        return p.zero()
    if p.is_scalar():
        return q.scale(p.scalar_value())
    if q.is_scalar():
        return p.scale(q.scalar_value())
    var = p.var
    half = Fraction(1, 2)
    inv2sigma = (p.sigma.as_ratfun() * 2).inverse()
    acc = _Accumulator(var)
    for a, (ca, sa) in p._terms.items():
        for b, (cb, sb) in q._terms.items():
            hi, lo = a + b, a - b
            if not ca.is_zero():
                if not cb.is_zero():
                    t = ca * cb * half
                    acc.add_c(hi, t)
                    acc.add_c(lo, t)
                if not sb.is_zero():
                    # C_a S_b = (S_{a+b} - S_{a-b}) / 2
                    t = ca * sb * half
                    acc.add_s(hi, t)
                    acc.add_s(lo, -t)
            if not sa.is_zero():
                if not sb.is_zero():
                    t = sa * sb * inv2sigma
                    acc.add_c(hi, t)
                    acc.add_c(lo, -t)
                if not cb.is_zero():
                    # S_a C_b = (S_{a+b} + S_{a-b}) / 2
                    t = sa * cb * half
                    acc.add_s(hi, t)
                    acc.add_s(lo, t)
    return TrigElement._from_normal(p.sigma, p.ell, acc.finish())


def norm(p: TrigElement):
    return p.norm()


def is_reducible(sigma: SigmaSpec) -> bool:
    return sqrt_sigma(sigma) is not None


def is_unit(p: TrigElement) -> bool:
    """Units of the ring.

    If sigma has no square root in k the units are the nonzero scalars. Otherwise
    C_a + lambda S_a is invertible as well, and p is a unit exactly when its
    Laurent image is a monomial.
    """
    if p.is_zero():
        return False
    lam = sqrt_sigma(p.sigma)
    if lam is None:
        return p.is_scalar()
    from .bezout.laurent import to_laurent

    return len(to_laurent(p, lam, p.index_denominator()).terms) == 1


# -- Laplace evaluation ------------------------------------------------------------------


def laplace_eval(p: TrigElement, z, tol: float = 1e-12) -> complex:
    """Value of the Laplace transform of p at the base-variable point z.

    C_a -> cosh(a ell w), S_a -> sinh(a ell w)/w with w^2 = sigma(z); both are even in
    w so the branch of the square root is irrelevant.
    """
    if p.is_zero():
        return 0j
    w = cmath.sqrt(p.sigma.value(z))
    ell = float(p.ell)
    total = 0j
    for a, (c, s) in p._terms.items():
        x = float(a) * ell
        if not c.is_zero():
            total += eval_ratfun(c, z, tol) * cmath.cosh(x * w)
        if not s.is_zero():
            total += eval_ratfun(s, z, tol) * _sinhc(x, w)
    return total


def _sinhc(x: float, w: complex) -> complex:
    """sinh(x w)/w with the limit x at w = 0."""
    if w == 0:
        return complex(x)
    xw = x * w
    if abs(xw) < 1e-5:
        return x * (1 + xw * xw / 6 + (xw * xw) ** 2 / 120)
    return cmath.sinh(xw) / w


def laplace_eval_entire(p: TrigElement, z, radius: float = 1e-2, nodes: int = 32) -> complex:
    """Laplace value that tolerates removable coefficient poles.

    Elements of the operator ring may carry rational coefficients whose poles cancel
    in the transform. Near such a pole the value is recovered as the mean over a
    small circle (exact for entire functions up to the trapezoid error).
    """
    try:
        return laplace_eval(p, z, tol=1e-8)
    except ArithmeticError:
        pass
    total = 0j
    for k in range(nodes):
        total += laplace_eval(p, z + radius * cmath.exp(2j * cmath.pi * k / nodes))
    return total / nodes


# -- exact division ----------------------------------------------------------------------


def exact_div(p: TrigElement, d: TrigElement) -> Optional[TrigElement]:
    """Return x with d * x == p, or None if d does not divide p in k[G_Q]."""
    p._check(d)
    if d.is_zero():
        raise ZeroDivisionError("exact_div by zero")
    if p.is_zero():
        return p.zero()
    if d.is_scalar():
        return p.scale(d.scalar_value().inverse())
    lam = sqrt_sigma(p.sigma)
    if lam is not None:
        from .bezout.laurent import laurent_exact_div

        x = laurent_exact_div(p, d, lam)
    else:
        x = _long_division(p, d)
    if x is not None and mul(d, x) != p:
        return None
    return x


def _leading_of_product(ah: RatFun, bh: RatFun, delta: Fraction, ad: RatFun, bd: RatFun, n: Fraction, sigma: RatFun):
    """Leading (C, S) pair of (ah C_delta + bh S_delta) * d at index delta + n."""
    if delta == 0:
        return ah * ad, ah * bd
    if n == 0:
        return ah * ad, bh * ad
    return (ah * ad + bh * bd / sigma) * Fraction(1, 2), (bh * ad + ah * bd) * Fraction(1, 2)


def solve_leading(ap: RatFun, bp: RatFun, ad: RatFun, bd: RatFun, delta: Fraction, n: Fraction, sigma: RatFun):
    """Solve for (ah, bh) so that (ah C_delta + bh S_delta) d has leading pair (ap, bp).

    Returns None when no solution exists (only possible for delta == 0 or n == 0).
    """
    var = ap.var
    zero = RatFun.zero(var)
    if delta == 0:
        # quotient term is a scalar t: need (t ad, t bd) = (ap, bp)
        t = ap / ad if not ad.is_zero() else bp / bd
        if t * ad != ap or t * bd != bp:
            return None
        return t, zero
    if n == 0:
        return ap / ad, bp / ad
    # [[ad, bd/sigma], [bd, ad]] (ah, bh)^T = 2 (ap, bp)^T
    det = ad * ad - bd * bd / sigma
    if det.is_zero():
        return None
    ah = (ad * ap - bd * bp / sigma) * 2 / det
    bh = (ad * bp - bd * ap) * 2 / det
    return ah, bh


def _long_division(p: TrigElement, d: TrigElement) -> Optional[TrigElement]:
    # norm is additive when sigma is not a square, so the quotient is built top-down
    sigma = p.sigma.as_ratfun()
    n = d.norm()
    ad, bd = d.leading()
    ring = TrigRing(p.sigma, p.ell)
    quotient = ring.zero()
    rem = p
    guard = 0
    while not rem.is_zero():
        delta = rem.norm() - n
        if delta < 0:
            return None
        ap, bp = rem.leading()
        sol = solve_leading(ap, bp, ad, bd, delta, n, sigma)
        if sol is None:
            return None
        term = ring.C(delta, sol[0]) + ring.S(delta, sol[1])
        quotient = quotient + term
        new_rem = rem - mul(term, d)
        if not new_rem.is_zero() and new_rem.norm() >= rem.norm():
            return None
        rem = new_rem
        guard += 1
        if guard > 10_000:
            raise RuntimeError("long division failed to terminate")
    return quotient


def divides(d: TrigElement, p: TrigElement) -> bool:
    return exact_div(p, d) is not None


def are_associates(p: TrigElement, q: TrigElement) -> bool:
    """p and q generate the same principal ideal."""
    if p.is_zero() or q.is_zero():
        return p.is_zero() and q.is_zero()
    x = exact_div(p, q)
    return x is not None and is_unit(x)
