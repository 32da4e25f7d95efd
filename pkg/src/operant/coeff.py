"""Exact coefficient arithmetic: rationals, univariate polynomials and rational functions.

Rationals are :class:`fractions.Fraction`. Polynomials and rational functions carry a
base-variable tag (``"s"`` or ``"sigma"``); mixing tags raises :class:`VariableMismatch`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import flint
import numpy as np

Rational = Fraction
Number = Union[int, Fraction]

VARIABLES = ("s", "sigma")


class CoeffError(ValueError):
    pass


class VariableMismatch(CoeffError):
    pass


class PoleError(ArithmeticError):
    """Evaluation hit a (numerically) vanishing denominator."""


class RootFindingError(ArithmeticError):
    pass


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"``, an integer string or an int into a Fraction.

    Floats are rejected: the exact layer never accepts binary floating input.
    """
    if isinstance(text, bool):
        raise CoeffError(f"not a rational: {text!r}")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise CoeffError(f"rationals must be encoded as strings, got {text!r}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise CoeffError(f"not a rational: {text!r}") from exc


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def rational_sqrt(x: Fraction) -> Optional[Fraction]:
    """Exact square root of a nonnegative rational, or None."""
    x = Fraction(x)
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = _isqrt_exact(n), _isqrt_exact(d)
    if rn is None or rd is None:
        return None
    return Fraction(rn, rd)


def _isqrt_exact(n: int) -> Optional[int]:
    from math import isqrt

    r = isqrt(n)
    return r if r * r == n else None


def _fmpq(c) -> flint.fmpq:
    c = Fraction(c)
    return flint.fmpq(c.numerator, c.denominator)


def _frac_of(c: flint.fmpq) -> Fraction:
    return Fraction(int(c.p), int(c.q))


class Poly:
    """Dense univariate polynomial over Q backed by FLINT's fmpq_poly."""

    __slots__ = ("_p", "var", "_float", "_coeffs")

    def __init__(self, coeffs: Iterable[Number] = (), var: str = "s"):
        if var not in VARIABLES:
            raise CoeffError(f"unknown base variable {var!r}")
        self._p = flint.fmpq_poly([_fmpq(c) for c in coeffs])
        self.var = var
        self._float = None
        self._coeffs = None

    @classmethod
    def _wrap(cls, p: flint.fmpq_poly, var: str) -> "Poly":
        obj = cls.__new__(cls)
        obj._p = p
        obj.var = var
        obj._float = None
        obj._coeffs = None
        return obj

    @classmethod
    def constant(cls, c: Number, var: str = "s") -> "Poly":
        return cls((c,), var)

    @classmethod
    def x(cls, var: str = "s") -> "Poly":
        return cls((0, 1), var)

    @classmethod
    def from_roots(cls, roots: Sequence[Number], var: str = "s") -> "Poly":
        p = cls.constant(1, var)
        for r in roots:
            p = p * cls((-Fraction(r), 1), var)
        return p

    # -- structure -----------------------------------------------------------------
    @property
    def coeffs(self) -> tuple:
        """Ascending coefficients as Fractions, trailing zeros stripped."""
        if self._coeffs is None:
            self._coeffs = tuple(_frac_of(c) for c in self._p.coeffs())
        return self._coeffs

    @property
    def degree(self) -> int:
        return self._p.degree()

    def is_zero(self) -> bool:
        return self._p.is_zero()

    def is_constant(self) -> bool:
        return self._p.degree() <= 0

    def is_one(self) -> bool:
        return self._p.is_one()

    @property
    def lc(self) -> Fraction:
        return Fraction(0) if self.is_zero() else _frac_of(self._p[self._p.degree()])

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = self._p[self._p.degree()]
        if lead == 1:
            return self
        return Poly._wrap(self._p / lead, self.var)

    def _check(self, other: "Poly") -> None:
        if self.var != other.var:
            raise VariableMismatch(f"cannot combine {self.var!r} and {other.var!r} polynomials")

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Poly((other,), self.var)
        return NotImplemented

    # -- arithmetic ----------------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Poly._wrap(self._p + other._p, self.var)

    __radd__ = __add__

    def __neg__(self):
        return Poly._wrap(-self._p, self.var)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Poly._wrap(self._p - other._p, self.var)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly._wrap(self._p * _fmpq(other), self.var)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return Poly._wrap(self._p * other._p, self.var)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        return Poly._wrap(self._p**n, self.var)

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q, r = divmod(self._p, other._p)
        return Poly._wrap(q, self.var), Poly._wrap(r, self.var)

    def __floordiv__(self, other: "Poly") -> "Poly":
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        return Poly._wrap(self._p // other._p, self.var)

    def __mod__(self, other: "Poly") -> "Poly":
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        return Poly._wrap(self._p % other._p, self.var)

    def derivative(self) -> "Poly":
        return Poly._wrap(self._p.derivative(), self.var)

    # -- comparison / hashing --------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.var == other.var and self._p == other._p
        if isinstance(other, (int, Fraction)):
            return self._p == flint.fmpq_poly([_fmpq(other)])
        return NotImplemented

    def __hash__(self):
        return hash((self.var, self.coeffs))

    # -- evaluation ------------------------------------------------------------------
    def float_coeffs(self) -> np.ndarray:
        if self._float is None:
            self._float = np.array([float(c) for c in self.coeffs], dtype=float)
        return self._float

    def __call__(self, z):
        if isinstance(z, (int, Fraction)):
            return _frac_of(self._p(_fmpq(z)))
        acc = 0j
        for c in reversed(self.float_coeffs()):
            acc = acc * z + c
        return acc

    def abs_eval(self, z) -> float:
        """Sum of |c_i| |z|^i; the scale used for residual tests."""
        r = abs(z)
        acc = 0.0
        for c in reversed(self.float_coeffs()):
            acc = acc * r + abs(c)
        return acc

    def __repr__(self):
        if self.is_zero():
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else (self.var if i == 1 else f"{self.var}^{i}")
            if mono and c == 1:
                parts.append(mono)
            elif mono and c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{format_rational(c)}{'*' + mono if mono else ''}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> dict:
        return {"var": self.var, "coeffs": [format_rational(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data, var: Optional[str] = None) -> "Poly":
        """Decode ``{"var": ..., "coeffs": [...]}``; a bare rational string is a constant."""
        if isinstance(data, (str, int)) and not isinstance(data, bool):
            return cls.constant(parse_rational(data), var or "s")
        if not isinstance(data, dict) or "coeffs" not in data:
            raise CoeffError(f"malformed polynomial: {data!r}")
        v = data.get("var", var or "s")
        if var is not None and v != var:
            raise VariableMismatch(f"expected variable {var!r}, got {v!r}")
        return cls([parse_rational(c) for c in data["coeffs"]], v)


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd; gcd(0, 0) = 0."""
    p._check(q)
    if p.is_zero() and q.is_zero():
        return p
    return Poly._wrap(p._p.gcd(q._p), p.var).monic()


def poly_xgcd(p: Poly, q: Poly) -> tuple[Poly, Poly, Poly]:
    """Return (g, u, v) with u p + v q = g, g monic."""
    p._check(q)
    if p.is_zero() and q.is_zero():
        return p, Poly.constant(1, p.var), Poly((), p.var)
    g, u, v = p._p.xgcd(q._p)
    lead = g[g.degree()]
    return tuple(Poly._wrap(x / lead, p.var) for x in (g, u, v))


def poly_lcm(p: Poly, q: Poly) -> Poly:
    if p.is_zero() or q.is_zero():
        return Poly((), p.var)
    return (p * q // poly_gcd(p, q)).monic()


class RatFun:
    """Element num/den of Q(var), kept canonical: den monic, gcd(num, den) = 1."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, var: Optional[str] = None):
        if not isinstance(num, Poly):
            num = Poly.constant(num, var or (den.var if isinstance(den, Poly) else "s"))
        if den is None:
            den = Poly.constant(1, num.var)
        elif not isinstance(den, Poly):
            den = Poly.constant(den, num.var)
        num._check(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            self.num, self.den = num, Poly.constant(1, num.var)
            return
        if not den.is_constant():
            g = poly_gcd(num, den)
            if not g.is_one():
                num, den = num // g, den // g
        lc = den.lc
        if lc != 1:
            num, den = num * (1 / lc), den * (1 / lc)
        self.num, self.den = num, den

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> "RatFun":
        obj = cls.__new__(cls)
        obj.num, obj.den = num, den
        return obj

    @classmethod
    def constant(cls, c: Number, var: str = "s") -> "RatFun":
        return cls._raw(Poly.constant(c, var), Poly.constant(1, var))

    @classmethod
    def zero(cls, var: str = "s") -> "RatFun":
        return cls._raw(Poly((), var), Poly.constant(1, var))

    @classmethod
    def one(cls, var: str = "s") -> "RatFun":
        return cls.constant(1, var)

    @property
    def var(self) -> str:
        return self.num.var

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise CoeffError("not a constant")
        return self.num.coeffs[0] if self.num.coeffs else Fraction(0)

    def _coerce(self, other) -> "RatFun":
        if isinstance(other, RatFun):
            if other.var != self.var:
                raise VariableMismatch(f"cannot combine {self.var!r} and {other.var!r}")
            return other
        if isinstance(other, (int, Fraction)):
            return RatFun.constant(other, self.var)
        if isinstance(other, Poly):
            return RatFun(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            if self.den.is_one():
                return RatFun._raw(self.num + other.num, self.den)
            return RatFun(self.num + other.num, self.den)
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun._raw(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return RatFun.zero(self.var)
            return RatFun._raw(self.num * other, self.den)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return RatFun.zero(self.var)
        if self.den.is_one() and other.den.is_one():
            return RatFun._raw(self.num * other.num, self.den)
        return RatFun(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in the coefficient field")
        return RatFun(self.den, self.num)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return RatFun._raw(self.num * (1 / Fraction(other)), self.den)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "RatFun":
        if n < 0:
            return self.inverse() ** (-n)
        return RatFun._raw(self.num ** n, self.den ** n) if self.den.is_one() else RatFun(
            self.num ** n, self.den ** n
        )

    def __eq__(self, other):
        if isinstance(other, RatFun):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self.den.is_one() and self.num == other
        if isinstance(other, Poly):
            return self.den.is_one() and self.num == other
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __call__(self, z):
        return eval_ratfun(self, z)

    def __repr__(self):
        if self.den.is_one():
            return repr(self.num)
        return f"({self.num!r})/({self.den!r})"

    def canonical(self) -> "RatFun":
        return RatFun(self.num, self.den)

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data, var: Optional[str] = None) -> "RatFun":
        if isinstance(data, dict) and "num" in data:
            num = Poly.from_json(data["num"], var)
            den = Poly.from_json(data.get("den", "1"), num.var)
            return cls(num, den)
        return cls(Poly.from_json(data, var))


def eval_ratfun(f: RatFun, z, tol: float = 1e-12) -> complex:
    """Evaluate num(z)/den(z) in double precision.

    Raises :class:`PoleError` when ``|den(z)| < tol`` (relative to the denominator scale).
    """
    if isinstance(z, (int, Fraction)):
        d = f.den(z)
        if d == 0:
            raise PoleError(f"pole of {f!r} at {z}")
        return complex(f.num(z) / d)
    d = f.den(z)
    if abs(d) < tol * max(1.0, f.den.abs_eval(z)):
        raise PoleError(f"pole of {f!r} at {z}")
    return f.num(z) / d


def ratfun_lcm_denominator(items: Iterable[RatFun], var: str) -> Poly:
    den = Poly.constant(1, var)
    for f in items:
        if not f.den.is_one():
            den = poly_lcm(den, f.den)
    return den


# -- characteristic parameter ----------------------------------------------------------


@dataclass(frozen=True)
class SigmaSpec:
    """The characteristic parameter, either a free indeterminate or a s^2 + b s + c."""

    mode: str = "indeterminate"
    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    c: Fraction = Fraction(0)

    def __post_init__(self):
        if self.mode not in ("indeterminate", "polynomial"):
            raise CoeffError(f"unknown sigma mode {self.mode!r}")
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.mode == "polynomial":
            if self.a < 0:
                raise CoeffError("sigma = a s^2 + b s + c requires a >= 0")
            if self.a == 0 and self.b == 0 and self.c == 0:
                raise CoeffError("sigma must be nonzero")
        elif (self.a, self.b, self.c) != (0, 0, 0):
            raise CoeffError("indeterminate sigma takes no coefficients")

    @classmethod
    def indeterminate(cls) -> "SigmaSpec":
        return cls("indeterminate")

    @classmethod
    def polynomial(cls, a: Number, b: Number, c: Number) -> "SigmaSpec":
        return cls("polynomial", Fraction(a), Fraction(b), Fraction(c))

    @property
    def var(self) -> str:
        return "sigma" if self.mode == "indeterminate" else "s"

    def as_ratfun(self) -> RatFun:
        if self.mode == "indeterminate":
            return RatFun(Poly((0, 1), "sigma"))
        return RatFun(Poly((self.c, self.b, self.a), "s"))

    def value(self, z) -> complex:
        """sigma evaluated at the base-variable value z."""
        if self.mode == "indeterminate":
            return complex(z)
        return complex(self.a * z * z + self.b * z + self.c) if isinstance(z, (int, Fraction)) else (
            float(self.a) * z * z + float(self.b) * z + float(self.c)
        )

    def to_json(self) -> dict:
        if self.mode == "indeterminate":
            return {"mode": "indeterminate"}
        return {"a": format_rational(self.a), "b": format_rational(self.b), "c": format_rational(self.c)}

    @classmethod
    def from_json(cls, data) -> "SigmaSpec":
        if not isinstance(data, dict):
            raise CoeffError(f"malformed sigma spec: {data!r}")
        mode = data.get("mode", "polynomial")
        if mode == "indeterminate":
            return cls.indeterminate()
        try:
            return cls.polynomial(*(parse_rational(data[k]) for k in ("a", "b", "c")))
        except KeyError as exc:
            raise CoeffError(f"sigma spec missing coefficient {exc}") from None


def sqrt_sigma(spec: SigmaSpec) -> Optional[RatFun]:
    """Return lambda in k with lambda^2 = sigma, or None when sigma is not a square."""
    if spec.mode == "indeterminate":
        return None
    a, b, c = spec.a, spec.b, spec.c
    if a > 0:
        if b * b - 4 * a * c != 0:
            return None
        ra = rational_sqrt(a)
        if ra is None:
            return None
        return RatFun(Poly((b / (2 * ra), ra), "s"))
    if b == 0:
        rc = rational_sqrt(c)
        if rc is None:
            return None
        return RatFun.constant(rc, "s")
    return None


# -- root finding ------------------------------------------------------------------------


def find_roots(p: Poly, tol: float = 1e-10, max_iter: int = 50) -> list[complex]:
    """All complex roots of p with multiplicity.

    The square-free split is exact, so each factor has simple roots: eigenvalues of
    its companion matrix, each refined by Newton steps until
    ``|f(z)| <= tol * sum |c_i| |z|^i``.
    """
    if p.is_zero():
        raise CoeffError("roots of the zero polynomial")
    if p.degree == 0:
        return []
    _, factors = p._p.factor_squarefree()
    roots = []
    for f, mult in factors:
        for z in _simple_roots(Poly._wrap(f, p.var), tol, max_iter):
            roots.extend([z] * int(mult))
    return sorted(roots, key=lambda r: (r.real, r.imag))


def _simple_roots(p: Poly, tol: float, max_iter: int) -> list[complex]:
    n = p.degree
    if n == 1:
        c0, c1 = p.coeffs
        return [complex(float(-c0 / c1), 0.0)]
    c = p.float_coeffs()
    comp = np.zeros((n, n), dtype=complex)
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -c[:-1] / c[-1]
    guesses = np.linalg.eigvals(comp)
    dp = p.derivative()
    roots = []
    for z in guesses:
        z = complex(z)
        val = p(z)
        # polish past tol until Newton stops improving; tol only gates acceptance
        for _ in range(max_iter):
            if val == 0:
                break
            d = dp(z)
            if d == 0:
                break
            cand = z - val / d
            cval = p(cand)
            if abs(cval) >= abs(val):
                break
            z, val = cand, cval
        if abs(val) > tol * p.abs_eval(z):
            raise RootFindingError(f"root near {z} of {p!r} failed residual test: |p(z)| = {abs(val):.3e}")
        if abs(z.imag) <= 1e-14 * max(1.0, abs(z.real)):
            z = complex(z.real, 0.0)
        roots.append(z)
    return roots
