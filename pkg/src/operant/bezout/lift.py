"""Lifting a Bezout identity from k[G_Q] to the operator ring.

The base identity A p + B q = c has polynomial coefficients. Dividing p and q by c
leaves rational coefficients with common denominator h, and A p~ + B q~ = h. Each
root s_N of h is then removed by

    a* = (a - kappa q) / (s - s_N),   b* = (b + kappa p) / (s - s_N)

where kappa makes both numerators vanish at s_N in the Laplace domain. The constants
involved are values of entire functions, so lifted cofactors are numeric objects.
"""

from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from ..coeff import Poly, RatFun, find_roots, poly_lcm
from ..trigring import TrigElement, _sinhc, exact_div, is_unit, laplace_eval, mul
from .gcd import BezoutCertificate, gcd_pair

logger = logging.getLogger(__name__)


class DegenerateRootError(ArithmeticError):
    """Both p and q vanish at a root of h, so they were not coprime after all."""


class LiftError(ArithmeticError):
    pass


def _poly_array(f: RatFun) -> np.ndarray:
    if not f.den.is_one():
        raise LiftError(f"coefficient {f!r} is not a polynomial")
    if f.num.is_zero():
        return np.zeros(1, dtype=complex)
    return f.num.float_coeffs().astype(complex)


def _contour(center: complex, radius: float, nodes: int) -> np.ndarray:
    return center + radius * np.exp(2j * np.pi * np.arange(nodes) / nodes)


class LiftedElement:
    """sum_a (c_a(s) C_a + s_a(s) S_a) / prod(s - r) with complex polynomial c_a, s_a."""

    def __init__(self, sigma, ell, terms: dict, poles: Sequence[complex] = ()):
        self.sigma = sigma
        self.ell = Fraction(ell)
        self.terms = terms
        self.poles = list(poles)

    @classmethod
    def from_trig(cls, p: TrigElement) -> "LiftedElement":
        terms = {a: (_poly_array(c), _poly_array(s)) for a, (c, s) in p.items()}
        return cls(p.sigma, p.ell, terms)

    def pole_poly(self) -> np.ndarray:
        return npoly.polyfromroots(self.poles) if self.poles else np.ones(1, dtype=complex)

    def numerator(self, z: complex) -> complex:
        w = cmath.sqrt(self.sigma.value(z))
        ell = float(self.ell)
        total = 0j
        for a, (c, s) in self.terms.items():
            x = float(a) * ell
            total += npoly.polyval(z, c) * cmath.cosh(x * w) + npoly.polyval(z, s) * _sinhc(x, w)
        return total

    def _direct(self, z: complex) -> complex:
        den = 1 + 0j
        for r in self.poles:
            den *= z - r
        return self.numerator(z) / den

    def magnitude(self, z: complex) -> float:
        """Sum of the absolute values of all terms; the roundoff scale of ``_direct``."""
        w = cmath.sqrt(self.sigma.value(z))
        ell = float(self.ell)
        r = abs(z)
        total = 0.0
        for a, (c, s) in self.terms.items():
            x = float(a) * ell
            total += npoly.polyval(r, np.abs(c)) * abs(cmath.cosh(x * w)) + npoly.polyval(r, np.abs(s)) * abs(_sinhc(x, w))
        den = 1.0
        for p in self.poles:
            den *= abs(z - p)
        return total / den

    def near_pole(self, z: complex, radius: float) -> bool:
        return any(abs(z - r) < radius for r in self.poles)

    def __call__(self, z, radius: float = 1e-2, nodes: int = 64) -> complex:
        """Laplace value; near a declared pole the mean over a small circle is used."""
        z = complex(z)
        if not self.near_pole(z, radius):
            return self._direct(z)
        pts = _contour(z, radius, nodes)
        return complex(np.mean([self._direct(t) for t in pts]))

    def combine(self, kappa: complex, other: TrigElement, root: complex) -> "LiftedElement":
        """(self + kappa * other) / (s - root); ``other`` has polynomial coefficients."""
        d = self.pole_poly()
        terms = {a: (c.copy(), s.copy()) for a, (c, s) in self.terms.items()}
        for a, (oc, os_) in other.items():
            oc = npoly.polymul(_poly_array(oc), d) * kappa
            os_ = npoly.polymul(_poly_array(os_), d) * kappa
            c, s = terms.get(a, (np.zeros(1, complex), np.zeros(1, complex)))
            terms[a] = (npoly.polyadd(c, oc), npoly.polyadd(s, os_))
        return LiftedElement(self.sigma, self.ell, terms, self.poles + [complex(root)])

    def scale(self, f: complex) -> "LiftedElement":
        return LiftedElement(
            self.sigma, self.ell, {a: (c * f, s * f) for a, (c, s) in self.terms.items()}, self.poles
        )

    def residues(self, nodes: int = 64) -> list[float]:
        """Residue at each distinct declared pole relative to the term magnitude (zero if removable)."""
        out = []
        distinct: list[complex] = []
        for r in self.poles:
            if all(abs(r - d) > 1e-9 for d in distinct):
                distinct.append(r)
        for r in distinct:
            others = [abs(r - d) for d in distinct if d is not r]
            radius = min([1e-2] + [0.4 * o for o in others])
            pts = _contour(r, radius, nodes)
            vals = np.array([self._direct(t) for t in pts])
            res = radius * np.mean(vals * np.exp(2j * np.pi * np.arange(nodes) / nodes))
            # relative to the term magnitude: the combined value can cancel far below it
            scale = radius * max(1e-300, max(self.magnitude(t) for t in pts))
            out.append(float(abs(res) / scale))
        return out

    def to_json(self) -> dict:
        def enc(arr):
            return [[float(v.real), float(v.imag)] for v in arr]

        return {
            "terms": {str(a): {"c": enc(c), "s": enc(s)} for a, (c, s) in sorted(self.terms.items())},
            "poles": [[r.real, r.imag] for r in self.poles],
        }


def coprime_step(a, b, p: TrigElement, q: TrigElement, s_n: complex, tol: float = 1e-8):
    """Remove the root s_n from a p + b q = prod(s - s_i).

    ``a`` and ``b`` are LiftedElements (or TrigElements with polynomial coefficients).
    Returns (a*, b*) with a* p + b* q = prod_{i != N}(s - s_i).
    """
    if isinstance(a, TrigElement):
        a = LiftedElement.from_trig(a)
    if isinstance(b, TrigElement):
        b = LiftedElement.from_trig(b)
    s_n = complex(s_n)
    p_bar = laplace_eval(p, s_n)
    q_bar = laplace_eval(q, s_n)
    p_scale = max(1.0, _abs_scale(p, s_n))
    q_scale = max(1.0, _abs_scale(q, s_n))
    if abs(p_bar) < tol * p_scale and abs(q_bar) < tol * q_scale:
        raise DegenerateRootError(f"p and q both vanish at {s_n}: |p| = {abs(p_bar):.2e}, |q| = {abs(q_bar):.2e}")
    if abs(q_bar) / q_scale >= abs(p_bar) / p_scale:
        kappa = a(s_n) / q_bar
    else:
        kappa = -b(s_n) / p_bar
    return a.combine(-kappa, q, s_n), b.combine(kappa, p, s_n)


def _abs_scale(p: TrigElement, z: complex) -> float:
    w = cmath.sqrt(p.sigma.value(z))
    ell = float(p.ell)
    total = 0.0
    for a, (c, s) in p.items():
        x = float(a) * ell
        if not c.is_zero():
            total += abs(c.num(z) / c.den(z)) * abs(cmath.cosh(x * w))
        if not s.is_zero():
            total += abs(s.num(z) / s.den(z)) * abs(_sinhc(x, w))
    return total


@dataclass
class LiftCertificate:
    """Lifted cofactors with lifted_a p + lifted_b q = gcd (the operator-ring gcd c~)."""

    p: TrigElement
    q: TrigElement
    base: BezoutCertificate
    h: Poly
    roots: list
    gcd: TrigElement
    lifted_a: Optional[LiftedElement]
    lifted_b: Optional[LiftedElement]
    coprime: bool
    residual_report: dict = field(default_factory=dict)

    def identity_residual(self, points: Sequence[complex]) -> float:
        worst = 0.0
        for z in points:
            lhs = self.lifted_a(z) * laplace_eval(self.p, z) + self.lifted_b(z) * laplace_eval(self.q, z)
            rhs = laplace_eval(self.gcd, z)
            worst = max(worst, abs(lhs - rhs))
        return worst

    def check(self, samples: int = 20, seed: int = 0, tol: float = 1e-8, box: float = 3.0) -> dict:
        """Numeric verification at seeded sample points plus residues at declared poles."""
        rng = np.random.default_rng(seed)
        pts = [complex(x, y) for x, y in rng.uniform(-box, box, size=(samples, 2))]
        residues = self.lifted_a.residues() + self.lifted_b.residues()
        report = {
            "samples": samples,
            "seed": seed,
            "identity_residual": float(self.identity_residual(pts)),
            "max_pole_residue": max(residues, default=0.0),
            "tol": tol,
        }
        # residues are relative contour quadratures; 1e-6 is far above their roundoff
        report["passed"] = report["identity_residual"] < tol and report["max_pole_residue"] < max(tol, 1e-6)
        self.residual_report = report
        return report

    def to_json(self) -> dict:
        out = {
            "p": self.p.to_json(),
            "q": self.q.to_json(),
            "coprime": self.coprime,
            "base": self.base.to_json(),
            "h": self.h.to_json(),
            "roots": [[r.real, r.imag] for r in self.roots],
            "gcd": self.gcd.to_json(),
            "residual_report": self.residual_report,
        }
        if self.lifted_a is not None:
            out["lifted_a"] = self.lifted_a.to_json()
            out["lifted_b"] = self.lifted_b.to_json()
        return out


def _denominator(x: TrigElement) -> Poly:
    return x.denominator_lcm()


def bezout_lift(p: TrigElement, q: TrigElement, tol: float = 1e-8) -> LiftCertificate:
    """Bezout identity for p, q in the operator ring (polynomial-coefficient inputs)."""
    if p.is_zero() or q.is_zero():
        raise LiftError("bezout_lift needs nonzero p and q")
    if not (p.has_polynomial_coeffs() and q.has_polynomial_coeffs()):
        raise LiftError("bezout_lift needs polynomial coefficients")
    base = gcd_pair(p, q)
    a, b = base.cofactors
    var = p.var
    delta = Poly.constant(1, var)
    for e in (a, b, base.g):
        delta = poly_lcm(delta, e.denominator_lcm())
    d = RatFun(delta)
    c, A, B = base.g.scale(d), a.scale(d), b.scale(d)
    x1, x2 = exact_div(p, c), exact_div(q, c)
    if x1 is None or x2 is None:
        raise LiftError("gcd does not divide its generators")
    h = poly_lcm(_denominator(x1), _denominator(x2))
    hr = RatFun(h)
    c_tilde = c.scale(hr.inverse())
    pt, qt = x1.scale(hr), x2.scale(hr)
    if mul(A, pt) + mul(B, qt) != p.scalar(hr):
        raise LiftError("cleared identity A p~ + B q~ = h failed")
    # nearest roots first keeps kappa (and the cancellation it causes) small
    roots = sorted(find_roots(h), key=abs) if h.degree > 0 else []
    logger.debug("lift: h of degree %d, %d roots", h.degree, len(roots))
    la, lb = LiftedElement.from_trig(A), LiftedElement.from_trig(B)
    for r in roots:
        la, lb = coprime_step(la, lb, pt, qt, r, tol)
    coprime = c_tilde.is_scalar()
    gcd = c_tilde
    if coprime:
        f = 1 / complex(c_tilde.scalar_value().constant_value()) if c_tilde.scalar_value().is_constant() else None
        if f is not None:
            la, lb = la.scale(f), lb.scale(f)
            gcd = p.scalar(1)
        else:
            coprime = False
    # a p~ + b q~ = 1 and p = c~ p~, so a p + b q = c~
    return LiftCertificate(p, q, base, h, roots, gcd, la, lb, coprime)


def is_coprime_base(p: TrigElement, q: TrigElement) -> bool:
    return is_unit(gcd_pair(p, q).g)
