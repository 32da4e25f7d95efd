"""Time-domain kernel of S(x) and checks against its Laplace transform.

For sigma = a s^2 + b s + c with a > 0 the operator S(x) is convolution with

    S(x, t) = exp(-alpha t) / (2 tau) * J0(beta * sqrt(tau^2 x^2 - t^2)),   |t| < x tau,

and zero elsewhere, where tau = sqrt(a), alpha = b / (2a), beta^2 = b^2/(4a^2) - c/a.
J0 is summed as a series in beta^2 r^2 so a negative beta^2 needs no complex numbers.
For a = 0 the kernel is not a function and S(x) is represented by its power series in s.
"""

from __future__ import annotations

import cmath
import csv
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, TextIO

import numpy as np
from scipy import integrate

from .trigring import _sinhc


class KernelError(ValueError):
    pass


class QuadratureError(ArithmeticError):
    pass


def j0_series(y: float, rtol: float = 1e-17, max_terms: int = 2000) -> float:
    """J0(z) with y = z^2, i.e. sum_k (-y/4)^k / (k!)^2; y < 0 gives I0(sqrt(-y))."""
    q = -y / 4.0
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        term *= q / (k * k)
        total += term
        if k > abs(q) ** 0.5 + 2 and abs(term) <= rtol * max(abs(total), 1e-300):
            return total
        if k >= max_terms:
            raise ArithmeticError(f"J0 series did not converge for y = {y}")


@dataclass(frozen=True)
class KernelParams:
    a: float
    b: float
    c: float

    @classmethod
    def of(cls, a, b, c) -> "KernelParams":
        a, b, c = (float(Fraction(v)) for v in (a, b, c))
        if a <= 0:
            raise KernelError("the kernel S(x, t) needs a > 0")
        return cls(a, b, c)

    @property
    def tau(self) -> float:
        return math.sqrt(self.a)

    @property
    def alpha(self) -> float:
        return self.b / (2 * self.a)

    @property
    def beta2(self) -> float:
        return self.b * self.b / (4 * self.a * self.a) - self.c / self.a

    def sigma(self, s: complex) -> complex:
        return self.a * s * s + self.b * s + self.c


def s_kernel(x: float, t: float, a, b, c) -> float:
    k = KernelParams.of(a, b, c)
    return _kernel(k, x, t)


def _kernel(k: KernelParams, x: float, t: float) -> float:
    half = x * k.tau
    if abs(t) >= half:
        return 0.0
    r2 = half * half - t * t
    return math.exp(-k.alpha * t) / (2 * k.tau) * j0_series(k.beta2 * r2)


@dataclass
class KernelSample:
    x: float
    grid: np.ndarray
    values: np.ndarray
    support: float

    def support_violations(self) -> int:
        outside = np.abs(self.grid) >= self.support
        return int(np.count_nonzero(self.values[outside]))

    def write_csv(self, fh: TextIO) -> None:
        w = csv.writer(fh)
        w.writerow(["t", "S"])
        for t, v in zip(self.grid, self.values):
            w.writerow([f"{t:.12g}", f"{v:.12g}"])


def sample_kernel(x: float, a, b, c, points: int = 10_000, pad: float = 0.5) -> KernelSample:
    k = KernelParams.of(a, b, c)
    half = x * k.tau
    grid = np.linspace(-half - pad, half + pad, points)
    values = np.array([_kernel(k, x, float(t)) for t in grid])
    return KernelSample(x, grid, values, half)


def closed_form(x: float, s0: complex, a, b, c) -> complex:
    """sinh(x sqrt(sigma)) / sqrt(sigma) at s0, with limit x at sigma = 0."""
    sig = float(Fraction(a)) * s0 * s0 + float(Fraction(b)) * s0 + float(Fraction(c))
    return _sinhc(x, cmath.sqrt(sig))


def laplace_numeric(x: float, s0: complex, a, b, c, nodes: Optional[int] = None) -> complex:
    """Integral of exp(-s0 t) S(x, t) over the support.

    Adaptive quadrature by default; ``nodes`` switches to a fixed Gauss-Legendre rule.
    """
    k = KernelParams.of(a, b, c)
    half = x * k.tau
    s0 = complex(s0)
    if half == 0:
        return 0j

    def f(t):
        return cmath.exp(-s0 * t) * _kernel(k, x, t)

    if nodes is not None:
        t, w = np.polynomial.legendre.leggauss(nodes)
        return complex(sum(wi * f(half * ti) for ti, wi in zip(t, w)) * half)
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(f, -half, half, complex_func=True, epsabs=1e-12, epsrel=1e-12, limit=200)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(str(exc)) from None
    return complex(val)


def s_series(x: float, order: int, b, c, terms: Optional[int] = None) -> list[float]:
    """Coefficients of s^0..s^order in sum_k sigma^k x^(2k+1)/(2k+1)!, sigma = b s + c."""
    b, c = float(Fraction(b)), float(Fraction(c))
    if x == 0:
        return [0.0] * (order + 1)
    kmax = terms if terms is not None else _series_terms(x, abs(b) + abs(c), order)
    coeffs = [0.0] * (order + 1)
    for k in range(kmax + 1):
        base = x ** (2 * k + 1) / math.factorial(2 * k + 1)
        for j in range(min(k, order) + 1):
            coeffs[j] += math.comb(k, j) * b**j * c ** (k - j) * base
    return coeffs


def _series_terms(x: float, scale: float, order: int) -> int:
    k = order
    while k < 400:
        if (scale * x * x + 1) ** k * x / math.factorial(2 * k + 1) < 1e-18 and k > order:
            return k
        k += 1
    return k


def series_eval(coeffs: Iterable[float], s: complex) -> complex:
    return complex(np.polynomial.polynomial.polyval(s, list(coeffs)))


@dataclass
class AgreementRow:
    x: float
    s0: complex
    numeric: complex
    exact: complex
    error: float
    passed: bool


def transform_grid(
    a, b, c, xs=(0.5, 1.0, 2.0), s0s=(0, 1, 2 + 1j, -1 + 3j), tol: float = 1e-4, nodes: Optional[int] = None
) -> list[AgreementRow]:
    rows = []
    for x in xs:
        for s0 in s0s:
            num = laplace_numeric(x, s0, a, b, c, nodes=nodes)
            ex = closed_form(x, complex(s0), a, b, c)
            err = abs(num - ex)
            rows.append(AgreementRow(x, complex(s0), num, ex, err, err < tol))
    return rows


@dataclass
class SeriesRow:
    order: int
    s: complex
    residual: float


def series_residuals(x: float, b, c, orders=range(0, 8), points=(0.1, 0.2 + 0.1j, -0.15)) -> list[SeriesRow]:
    """Truncation residual of s_series against the closed form with sigma = b s + c."""
    rows = []
    for order in orders:
        coeffs = s_series(x, order, b, c)
        worst, at = 0.0, 0j
        for s in points:
            r = abs(series_eval(coeffs, s) - closed_form(x, complex(s), 0, b, c))
            if r >= worst:
                worst, at = r, complex(s)
        rows.append(SeriesRow(order, at, worst))
    return rows
