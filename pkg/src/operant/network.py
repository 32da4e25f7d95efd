"""Boundary-coupled networks of second order systems as presented modules.

Branch i obeys w_i' = A_i w_i + B_i u on [0, q_i ell] with det(lambda I - A_i) =
lambda^2 - sigma. Every solution is w_i(x) = Phi(x - xi_i) w_i(xi_i) + Psi(x - xi_i) u,
so the boundary rows

    sum_i L_i w_i(0) + R_i w_i(q_i ell) + D u = 0

become ring relations among the values w_i(xi_i) and u.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .coeff import CoeffError, Poly, RatFun, SigmaSpec, parse_rational
from .modalg import RingMatrix
from .trigring import TrigElement, TrigRing, is_unit, mul

logger = logging.getLogger(__name__)

_FORBIDDEN_KEYS = ("Q", "integral_terms", "integrals")


class NetworkValidationError(ValueError):
    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def _poly_matrix(data, var: str, name: str) -> list[list[Poly]]:
    if not isinstance(data, list) or any(not isinstance(r, list) for r in data):
        raise NetworkValidationError([f"{name} must be a list of rows"])
    try:
        return [[Poly.from_json(e, var) for e in row] for row in data]
    except (CoeffError, ValueError, TypeError) as exc:
        raise NetworkValidationError([f"{name}: {exc}"]) from None


def _shape(M: list) -> tuple[int, int]:
    return len(M), (len(M[0]) if M else 0)


def _rectangular(M: list) -> bool:
    return len({len(r) for r in M}) <= 1


@dataclass
class Branch:
    A: list
    B: list
    length_ratio: Fraction

    def to_json(self) -> dict:
        return {
            "A": [[p.to_json() for p in r] for r in self.A],
            "B": [[p.to_json() for p in r] for r in self.B],
            "length_ratio": str(self.length_ratio),
        }


@dataclass
class NetworkSpec:
    sigma: SigmaSpec
    ell: Fraction
    branches: list
    L: list
    R: list
    D: list

    @property
    def inputs(self) -> int:
        return _shape(self.D)[1]

    @property
    def rows(self) -> int:
        return len(self.D)

    @property
    def ring(self) -> TrigRing:
        return TrigRing(self.sigma, self.ell)

    @classmethod
    def from_json(cls, data: dict) -> "NetworkSpec":
        if not isinstance(data, dict):
            raise NetworkValidationError(["network spec must be a JSON object"])
        for k in _FORBIDDEN_KEYS:
            if k in data:
                raise NetworkValidationError([f"integral boundary terms ({k!r}) are not supported"])
        missing = [k for k in ("sigma", "branches", "L", "R", "D") if k not in data]
        if missing:
            raise NetworkValidationError([f"missing field {k!r}" for k in missing])
        try:
            sigma = SigmaSpec.from_json(data["sigma"])
            ell = parse_rational(data.get("ell", "1"))
        except (CoeffError, ValueError) as exc:
            raise NetworkValidationError([str(exc)]) from None
        if sigma.mode != "polynomial":
            raise NetworkValidationError(["networks need sigma = a s^2 + b s + c"])
        var = sigma.var
        branches = []
        for i, b in enumerate(data["branches"]):
            try:
                ratio = parse_rational(b.get("length_ratio", "1"))
            except (CoeffError, ValueError) as exc:
                raise NetworkValidationError([f"branch {i}: length ratio must be rational ({exc})"]) from None
            A = _poly_matrix(b["A"], var, f"branch {i} A")
            B = _poly_matrix(b.get("B", [[], []]), var, f"branch {i} B")
            branches.append(Branch(A, B, ratio))
        L = [_poly_matrix(m, var, f"L[{i}]") for i, m in enumerate(data["L"])]
        R = [_poly_matrix(m, var, f"R[{i}]") for i, m in enumerate(data["R"])]
        D = _poly_matrix(data["D"], var, "D")
        return cls(sigma, ell, branches, L, R, D)

    def to_json(self) -> dict:
        enc = lambda M: [[p.to_json() for p in r] for r in M]  # noqa: E731
        return {
            "sigma": self.sigma.to_json(),
            "ell": str(self.ell),
            "branches": [b.to_json() for b in self.branches],
            "L": [enc(m) for m in self.L],
            "R": [enc(m) for m in self.R],
            "D": enc(self.D),
        }


def validate(spec: NetworkSpec) -> list[str]:
    """All problems found in a network description; raises NetworkValidationError if any."""
    errors = []
    sig = spec.sigma
    if sig.mode == "polynomial":
        if sig.a < 0:
            errors.append("sigma: leading coefficient a must be >= 0")
        if sig.a == 0 and sig.b == 0 and sig.c == 0:
            errors.append("sigma must be nonzero")
    if spec.ell <= 0:
        errors.append("ell must be positive")
    if not spec.branches:
        errors.append("at least one branch is required")
    sigma_poly = sig.as_ratfun().num
    q, m = _shape(spec.D)
    if not _rectangular(spec.D):
        errors.append("D is not rectangular")
    if len(spec.L) != len(spec.branches) or len(spec.R) != len(spec.branches):
        errors.append("L and R need one matrix per branch")
    for i, br in enumerate(spec.branches):
        if br.length_ratio <= 0:
            errors.append(f"branch {i}: length ratio must be positive")
        if _shape(br.A) != (2, 2) or not _rectangular(br.A):
            errors.append(f"branch {i}: A must be 2x2")
            continue
        (a11, a12), (a21, a22) = br.A
        if not (a11 + a22).is_zero():
            errors.append(f"branch {i}: trace(A) must vanish")
        if a11 * a22 - a12 * a21 != -sigma_poly:
            errors.append(f"branch {i}: det(A) must equal -sigma")
        bm = _shape(br.B)
        if bm[1] == 0:
            pass
        elif bm != (2, m) or not _rectangular(br.B):
            errors.append(f"branch {i}: B must be 2x{m}")
    for name, mats in (("L", spec.L), ("R", spec.R)):
        for i, M in enumerate(mats):
            if _shape(M) != (q, 2) or not _rectangular(M):
                errors.append(f"{name}[{i}] must be {q}x2")
    if errors:
        raise NetworkValidationError(errors)
    return errors


# -- transition matrices ---------------------------------------------------------------


def _k(p: Poly) -> RatFun:
    return RatFun(p)


def phi(A: list, dx, ring: TrigRing) -> RingMatrix:
    """A S_dx + I C_dx."""
    dx = Fraction(dx)
    S, C = ring.S(dx), ring.C(dx)
    rows = []
    for i in range(2):
        row = []
        for j in range(2):
            e = S.scale(_k(A[i][j])) if not A[i][j].is_zero() else ring.zero()
            if i == j:
                e = e + C
            row.append(e)
        rows.append(row)
    return RingMatrix(rows, ring)


def _inverse_2x2(A: list) -> list[list[RatFun]]:
    (a, b), (c, d) = [[_k(x) for x in r] for r in A]
    det = a * d - b * c
    if det.is_zero():
        raise ZeroDivisionError("A is singular (sigma = 0)")
    return [[d / det, -b / det], [-c / det, a / det]]


def psi(A: list, B: list, dx, ring: TrigRing) -> RingMatrix:
    """(Phi(dx) - I) A^-1 B; the integrals of Phi B never appear as generators."""
    m = _shape(B)[1]
    if m == 0:
        return RingMatrix([[], []], ring)
    Ainv = _inverse_2x2(A)
    AinvB = [[sum((Ainv[i][t] * _k(B[t][j]) for t in range(2)), RatFun.zero(ring.var)) for j in range(m)] for i in range(2)]
    F = phi(A, dx, ring)
    one = ring.scalar(1)
    rows = []
    for i in range(2):
        row = []
        for j in range(m):
            acc = ring.zero()
            for t in range(2):
                f = F[i, t] - (one if i == t else ring.zero())
                if not f.is_zero() and not AinvB[t][j].is_zero():
                    acc = acc + f.scale(AinvB[t][j])
            row.append(acc)
        rows.append(row)
    return RingMatrix(rows, ring)


# -- presentations ---------------------------------------------------------------------


@dataclass
class Presentation:
    """Relations P v = 0 among labeled generators v.

    ``to_original[i][j]`` expresses original generator i through current generator j and
    ``from_original[j][i]`` the reverse; both are the identity for an assembled matrix.
    """

    P: RingMatrix
    labels: list
    xi: list
    to_original: Optional[RingMatrix] = None
    from_original: Optional[RingMatrix] = None
    original_labels: list = field(default_factory=list)
    row_det: Optional[TrigElement] = None
    col_det: Optional[TrigElement] = None

    def to_json(self) -> dict:
        out = {"P": self.P.to_json(), "generators": self.labels, "xi": [str(x) for x in self.xi]}
        if self.to_original is not None:
            out["original_generators"] = self.original_labels
            out["to_original"] = self.to_original.to_json()
            out["from_original"] = self.from_original.to_json()
        return out


def _mat_to_ring(M: list, ring: TrigRing) -> list[list[TrigElement]]:
    return [[ring.scalar(_k(p)) for p in r] for r in M]


def assemble_presentation(spec: NetworkSpec, xi_choice: str = "right") -> Presentation:
    """Relation matrix with columns w_1(xi_1), ..., w_l(xi_l), u."""
    if xi_choice not in ("left", "right"):
        raise ValueError("xi_choice must be 'left' or 'right'")
    validate(spec)
    ring = spec.ring
    q, m = spec.rows, spec.inputs
    nb = len(spec.branches)
    cols = 2 * nb + m
    P = [[ring.zero() for _ in range(cols)] for _ in range(q)]
    Dk = _mat_to_ring(spec.D, ring)
    for r in range(q):
        for j in range(m):
            P[r][2 * nb + j] = Dk[r][j]
    xis = []
    labels = []
    for i, br in enumerate(spec.branches):
        qi = br.length_ratio
        xi = Fraction(0) if xi_choice == "left" else qi
        xis.append(xi)
        labels += [f"w{i + 1}_1", f"w{i + 1}_2"]
        L = RingMatrix(_mat_to_ring(spec.L[i], ring), ring)
        R = RingMatrix(_mat_to_ring(spec.R[i], ring), ring)
        block = _add(L @ phi(br.A, -xi, ring), R @ phi(br.A, qi - xi, ring))
        for r in range(q):
            for c in range(2):
                P[r][2 * i + c] = P[r][2 * i + c] + block[r, c]
        if m and _shape(br.B)[1]:
            inp = _add(L @ psi(br.A, br.B, -xi, ring), R @ psi(br.A, br.B, qi - xi, ring))
            for r in range(q):
                for j in range(m):
                    P[r][2 * nb + j] = P[r][2 * nb + j] + inp[r, j]
    labels += [f"u{j + 1}" for j in range(m)]
    return Presentation(RingMatrix(P, ring), labels, xis)


def _add(X: RingMatrix, Y: RingMatrix) -> RingMatrix:
    return RingMatrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(X.rows, Y.rows)], X.ring)


# -- reduction -------------------------------------------------------------------------


def _is_constant_unit(e: TrigElement) -> bool:
    return e.is_scalar() and not e.is_zero() and e.scalar_value().is_constant()


class _Reducer:
    def __init__(self, pres: Presentation):
        self.ring = ring = pres.P.ring
        self.P = [list(r) for r in pres.P.rows]
        n = len(pres.labels)
        eye = RingMatrix.identity(ring, n).rows
        self.V = [list(r) for r in eye]
        self.Vi = [list(r) for r in eye]
        self.labels = list(pres.labels)
        self.rows = list(range(len(self.P)))
        self.cols = list(range(n))
        self.row_det = ring.scalar(1)
        self.col_det = ring.scalar(1)

    def col_block(self, c1: int, c2: int, E, Einv) -> None:
        """New columns (c1, c2) = old columns times E; generators change by Einv."""
        (a, b), (c, d) = E
        for M in (self.P, self.V):
            for row in M:
                x, y = row[c1], row[c2]
                row[c1] = mul(x, a) + mul(y, c)
                row[c2] = mul(x, b) + mul(y, d)
        (a2, b2), (c2_, d2) = Einv
        x, y = self.Vi[c1], self.Vi[c2]
        self.Vi[c1] = [mul(a2, u) + mul(b2, v) for u, v in zip(x, y)]
        self.Vi[c2] = [mul(c2_, u) + mul(d2, v) for u, v in zip(x, y)]
        self.col_det = mul(self.col_det, mul(a, d) - mul(b, c))

    def col_addmul(self, j: int, k: int, t: TrigElement) -> None:
        """column j += t column k."""
        for M in (self.P, self.V):
            for row in M:
                if not row[k].is_zero():
                    row[j] = row[j] + mul(row[k], t)
        self.Vi[k] = [a - mul(t, b) if not b.is_zero() else a for a, b in zip(self.Vi[k], self.Vi[j])]

    def row_addmul(self, i: int, r: int, t: TrigElement) -> None:
        self.P[i] = [a + mul(t, b) if not b.is_zero() else a for a, b in zip(self.P[i], self.P[r])]

    def nonzeros(self, r: int) -> list[int]:
        return [c for c in self.cols if not self.P[r][c].is_zero()]

    def pass_a(self, pairs: dict) -> None:
        for r in list(self.rows):
            nz = self.nonzeros(r)
            if len(nz) != 2 or tuple(nz) not in pairs:
                continue
            if not all(_is_constant_unit(self.P[r][c]) for c in nz):
                continue
            c1, c2 = nz
            m1 = self.P[r][c1].scalar_value().constant_value()
            m2 = self.P[r][c2].scalar_value().constant_value()
            nrm = m1 * m1 + m2 * m2
            k = self.ring.scalar
            E = ((k(-m2), k(m1 / nrm)), (k(m1), k(m2 / nrm)))
            Einv = ((k(-m2 / nrm), k(m1 / nrm)), (k(m1), k(m2)))
            self.col_block(c1, c2, E, Einv)
            b = pairs[tuple(nz)]
            self.labels[c1] = f"omega{b}"
            self.labels[c2] = f"rho{b}"

    def pass_b(self) -> None:
        while True:
            best = None
            for r in self.rows:
                nz = self.nonzeros(r)
                units = [c for c in nz if _is_constant_unit(self.P[r][c])]
                if units and (best is None or len(nz) < best[0]):
                    best = (len(nz), r, units[0])
            if best is None:
                return
            _, r, c = best
            inv = self.P[r][c].scalar_value().inverse()
            for i in self.rows:
                if i != r and not self.P[i][c].is_zero():
                    self.row_addmul(i, r, -self.P[i][c].scale(inv))
            for j in self.cols:
                if j != c and not self.P[r][j].is_zero():
                    self.col_addmul(j, c, -self.P[r][j].scale(inv))
            self.rows.remove(r)
            self.cols.remove(c)


def reduce_example(pres: Presentation) -> Presentation:
    """Unimodular change of generators and elimination of unit pivots.

    Rows mu_1 w_1 + mu_2 w_2 = 0 on one branch pair with constant mu get the generators
    (omega, rho), rho = mu_1 w_1 + mu_2 w_2; then every constant pivot is cleared by row
    and column operations and dropped together with its generator.
    """
    red = _Reducer(pres)
    nb = len(pres.xi)
    pairs = {(2 * i, 2 * i + 1): i + 1 for i in range(nb)}
    red.pass_a(pairs)
    red.pass_b()
    ring = red.ring
    P = RingMatrix([[red.P[r][c] for c in red.cols] for r in red.rows], ring) if red.rows else None
    if P is None:
        P = RingMatrix([], ring)
    n = len(pres.labels)
    to_orig = RingMatrix([[red.V[i][c] for c in red.cols] for i in range(n)], ring)
    from_orig = RingMatrix([list(red.Vi[c]) for c in red.cols], ring)
    assert is_unit(red.col_det), "column transform lost unimodularity"
    return Presentation(
        P,
        [red.labels[c] for c in red.cols],
        pres.xi,
        to_orig,
        from_orig,
        list(pres.labels),
        red.row_det,
        red.col_det,
    )


# -- worked systems --------------------------------------------------------------------


def companion(sigma: SigmaSpec) -> list[list[Poly]]:
    one = Poly.constant(1, sigma.var)
    zero = Poly.constant(0, sigma.var)
    return [[zero, one], [sigma.as_ratfun().num, zero]]


def coupled_pair_spec(mu=(1, 2, 3, 5), n=(1, 2), sigma: Optional[SigmaSpec] = None, ell=1) -> NetworkSpec:
    """Two strings joined at x = 0 by a shared input, each with a Robin end.

    Rows: mu_i1 w_i(l_i) + mu_i2 w_i'(l_i) = 0 and w_i(0) - u = 0.
    """
    sigma = sigma or SigmaSpec.polynomial(0, 1, 0)
    var = sigma.var
    P = lambda x: Poly.constant(x, var)  # noqa: E731
    m11, m12, m21, m22 = mu
    A = companion(sigma)
    branches = [Branch(A, [[P(0)], [P(0)]], Fraction(n[0])), Branch(A, [[P(0)], [P(0)]], Fraction(n[1]))]
    z = P(0)
    R1 = [[P(m11), P(m12)], [z, z], [z, z], [z, z]]
    L1 = [[z, z], [P(1), z], [z, z], [z, z]]
    R2 = [[z, z], [z, z], [P(m21), P(m22)], [z, z]]
    L2 = [[z, z], [z, z], [z, z], [P(1), z]]
    D = [[z], [P(-1)], [z], [P(-1)]]
    return NetworkSpec(sigma, Fraction(ell), branches, [L1, L2], [R1, R2], D)


def pinned_string_spec(sigma: Optional[SigmaSpec] = None, ell=1) -> NetworkSpec:
    """One string clamped at both ends; the input never enters, so w'(0) is torsion."""
    sigma = sigma or SigmaSpec.polynomial(0, 1, 0)
    var = sigma.var
    P = lambda x: Poly.constant(x, var)  # noqa: E731
    z = P(0)
    br = Branch(companion(sigma), [[z], [z]], Fraction(1))
    L = [[P(1), z], [z, z]]
    R = [[z, z], [P(1), z]]
    D = [[z], [z]]
    return NetworkSpec(sigma, Fraction(ell), [br], [L], [R], D)
