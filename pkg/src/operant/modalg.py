"""Matrices over k[G_Q], Hermite forms and the torsion/free split of presented modules.

A presentation P (m x n) defines the module generated by v_1..v_n subject to P v = 0.
Column operations P V = [L1 | 0] split it as coker(L1) + a free part of rank n - k;
L1 has full column rank k, so coker(L1) is torsion and vanishes iff the row Hermite
form of L1 has unit pivots. Polynomial torsion (common zeros of the k x k minors
that a rational coefficient field cannot see) is probed at the roots of the common
denominator of a Bezout certificate for those minors.
"""

from __future__ import annotations

import cmath
import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bezout import gcd_pair, ideal_gcd
from .bezout.lift import LiftedElement, LiftError, bezout_lift
from .coeff import Poly, PoleError, RootFindingError, find_roots, poly_lcm
from .trigring import TrigElement, TrigRing, exact_div, is_unit, laplace_eval, mul

logger = logging.getLogger(__name__)


class RingMatrix:
    """Immutable m x n matrix of TrigElements sharing sigma and ell."""

    __slots__ = ("rows", "ring")

    def __init__(self, rows: Sequence[Sequence[TrigElement]], ring: Optional[TrigRing] = None):
        rows = tuple(tuple(r) for r in rows)
        if rows and len({len(r) for r in rows}) != 1:
            raise ValueError("ragged matrix")
        if ring is None:
            if not rows or not rows[0]:
                raise ValueError("empty matrix needs an explicit ring")
            first = rows[0][0]
            ring = TrigRing(first.sigma, first.ell)
        for r in rows:
            for e in r:
                if e.sigma != ring.sigma or e.ell != ring.ell:
                    raise ValueError("matrix entries carry different sigma/ell tags")
        self.rows = rows
        self.ring = ring

    @classmethod
    def zeros(cls, ring: TrigRing, m: int, n: int) -> "RingMatrix":
        z = ring.zero()
        return cls([[z] * n for _ in range(m)], ring)

    @classmethod
    def identity(cls, ring: TrigRing, n: int) -> "RingMatrix":
        one, z = ring.scalar(1), ring.zero()
        return cls([[one if i == j else z for j in range(n)] for i in range(n)], ring)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: "RingMatrix") -> "RingMatrix":
        m, k = self.shape
        k2, n = other.shape
        if k != k2:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = []
        for i in range(m):
            row = []
            for j in range(n):
                acc = self.ring.zero()
                for t in range(k):
                    a, b = self.rows[i][t], other.rows[t][j]
                    if not a.is_zero() and not b.is_zero():
                        acc = acc + mul(a, b)
                row.append(acc)
            out.append(row)
        return RingMatrix(out, self.ring)

    def __sub__(self, other: "RingMatrix") -> "RingMatrix":
        return RingMatrix([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)], self.ring)

    def __eq__(self, other):
        return isinstance(other, RingMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def transpose(self) -> "RingMatrix":
        m, n = self.shape
        return RingMatrix([[self.rows[i][j] for i in range(m)] for j in range(n)], self.ring)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RingMatrix":
        return RingMatrix([[self.rows[i][j] for j in cols] for i in rows], self.ring)

    def is_zero(self) -> bool:
        return all(e.is_zero() for r in self.rows for e in r)

    def is_identity(self) -> bool:
        m, n = self.shape
        return m == n and self == RingMatrix.identity(self.ring, n)

    def evaluate(self, z) -> np.ndarray:
        m, n = self.shape
        return np.array([[laplace_eval(e, z) for e in r] for r in self.rows], dtype=complex).reshape(m, n)

    def to_json(self) -> list:
        return [[e.to_json() for e in r] for r in self.rows]

    @classmethod
    def from_json(cls, data, ring: Optional[TrigRing] = None) -> "RingMatrix":
        return cls([[TrigElement.from_json(e) for e in r] for r in data], ring)

    def __repr__(self):
        return "[" + "; ".join(", ".join(repr(e) for e in r) for r in self.rows) + "]"


def determinant(M: RingMatrix) -> TrigElement:
    """Exact determinant by cofactor expansion (meant for small matrices)."""
    m, n = M.shape
    if m != n:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return M.ring.scalar(1)
    if n == 1:
        return M[0, 0]
    total = M.ring.zero()
    for j in range(n):
        e = M[0, j]
        if e.is_zero():
            continue
        minor = M.submatrix(range(1, n), [c for c in range(n) if c != j])
        term = mul(e, determinant(minor))
        total = total + term if j % 2 == 0 else total - term
    return total


def canonical_associate(p: TrigElement) -> TrigElement:
    """Fixed representative of the associate class of p."""
    if p.is_zero():
        return p
    return gcd_pair(p, p.zero()).g


# -- Hermite ----------------------------------------------------------------------------


class _RowReducer:
    """Mutable working copy of H with U and U^-1 kept in step."""

    def __init__(self, P: RingMatrix):
        self.ring = P.ring
        m, _ = P.shape
        self.H = [list(r) for r in P.rows]
        eye = RingMatrix.identity(self.ring, m).rows
        self.U = [list(r) for r in eye]
        self.Ui = [list(r) for r in eye]

    def swap(self, i: int, j: int) -> None:
        if i == j:
            return
        for M in (self.H, self.U):
            M[i], M[j] = M[j], M[i]
        for row in self.Ui:
            row[i], row[j] = row[j], row[i]

    def addmul(self, i: int, r: int, t: TrigElement) -> None:
        """row_i += t row_r."""
        for M in (self.H, self.U):
            M[i] = [a + mul(t, b) if not b.is_zero() else a for a, b in zip(M[i], M[r])]
        for row in self.Ui:
            if not row[i].is_zero():
                row[r] = row[r] - mul(row[i], t)

    def block(self, r: int, i: int, blk, blk_inv) -> None:
        (a, b), (c, d) = blk
        for M in (self.H, self.U):
            x, y = M[r], M[i]
            M[r] = [mul(a, u) + mul(b, v) for u, v in zip(x, y)]
            M[i] = [mul(c, u) + mul(d, v) for u, v in zip(x, y)]
        (a2, b2), (c2, d2) = blk_inv
        for row in self.Ui:
            u, v = row[r], row[i]
            row[r] = mul(u, a2) + mul(v, c2)
            row[i] = mul(u, b2) + mul(v, d2)

    def result(self):
        R = self.ring
        return RingMatrix(self.U, R), RingMatrix(self.Ui, R), RingMatrix(self.H, R)


def hermite_full(P: RingMatrix):
    """Row echelon form with tracked transforms: returns (U, U^-1, H, pivots), U P = H."""
    m, n = P.shape
    if m == 0 or n == 0:
        raise ValueError("hermite needs a nonempty matrix")
    red = _RowReducer(P)
    H = red.H
    pivots = []
    r = 0
    for j in range(n):
        if r >= m:
            break
        cand = [i for i in range(r, m) if not H[i][j].is_zero()]
        if not cand:
            continue
        piv = min(cand, key=lambda i: (H[i][j].norm(), i))
        red.swap(r, piv)
        for i in range(r + 1, m):
            q = H[i][j]
            if q.is_zero():
                continue
            p = H[r][j]
            t = exact_div(q, p)
            if t is not None:
                red.addmul(i, r, -t)
                continue
            cert = gcd_pair(p, q)
            a, b, g = cert.cofactor_a, cert.cofactor_b, cert.g
            pg, qg = exact_div(p, g), exact_div(q, g)
            red.block(r, i, ((a, b), (-qg, pg)), ((pg, -b), (qg, a)))
        pivots.append((r, j))
        r += 1
    U, Ui, Hm = red.result()
    return U, Ui, Hm, pivots


def hermite(P: RingMatrix) -> tuple[RingMatrix, RingMatrix]:
    U, _, H, _ = hermite_full(P)
    return U, H


# -- decomposition -----------------------------------------------------------------------


@dataclass
class Decomposition:
    P: RingMatrix
    U: RingMatrix
    U_inv: RingMatrix
    H: RingMatrix
    V: RingMatrix
    V_inv: RingMatrix
    generic_rank: int
    torsion_invariants: list
    free_rank: int
    polynomial_torsion: list = field(default_factory=list)
    left_inverse: Optional[RingMatrix] = None

    @property
    def torsion_free(self) -> bool:
        return not self.torsion_invariants and not self.polynomial_torsion

    @property
    def verdict(self) -> str:
        return "torsion_free_and_free" if self.torsion_free else "has_torsion"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "generic_rank": self.generic_rank,
            "free_rank": self.free_rank,
            "torsion_invariants": [t.to_json() for t in self.torsion_invariants],
            "polynomial_torsion_zeros": [[z.real, z.imag] for z in self.polynomial_torsion],
            "H": self.H.to_json(),
        }


def _triangular_inverse(T: list[list[TrigElement]], ring: TrigRing) -> Optional[list]:
    """Inverse of an upper triangular matrix with unit diagonal entries."""
    k = len(T)
    one = ring.scalar(1)
    inv_diag = []
    for i in range(k):
        d = exact_div(one, T[i][i])
        if d is None:
            return None
        inv_diag.append(d)
    X = [[ring.zero() for _ in range(k)] for _ in range(k)]
    for i in reversed(range(k)):
        X[i][i] = inv_diag[i]
        for j in range(i + 1, k):
            acc = ring.zero()
            for t in range(i + 1, j + 1):
                acc = acc + mul(T[i][t], X[t][j])
            X[i][j] = -mul(inv_diag[i], acc)
    return X


def _minors(P: RingMatrix, k: int, limit: int = 400) -> Optional[list]:
    m, n = P.shape
    out = []
    for rows in itertools.combinations(range(m), k):
        for cols in itertools.combinations(range(n), k):
            out.append(determinant(P.submatrix(rows, cols)))
            if len(out) > limit:
                return None
    return out


def _polynomial_torsion(P: RingMatrix, k: int, tol: float = 1e-8) -> list:
    """Common zeros of the k x k minors located at roots of a certificate denominator."""
    if k == 0 or any(not e.has_polynomial_coeffs() for r in P.rows for e in r):
        return []
    minors = _minors(P, k)
    if minors is None:
        logger.warning("too many minors for the polynomial torsion probe; skipped")
        return []
    minors = [x for x in minors if not x.is_zero()]
    cert = ideal_gcd(minors)
    delta = Poly.constant(1, P.ring.var)
    for c in cert.cofactors + (cert.g,):
        delta = poly_lcm(delta, c.denominator_lcm())
    if delta.degree == 0:
        return []
    try:
        roots = find_roots(delta)
    except RootFindingError:
        roots = [complex(r) for r in np.roots(delta.float_coeffs()[::-1])]
    found = []
    for z in roots:
        vals = [abs(laplace_eval(x, z)) for x in minors]
        if max(vals) < tol * max(1.0, abs(z)):
            if all(abs(z - f) > 1e-8 for f in found):
                found.append(z)
    return found


def decompose(P: RingMatrix) -> Decomposition:
    """Torsion/free split of the module presented by P."""
    ring = P.ring
    m, n = P.shape
    if P.is_zero():
        eye = RingMatrix.identity(ring, n)
        eye_m = RingMatrix.identity(ring, m)
        return Decomposition(P, eye_m, eye_m, P, eye, eye, 0, [], n)
    U, Ui, H, _ = hermite_full(P)
    # column operations: (U_c P^T = H_c)^T gives P V = [L1 | 0]
    Uc, Uci, Hc, piv_c = hermite_full(P.transpose())
    V, V_inv = Uc.transpose(), Uci.transpose()
    k = len(piv_c)
    L1 = Hc.transpose().submatrix(range(m), range(k))
    UL, _, HL, pivL = hermite_full(L1)
    T = [list(HL.rows[i][:k]) for i in range(k)]
    torsion = [canonical_associate(T[i][i]) for i in range(k) if not is_unit(T[i][i])]
    left_inv = None
    if not torsion:
        Tinv = _triangular_inverse(T, ring)
        X = RingMatrix(Tinv, ring) @ UL.submatrix(range(k), range(m))
        left_inv = X
    poly_t = _polynomial_torsion(P, k) if not torsion else []
    return Decomposition(P, U, Ui, H, V, V_inv, k, torsion, n - k, poly_t, left_inv)


# -- flat outputs -------------------------------------------------------------------------


def evaluate(entry, z) -> complex:
    if isinstance(entry, LiftedElement):
        return entry(z)
    return laplace_eval(entry, z)


@dataclass
class FlatParametrization:
    """basis[j] = sum_i basis_coeffs[j][i] v_i and v_i = sum_j reconstruction[i][j] y_j."""

    basis_coeffs: list
    reconstruction: list
    kind: str
    lift: object = None
    exact_certificate: Optional[RingMatrix] = None

    @property
    def free_rank(self) -> int:
        return len(self.basis_coeffs)

    def residuals(self, P: RingMatrix, points: Sequence[complex]) -> dict:
        """max |B G - I| and the part of I - G B outside the row space of P at each point."""
        worst_bg, worst_mod = 0.0, 0.0
        m, n = P.shape
        for z in points:
            B = np.array([[evaluate(e, z) for e in row] for row in self.basis_coeffs], dtype=complex).reshape(-1, n)
            G = np.array([[evaluate(e, z) for e in row] for row in self.reconstruction], dtype=complex).reshape(n, -1)
            r = B.shape[0]
            worst_bg = max(worst_bg, float(np.max(np.abs(B @ G - np.eye(r)), initial=0.0)))
            R = np.eye(n) - G @ B
            Ph = P.evaluate(z)
            if Ph.size and np.any(Ph):
                _, sv, vh = np.linalg.svd(Ph)
                rank = int(np.sum(sv > 1e-10 * sv[0]))
                basis = vh[:rank].conj().T
                R = R - R @ basis @ basis.conj().T
            worst_mod = max(worst_mod, float(np.max(np.abs(R), initial=0.0)))
        return {"basis_roundtrip": worst_bg, "reconstruction_modulo_rows": worst_mod}

    def to_json(self) -> dict:
        def enc(e):
            return e.to_json()

        return {
            "kind": self.kind,
            "basis": [[enc(e) for e in row] for row in self.basis_coeffs],
            "reconstruction": [[enc(e) for e in row] for row in self.reconstruction],
        }


def flat_output(P: RingMatrix, dec: Optional[Decomposition] = None) -> Optional[FlatParametrization]:
    """A basis of the free module presented by P, or None when torsion is present."""
    dec = dec or decompose(P)
    if not dec.torsion_free:
        logger.info("flat_output: module has torsion, no basis")
        return None
    m, n = P.shape
    ring = P.ring
    if dec.generic_rank == 0:
        eye = RingMatrix.identity(ring, n)
        return FlatParametrization([list(r) for r in eye.rows], [list(r) for r in eye.rows], "identity")
    if m == 1 and n == 2:
        p1, p2 = P[0, 0], -P[0, 1]
        if p1.has_polynomial_coeffs() and p2.has_polynomial_coeffs():
            try:
                lift = bezout_lift(p1, p2)
            except LiftError:
                return None
            if not lift.coprime:
                return None
            q1, q2 = lift.lifted_a, lift.lifted_b
            # relation p1 w1 = p2 w2; y = q2 w1 + q1 w2, w1 = p2 y, w2 = p1 y
            return FlatParametrization([[q2, q1]], [[p2], [p1]], "lift", lift=lift)
    k = dec.generic_rank
    basis = [list(dec.V_inv.rows[j]) for j in range(k, n)]
    recon = [list(dec.V.rows[i][k:]) for i in range(n)]
    # exact certificate: I - G B = (V[:, :k] X) P
    G = RingMatrix(recon, ring)
    B = RingMatrix(basis, ring)
    cert = dec.V.submatrix(range(n), range(k)) @ dec.left_inverse
    if RingMatrix.identity(ring, n) - G @ B != cert @ P:
        raise ArithmeticError("flat output certificate failed")
    return FlatParametrization(basis, recon, "hermite", exact_certificate=cert)


# -- spectral scan -------------------------------------------------------------------------


@dataclass
class SpectralProfile:
    points: list
    ranks: list
    errors: dict
    generic_rank: Optional[int]

    def to_json(self) -> dict:
        return {
            "points": [[z.real, z.imag] for z in self.points],
            "ranks": self.ranks,
            "errors": {str(k): v for k, v in self.errors.items()},
            "generic_rank": self.generic_rank,
        }


def numeric_rank(M: np.ndarray, tol: float = 1e-8) -> int:
    if M.size == 0:
        return 0
    sv = np.linalg.svd(M, compute_uv=False)
    thresh = tol * max(1.0, float(sv[0]))
    return int(np.sum(sv > thresh))


def spectral_scan(P: RingMatrix, points: Sequence[complex], tol: float = 1e-8) -> SpectralProfile:
    ranks, errors = [], {}
    for idx, z in enumerate(points):
        try:
            ranks.append(numeric_rank(P.evaluate(complex(z)), tol))
        except PoleError as exc:
            ranks.append(None)
            errors[idx] = str(exc)
    valid = [r for r in ranks if r is not None]
    generic = Counter(valid).most_common(1)[0][0] if valid else None
    return SpectralProfile([complex(z) for z in points], ranks, errors, generic)


def sample_points(n: int, seed: int, box: float = 5.0) -> list[complex]:
    rng = np.random.default_rng(seed)
    return [complex(x, y) for x, y in rng.uniform(-box, box, size=(n, 2))]


def locate_zeros(
    p: TrigElement,
    re_range=(-60.0, 10.0),
    im_range=(-10.0, 10.0),
    grid: int = 15,
    tol: float = 1e-12,
    max_iter: int = 60,
) -> list[complex]:
    """Zeros of the Laplace transform of p by finite-difference Newton from grid seeds."""

    def f(z):
        return laplace_eval(p, z)

    found: list[complex] = []
    for x in np.linspace(*re_range, grid):
        for y in np.linspace(*im_range, grid):
            z = complex(x, y)
            try:
                for _ in range(max_iter):
                    hstep = 1e-6 * max(1.0, abs(z))
                    fz = f(z)
                    d = (f(z + hstep) - f(z - hstep)) / (2 * hstep)
                    if d == 0:
                        break
                    dz = fz / d
                    z -= dz
                    if abs(dz) < tol * max(1.0, abs(z)):
                        break
                    if abs(z) > 1e6:
                        break
                else:
                    continue
            except (PoleError, OverflowError, ZeroDivisionError):
                continue
            if abs(z) > 1e6 or abs(f(z)) > 1e-8 * max(1.0, _scale(p, z)):
                continue
            if not (re_range[0] - 1 <= z.real <= re_range[1] + 1 and im_range[0] - 1 <= z.imag <= im_range[1] + 1):
                continue
            if abs(z.imag) < 1e-10 * max(1.0, abs(z.real)):
                z = complex(z.real, 0.0)
            if all(abs(z - w) > 1e-6 * max(1.0, abs(z)) for w in found):
                found.append(z)
    return sorted(found, key=abs)


def _scale(p: TrigElement, z: complex) -> float:
    w = cmath.sqrt(p.sigma.value(z))
    return sum(abs(cmath.cosh(float(a * p.ell) * w)) for a in p.indices()) or 1.0


@dataclass
class VerdictCheck:
    torsion_free: bool
    generic_rank: Optional[int]
    random_profile: SpectralProfile
    probes: list
    probe_ranks: list
    rank_drop: bool

    @property
    def consistent(self) -> bool:
        return self.torsion_free != self.rank_drop

    def to_json(self) -> dict:
        return {
            "torsion_free": self.torsion_free,
            "generic_rank": self.generic_rank,
            "random_ranks": self.random_profile.ranks,
            "probes": [[z.real, z.imag] for z in self.probes],
            "probe_ranks": self.probe_ranks,
            "rank_drop": self.rank_drop,
            "consistent": self.consistent,
        }


def verdict_check(P: RingMatrix, dec: Decomposition, samples: int = 40, seed: int = 0, tol: float = 1e-8) -> VerdictCheck:
    """Spectral cross-check: rank drops exactly when the decomposition finds torsion."""
    profile = spectral_scan(P, sample_points(samples, seed), tol)
    probes: list[complex] = list(dec.polynomial_torsion)
    for t in dec.torsion_invariants:
        probes.extend(locate_zeros(t)[:3])
    probe_profile = spectral_scan(P, probes, tol) if probes else SpectralProfile([], [], {}, None)
    generic = dec.generic_rank
    drop = any(r is not None and r < generic for r in profile.ranks + probe_profile.ranks)
    return VerdictCheck(dec.torsion_free, generic, profile, probes, probe_profile.ranks, drop)
