"""Generator for minimal filtering algorithms at arbitrary sizes.

Builds the (B^T, G, A^T) matrix triple for F(m, r) from a set of distinct
rational evaluation points, optionally including the point at infinity.  The
construction is evaluation-interpolation of polynomial products, transposed
into filtering form:

  * A^T columns are Vandermonde power rows [1, p, p^2, ...] at each point;
    infinity contributes the leading-coefficient unit column.
  * G rows evaluate the filter polynomial at each point, divided by the
    Lagrange node weight f_i = prod_{j != i} (p_i - p_j); infinity contributes
    the unit row selecting the filter's leading coefficient.
  * B^T rows hold the ascending coefficients of the node polynomials
    N_i(x) = prod_{j != i} (x - p_j); infinity contributes the full master
    polynomial M(x) = prod_j (x - p_j).

This scaling convention keeps B^T and A^T integer-valued whenever the points
are integers (all node-weight divisions live in G) and makes A^T's first row
all ones across the finite points, matching the hand-tuned algorithms up to a
diagonal rescaling.

Everything here is exact; use verify_algorithm to self-check a generated
triple against the sliding-window definition before trusting it in floating
point.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .rational import RationalMatrix, as_fraction, correlate_valid_2d
from .winograd import WinogradAlgorithm


@dataclass(frozen=True)
class PointSet:
    """Distinct rational evaluation points, plus an optional point at infinity."""

    finite: Tuple[Fraction, ...]
    has_infinity: bool = True

    def __post_init__(self) -> None:
        pts = tuple(as_fraction(p) for p in self.finite)
        object.__setattr__(self, "finite", pts)
        if len(set(pts)) != len(pts):
            raise ValueError(f"evaluation points must be distinct, got {pts}")

    def __len__(self) -> int:
        return len(self.finite) + (1 if self.has_infinity else 0)

    def describe(self) -> str:
        parts = [str(p) for p in self.finite]
        if self.has_infinity:
            parts.append("oo")
        return " ".join(parts)


def default_points(m: int, r: int) -> PointSet:
    """Small reciprocal-paired points: 0, 1, -1, 2, -2, 1/2, -1/2, 4, -4, ...

    Returns m+r-2 finite points plus infinity.  Small magnitudes and
    reciprocal pairing limit the growth of transform matrix entries.
    """
    alpha = m + r - 1
    if alpha < 2:
        raise ValueError(f"need m+r-1 >= 2, got m={m} r={r}")
    need = alpha - 1
    pts = [Fraction(0)]
    exponents = [0]
    for e in range(1, need):
        exponents.extend((e, -e))
    for e in exponents:
        mag = Fraction(2) ** e
        pts.append(mag)
        pts.append(-mag)
        if len(pts) >= need:
            break
    return PointSet(finite=tuple(pts[:need]), has_infinity=True)


def _poly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def _node_poly(points: Sequence[Fraction], skip: Optional[int]) -> list:
    """Ascending coefficients of prod_{j != skip} (x - p_j)."""
    coeffs = [Fraction(1)]
    for j, p in enumerate(points):
        if j == skip:
            continue
        coeffs = _poly_mul(coeffs, [-p, Fraction(1)])
    return coeffs


def generate(m: int, r: int, points: Optional[PointSet] = None) -> WinogradAlgorithm:
    """Build an exact F(m, r) algorithm from m+r-1 evaluation points.

    points defaults to default_points(m, r).  The point count (infinity
    included) must equal m + r - 1.
    """
    if m < 1 or r < 1:
        raise ValueError(f"need m >= 1 and r >= 1, got m={m} r={r}")
    alpha = m + r - 1
    if points is None:
        points = default_points(m, r) if alpha >= 2 else PointSet((), has_infinity=True)
    if len(points) != alpha:
        raise ValueError(f"F({m},{r}) needs {alpha} points, got {len(points)}")

    finite = points.finite
    n_fin = len(finite)

    bt_rows = []
    g_rows = []
    for i, p in enumerate(finite):
        node = _node_poly(finite, skip=i)
        bt_rows.append(node + [Fraction(0)] * (alpha - len(node)))
        f_i = Fraction(1)
        for j, q in enumerate(finite):
            if j != i:
                f_i *= p - q
        g_rows.append([p ** k / f_i for k in range(r)])
    if points.has_infinity:
        master = _node_poly(finite, skip=None)
        bt_rows.append(master + [Fraction(0)] * (alpha - len(master)))
        g_rows.append([Fraction(1) if k == r - 1 else Fraction(0) for k in range(r)])

    at_rows = []
    for k in range(m):
        row = [p ** k for p in finite]
        if points.has_infinity:
            row.append(Fraction(1) if k == m - 1 else Fraction(0))
        at_rows.append(row)

    return WinogradAlgorithm(
        m=m, r=r,
        BT=RationalMatrix.from_rows(bt_rows),
        G=RationalMatrix.from_rows(g_rows),
        AT=RationalMatrix.from_rows(at_rows),
        flops_1d=None,
        name=f"F({m},{r})@[{points.describe()}]",
    )


def max_transform_magnitude(alg: WinogradAlgorithm) -> Fraction:
    """Largest absolute entry across B^T, G and A^T.

    A coarse conditioning indicator: entry growth with tile size is what
    eventually makes large tiles useless in low precision.
    """
    return max(alg.BT.max_abs(), alg.G.max_abs(), alg.AT.max_abs())


def _random_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-99, 99), rng.randint(1, 9))


def verify_algorithm(alg: WinogradAlgorithm, trials: int = 20, seed: int = 0) -> bool:
    """Exact self-check: 1D and 2D tiles must match the sliding-window answer.

    Runs `trials` random rational cases per form plus a full bilinear basis
    sweep in 1D (which alone is conclusive, products being bilinear).
    """
    rng = random.Random(seed)
    alpha = alg.alpha
    for i in range(alpha):
        for j in range(alg.r):
            d = RationalMatrix.from_rows([[1 if t == i else 0] for t in range(alpha)])
            g = RationalMatrix.from_rows([[1 if t == j else 0] for t in range(alg.r)])
            if not alg.verify_exact_1d(d, g):
                return False
    for _ in range(trials):
        d1 = RationalMatrix.column([_random_rational(rng) for _ in range(alpha)])
        g1 = RationalMatrix.column([_random_rational(rng) for _ in range(alg.r)])
        if not alg.verify_exact_1d(d1, g1):
            return False
        d2 = RationalMatrix.from_rows(
            [[_random_rational(rng) for _ in range(alpha)] for _ in range(alpha)])
        g2 = RationalMatrix.from_rows(
            [[_random_rational(rng) for _ in range(alg.r)] for _ in range(alg.r)])
        if alg.filter_tile_2d(d2, g2).entries != correlate_valid_2d(d2, g2).entries:
            return False
    return True


def dump_algorithm(alg: WinogradAlgorithm) -> str:
    """Plain-text rendering of the matrix triple, one row per line."""
    lines = [f"{alg.label}  m={alg.m}  r={alg.r}  alpha={alg.alpha}"]
    for title, mat in (("BT", alg.BT), ("G", alg.G), ("AT", alg.AT)):
        lines.append(f"{title}:")
        lines.append(mat.to_text())
    return "\n".join(lines) + "\n"
