"""Minimal-filtering convolution algorithms over exact rational matrices.

A ``WinogradAlgorithm`` packages the three transforms that compute m outputs
of an r-tap FIR filter with m + r - 1 general multiplications:

    y = AT @ [ (G @ g) * (BT @ d) ]        (1D, * is elementwise)

Nesting the same matrices row- and column-wise gives the 2D form used for
convolution layers:

    Y = AT @ [ (G @ g @ G.T) * (BT @ d @ B) ] @ A

All matrix entries are exact rationals so algorithm identities can be checked
with zero tolerance; floating-point variants are produced by ``to_array`` at
the last moment.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from .counters import OpCounter
from .rational import RationalMatrix, fir_valid


class TransformCountsUnknown(Exception):
    """Raised when per-transform flop counts were never profiled for a tile size."""


@dataclass(frozen=True)
class WinogradAlgorithm:
    """Exact matrices for computing F(m, r): m FIR outputs from an r-tap filter.

    flops_1d, when present, is (data, filter, inverse): the number of
    additions/multiplications a hand-scheduled implementation of each 1D
    transform needs.  None means the tile was never profiled and the derived
    2D counts are unavailable.
    """

    m: int
    r: int
    BT: RationalMatrix
    G: RationalMatrix
    AT: RationalMatrix
    flops_1d: Optional[Tuple[int, int, int]] = None
    name: str = ""

    def __post_init__(self) -> None:
        alpha = self.m + self.r - 1
        if self.BT.rows != alpha or self.BT.cols != alpha:
            raise ValueError(f"BT must be {alpha}x{alpha}, got {self.BT.rows}x{self.BT.cols}")
        if self.G.rows != alpha or self.G.cols != self.r:
            raise ValueError(f"G must be {alpha}x{self.r}, got {self.G.rows}x{self.G.cols}")
        if self.AT.rows != self.m or self.AT.cols != alpha:
            raise ValueError(f"AT must be {self.m}x{alpha}, got {self.AT.rows}x{self.AT.cols}")

    @property
    def alpha(self) -> int:
        """Tile size: input samples consumed per 1D application."""
        return self.m + self.r - 1

    @property
    def label(self) -> str:
        return self.name or f"F({self.m},{self.r})"

    def filter_tile_1d(self, d: RationalMatrix, g: RationalMatrix,
                       counter: Optional[OpCounter] = None) -> RationalMatrix:
        """Exact 1D minimal filtering: d is alpha x 1, g is r x 1, result m x 1."""
        if (d.rows, d.cols) != (self.alpha, 1):
            raise ValueError(f"data must be {self.alpha}x1, got {d.rows}x{d.cols}")
        if (g.rows, g.cols) != (self.r, 1):
            raise ValueError(f"filter must be {self.r}x1, got {g.rows}x{g.cols}")
        u = self.G @ g
        v = self.BT @ d
        if counter is not None:
            counter.add("mul", self.alpha)
        return self.AT @ u.hadamard(v)

    def filter_tile_2d(self, d: RationalMatrix, g: RationalMatrix,
                       counter: Optional[OpCounter] = None) -> RationalMatrix:
        """Exact 2D minimal filtering: d is alpha x alpha, g is r x r, result m x m."""
        return self.filter_tile_2d_rect(self, d, g, counter)

    def filter_tile_2d_rect(self, col_alg: "WinogradAlgorithm", d: RationalMatrix,
                            g: RationalMatrix, counter: Optional[OpCounter] = None) -> RationalMatrix:
        """2D nesting with possibly different algorithms per axis.

        self runs down the rows (height), col_alg across the columns (width).
        d is self.alpha x col_alg.alpha, g is self.r x col_alg.r, result
        self.m x col_alg.m.
        """
        if (d.rows, d.cols) != (self.alpha, col_alg.alpha):
            raise ValueError(
                f"data must be {self.alpha}x{col_alg.alpha}, got {d.rows}x{d.cols}")
        if (g.rows, g.cols) != (self.r, col_alg.r):
            raise ValueError(f"filter must be {self.r}x{col_alg.r}, got {g.rows}x{g.cols}")
        u = self.G @ g @ col_alg.G.transpose()
        v = self.BT @ d @ col_alg.BT.transpose()
        if counter is not None:
            counter.add("mul", self.alpha * col_alg.alpha)
        return self.AT @ u.hadamard(v) @ col_alg.AT.transpose()

    def transform_filter(self, g: RationalMatrix) -> RationalMatrix:
        """G g G^T: map an r x r filter tile into transform space (alpha x alpha)."""
        return self.G @ g @ self.G.transpose()

    def transform_data(self, d: RationalMatrix) -> RationalMatrix:
        """B^T d B: map an alpha x alpha data tile into transform space."""
        return self.BT @ d @ self.BT.transpose()

    def inverse_transform(self, t: RationalMatrix) -> RationalMatrix:
        """A^T t A: map an alpha x alpha product tile back to m x m outputs."""
        return self.AT @ t @ self.AT.transpose()

    def transform_flop_counts(self) -> Tuple[int, int, int]:
        """Per-tile 2D transform costs (data, filter, inverse), derived from 1D.

        A 2D transform applies the 1D pass twice.  The first pass runs once
        per input row, the second once per intermediate column, so:

            data:    beta' = beta * 2 * alpha
            filter:  gamma' = gamma * (r + alpha)
            inverse: delta' = delta * (m + alpha)
        """
        if self.flops_1d is None:
            raise TransformCountsUnknown(f"{self.label} transforms were not profiled")
        beta, gamma, delta = self.flops_1d
        return (beta * 2 * self.alpha,
                gamma * (self.r + self.alpha),
                delta * (self.m + self.alpha))

    def minimal_multiplies_1d(self) -> int:
        return self.alpha

    def verify_exact_1d(self, d: RationalMatrix, g: RationalMatrix) -> bool:
        """Check the 1D identity against the sliding-window definition."""
        got = self.filter_tile_1d(d, g)
        want = fir_valid([d[i, 0] for i in range(self.alpha)],
                         [g[i, 0] for i in range(self.r)])
        return [got[i, 0] for i in range(self.m)] == want


def _rm(rows) -> RationalMatrix:
    return RationalMatrix.from_rows(rows)


_F = Fraction


def _builtin_2_3() -> WinogradAlgorithm:
    BT = _rm([
        [1, 0, -1, 0],
        [0, 1, 1, 0],
        [0, -1, 1, 0],
        [0, 1, 0, -1],
    ])
    G = _rm([
        [1, 0, 0],
        [_F(1, 2), _F(1, 2), _F(1, 2)],
        [_F(1, 2), _F(-1, 2), _F(1, 2)],
        [0, 0, 1],
    ])
    AT = _rm([
        [1, 1, 1, 0],
        [0, 1, -1, -1],
    ])
    return WinogradAlgorithm(m=2, r=3, BT=BT, G=G, AT=AT, flops_1d=(4, 4, 4), name="F(2,3)")


def _builtin_3_2() -> WinogradAlgorithm:
    BT = _rm([
        [1, 0, -1, 0],
        [0, 1, 1, 0],
        [0, -1, 1, 0],
        [0, -1, 0, 1],
    ])
    G = _rm([
        [1, 0],
        [_F(1, 2), _F(1, 2)],
        [_F(1, 2), _F(-1, 2)],
        [0, 1],
    ])
    AT = _rm([
        [1, 1, 1, 0],
        [0, 1, -1, 0],
        [0, 1, 1, 1],
    ])
    return WinogradAlgorithm(m=3, r=2, BT=BT, G=G, AT=AT, flops_1d=None, name="F(3,2)")


def _builtin_4_3() -> WinogradAlgorithm:
    BT = _rm([
        [4, 0, -5, 0, 1, 0],
        [0, -4, -4, 1, 1, 0],
        [0, 4, -4, -1, 1, 0],
        [0, -2, -1, 2, 1, 0],
        [0, 2, -1, -2, 1, 0],
        [0, 4, 0, -5, 0, 1],
    ])
    G = _rm([
        [_F(1, 4), 0, 0],
        [_F(-1, 6), _F(-1, 6), _F(-1, 6)],
        [_F(-1, 6), _F(1, 6), _F(-1, 6)],
        [_F(1, 24), _F(1, 12), _F(1, 6)],
        [_F(1, 24), _F(-1, 12), _F(1, 6)],
        [0, 0, 1],
    ])
    AT = _rm([
        [1, 1, 1, 1, 1, 0],
        [0, 1, -1, 2, -2, 0],
        [0, 1, 1, 4, 4, 0],
        [0, 1, -1, 8, -8, 1],
    ])
    return WinogradAlgorithm(m=4, r=3, BT=BT, G=G, AT=AT, flops_1d=(13, 8, 10), name="F(4,3)")


_BUILTINS = {
    (2, 3): _builtin_2_3,
    (3, 2): _builtin_3_2,
    (4, 3): _builtin_4_3,
}


def builtin(m: int, r: int) -> WinogradAlgorithm:
    """Hand-tuned algorithm for F(m, r).  Available: (2,3), (3,2), (4,3)."""
    try:
        factory = _BUILTINS[(m, r)]
    except KeyError:
        raise KeyError(f"no builtin algorithm for F({m},{r}); "
                       f"available: {sorted(_BUILTINS)}") from None
    return factory()


def builtin_sizes() -> Tuple[Tuple[int, int], ...]:
    return tuple(sorted(_BUILTINS))
