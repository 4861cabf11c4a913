"""Exact rational matrices and exact filtering oracles.

Transform matrices are held as ``fractions.Fraction`` entries so algebraic
identities can be checked with zero tolerance. They are lowered to floating
point exactly once, at layer setup, which avoids double rounding of
constants like 1/6.

The module also provides exact FIR/correlation oracles used to certify
generated algorithms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "RationalMatrix",
    "as_fraction",
    "fir_valid",
    "correlate_valid_2d",
]

Rationalish = Union[Fraction, int, str]


def as_fraction(x: Rationalish) -> Fraction:
    """Coerce ints, 'p/q' strings, and Fractions to Fraction, exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        # Floats carry an exact binary value; accept it as such.
        return Fraction(x)
    raise TypeError(f"cannot interpret {type(x).__name__} as an exact rational")


@dataclass(frozen=True)
class RationalMatrix:
    """Immutable matrix of exact rationals with exact add/multiply."""

    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        if not self.entries or not self.entries[0]:
            raise ValueError("RationalMatrix cannot be empty")
        width = len(self.entries[0])
        if any(len(row) != width for row in self.entries):
            raise ValueError("ragged rows")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Rationalish]]) -> "RationalMatrix":
        return cls(tuple(tuple(as_fraction(x) for x in row) for row in rows))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        zero = Fraction(0)
        return cls(tuple(tuple(zero for _ in range(cols)) for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    @classmethod
    def column(cls, values: Sequence[Rationalish]) -> "RationalMatrix":
        return cls(tuple((as_fraction(v),) for v in values))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def __getitem__(self, idx: tuple[int, int]) -> Fraction:
        i, j = idx
        return self.entries[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i]

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(tuple(zip(*self.entries)))

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._check_same_shape(other)
        return RationalMatrix(
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            )
        )

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._check_same_shape(other)
        return RationalMatrix(
            tuple(
                tuple(a - b for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            )
        )

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        cols = other.transpose().entries
        return RationalMatrix(
            tuple(
                tuple(sum(a * b for a, b in zip(row, col)) for col in cols)
                for row in self.entries
            )
        )

    def hadamard(self, other: "RationalMatrix") -> "RationalMatrix":
        self._check_same_shape(other)
        return RationalMatrix(
            tuple(
                tuple(a * b for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            )
        )

    def scale(self, s: Rationalish) -> "RationalMatrix":
        f = as_fraction(s)
        return RationalMatrix(tuple(tuple(f * x for x in row) for row in self.entries))

    def max_abs(self) -> Fraction:
        return max(abs(x) for row in self.entries for x in row)

    def to_array(self, dtype: np.dtype | type = np.float64) -> np.ndarray:
        """Lower to floating point, one rounding per entry."""
        out = np.empty((self.rows, self.cols), dtype=dtype)
        for i, row in enumerate(self.entries):
            for j, x in enumerate(row):
                out[i, j] = float(x)
        return out

    def to_text(self) -> str:
        """One row per line, entries as 'p/q' (plain integer when q == 1)."""

        def fmt(x: Fraction) -> str:
            return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

        return "\n".join("  ".join(fmt(x) for x in row) for row in self.entries)

    def _check_same_shape(self, other: "RationalMatrix") -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError(
                f"shape mismatch: {self.rows}x{self.cols} vs {other.rows}x{other.cols}"
            )


def fir_valid(d: Sequence[Rationalish], g: Sequence[Rationalish]) -> list[Fraction]:
    """Exact valid FIR outputs: y[k] = sum_j d[k+j] * g[j], k in [0, len(d)-len(g)]."""
    dd = [as_fraction(x) for x in d]
    gg = [as_fraction(x) for x in g]
    if len(dd) < len(gg):
        raise ValueError("signal shorter than filter")
    m = len(dd) - len(gg) + 1
    return [sum(dd[k + j] * gg[j] for j in range(len(gg))) for k in range(m)]


def correlate_valid_2d(d: RationalMatrix, g: RationalMatrix) -> RationalMatrix:
    """Exact valid 2D correlation of data tile d with filter g (no flip)."""
    oh = d.rows - g.rows + 1
    ow = d.cols - g.cols + 1
    if oh < 1 or ow < 1:
        raise ValueError("filter larger than data tile")
    out = []
    for y in range(oh):
        row = []
        for x in range(ow):
            acc = Fraction(0)
            for u in range(g.rows):
                for v in range(g.cols):
                    acc += d[y + u, x + v] * g[u, v]
            row.append(acc)
        out.append(tuple(row))
    return RationalMatrix(tuple(out))
