"""Dense 4D tensors, deterministic random fill, and precision simulation.

Layer data, filters, and outputs all live in ``Tensor4`` containers with
logical index order (image, channel, row, col). Tensors are immutable once
constructed so they are safe to share across threads.

Random fill uses SplitMix64 as a counter-based generator: element ``i`` of
the stream is a pure function of ``(seed, i)``. The output of a fill is
therefore bitwise reproducible across runs, platforms, and thread counts,
which is what makes recorded accuracy numbers replayable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Precision",
    "Tensor4",
    "fill_uniform",
    "quantize_fp16",
    "max_abs_error",
    "FP16_MAX",
]

FP16_MAX = 65504.0


class Precision(enum.Enum):
    """Element precision tags.

    ``FP16_SIM`` means values sit on the IEEE binary16 grid but storage and
    all arithmetic stay at fp32; nothing is ever computed at half precision.
    """

    FP32 = "fp32"
    FP16_SIM = "fp16-sim"
    FP64 = "fp64"

    @property
    def dtype(self) -> np.dtype:
        if self is Precision.FP64:
            return np.dtype(np.float64)
        return np.dtype(np.float32)

    @classmethod
    def from_tag(cls, tag: str) -> "Precision":
        for p in cls:
            if p.value == tag:
                return p
        raise ValueError(f"unknown precision tag: {tag!r}")


@dataclass(frozen=True, eq=False)
class Tensor4:
    """Immutable dense 4D real tensor.

    ``data`` is a read-only C-contiguous numpy array whose dtype matches
    ``precision.dtype``. Scalar indexing is bounds-checked on every axis;
    negative indices are rejected rather than wrapped.
    """

    data: np.ndarray
    precision: Precision

    def __post_init__(self) -> None:
        if self.data.ndim != 4:
            raise ValueError(f"Tensor4 requires 4 axes, got {self.data.ndim}")
        if self.data.dtype != self.precision.dtype:
            raise ValueError(
                f"dtype {self.data.dtype} does not match precision {self.precision.value}"
            )
        self.data.flags.writeable = False

    @classmethod
    def from_array(cls, array: object, precision: Precision = Precision.FP32) -> "Tensor4":
        """Copy ``array`` into a new tensor at the given precision."""
        arr = np.array(array, dtype=precision.dtype, order="C", copy=True)
        return cls(arr, precision)

    @classmethod
    def zeros(cls, shape: tuple[int, int, int, int], precision: Precision = Precision.FP32) -> "Tensor4":
        if len(shape) != 4 or any(int(n) < 0 for n in shape):
            raise ValueError(f"invalid Tensor4 shape: {shape}")
        return cls(np.zeros(shape, dtype=precision.dtype), precision)

    @classmethod
    def _wrap(cls, array: np.ndarray, precision: Precision) -> "Tensor4":
        # Internal constructor for freshly allocated arrays; no copy.
        return cls(np.ascontiguousarray(array, dtype=precision.dtype), precision)

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return self.data.shape  # type: ignore[return-value]

    @property
    def size(self) -> int:
        return int(self.data.size)

    def __getitem__(self, idx: tuple[int, int, int, int]) -> float:
        if not isinstance(idx, tuple) or len(idx) != 4:
            raise TypeError("Tensor4 indexing takes a 4-tuple of ints")
        for axis, (i, n) in enumerate(zip(idx, self.shape)):
            if not 0 <= int(i) < n:
                raise IndexError(f"index {i} out of range for axis {axis} of size {n}")
        return float(self.data[idx])

    def astype(self, precision: Precision) -> "Tensor4":
        """Re-store the same values at another precision (values are cast,
        never re-quantized; use quantize_fp16 for grid snapping)."""
        return Tensor4._wrap(self.data.astype(precision.dtype), precision)


_SM64_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SM64_M1 = np.uint64(0xBF58476D1CE4E5B9)
_SM64_M2 = np.uint64(0x94D049BB133111EB)


def _splitmix64_unit_doubles(count: int, seed: int) -> np.ndarray:
    """First ``count`` SplitMix64 outputs for ``seed``, mapped to [0, 1).

    Stream element i uses state ``seed + (i+1) * gamma`` (mod 2**64) run
    through the SplitMix64 finalizer; the top 53 bits become the double.
    """
    idx = np.arange(1, count + 1, dtype=np.uint64)
    z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + idx * _SM64_GAMMA
    z ^= z >> np.uint64(30)
    z *= _SM64_M1
    z ^= z >> np.uint64(27)
    z *= _SM64_M2
    z ^= z >> np.uint64(31)
    return (z >> np.uint64(11)).astype(np.float64) * (2.0**-53)


def fill_uniform(t: Tensor4, seed: int, lo: float, hi: float) -> Tensor4:
    """Return a tensor of t's shape and precision filled uniformly in [lo, hi).

    Pure: the input tensor is not modified. The result is a deterministic
    function of (seed, element count, lo, hi, precision).
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got lo={lo}, hi={hi}")
    dtype = t.precision.dtype
    u = _splitmix64_unit_doubles(t.size, seed)
    x = (lo + u * (hi - lo)).astype(dtype)
    # The affine map plus the cast can round up onto hi; pull those values
    # back to the largest representable value below hi.
    top = np.nextafter(dtype.type(hi), dtype.type(lo))
    x[x.astype(np.float64) >= float(hi)] = top
    return Tensor4._wrap(x.reshape(t.shape), t.precision)


def quantize_fp16(t: Tensor4) -> Tensor4:
    """Snap every element to the nearest IEEE binary16 value (ties to even),
    storing the result back at fp32.

    Raises OverflowError if any magnitude exceeds the binary16 range; the
    intended operands are in [-1, 1], so an overflow signals misuse.
    """
    with np.errstate(over="ignore"):
        q = t.data.astype(np.float16)
    blown = np.isinf(q) & np.isfinite(t.data)
    if np.any(blown):
        worst = float(np.max(np.abs(t.data[blown])))
        raise OverflowError(f"|{worst}| exceeds the binary16 maximum {FP16_MAX}")
    return Tensor4._wrap(q.astype(np.float32), Precision.FP16_SIM)


def max_abs_error(a: Tensor4, b: Tensor4) -> float:
    """Maximum over all positions of |a - b|, computed at fp64."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    diff = np.abs(a.data.astype(np.float64) - b.data.astype(np.float64))
    return float(diff.max())
