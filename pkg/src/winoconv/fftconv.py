"""Tiled FFT convolution reference (overlap-and-save) with multiply accounting.

The layer is cut into alpha x alpha tiles (alpha a power of two).  Each tile
is convolved cyclically with the zero-padded, spatially reversed filter by
pointwise spectral products; only the (alpha-R+1) x (alpha-S+1) outputs free
of cyclic wraparound are kept, and input tiles overlap by R-1 / S-1 pixels so
the discarded outputs are recomputed by the neighboring tile.

Spectra of real inputs are Hermitian-symmetric, F[u,v] =
conj(F[(a-u)%a, (a-v)%a]), so products are computed only on the
alpha*(floor(alpha/2)+1) unique columns and reflected to the full plane by
conjugation.  Channel reduction happens on the transformed products, as one
complex matmul per retained frequency, which the fast path realizes as three
real matmuls via the 3-multiplication complex product.

The DFT itself is a plain radix-2 decimation-in-time pass composed row-column
for 2D; it is a correctness reference, not a performance contender.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .counters import OpCounter
from .direct import LayerConfig
from .kernels import batched_matmul, matmul
from .tensors import Precision, Tensor4

_twiddle_store: dict = {}
_bitrev_store: dict = {}


def _bit_reverse_indices(n: int) -> np.ndarray:
    got = _bitrev_store.get(n)
    if got is None:
        bits = n.bit_length() - 1
        idx = np.arange(n)
        rev = np.zeros(n, dtype=np.int64)
        for b in range(bits):
            rev |= ((idx >> b) & 1) << (bits - 1 - b)
        got = _bitrev_store[n] = rev
    return got


def _twiddle(length: int, inverse: bool) -> np.ndarray:
    key = (length, inverse)
    got = _twiddle_store.get(key)
    if got is None:
        k = np.arange(length // 2)
        sign = 2j if inverse else -2j
        got = _twiddle_store[key] = np.exp(sign * np.pi * k / length)
    return got


def fft_pow2(x: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Unnormalized DFT along the last axis; length must be a power of two."""
    n = x.shape[-1]
    if n < 1 or n & (n - 1):
        raise ValueError(f"transform length must be a power of two, got {n}")
    y = np.asarray(x, dtype=np.complex128)[..., _bit_reverse_indices(n)]
    length = 2
    while length <= n:
        half = length // 2
        w = _twiddle(length, inverse)
        blocks = y.reshape(y.shape[:-1] + (n // length, length))
        even = blocks[..., :half].copy()
        odd = blocks[..., half:] * w
        blocks[..., :half] = even + odd
        blocks[..., half:] = even - odd
        length *= 2
    return y


def ifft_pow2(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    return fft_pow2(x, inverse=True) / n


def fft2_pow2(x: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Row-column DFT over the last two axes."""
    y = fft_pow2(x, inverse=inverse)
    y = fft_pow2(y.swapaxes(-1, -2), inverse=inverse).swapaxes(-1, -2)
    return y


def ifft2_pow2(x: np.ndarray) -> np.ndarray:
    n1, n2 = x.shape[-2], x.shape[-1]
    return fft2_pow2(x, inverse=True) / (n1 * n2)


def hermitian_unique_count(alpha: int) -> int:
    """Complex products needed per plane for real inputs: alpha*(floor(alpha/2)+1)."""
    if alpha < 1:
        raise ValueError(f"need alpha >= 1, got {alpha}")
    return alpha * (alpha // 2 + 1)


def hermitianize(plane: np.ndarray) -> np.ndarray:
    """Rewrite the redundant columns of a spectrum from the unique ones.

    Acts on the last two axes; returns a copy whose columns past
    floor(alpha/2) are exact bitwise conjugate reflections of the kept ones.
    """
    a = plane.shape[-1]
    if plane.shape[-2] != a:
        raise ValueError(f"plane must be square, got {plane.shape[-2:]}")
    out = np.array(plane, dtype=np.complex128, copy=True)
    rev = (a - np.arange(a)) % a
    for v in range(a // 2 + 1, a):
        out[..., :, v] = np.conj(out[..., rev, a - v])
    return out


def complex_mul_3(x: complex, y: complex, counter: Optional[OpCounter] = None) -> complex:
    """x*y with 3 real multiplies: t = x0*(y0+y1); re = t - (x0+x1)*y1; im = (x1-x0)*y0 + t."""
    ua, ub, uc = x.real, x.real + x.imag, x.imag - x.real
    va, vb, vc = y.real, y.imag, y.real + y.imag
    t = ua * vc
    if counter is not None:
        counter.add("mul", 3)
    return complex(t - ub * vb, uc * va + t)


@dataclass(frozen=True, eq=False)
class SplitComplexFactors:
    """Real factor triple for the 3-multiply complex product.

    Left operand x = x0 + i*x1 splits as (x0, x0+x1, x1-x0); right operand
    y = y0 + i*y1 splits as (y0, y1, y0+y1).
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    @classmethod
    def left(cls, x: np.ndarray) -> "SplitComplexFactors":
        x0, x1 = x.real, x.imag
        return cls(a=np.ascontiguousarray(x0),
                   b=np.ascontiguousarray(x0 + x1),
                   c=np.ascontiguousarray(x1 - x0))

    @classmethod
    def right(cls, y: np.ndarray) -> "SplitComplexFactors":
        y0, y1 = y.real, y.imag
        return cls(a=np.ascontiguousarray(y0),
                   b=np.ascontiguousarray(y1),
                   c=np.ascontiguousarray(y0 + y1))


def fast_cgemm(ua: np.ndarray, ub: np.ndarray, uc: np.ndarray,
               va: np.ndarray, vb: np.ndarray, vc: np.ndarray,
               counter: Optional[OpCounter] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Complex matmul as three real matmuls; returns (M0, M1) = (imag, real).

    Accepts single matrices (K x C etc.) or stacks with one leading batch
    axis.  The complex product is M1 + i*M0.
    """
    if ua.ndim not in (2, 3):
        raise ValueError(f"expected 2- or 3-axis operands, got {ua.ndim}")
    mm = batched_matmul if ua.ndim == 3 else matmul
    t = mm(ua, vc, counter=counter)
    m0 = mm(uc, va, counter=counter)
    m0 = m0 + t
    m1 = t - mm(ub, vb, counter=counter)
    return m0, m1


def cgemm4(u: np.ndarray, v: np.ndarray, counter: Optional[OpCounter] = None) -> np.ndarray:
    """Plain complex matmul (4 real multiplies per product); the oracle path."""
    if u.ndim == 2:
        out = np.einsum("kc,cp->kp", u, v)
        pairs = u.shape[0] * u.shape[1] * v.shape[1]
    elif u.ndim == 3:
        out = np.einsum("qkc,qcp->qkp", u, v)
        pairs = u.shape[0] * u.shape[1] * u.shape[2] * v.shape[2]
    else:
        raise ValueError(f"expected 2- or 3-axis operands, got {u.ndim}")
    if counter is not None:
        counter.add("mul", 4 * pairs)
    return out


def _gather_rect(plane: np.ndarray, gh: int, gw: int, step_h: int, step_w: int,
                 span: int, pad: int) -> np.ndarray:
    """Zero-filled (N, gh, gw, C, span, span) tiles at (step_h*ty - pad, step_w*tx - pad)."""
    N, C, H, W = plane.shape
    tiles = np.zeros((N, gh, gw, C, span, span), dtype=plane.dtype)
    for ty in range(gh):
        r0 = step_h * ty - pad
        sr0, sr1 = max(r0, 0), min(r0 + span, H)
        if sr0 >= sr1:
            continue
        for tx in range(gw):
            c0 = step_w * tx - pad
            sc0, sc1 = max(c0, 0), min(c0 + span, W)
            if sc0 >= sc1:
                continue
            tiles[:, ty, tx, :, sr0 - r0:sr1 - r0, sc0 - c0:sc1 - c0] = \
                plane[:, :, sr0:sr1, sc0:sc1]
    return tiles


def fft_forward_layer(d: Tensor4, g: Tensor4, cfg: LayerConfig, tile: int = 8,
                      counter: Optional[OpCounter] = None,
                      fast: bool = True) -> Tensor4:
    """Convolve a full layer by tiled FFT overlap-and-save.

    tile is the transform size alpha (power of two, greater than R-1 and
    S-1).  fast selects the 3-real-multiply complex GEMM; either way the
    products cover only the Hermitian-unique region, counted as "cmul".
    """
    if tile < 1 or tile & (tile - 1):
        raise ValueError(f"tile must be a power of two, got {tile}")
    if tile <= cfg.R - 1 or tile <= cfg.S - 1:
        raise ValueError(f"tile {tile} too small for a {cfg.R}x{cfg.S} filter")
    if d.precision != g.precision:
        raise ValueError(f"mixed precisions: {d.precision} vs {g.precision}")
    if d.shape != (cfg.N, cfg.C, cfg.H, cfg.W):
        raise ValueError(f"data shape {d.shape} does not match {cfg}")
    if g.shape != (cfg.K, cfg.C, cfg.R, cfg.S):
        raise ValueError(f"filter shape {g.shape} does not match {cfg}")

    a = tile
    mh = a - cfg.R + 1
    mw = a - cfg.S + 1
    gh = -(-cfg.out_h // mh)
    gw = -(-cfg.out_w // mw)
    P = cfg.N * gh * gw
    half = a // 2
    Q = a * (half + 1)

    # Cyclic convolution with the reversed filter realizes correlation; the
    # wraparound-free outputs sit at indices [R-1, a) x [S-1, a).
    h = np.zeros((cfg.K, cfg.C, a, a), dtype=np.float64)
    h[:, :, :cfg.R, :cfg.S] = g.data[:, :, ::-1, ::-1]
    ghat = fft2_pow2(h)

    tiles = _gather_rect(d.data, gh, gw, mh, mw, a, cfg.pad)
    dhat = fft2_pow2(tiles.reshape(P, cfg.C, a, a))

    u = np.ascontiguousarray(ghat[:, :, :, :half + 1].transpose(2, 3, 0, 1).reshape(Q, cfg.K, cfg.C))
    v = np.ascontiguousarray(dhat[:, :, :, :half + 1].transpose(2, 3, 1, 0).reshape(Q, cfg.C, P))
    if counter is not None:
        counter.add("cmul", Q * cfg.K * cfg.C * P)

    if fast:
        fu = SplitComplexFactors.left(u)
        fv = SplitComplexFactors.right(v)
        m0, m1 = fast_cgemm(fu.a, fu.b, fu.c, fv.a, fv.b, fv.c, counter=counter)
        m = m1 + 1j * m0
    else:
        m = cgemm4(u, v, counter=counter)

    plane = np.empty((a, a, cfg.K, P), dtype=np.complex128)
    plane[:, :half + 1] = m.reshape(a, half + 1, cfg.K, P)
    rev = (a - np.arange(a)) % a
    for col in range(half + 1, a):
        plane[:, col] = np.conj(plane[rev, a - col])

    y = ifft2_pow2(plane.transpose(2, 3, 0, 1)).real
    valid = y[:, :, cfg.R - 1:, cfg.S - 1:].reshape(cfg.K, cfg.N, gh, gw, mh, mw)

    dtype = d.data.dtype
    out = np.zeros((cfg.N, cfg.K, cfg.out_h, cfg.out_w), dtype=dtype)
    for ty in range(gh):
        vr = min(mh, cfg.out_h - mh * ty)
        for tx in range(gw):
            vc = min(mw, cfg.out_w - mw * tx)
            block = valid[:, :, ty, tx, :vr, :vc].transpose(1, 0, 2, 3)
            out[:, :, mh * ty:mh * ty + vr, mw * tx:mw * tx + vc] = block
    prec = Precision.FP64 if dtype == np.float64 else Precision.FP32
    return Tensor4._wrap(out, prec)
