"""Whole-layer convolution through minimal filtering.

The layer computation follows the scatter/GEMM/gather structure:

1. transform every (k, c) filter plane once:        U[xi,nu] is K x C
2. cut the input into overlapping alpha x alpha tiles (neighbors overlap by
   r-1 pixels) and transform each:                  V[xi,nu] is C x P
3. run alpha^2 independent matrix multiplies M = U @ V, which is where the
   whole channel reduction happens, in transform space
4. inverse-transform each of the P product tiles and write back the m x m
   valid output pixels.

Padding is never materialized: tile buffers start at zero and in-range pixels
are copied in, so out-of-bounds reads are zeros by construction.  Tiles that
stick out past the output edge are computed in full and clipped on write-back,
keeping every matrix the same shape.

Both training gradients ride on the same machinery: the input gradient is the
forward algorithm applied to dY with flipped, transposed filters, and the
weight gradient decomposes into per-tile F(RxR, m_w x m_w) problems whose
tile reduction is itself a batched GEMM.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from .counters import OpCounter
from .direct import LayerConfig
from .kernels import batched_matmul
from .tensors import Precision, Tensor4
from .winograd import WinogradAlgorithm, builtin


@dataclass(frozen=True)
class TileGrid:
    """Row-major enumeration of output tiles for one layer.

    Tile b maps to (image n, tile row ty, tile col tx); its input patch is
    alpha x alpha with top-left corner (m*ty - pad, m*tx - pad), so
    neighboring patches overlap by r - 1 pixels per dimension.
    """

    m: int
    r: int
    N: int
    tiles_h: int
    tiles_w: int
    pad: int

    @classmethod
    def for_layer(cls, cfg: LayerConfig, m: int, r: int) -> "TileGrid":
        return cls(m=m, r=r, N=cfg.N,
                   tiles_h=-(-cfg.out_h // m),
                   tiles_w=-(-cfg.out_w // m),
                   pad=cfg.pad)

    @property
    def alpha(self) -> int:
        return self.m + self.r - 1

    @property
    def P(self) -> int:
        return self.N * self.tiles_h * self.tiles_w

    def index(self, b: int) -> Tuple[int, int, int]:
        if not 0 <= b < self.P:
            raise IndexError(f"tile {b} out of range [0, {self.P})")
        n, rest = divmod(b, self.tiles_h * self.tiles_w)
        ty, tx = divmod(rest, self.tiles_w)
        return n, ty, tx

    def origin(self, b: int) -> Tuple[int, int]:
        _, ty, tx = self.index(b)
        return self.m * ty - self.pad, self.m * tx - self.pad


def tile_count(cfg: LayerConfig, m: int) -> int:
    """P = N * ceil(outH/m) * ceil(outW/m)."""
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    return cfg.N * (-(-cfg.out_h // m)) * (-(-cfg.out_w // m))


def multiply_stage_flops(cfg: LayerConfig, m: int) -> int:
    """Real multiplies in the elementwise (GEMM) stage: P*C*K*(m+R-1)*(m+S-1).

    At m=1 this degenerates to direct convolution's N*outH*outW*C*K*R*S.
    """
    return tile_count(cfg, m) * cfg.C * cfg.K * (m + cfg.R - 1) * (m + cfg.S - 1)


@lru_cache(maxsize=64)
def _lowered(alg: WinogradAlgorithm, dtype_str: str):
    dt = np.dtype(dtype_str)
    return alg.BT.to_array(dt), alg.G.to_array(dt), alg.AT.to_array(dt)


def transform_filters(g: Tensor4, alg: WinogradAlgorithm,
                      counter: Optional[OpCounter] = None) -> np.ndarray:
    """G g G^T for every (k, c) plane; returns the U stack, shape (alpha^2, K, C)."""
    K, C, R, S = g.shape
    if R != alg.r or S != alg.r:
        raise ValueError(f"filter is {R}x{S} but algorithm expects {alg.r}x{alg.r}")
    _, Gf, _ = _lowered(alg, g.data.dtype.str)
    t = np.einsum("xr,kcrs->xkcs", Gf, g.data)
    u = np.einsum("ys,xkcs->xykc", Gf, t)
    a = alg.alpha
    return np.ascontiguousarray(u.reshape(a * a, K, C))


class FilterCache:
    """Keyed store of transformed filter stacks (the precomputed-U variant).

    Keys cover the algorithm matrices, the float type, and the exact filter
    bytes, so a hit is guaranteed to return the bit-identical U stack that a
    fresh transform would produce.
    """

    def __init__(self) -> None:
        self._store: dict = {}
        self.hits = 0
        self.misses = 0

    @staticmethod
    def _key(g: Tensor4, alg: WinogradAlgorithm, dtype: np.dtype) -> tuple:
        _, Gf, _ = _lowered(alg, np.dtype(dtype).str)
        alg_tag = hashlib.sha1(Gf.tobytes()).hexdigest()
        g_tag = hashlib.sha1(g.data.tobytes()).hexdigest()
        return (alg_tag, np.dtype(dtype).str, g.shape, g_tag)

    def fetch(self, g: Tensor4, alg: WinogradAlgorithm,
              counter: Optional[OpCounter] = None) -> np.ndarray:
        key = self._key(g, alg, g.data.dtype)
        hit = self._store.get(key)
        if hit is not None:
            self.hits += 1
            return hit
        self.misses += 1
        u = transform_filters(g, alg, counter=counter)
        u.flags.writeable = False
        self._store[key] = u
        return u

    def workspace_scalars(self) -> int:
        """Total cached footprint; one entry costs exactly alpha^2 * K * C scalars."""
        return sum(int(u.size) for u in self._store.values())

    def clear(self) -> None:
        self._store.clear()
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        return len(self._store)


_shared_cache = FilterCache()


def shared_filter_cache() -> FilterCache:
    return _shared_cache


def _gather_tiles(plane: np.ndarray, grid_h: int, grid_w: int, step: int,
                  span: int, pad: int, dtype) -> np.ndarray:
    """Cut (N, C, H, W) into zero-filled (N, grid_h, grid_w, C, span, span) tiles.

    Tile (ty, tx) covers input rows [step*ty - pad, step*ty - pad + span);
    out-of-range pixels stay zero.
    """
    N, C, H, W = plane.shape
    tiles = np.zeros((N, grid_h, grid_w, C, span, span), dtype=dtype)
    for ty in range(grid_h):
        r0 = step * ty - pad
        sr0, sr1 = max(r0, 0), min(r0 + span, H)
        if sr0 >= sr1:
            continue
        for tx in range(grid_w):
            c0 = step * tx - pad
            sc0, sc1 = max(c0, 0), min(c0 + span, W)
            if sc0 >= sc1:
                continue
            tiles[:, ty, tx, :, sr0 - r0:sr1 - r0, sc0 - c0:sc1 - c0] = \
                plane[:, :, sr0:sr1, sc0:sc1]
    return tiles


def _out_precision(dtype: np.dtype) -> Precision:
    return Precision.FP64 if np.dtype(dtype) == np.float64 else Precision.FP32


def winograd_forward(d: Tensor4, g: Tensor4, cfg: LayerConfig,
                     alg: Optional[WinogradAlgorithm] = None,
                     cache_filters: bool = False,
                     counter: Optional[OpCounter] = None,
                     cache: Optional[FilterCache] = None) -> Tensor4:
    """Convolve a full layer with F(m x m, r x r) minimal filtering.

    cache_filters reuses transformed filters across calls (bit-identical to
    transforming in place); cache selects the store, defaulting to a shared
    module-level one.
    """
    if alg is None:
        alg = builtin(2, 3)
    if d.precision != g.precision:
        raise ValueError(f"mixed precisions: {d.precision} vs {g.precision}")
    if d.shape != (cfg.N, cfg.C, cfg.H, cfg.W):
        raise ValueError(f"data shape {d.shape} does not match {cfg}")
    if g.shape != (cfg.K, cfg.C, cfg.R, cfg.S):
        raise ValueError(f"filter shape {g.shape} does not match {cfg}")
    if cfg.R != alg.r or cfg.S != alg.r:
        raise ValueError(f"layer filter {cfg.R}x{cfg.S} but algorithm is F({alg.m},{alg.r})")

    dtype = d.data.dtype
    a = alg.alpha
    m = alg.m
    BTf, _, ATf = _lowered(alg, dtype.str)
    grid = TileGrid.for_layer(cfg, m, alg.r)

    if cache_filters:
        store = cache if cache is not None else _shared_cache
        U = store.fetch(g, alg, counter=counter)
    else:
        U = transform_filters(g, alg, counter=counter)

    tiles = _gather_tiles(d.data, grid.tiles_h, grid.tiles_w, m, a, cfg.pad, dtype)
    tiles = tiles.reshape(grid.P, cfg.C, a, a)

    t = np.einsum("xu,pcuv->xpcv", BTf, tiles)
    V = np.einsum("yv,xpcv->xycp", BTf, t)
    V = np.ascontiguousarray(V.reshape(a * a, cfg.C, grid.P))

    M = batched_matmul(U, V, counter=counter)

    M4 = M.reshape(a, a, cfg.K, grid.P)
    t2 = np.einsum("mx,xykp->mykp", ATf, M4)
    Yt = np.einsum("ny,mykp->mnkp", ATf, t2)
    Yt6 = Yt.reshape(m, m, cfg.K, cfg.N, grid.tiles_h, grid.tiles_w)

    out = np.zeros((cfg.N, cfg.K, cfg.out_h, cfg.out_w), dtype=dtype)
    for ty in range(grid.tiles_h):
        vr = min(m, cfg.out_h - m * ty)
        for tx in range(grid.tiles_w):
            vc = min(m, cfg.out_w - m * tx)
            block = Yt6[:vr, :vc, :, :, ty, tx]
            out[:, :, m * ty:m * ty + vr, m * tx:m * tx + vc] = \
                block.transpose(3, 2, 0, 1)
    return Tensor4._wrap(out, _out_precision(dtype))


def winograd_grad_inputs(dy: Tensor4, g: Tensor4, cfg: LayerConfig,
                         alg: Optional[WinogradAlgorithm] = None,
                         cache_filters: bool = False,
                         counter: Optional[OpCounter] = None,
                         cache: Optional[FilterCache] = None) -> Tensor4:
    """dL/dInput: forward algorithm over dY with flipped, (k,c)-swapped filters."""
    if cfg.pad > cfg.R - 1:
        raise ValueError(f"pad={cfg.pad} exceeds R-1={cfg.R - 1}; gradient tiling undefined")
    if dy.shape != (cfg.N, cfg.K, cfg.out_h, cfg.out_w):
        raise ValueError(f"dY shape {dy.shape} does not match {cfg}")
    flipped = np.ascontiguousarray(g.data[:, :, ::-1, ::-1].transpose(1, 0, 2, 3))
    gt = Tensor4._wrap(flipped, g.precision)
    adj = LayerConfig(N=cfg.N, C=cfg.K, H=cfg.out_h, W=cfg.out_w, K=cfg.C,
                      R=cfg.R, S=cfg.S, pad=cfg.R - 1 - cfg.pad)
    dd = winograd_forward(dy, gt, adj, alg=alg, cache_filters=cache_filters,
                          counter=counter, cache=cache)
    if dd.shape != (cfg.N, cfg.C, cfg.H, cfg.W):
        raise AssertionError(f"input gradient came out {dd.shape}")
    return dd


def winograd_grad_weights(d: Tensor4, dy: Tensor4, cfg: LayerConfig,
                          alg_w: Optional[WinogradAlgorithm] = None,
                          counter: Optional[OpCounter] = None) -> Tensor4:
    """dL/dFilter via the F(RxR, m_w x m_w) decomposition.

    dY is cut into m_w x m_w tiles (no overlap); each pairs with the
    alpha_w x alpha_w input patch at (m_w*ty - pad, m_w*tx - pad), patches
    overlapping by R - 1.  Per (xi, nu) the reduction over all tiles and
    images is one (K x B) @ (B x C) matmul, then a single inverse transform
    per (k, c) yields the R x R gradient.
    """
    if alg_w is None:
        if cfg.R != 3 or cfg.S != 3:
            raise ValueError(f"default weight-gradient algorithm needs R=S=3, "
                             f"got {cfg.R}x{cfg.S}")
        alg_w = builtin(3, 2)
    if alg_w.m != cfg.R or cfg.R != cfg.S:
        raise ValueError(f"algorithm F({alg_w.m},{alg_w.r}) cannot produce "
                         f"{cfg.R}x{cfg.S} gradients")
    if d.precision != dy.precision:
        raise ValueError(f"mixed precisions: {d.precision} vs {dy.precision}")
    if d.shape != (cfg.N, cfg.C, cfg.H, cfg.W):
        raise ValueError(f"data shape {d.shape} does not match {cfg}")
    if dy.shape != (cfg.N, cfg.K, cfg.out_h, cfg.out_w):
        raise ValueError(f"dY shape {dy.shape} does not match {cfg}")

    dtype = d.data.dtype
    mw = alg_w.r
    aw = alg_w.alpha
    BTf, Gf, ATf = _lowered(alg_w, dtype.str)
    gh = -(-cfg.out_h // mw)
    gw = -(-cfg.out_w // mw)
    B = cfg.N * gh * gw

    ytiles = _gather_tiles(dy.data, gh, gw, mw, mw, 0, dtype).reshape(B, cfg.K, mw, mw)
    dtiles = _gather_tiles(d.data, gh, gw, mw, aw, cfg.pad, dtype).reshape(B, cfg.C, aw, aw)

    t = np.einsum("xr,bkrs->xbks", Gf, ytiles)
    Uw = np.einsum("ys,xbks->xykb", Gf, t)
    Uw = np.ascontiguousarray(Uw.reshape(aw * aw, cfg.K, B))

    t = np.einsum("xu,bcuv->xbcv", BTf, dtiles)
    Vw = np.einsum("yv,xbcv->xybc", BTf, t)
    Vw = np.ascontiguousarray(Vw.reshape(aw * aw, B, cfg.C))

    M = batched_matmul(Uw, Vw, counter=counter)

    M4 = M.reshape(aw, aw, cfg.K, cfg.C)
    t2 = np.einsum("mx,xykc->mykc", ATf, M4)
    dg = np.einsum("ny,mykc->kcmn", ATf, t2)
    return Tensor4._wrap(np.ascontiguousarray(dg), _out_precision(dtype))
