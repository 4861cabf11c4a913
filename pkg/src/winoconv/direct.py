"""Direct convolution oracle and brute-force gradient oracles.

The forward op is 2D correlation (no filter flip) with zero padding:

    Y[i,k,x,y] = sum_c sum_v sum_u D[i,c,x+u-pad, y+v-pad] * G[k,c,u,v]

Out-of-range reads are zeros. The reduction order is fixed at (c outer,
v, then u inner) and every partial sum is held at the requested
accumulator precision, so results are bit-identical across runs and
thread counts. Everything else in the package is measured against these
functions.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from winoconv.counters import OpCounter
from winoconv.tensors import Precision, Tensor4

__all__ = [
    "LayerConfig",
    "direct_forward",
    "direct_grad_inputs",
    "direct_grad_weights",
    "gflops_direct",
]


@dataclass(frozen=True)
class LayerConfig:
    """One convolutional layer: N images, C input channels, K filters,
    H x W images, R x S filter taps, symmetric zero padding, and a depth
    (how many times the shape repeats in the network)."""

    N: int
    C: int
    H: int
    W: int
    K: int
    R: int = 3
    S: int = 3
    pad: int = 0
    depth: int = 1

    def __post_init__(self) -> None:
        for name in ("N", "C", "H", "W", "K", "R", "S", "depth"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.pad < 0:
            raise ValueError("pad must be >= 0")
        if self.out_h < 1 or self.out_w < 1:
            raise ValueError("output dimensions must be >= 1")

    @property
    def out_h(self) -> int:
        return self.H + 2 * self.pad - self.R + 1

    @property
    def out_w(self) -> int:
        return self.W + 2 * self.pad - self.S + 1

    def with_batch(self, n: int) -> "LayerConfig":
        return replace(self, N=n)


def _check_forward_shapes(d: Tensor4, g: Tensor4, cfg: LayerConfig) -> None:
    if d.shape != (cfg.N, cfg.C, cfg.H, cfg.W):
        raise ValueError(f"data shape {d.shape} does not match {cfg}")
    if g.shape != (cfg.K, cfg.C, cfg.R, cfg.S):
        raise ValueError(f"filter shape {g.shape} does not match {cfg}")


def _accum_dtype(accum: Precision) -> np.dtype:
    if accum not in (Precision.FP32, Precision.FP64):
        raise ValueError("accumulator precision must be fp32 or fp64")
    return accum.dtype


def direct_forward(
    d: Tensor4,
    g: Tensor4,
    cfg: LayerConfig,
    accum: Precision = Precision.FP64,
    counter: OpCounter | None = None,
) -> Tensor4:
    """Direct correlation with zero padding; output (N, K, outH, outW).

    Each (c, v, u) term is broadcast onto the valid output window, so the
    per-element accumulation order is exactly c outer, v, u inner.
    """
    _check_forward_shapes(d, g, cfg)
    dt = _accum_dtype(accum)
    da = d.data.astype(dt, copy=False)
    ga = g.data.astype(dt, copy=False)
    oh, ow = cfg.out_h, cfg.out_w
    y = np.zeros((cfg.N, cfg.K, oh, ow), dtype=dt)
    for c in range(cfg.C):
        for v in range(cfg.S):
            for u in range(cfg.R):
                # Output (x, y) reads D row x+u-pad, col y+v-pad.
                ro = u - cfg.pad
                co = v - cfg.pad
                xs, xe = max(0, -ro), min(oh, cfg.H - ro)
                ys, ye = max(0, -co), min(ow, cfg.W - co)
                if xs >= xe or ys >= ye:
                    continue
                win = da[:, c, xs + ro : xe + ro, ys + co : ye + co]
                y[:, :, xs:xe, ys:ye] += win[:, None, :, :] * ga[None, :, c, u, v, None, None]
                if counter is not None:
                    counter.add("mul", cfg.N * cfg.K * (xe - xs) * (ye - ys))
    return Tensor4._wrap(y, accum)


def direct_grad_inputs(
    dY: Tensor4,
    g: Tensor4,
    cfg: LayerConfig,
    accum: Precision = Precision.FP64,
) -> Tensor4:
    """Gradient of the layer output wrt the data: the transpose of the
    forward map, computed as full correlation of dY with the spatially
    flipped, (k, c)-transposed filters."""
    if dY.shape != (cfg.N, cfg.K, cfg.out_h, cfg.out_w):
        raise ValueError(f"dY shape {dY.shape} does not match {cfg}")
    if g.shape != (cfg.K, cfg.C, cfg.R, cfg.S):
        raise ValueError(f"filter shape {g.shape} does not match {cfg}")
    if cfg.pad > cfg.R - 1 or cfg.pad > cfg.S - 1:
        raise ValueError("pad larger than filter overlap has no adjoint in this form")
    flipped = np.ascontiguousarray(g.data[:, :, ::-1, ::-1].transpose(1, 0, 2, 3))
    adj = LayerConfig(
        N=cfg.N,
        C=cfg.K,
        H=cfg.out_h,
        W=cfg.out_w,
        K=cfg.C,
        R=cfg.R,
        S=cfg.S,
        pad=cfg.R - 1 - cfg.pad,
    )
    gt = Tensor4._wrap(flipped, g.precision)
    out = direct_forward(dY, gt, adj, accum=accum)
    assert out.shape == (cfg.N, cfg.C, cfg.H, cfg.W)
    return out


def direct_grad_weights(
    d: Tensor4,
    dY: Tensor4,
    cfg: LayerConfig,
    accum: Precision = Precision.FP64,
) -> Tensor4:
    """Gradient wrt the filters:
    dG[k,c,u,v] = sum_i sum_{x,y} D[i,c,x+u-pad, y+v-pad] * dY[i,k,x,y]."""
    if d.shape != (cfg.N, cfg.C, cfg.H, cfg.W):
        raise ValueError(f"data shape {d.shape} does not match {cfg}")
    if dY.shape != (cfg.N, cfg.K, cfg.out_h, cfg.out_w):
        raise ValueError(f"dY shape {dY.shape} does not match {cfg}")
    dt = _accum_dtype(accum)
    da = d.data.astype(dt, copy=False)
    ya = dY.data.astype(dt, copy=False)
    oh, ow = cfg.out_h, cfg.out_w
    dg = np.zeros((cfg.K, cfg.C, cfg.R, cfg.S), dtype=dt)
    for u in range(cfg.R):
        for v in range(cfg.S):
            ro = u - cfg.pad
            co = v - cfg.pad
            xs, xe = max(0, -ro), min(oh, cfg.H - ro)
            ys, ye = max(0, -co), min(ow, cfg.W - co)
            if xs >= xe or ys >= ye:
                continue
            win = da[:, :, xs + ro : xe + ro, ys + co : ye + co]
            dg[:, :, u, v] = np.einsum("ichw,ikhw->kc", win, ya[:, :, xs:xe, ys:ye])
    return Tensor4._wrap(dg, accum)


def gflops_direct(cfg: LayerConfig) -> float:
    """Direct-convolution cost in GFLOPs (2 flops per multiply-accumulate),
    weighted by the layer's depth."""
    flops = 2.0 * cfg.N * cfg.C * cfg.K * cfg.out_h * cfg.out_w * cfg.R * cfg.S
    return flops / 1e9 * cfg.depth
