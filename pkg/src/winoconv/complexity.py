"""Arithmetic-complexity model for the competing convolution algorithms.

Costs are normalized per output pixel (multiplies only):

  alpha' : multiplies per output in the elementwise/GEMM stage
  beta'  : data-transform flops per tile, divided by alpha^2
  gamma' : filter-transform flops per tile, divided by alpha^2
  delta' : inverse-transform flops per tile, divided by alpha^2

and the total layer cost folds the transform terms in as relative overheads
amortized by the GEMM dimensions:

  L = alpha' * (1 + beta'/K + gamma'/P + delta'/C) * N*H*W*C*K

Winograd per-tile transform counts are derived from profiled 1D passes where
those exist; tile sizes whose hand-scheduled counts were never published are
carried as display constants tagged "reported".  FFT transform constants are
split-radix figures taken as published, also tagged "reported"; only the FFT
multiply stage (alpha') is computed from first principles.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from .direct import LayerConfig
from .engine import tile_count
from .winograd import TransformCountsUnknown, builtin, builtin_sizes

SOURCE_DERIVED = "derived"
SOURCE_REPORTED = "reported"


@dataclass(frozen=True)
class ComplexityProfile:
    """Normalized multiply/transform costs of one algorithm configuration."""

    method: str  # winograd | direct | fft-direct-cgemm | fft-fast-cgemm
    alpha: int
    m: int
    alpha_prime: float
    beta_prime: Optional[float]
    gamma_prime: Optional[float]
    delta_prime: Optional[float]
    source: str = SOURCE_DERIVED
    # Per-tile 2D transform flop counts, when they are actual counts.
    beta: Optional[int] = None
    gamma: Optional[int] = None
    delta: Optional[int] = None

    def overheads(self, cfg: LayerConfig) -> Tuple[float, float, float]:
        """Relative transform overheads (beta'/K, gamma'/P, delta'/C) for a layer."""
        p = tile_count(cfg, self.m)
        return ((self.beta_prime or 0.0) / cfg.K,
                (self.gamma_prime or 0.0) / p,
                (self.delta_prime or 0.0) / cfg.C)


# Table rows whose transform counts were published without a derivation.
_REPORTED_WINOGRAD = {
    (3, 3): (3.60, 2.24, 2.24),
    (6, 3): (6.50, 2.23, 4.38),
}

_REPORTED_FFT_DIRECT = {8: 2.42, 16: 4.23, 32: 6.24, 64: 8.30, 128: 10.37, 256: 12.42}
_REPORTED_FFT_FAST = {
    8: (3.77, 4.30),
    16: (6.23, 6.82),
    32: (8.94, 9.57),
    64: (11.72, 12.36),
    128: (14.48, 15.14),
    256: (17.22, 17.88),
}


def direct_profile(r: int) -> ComplexityProfile:
    """Direct convolution: r^2 multiplies per output, no transforms."""
    return ComplexityProfile(method="direct", alpha=r, m=1, alpha_prime=float(r * r),
                             beta_prime=None, gamma_prime=None, delta_prime=None)


def winograd_profile(m: int, r: int,
                     counts: Optional[Tuple[int, int, int]] = None) -> ComplexityProfile:
    """Normalized complexity of F(m x m, r x r).

    counts overrides the per-tile 2D transform flops (data, filter, inverse)
    for sizes without profiled builtins.  m=1 degenerates to the direct row.
    """
    alpha = m + r - 1
    a2 = alpha * alpha
    alpha_prime = a2 / (m * m)
    if m == 1 and counts is None:
        return ComplexityProfile(method="winograd", alpha=alpha, m=1,
                                 alpha_prime=alpha_prime,
                                 beta_prime=None, gamma_prime=None, delta_prime=None)
    if counts is not None:
        beta, gamma, delta = counts
        return ComplexityProfile(method="winograd", alpha=alpha, m=m,
                                 alpha_prime=alpha_prime,
                                 beta_prime=beta / a2, gamma_prime=gamma / a2,
                                 delta_prime=delta / a2,
                                 beta=beta, gamma=gamma, delta=delta)
    if (m, r) in builtin_sizes():
        try:
            beta, gamma, delta = builtin(m, r).transform_flop_counts()
        except TransformCountsUnknown:
            pass
        else:
            return ComplexityProfile(method="winograd", alpha=alpha, m=m,
                                     alpha_prime=alpha_prime,
                                     beta_prime=beta / a2, gamma_prime=gamma / a2,
                                     delta_prime=delta / a2,
                                     beta=beta, gamma=gamma, delta=delta)
    reported = _REPORTED_WINOGRAD.get((m, r))
    if reported is not None:
        bp, gp, dp = reported
        return ComplexityProfile(method="winograd", alpha=alpha, m=m,
                                 alpha_prime=alpha_prime,
                                 beta_prime=bp, gamma_prime=gp, delta_prime=dp,
                                 source=SOURCE_REPORTED)
    raise TransformCountsUnknown(
        f"no transform flop counts for F({m},{r}); pass counts=(beta, gamma, delta)")


def fft_multiply_complexity(alpha: int, r: int, fast: bool) -> float:
    """Multiplies per output of the FFT elementwise stage.

    Real inputs need alpha*(floor(alpha/2)+1) complex products per tile pair,
    each costing 4 real multiplies (3 on the fast path), amortized over
    m^2 = (alpha-r+1)^2 outputs.
    """
    m = alpha - r + 1
    if m < 1:
        raise ValueError(f"tile {alpha} too small for a {r}-tap filter")
    c = 3 if fast else 4
    return c * alpha * (alpha // 2 + 1) / (m * m)


def fft_table_constants(alpha: int, fast: bool) -> Tuple[float, float, float]:
    """Published split-radix transform constants (beta', gamma', delta')."""
    if fast:
        got = _REPORTED_FFT_FAST.get(alpha)
        if got is None:
            raise ValueError(f"no stored constants for tile {alpha}; "
                             f"known: {sorted(_REPORTED_FFT_FAST)}")
        bp, gd = got
        return (bp, gd, gd)
    got = _REPORTED_FFT_DIRECT.get(alpha)
    if got is None:
        raise ValueError(f"no stored constants for tile {alpha}; "
                         f"known: {sorted(_REPORTED_FFT_DIRECT)}")
    return (got, got, got)


def fft_profile(alpha: int, r: int, fast: bool) -> ComplexityProfile:
    bp, gp, dp = fft_table_constants(alpha, fast)
    return ComplexityProfile(
        method="fft-fast" if fast else "fft",
        alpha=alpha, m=alpha - r + 1,
        alpha_prime=fft_multiply_complexity(alpha, r, fast),
        beta_prime=bp, gamma_prime=gp, delta_prime=dp,
        source=SOURCE_REPORTED)


def layer_total_complexity(cfg: LayerConfig, prof: ComplexityProfile) -> float:
    """Total layer multiplies L = alpha'*(1 + beta'/K + gamma'/P + delta'/C)*NHWCK."""
    ok, gk, dk = prof.overheads(cfg)
    work = cfg.N * cfg.H * cfg.W * cfg.C * cfg.K
    return prof.alpha_prime * (1.0 + ok + gk + dk) * work


def max_speedup(m: int, r: int) -> float:
    """Multiply-count ceiling over direct convolution: r^2 m^2 / alpha^2."""
    alpha = m + r - 1
    return (r * r * m * m) / (alpha * alpha)


def winograd_table() -> list:
    """Tile-size sweep for 3x3 filters; direct convolution is the m=1 row."""
    rows = []
    for m, r in ((1, 3), (2, 3), (3, 3), (4, 3), (6, 3)):
        prof = winograd_profile(m, r)
        rows.append(prof)
    return rows


def fft_table(fast: bool) -> list:
    return [fft_profile(alpha, 3, fast) for alpha in sorted(_REPORTED_FFT_DIRECT)]
