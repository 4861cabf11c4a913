"""Command implementations shared by the HTTP service and the CLI.

Each cmd_* function is pure plumbing: resolve a suite, run layers through
the requested algorithm, assemble a Report.  All randomness flows through
the counter-based fill, so a (seed, flags) pair fully determines a run.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .complexity import fft_table, layer_total_complexity, winograd_profile, winograd_table
from .direct import LayerConfig, direct_forward, gflops_direct
from .engine import FilterCache, winograd_forward
from .fftconv import fft_forward_layer
from .reports import Report
from .suites import get_suite
from .tensors import Precision, Tensor4, fill_uniform, max_abs_error, quantize_fp16
from .toomcook import (PointSet, dump_algorithm, generate,
                       max_transform_magnitude, verify_algorithm)
from .winograd import builtin

ACCURACY_ALGOS = ("direct-fp32", "f2x2", "f4x4", "fft")
BENCH_ALGOS = ("direct", "direct-fp32", "f2x2", "f4x4", "f2x2-fx", "f4x4-fx", "fft")

COMPLEXITY_TABLES = ("winograd", "fft", "fft-fast", "layer-costs")


def run_layer(algo: str, d: Tensor4, g: Tensor4, cfg: LayerConfig,
              cache: Optional[FilterCache] = None, counter=None) -> Tensor4:
    """Dispatch one forward layer by algorithm name."""
    if algo == "direct":
        accum = Precision.FP64 if d.precision is Precision.FP64 else Precision.FP32
        return direct_forward(d, g, cfg, accum=accum, counter=counter)
    if algo == "direct-fp32":
        return direct_forward(d, g, cfg, accum=Precision.FP32, counter=counter)
    if algo == "f2x2":
        return winograd_forward(d, g, cfg, builtin(2, 3), counter=counter)
    if algo == "f4x4":
        return winograd_forward(d, g, cfg, builtin(4, 3), counter=counter)
    if algo == "f2x2-fx":
        return winograd_forward(d, g, cfg, builtin(2, 3), cache_filters=True,
                                cache=cache, counter=counter)
    if algo == "f4x4-fx":
        return winograd_forward(d, g, cfg, builtin(4, 3), cache_filters=True,
                                cache=cache, counter=counter)
    if algo == "fft":
        return fft_forward_layer(d, g, cfg, tile=8, counter=counter)
    raise ValueError(f"unknown algorithm {algo!r}; known: {', '.join(BENCH_ALGOS)}")


def _layer_inputs(cfg: LayerConfig, seed: int, index: int) -> Tuple[Tensor4, Tensor4]:
    # Two seeds per layer, data then filters, so adding a layer to a suite
    # never changes the values another layer sees.
    d = fill_uniform(Tensor4.zeros((cfg.N, cfg.C, cfg.H, cfg.W)),
                     seed + 2 * index, -1.0, 1.0)
    g = fill_uniform(Tensor4.zeros((cfg.K, cfg.C, cfg.R, cfg.S)),
                     seed + 2 * index + 1, -1.0, 1.0)
    return d, g


def cmd_accuracy(suite: str = "vgg-e-accuracy",
                 algos: Sequence[str] = ACCURACY_ALGOS,
                 precision: str = "fp32",
                 seed: int = 0,
                 scale: float = 1.0) -> Report:
    """Max abs error of each algorithm against the fp64 direct oracle.

    precision "fp16" snaps both operands to the binary16 grid first and
    keeps the oracle on the unquantized values, so the reported error
    includes the quantization loss every algorithm shares.
    """
    if precision not in ("fp32", "fp16"):
        raise ValueError(f"precision must be fp32 or fp16, got {precision!r}")
    for a in algos:
        if a not in ACCURACY_ALGOS:
            raise ValueError(f"unknown algorithm {a!r}; known: {', '.join(ACCURACY_ALGOS)}")
    layers = get_suite(suite).scaled(scale)
    tag = "fp32" if precision == "fp32" else Precision.FP16_SIM.value
    rep = Report(columns=("layer", "algo", "precision", "max_abs_err"), seed=seed)
    for i, entry in enumerate(layers.entries):
        d, g = _layer_inputs(entry.cfg, seed, i)
        oracle = direct_forward(d.astype(Precision.FP64), g.astype(Precision.FP64),
                                entry.cfg)
        if precision == "fp16":
            d, g = quantize_fp16(d), quantize_fp16(g)
        for algo in algos:
            y = run_layer(algo, d, g, entry.cfg)
            rep.add(entry.label, algo, tag, max_abs_error(y, oracle))
    return rep


def _round2(v: Optional[float]) -> Optional[float]:
    return None if v is None else round(v, 2)


def cmd_complexity(table: str) -> Report:
    """One of the arithmetic-complexity tables, values at two decimals."""
    if table == "winograd":
        rep = Report(columns=("algorithm", "tile", "alpha_prime", "beta_prime",
                              "gamma_prime", "delta_prime", "source"))
        for p in winograd_table():
            label = "direct" if p.m == 1 else f"F({p.m}x{p.m},3x3)"
            rep.add(label, p.alpha, _round2(p.alpha_prime), _round2(p.beta_prime),
                    _round2(p.gamma_prime), _round2(p.delta_prime), p.source)
        return rep
    if table in ("fft", "fft-fast"):
        rep = Report(columns=("tile", "m", "alpha_prime", "beta_prime",
                              "gamma_prime", "delta_prime", "source"))
        for p in fft_table(fast=(table == "fft-fast")):
            rep.add(p.alpha, p.m, _round2(p.alpha_prime), _round2(p.beta_prime),
                    _round2(p.gamma_prime), _round2(p.delta_prime), p.source)
        return rep
    if table == "layer-costs":
        prof = winograd_profile(4, 3)
        rep = Report(columns=("layer", "depth", "C", "H", "W", "K", "gflops",
                              "beta_over_K", "gamma_over_P", "delta_over_C"))
        total = 0.0
        depths = 0
        for entry in get_suite("vgg-e").entries:
            cfg = entry.cfg
            gf = gflops_direct(cfg)
            total += gf
            depths += cfg.depth
            bo, go, do = prof.overheads(cfg)
            rep.add(entry.label, cfg.depth, cfg.C, cfg.H, cfg.W, cfg.K,
                    _round2(gf), round(bo, 4), round(go, 4), round(do, 4))
        rep.add("TOTAL", depths, None, None, None, None, _round2(total),
                None, None, None)
        return rep
    raise ValueError(f"unknown table {table!r}; known: {', '.join(COMPLEXITY_TABLES)}")


def cmd_bench(suite: str = "vgg-e",
              algo: str = "f2x2",
              batch: int = 1,
              repeats: int = 3,
              scale: float = 1.0,
              seed: int = 0) -> Report:
    """Best-of-N wall time per layer with effective GFLOPS.

    Effective GFLOPS always divides the DIRECT-convolution flop count by the
    measured time, whatever algorithm ran, so faster algorithms show higher
    numbers on identical hardware.  The totals row weights each layer by its
    depth.  Layers that exhaust memory are skipped with empty cells.
    """
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    if algo not in BENCH_ALGOS:
        raise ValueError(f"unknown algorithm {algo!r}; known: {', '.join(BENCH_ALGOS)}")
    layers = get_suite(suite).scaled(scale).with_batch(batch)
    rep = Report(columns=("layer", "algo", "batch", "msec", "effective_gflops"),
                 seed=seed)
    total_sec = 0.0
    total_gf = 0.0
    for i, entry in enumerate(layers.entries):
        cfg = entry.cfg
        try:
            d, g = _layer_inputs(cfg, seed, i)
            cache = FilterCache()
            run_layer(algo, d, g, cfg, cache=cache)  # warm-up, untimed
            best = float("inf")
            for _ in range(repeats):
                t0 = time.perf_counter()
                run_layer(algo, d, g, cfg, cache=cache)
                best = min(best, time.perf_counter() - t0)
        except MemoryError:
            rep.add(entry.label, algo, batch, None, None)
            continue
        per_instance_gf = gflops_direct(cfg) / cfg.depth
        rep.add(entry.label, algo, batch, best * 1e3, per_instance_gf / best)
        total_sec += best * cfg.depth
        total_gf += gflops_direct(cfg)
    if total_sec > 0.0:
        rep.add("TOTAL", algo, batch, total_sec * 1e3, total_gf / total_sec)
    return rep


def parse_points(tokens: Sequence[str]) -> PointSet:
    """Point tokens to a PointSet; "inf"/"oo" marks the point at infinity."""
    finite = []
    has_inf = False
    for tok in tokens:
        t = tok.strip()
        if t.lower() in ("inf", "oo", "infinity"):
            has_inf = True
        else:
            try:
                finite.append(Fraction(t))
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"bad point {tok!r}: {exc}") from None
    return PointSet(tuple(finite), has_infinity=has_inf)


@dataclass(frozen=True)
class GenResult:
    text: str
    verified: bool
    max_magnitude: Fraction
    mu_1d: int
    mu_2d: int


def cmd_gen(m: int, r: int, points: Optional[Sequence[str]] = None) -> GenResult:
    """Generate an exact F(m, r) algorithm with a self-verification verdict."""
    ps = parse_points(points) if points else None
    alg = generate(m, r, ps)
    ok = verify_algorithm(alg)
    a = alg.alpha
    mag = max_transform_magnitude(alg)
    lines = [
        dump_algorithm(alg).rstrip("\n"),
        f"max |entry| = {mag}",
        f"mu(1d) = {a}",
        f"mu(2d) = {a * a}",
        f"self-verified: {'ok' if ok else 'FAILED'}",
    ]
    return GenResult(text="\n".join(lines) + "\n", verified=ok,
                     max_magnitude=mag, mu_1d=a, mu_2d=a * a)
