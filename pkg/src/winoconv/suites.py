"""Named layer suites for accuracy and benchmark runs.

A suite is an ordered list of labeled layer shapes.  The compiled-in
"vgg-e" preset carries the nine distinct convolution shapes of the VGG
network E configuration with their repeat depths; "vgg-e-accuracy" is the
five-shape subset conventionally used for error reporting.  Suites can also
be loaded from a JSON file with fields label, N, C, H, W, K, R, S, pad,
depth.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Tuple

from .direct import LayerConfig, gflops_direct


@dataclass(frozen=True)
class SuiteEntry:
    label: str
    cfg: LayerConfig


@dataclass(frozen=True)
class LayerSuite:
    name: str
    entries: Tuple[SuiteEntry, ...]

    def labels(self) -> Tuple[str, ...]:
        return tuple(e.label for e in self.entries)

    def total_gflops_direct(self) -> float:
        """Depth-weighted direct-convolution GFLOPs (2 flops per multiply-add)."""
        return sum(gflops_direct(e.cfg) for e in self.entries)

    def scaled(self, scale: float) -> "LayerSuite":
        """Shrink spatial dims by scale, leaving N, C, K, filters untouched.

        H and W never drop below the filter size, so every layer stays valid.
        """
        if not 0.0 < scale <= 1.0:
            raise ValueError(f"scale must be in (0, 1], got {scale}")
        if scale == 1.0:
            return self
        entries = []
        for e in self.entries:
            c = e.cfg
            h = max(int(round(c.H * scale)), c.R)
            w = max(int(round(c.W * scale)), c.S)
            entries.append(SuiteEntry(e.label, LayerConfig(
                N=c.N, C=c.C, H=h, W=w, K=c.K, R=c.R, S=c.S,
                pad=c.pad, depth=c.depth)))
        return LayerSuite(self.name, tuple(entries))

    def with_batch(self, n: int) -> "LayerSuite":
        if n < 1:
            raise ValueError(f"batch must be >= 1, got {n}")
        return LayerSuite(self.name, tuple(
            SuiteEntry(e.label, e.cfg.with_batch(n)) for e in self.entries))


def _vgg_layer(label: str, c: int, h: int, k: int, depth: int) -> SuiteEntry:
    return SuiteEntry(label, LayerConfig(N=1, C=c, H=h, W=h, K=k,
                                         R=3, S=3, pad=1, depth=depth))


_VGG_E_ROWS = (
    ("conv1.1", 3, 224, 64, 1),
    ("conv1.2", 64, 224, 64, 1),
    ("conv2.1", 64, 112, 128, 1),
    ("conv2.2", 128, 112, 128, 1),
    ("conv3.1", 128, 56, 256, 1),
    ("conv3.2", 256, 56, 256, 3),
    ("conv4.1", 256, 28, 512, 1),
    ("conv4.2", 512, 28, 512, 3),
    ("conv5", 512, 14, 512, 4),
)

_ACCURACY_LABELS = ("conv1.2", "conv2.2", "conv3.2", "conv4.2", "conv5")


def vgg_e() -> LayerSuite:
    return LayerSuite("vgg-e", tuple(_vgg_layer(*row) for row in _VGG_E_ROWS))


def vgg_e_accuracy() -> LayerSuite:
    by_label = {e.label: e for e in vgg_e().entries}
    return LayerSuite("vgg-e-accuracy",
                      tuple(by_label[l] for l in _ACCURACY_LABELS))


def load_suite(path: str) -> LayerSuite:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    entries = []
    for row in doc["layers"]:
        cfg = LayerConfig(N=int(row.get("N", 1)), C=int(row["C"]),
                          H=int(row["H"]), W=int(row["W"]), K=int(row["K"]),
                          R=int(row.get("R", 3)), S=int(row.get("S", 3)),
                          pad=int(row.get("pad", 1)), depth=int(row.get("depth", 1)))
        entries.append(SuiteEntry(str(row["label"]), cfg))
    if not entries:
        raise ValueError(f"suite file {path} has no layers")
    return LayerSuite(str(doc.get("name", path)), tuple(entries))


def get_suite(name: str) -> LayerSuite:
    """Resolve a preset name, or fall back to loading a JSON file path."""
    if name == "vgg-e":
        return vgg_e()
    if name == "vgg-e-accuracy":
        return vgg_e_accuracy()
    if name.endswith(".json"):
        return load_suite(name)
    raise ValueError(f"unknown suite {name!r}; presets: vgg-e, vgg-e-accuracy, "
                     f"or a path to a .json suite file")
