"""Operation counters for multiply accounting.

The engine, the direct oracle, and the FFT reference all accept an
optional ``OpCounter`` and tally the pairwise products they actually
perform. Counts use two keys:

* ``"mul"``: real scalar multiplies.
* ``"cmul"``: complex pairwise products (each also adds 3 or 4 ``"mul"``
  depending on the complex-product kernel).

Transform stages are additions and constant multiplies; they are priced by
the complexity model, not tallied here. Counters only cover the multiply
stage, which is the quantity the reduction arguments are about.
"""

from __future__ import annotations

__all__ = ["OpCounter"]


class OpCounter:
    """Additive tally of operation counts, keyed by operation name."""

    __slots__ = ("counts",)

    def __init__(self) -> None:
        self.counts: dict[str, int] = {}

    def add(self, key: str, n: int = 1) -> None:
        if n < 0:
            raise ValueError("counter increments must be non-negative")
        self.counts[key] = self.counts.get(key, 0) + n

    def get(self, key: str) -> int:
        return self.counts.get(key, 0)

    def __getitem__(self, key: str) -> int:
        return self.get(key)

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in sorted(self.counts.items()))
        return f"OpCounter({inner})"
