"""Tabular run reports with lossless CSV round-tripping.

A Report is a header plus typed rows (str, int, float, or None cells).  CSV
output renders floats with repr so parsing an emitted report reproduces the
in-memory values exactly; the RNG seed rides along as a comment line.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import List, Optional, Tuple


def _render_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        # "" encodes None, and control characters would corrupt the framing,
        # so neither is a representable text cell.
        if v == "":
            raise ValueError("empty text cell is not representable; use None")
        if any(ord(ch) < 32 or ch == "\x7f" for ch in v):
            raise ValueError(f"cell text must be printable: {v!r}")
    return str(v)


def _parse_cell(s: str):
    if s == "":
        return None
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


@dataclass
class Report:
    columns: Tuple[str, ...]
    rows: List[tuple] = field(default_factory=list)
    seed: Optional[int] = None

    def add(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} cells, header has {len(self.columns)}")
        self.rows.append(tuple(values))

    def to_csv(self) -> str:
        buf = io.StringIO()
        if self.seed is not None:
            buf.write(f"# seed={self.seed}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_render_cell(v) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Report":
        seed = None
        lines = []
        for line in text.splitlines():
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if body.startswith("seed="):
                    seed = int(body[len("seed="):])
                continue
            if line.strip():
                lines.append(line)
        if not lines:
            raise ValueError("empty report text")
        parsed = list(csv.reader(lines))
        columns = tuple(parsed[0])
        report = cls(columns=columns, seed=seed)
        for raw in parsed[1:]:
            if len(raw) != len(columns):
                raise ValueError(f"row {raw!r} does not match header {columns}")
            report.rows.append(tuple(_parse_cell(c) for c in raw))
        return report

    def to_text(self) -> str:
        """Aligned fixed-width rendering; floats shown with 6 significant digits."""

        def show(v):
            if v is None:
                return "-"
            if isinstance(v, float):
                return f"{v:.6g}"
            return str(v)

        table = [tuple(self.columns)] + [tuple(show(v) for v in row) for row in self.rows]
        widths = [max(len(r[i]) for r in table) for i in range(len(self.columns))]
        lines = []
        if self.seed is not None:
            lines.append(f"# seed={self.seed}")
        for idx, row in enumerate(table):
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
            if idx == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]
