"""Plain-text sequence files ("seq-v1").

One decimal value per line, UTF-8. Lines whose first non-blank character is
``#`` are comments; blank lines are skipped. NaN and infinities are
rejected.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

HEADER = "# seq-v1"


class SeqFormatError(ValueError):
    pass


def parse_seq(text: str, source: str = "<text>") -> np.ndarray:
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            v = float(s)
        except ValueError:
            raise SeqFormatError(f"{source}:{lineno}: not a number: {s!r}") from None
        if not math.isfinite(v):
            raise SeqFormatError(f"{source}:{lineno}: value must be finite, got {s!r}")
        values.append(v)
    return np.asarray(values, dtype=float)


def read_seq(path) -> np.ndarray:
    path = Path(path)
    return parse_seq(path.read_text(encoding="utf-8"), str(path))


def format_seq(values: Iterable[float], comments: Optional[Iterable[str]] = None) -> str:
    lines = [HEADER]
    lines.extend(f"# {c}" for c in (comments or ()))
    for v in values:
        v = float(v)
        if not math.isfinite(v):
            raise SeqFormatError(f"cannot write non-finite value {v}")
        lines.append(repr(v))
    return "\n".join(lines) + "\n"


def write_seq(path, values: Iterable[float], comments: Optional[Iterable[str]] = None) -> None:
    Path(path).write_text(format_seq(values, comments), encoding="utf-8")
