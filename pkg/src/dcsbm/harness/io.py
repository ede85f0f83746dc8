"""Label files: one integer per line, communities numbered from 1."""

from __future__ import annotations

import numpy as np


def read_labels(text: str) -> np.ndarray:
    """Parse a label file into 0-based labels."""
    vals = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            vals.append(int(line))
        except ValueError:
            raise ValueError(f"line {lineno}: expected an integer label, got {line!r}") from None
    labels = np.array(vals, dtype=np.int64)
    if labels.size and labels.min() < 1:
        raise ValueError("labels must be >= 1")
    return labels - 1


def format_labels(labels) -> str:
    return "".join(f"{int(v) + 1}\n" for v in np.asarray(labels))
