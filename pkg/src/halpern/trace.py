"""Iteration traces and their CSV form."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

CONVERGED = "converged"
MAX_ITERS = "max_iters_reached"

HEADER = ["n", "alpha_n", "beta_n", "residual_T", "residual_S", "dist_to_target"]


def fmt(v: float) -> str:
    if v is None or np.isnan(v):
        return ""
    return format(float(v), ".17g")


@dataclass
class IterationTrace:
    n: np.ndarray
    x: np.ndarray                 # (rows, d)
    residual_T: np.ndarray
    residual_S: np.ndarray        # NaN when the scheme has no S
    dist_to_target: np.ndarray    # NaN when no predicted limit is known
    alpha_n: np.ndarray
    beta_n: np.ndarray            # NaN for single-operator schemes
    status: str
    target: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def final(self) -> np.ndarray:
        return self.x[-1]

    @property
    def final_n(self) -> int:
        return int(self.n[-1])

    def __len__(self):
        return self.n.size

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER + [f"x_{i}" for i in range(self.x.shape[1])])
        for i in range(self.n.size):
            w.writerow([str(int(self.n[i])), fmt(self.alpha_n[i]), fmt(self.beta_n[i]),
                        fmt(self.residual_T[i]), fmt(self.residual_S[i]),
                        fmt(self.dist_to_target[i])] + [fmt(v) for v in self.x[i]])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            self.write_csv(fh)

    def csv_text(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    def summary(self) -> str:
        parts = [f"status={self.status}", f"n={self.final_n}",
                 f"residual_T={fmt(self.residual_T[-1]) or 'na'}"]
        if not np.isnan(self.residual_S[-1]):
            parts.append(f"residual_S={fmt(self.residual_S[-1])}")
        if not np.isnan(self.dist_to_target[-1]):
            parts.append(f"dist_to_target={fmt(self.dist_to_target[-1])}")
        return " ".join(parts)


def read_csv(path_or_text) -> dict[str, np.ndarray]:
    """Parse a trace CSV into columns (missing fields become NaN)."""
    if isinstance(path_or_text, str) and "\n" in path_or_text:
        rows = list(csv.reader(io.StringIO(path_or_text)))
    else:
        with open(path_or_text, newline="") as fh:
            rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    cols = {}
    for j, name in enumerate(header):
        cols[name] = np.array([float(r[j]) if r[j] != "" else np.nan for r in body])
    cols["n"] = cols["n"].astype(np.int64)
    return cols
