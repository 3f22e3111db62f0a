"""Running means of h3 over quadratic fields ordered by |Disc|."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import quadfield as qf
from .counting import geometric_checkpoints

FILTERS = ("imaginary", "real", "both")
LIMITS = {"imaginary": Fraction(2), "real": Fraction(4, 3), "both": Fraction(5, 3)}


@dataclass(frozen=True)
class AveragePoint:
    X: int
    field_count: int
    sum_h3: int

    @property
    def mean_h3(self) -> Fraction:
        return Fraction(self.sum_h3, self.field_count) if self.field_count else Fraction(0)


@dataclass(frozen=True)
class AverageSeries:
    filter: str
    checkpoints: tuple[AveragePoint, ...]

    def at(self, X: int) -> AveragePoint:
        for pt in self.checkpoints:
            if pt.X == X:
                return pt
        raise KeyError(X)

    def to_rows(self) -> list[dict]:
        return [{"X": p.X, "field_count": p.field_count, "sum_h3": p.sum_h3,
                 "mean_h3": float(p.mean_h3)} for p in self.checkpoints]


def _select(D: np.ndarray, filt: str) -> np.ndarray:
    if filt == "imaginary":
        return D < 0
    if filt == "real":
        return D > 0
    if filt == "both":
        return np.ones(len(D), dtype=bool)
    raise ValueError(f"filter must be one of {FILTERS}")


def dh_average(filt: str, X: int, checkpoints=None, threads: int = 1,
               table: qf.TorsionTable | None = None) -> AverageSeries:
    """Exact running sums of h3 over fundamental D with |D| <= X_i and the chosen signature."""
    if filt not in FILTERS:
        raise ValueError(f"filter must be one of {FILTERS}")
    if X < 3:
        raise ValueError("X must be at least 3")
    tab = table if table is not None and table.limit >= X else qf.torsion_table(X, threads)
    cps = sorted({int(c) for c in (checkpoints if checkpoints is not None else geometric_checkpoints(X, count=12))
                  if 1 <= c <= X})
    absD = np.abs(tab.D)
    keep = _select(tab.D, filt)
    cnt = np.cumsum(keep)
    s = np.cumsum(np.where(keep, tab.h3, 0))
    pts = []
    for x in cps:
        n = int(np.searchsorted(absD, x, side="right"))
        pts.append(AveragePoint(x, int(cnt[n - 1]) if n else 0, int(s[n - 1]) if n else 0))
    return AverageSeries(filt, tuple(pts))


@dataclass(frozen=True)
class GapReport:
    c: Fraction
    rows: tuple[tuple[int, Fraction, Fraction], ...]  # (X, mean, |mean - c|)
    shrinking: bool  # gap at the largest X below the gap at the largest X' <= X/100

    def to_dict(self) -> dict:
        return {"c": str(self.c), "shrinking": self.shrinking,
                "rows": [{"X": x, "mean_h3": float(m), "gap": float(g)} for x, m, g in self.rows]}


def compare_to_constant(series: AverageSeries, c) -> GapReport:
    if not series.checkpoints:
        raise ValueError("empty series")
    c = Fraction(c)
    rows = tuple((p.X, p.mean_h3, abs(p.mean_h3 - c)) for p in series.checkpoints if p.field_count)
    Xmax, _, gmax = rows[-1]
    earlier = [g for x, _, g in rows if 100 * x <= Xmax]
    shrinking = bool(earlier) and gmax < earlier[-1]
    return GapReport(c, rows, shrinking)
