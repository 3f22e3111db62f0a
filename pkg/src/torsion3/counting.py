"""Counting quadratic and cyclic fields by discriminant, class-group moment sums, exponent fits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quadfield as qf

FAMILIES = ("C2", "C3", "C5", "C7", "moment-A", "moment-h3", "moment-h3-footnote")
MOMENT_KINDS = ("h3", "h2_23_h3", "h3_only_footnote")
CONDUCTOR_CAP = 10**7
QUADRATIC_CAP = 10**9
MOMENT_CAP = 10**7


@dataclass(frozen=True)
class CountSeries:
    family: str
    checkpoints: tuple[tuple[int, float], ...]
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        Ts = [t for t, _ in self.checkpoints]
        if any(b <= a for a, b in zip(Ts, Ts[1:])):
            raise ValueError("checkpoints must be strictly increasing in T")
        vals = [v for _, v in self.checkpoints]
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise ValueError("series values must be nondecreasing")

    @property
    def T(self) -> np.ndarray:
        return np.array([t for t, _ in self.checkpoints], dtype=np.float64)

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.checkpoints], dtype=np.float64)

    def value_at(self, T: int):
        for t, v in self.checkpoints:
            if t == T:
                return v
        raise KeyError(T)

    def to_rows(self) -> list[dict]:
        return [{"T": t, "value": v} for t, v in self.checkpoints]


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    residual: float  # root-mean-square of the log residuals
    T_range: tuple[float, float]
    points: int

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "residual": self.residual,
                "T_range": list(self.T_range), "points": self.points}


def geometric_checkpoints(limit: int, count: int | None = None, per_decade: int = 10,
                          start: int = 10) -> list[int]:
    """Geometric grid ending at ``limit``.

    With ``count`` the grid is round(limit^(k/count)), k = 1..count; otherwise
    ``per_decade`` points per factor 10 from ``start``.
    """
    if limit < 1:
        raise ValueError("limit must be positive")
    if count is not None:
        pts = [round(limit ** (k / count)) for k in range(1, count + 1)]
    else:
        lo, hi = math.log10(start), math.log10(limit)
        steps = max(1, round((hi - lo) * per_decade))
        pts = [round(10 ** (lo + (hi - lo) * k / steps)) for k in range(steps + 1)]
    pts[-1] = limit
    return sorted({int(p) for p in pts if p >= 1})


# --- quadratic ---------------------------------------------------------------


def count_quadratic(T: int, checkpoints=None, threads: int = 1) -> CountSeries:
    """Number of quadratic fields with |Disc| <= T_i."""
    if T > QUADRATIC_CAP:
        raise ValueError(f"T must be at most {QUADRATIC_CAP}")
    cps = checkpoints if checkpoints is not None else geometric_checkpoints(T)
    rows = qf.fundamental_count_series(T, cps, threads=threads)
    return CountSeries("C2", tuple((t, p + n) for t, p, n in rows))


def count_quadratic_brute(T: int) -> int:
    return sum(1 for n in range(2, T + 1) for d in (n, -n) if qf.is_fundamental(d))


# --- cyclic fields of prime degree ---------------------------------------------


def integer_root(n: int, k: int) -> int:
    """Largest r >= 0 with r^k <= n."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    r = int(round(n ** (1.0 / k)))
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def cyclic_conductor_table(p: int, F: int) -> np.ndarray:
    """fields[f] = number of cyclic degree-p fields of conductor exactly f, 0 <= f <= F.

    Admissible conductors are (optionally p^2) times distinct primes q = 1 mod p;
    with t such factors there are (p-1)^t primitive order-p characters, and each
    field carries p-1 of them.
    """
    if p not in (3, 5, 7):
        raise ValueError("p must be 3, 5 or 7")
    ok = _admissible(F, p)
    t = np.zeros(F + 1, dtype=np.int64)
    for q in qf._primes_upto(max(F, 2)):
        q = int(q)
        if q == p or q % p == 1:
            t[q::q] += 1
    fields = np.zeros(F + 1, dtype=np.int64)
    fields[ok] = (p - 1) ** (t[ok] - 1)
    return fields


def _admissible(F: int, p: int) -> np.ndarray:
    """f >= 2 whose prime factors are q = 1 mod p (to the first power) or p (to the exact power 2)."""
    rem = np.arange(F + 1, dtype=np.int64)
    ok = np.ones(F + 1, dtype=bool)
    ok[:2] = False
    for q in qf._primes_upto(max(F, 2)):
        q = int(q)
        if q == p:
            e = 2
        elif q % p == 1:
            e = 1
        else:
            ok[q::q] = False
            continue
        idx = np.arange(q, F + 1, q)
        sub = rem[idx]
        k = np.zeros(len(idx), dtype=np.int64)
        while True:
            div = sub % q == 0
            if not div.any():
                break
            sub[div] //= q
            k[div] += 1
        rem[idx] = sub
        ok[idx[k != e]] = False
    return ok & (rem == 1)


def count_cyclic(p: int, T: int, checkpoints=None) -> CountSeries:
    """Number of cyclic degree-p fields with f^(p-1) <= T_i."""
    if p not in (3, 5, 7):
        raise ValueError("p must be 3, 5 or 7")
    F = integer_root(T, p - 1)
    if F > CONDUCTOR_CAP:
        raise ValueError(f"conductor bound {F} exceeds cap {CONDUCTOR_CAP}")
    fields = cyclic_conductor_table(p, F)
    cum = np.cumsum(fields)
    cps = checkpoints if checkpoints is not None else geometric_checkpoints(T)
    rows = tuple((int(t), int(cum[integer_root(int(t), p - 1)])) for t in sorted(set(int(c) for c in cps)) if t <= T)
    return CountSeries(f"C{p}", rows)


def primitive_order_p_characters(f: int, p: int) -> int:
    """Oracle: primitive characters mod f of order exactly p, counted by brute force.

    #{chi mod d : chi^p = 1} = #{x in (Z/d)^* : x^p = 1} (a finite abelian group and
    its dual are isomorphic), and Moebius inversion over d | f keeps the primitive ones.
    """
    def solutions(d: int) -> int:
        if d == 1:
            return 1
        x = np.arange(d, dtype=np.int64)
        y = np.ones(d, dtype=np.int64)
        for _ in range(p):
            y = (y * x) % d
        return int(np.count_nonzero((y == 1 % d) & (np.gcd(x, d) == 1)))

    total = 0
    for d in range(1, f + 1):
        if f % d == 0:
            mu = _mobius(f // d)
            if mu:
                total += mu * solutions(d)
    return total - (1 if f == 1 else 0)


def _mobius(n: int) -> int:
    out, d = 1, 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            out = -out
        d += 1
    return -out if n > 1 else out


def cyclic_fields_of_conductor_oracle(f: int, p: int) -> int:
    chars = primitive_order_p_characters(f, p)
    if chars % (p - 1):
        raise RuntimeError(f"{chars} characters mod {f} do not split into Galois orbits")
    return chars // (p - 1)


# --- moments ----------------------------------------------------------------


def moment_series(kind: str, T: int, checkpoints=None, threads: int = 1,
                  table: qf.TorsionTable | None = None) -> CountSeries:
    """Partial sums over quadratic fields with |D| <= T_i.

    kind 'h3': sum h3.  'h2_23_h3': sum h3 h2^(2/3).  'h3_only_footnote': sum h3,
    to be compared against T^(2/3).  h2 is the narrow 2-torsion (genus theory),
    an upper bound for the wide one when D > 0.
    """
    if kind not in MOMENT_KINDS:
        raise ValueError(f"kind must be one of {MOMENT_KINDS}")
    if T > MOMENT_CAP:
        raise ValueError(f"T must be at most {MOMENT_CAP}")
    tab = table if table is not None and table.limit >= T else qf.torsion_table(T, threads)
    cps = sorted({int(c) for c in (checkpoints if checkpoints is not None else geometric_checkpoints(T)) if c <= T})
    absD = np.abs(tab.D)
    rank2 = tab.omega - 1  # h2 = 2^rank2
    rows = []
    # exact integer sums per 2-rank, combined in a fixed order
    for t in cps:
        n = int(np.searchsorted(absD, t, side="right"))
        h3 = tab.h3[:n]
        if kind == "h2_23_h3":
            ranks = rank2[:n]
            buckets = {int(r): int(h3[ranks == r].sum()) for r in np.unique(ranks)}
            value = math.fsum(s * 2.0 ** (2 * r / 3) for r, s in sorted(buckets.items()))
        else:
            value = int(h3.sum())
        rows.append((t, value))
    family = {"h3": "moment-h3", "h2_23_h3": "moment-A", "h3_only_footnote": "moment-h3-footnote"}[kind]
    meta = {"reference_exponent": 2 / 3} if kind == "h3_only_footnote" else {}
    return CountSeries(family, tuple(rows), meta)


# --- fits -------------------------------------------------------------------


def fit_exponent(series: CountSeries, T_range: tuple[float, float] | None = None) -> ExponentFit:
    """Least-squares slope of log(value) against log(T).

    Without ``T_range`` the smallest decade of the series is dropped.
    """
    T, v = series.T, series.values
    if T_range is None:
        if len(T) == 0:
            raise ValueError("empty series")
        T_range = (T[0] * 10, T[-1])
    lo, hi = T_range
    sel = (T >= lo * (1 - 1e-12)) & (T <= hi * (1 + 1e-12))
    if sel.sum() < 5:
        raise ValueError(f"need at least 5 checkpoints in range, have {int(sel.sum())}")
    if (v[sel] <= 0).any():
        raise ValueError("all values in range must be positive")
    x, y = np.log(T[sel]), np.log(v[sel])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return ExponentFit(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))),
                       (float(lo), float(hi)), int(sel.sum()))
