"""Partial summation against step functions, and the tail-bound experiment built on it."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate


@dataclass(frozen=True)
class StepData:
    """Weights a_i at increasing points t_i; A(T) = sum of a_i over t_i <= T."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.points, dtype=np.float64)
        a = np.asarray(self.weights, dtype=np.float64)
        if t.shape != a.shape or t.ndim != 1:
            raise ValueError("points and weights must be 1-d arrays of equal length")
        if len(t) > 1 and not (np.diff(t) > 0).all():
            raise ValueError("points must be strictly increasing")
        object.__setattr__(self, "points", t)
        object.__setattr__(self, "weights", a)
        object.__setattr__(self, "_cum", np.concatenate([[0.0], np.cumsum(a)]))

    def A(self, T: float) -> float:
        return float(self._cum[np.searchsorted(self.points, T, side="right")])


@dataclass(frozen=True)
class PowerLaw:
    """T -> coef * T^exponent, with an exact antiderivative."""

    coef: float
    exponent: float

    def __call__(self, T):
        return self.coef * np.power(T, self.exponent)

    def integral(self, lo: float, hi: float) -> float:
        k = self.exponent
        if k == -1:
            return self.coef * (math.log(hi) - math.log(lo))
        return self.coef * (hi ** (k + 1) - lo ** (k + 1)) / (k + 1)

    def derivative(self) -> "PowerLaw":
        return PowerLaw(self.coef * self.exponent, self.exponent - 1)


@dataclass(frozen=True)
class AbelResult:
    lhs: float
    rhs: float
    residual: float
    relative: float


def _segment_integral(phi_prime, lo: float, hi: float) -> float:
    if isinstance(phi_prime, PowerLaw):
        return phi_prime.integral(lo, hi)
    val, _ = integrate.quad(phi_prime, lo, hi, epsabs=0.0, epsrel=1e-12, limit=200)
    return val


def abel_identity(data: StepData, phi: Callable, phi_prime, Y: float, X: float) -> AbelResult:
    """Compare sum_{Y < t_i <= X} a_i phi(t_i) with A(X)phi(X) - A(Y)phi(Y) - int_Y^X A phi'.

    The integral is taken segment by segment between consecutive points, where A
    is constant; ``phi_prime`` is integrated on its own (closed form for a
    PowerLaw, adaptive quadrature otherwise), never through ``phi``.
    """
    if not Y < X:
        raise ValueError("need Y < X")
    t, a = data.points, data.weights
    lo = np.searchsorted(t, Y, side="right")
    hi = np.searchsorted(t, X, side="right")
    inner_t, inner_a = t[lo:hi], a[lo:hi]
    with np.errstate(all="ignore"):  # non-finite values are reported below
        phis = np.asarray(phi(inner_t), dtype=np.float64) if len(inner_t) else np.empty(0)
        pX, pY = float(phi(X)), float(phi(Y))
    if not (np.isfinite(phis).all() and math.isfinite(pX) and math.isfinite(pY)):
        raise ValueError("phi is not finite on [Y, X]")
    lhs = math.fsum((inner_a * phis).tolist())
    A_Y, A_X = data.A(Y), data.A(X)
    breaks = [Y, *inner_t.tolist(), X]
    levels = A_Y + np.concatenate([[0.0], np.cumsum(inner_a)])
    pieces = [levels[j] * _segment_integral(phi_prime, breaks[j], breaks[j + 1])
              for j in range(len(breaks) - 1) if breaks[j + 1] > breaks[j]]
    rhs = math.fsum([A_X * pX, -A_Y * pY] + [-p for p in pieces])
    residual = abs(lhs - rhs)
    scale = max(abs(lhs), abs(A_X * pX), abs(A_Y * pY), math.fsum(abs(p) for p in pieces), 1e-300)
    return AbelResult(lhs, rhs, residual, residual / scale)


# --- the tail-bound experiment ------------------------------------------------


def extremal_step_data(N: int, delta: float) -> StepData:
    """Unit-spaced steps with A(n) = n^(1 - delta) exactly at every integer n <= N."""
    n = np.arange(1, N + 1, dtype=np.float64)
    return StepData(n, n ** (1 - delta) - (n - 1) ** (1 - delta))


def default_grid(refine: int = 1) -> list[tuple[float, float]]:
    """X = 10^4 .. 10^8 and Y = 10 .. sqrt(X), two points per decade (times ``refine``)."""
    per = 2 * refine
    grid = []
    for i in range(4 * per + 1):
        X = 10 ** (4 + i / per)
        for j in range(int(round((math.log10(X) / 2 - 1) * per)) + 1):
            Y = 10 ** (1 + j / per)
            if Y < math.sqrt(X) * (1 - 1e-12):
                grid.append((X, Y))
    return grid


@dataclass(frozen=True)
class TailRow:
    X: float
    Y: float
    S: float
    bound: float
    ratio: float


@dataclass(frozen=True)
class TailReport:
    delta: float
    epsilon: float
    rows: tuple[TailRow, ...]
    max_residual: float  # relative, over the Abel evaluations

    @property
    def C(self) -> float:
        return max(r.ratio for r in self.rows)

    def to_dict(self) -> dict:
        return {"delta": self.delta, "epsilon": self.epsilon, "C": self.C, "max_residual": self.max_residual,
                "rows": [vars(r) for r in self.rows]}


def proof_bound(X: float, Y: float, delta: float, eps: float) -> float:
    return X ** (1 - delta / 2 + eps / 2) + X / Y ** (delta - eps)


def final_shape_bound(X: float, Y: float, delta: float) -> float:
    return X / Y ** (delta / 2) + X ** (1 - delta / 4)


def _tail_sum(data: StepData, X: float, Y: float, eps: float) -> tuple[float, float]:
    phi = PowerLaw(X, eps - 1)
    res = abel_identity(data, phi, phi.derivative(), Y, math.sqrt(X))
    return res.rhs, res.relative


def tail_bound_experiment(delta: float, eps: float, grid=None, data: StepData | None = None,
                          bound: Callable | None = None) -> TailReport:
    """S(X, Y) = sum_{Y < t <= sqrt X} a_t X / t^(1 - eps) against the proof's bound over a grid."""
    if not 0 < eps < delta < 1:
        raise ValueError("need 0 < eps < delta < 1")
    grid = default_grid() if grid is None else grid
    if data is None:
        N = int(math.isqrt(int(max(X for X, _ in grid)))) + 1
        data = extremal_step_data(N, delta)
    bound = bound or (lambda X, Y: proof_bound(X, Y, delta, eps))
    rows, worst = [], 0.0
    for X, Y in grid:
        S, rel = _tail_sum(data, X, Y, eps)
        worst = max(worst, rel)
        B = bound(X, Y)
        rows.append(TailRow(X, Y, S, B, S / B))
    return TailReport(delta, eps, tuple(rows), worst)


def final_shape_check(delta: float, grid=None) -> dict:
    """With eps = delta/2 the proof's bound is the final shape X/Y^(delta/2) + X^(1 - delta/4)."""
    eps = delta / 2
    grid = default_grid() if grid is None else grid
    rep = tail_bound_experiment(delta, eps, grid, bound=lambda X, Y: final_shape_bound(X, Y, delta))
    agree = max(abs(proof_bound(X, Y, delta, eps) / final_shape_bound(X, Y, delta) - 1) for X, Y in grid)
    ok = math.isfinite(rep.C) and agree < 1e-12
    return {"delta": delta, "epsilon": eps, "C": rep.C, "shape_mismatch": agree, "passed": ok}


def stability(delta: float, eps: float, refine: int = 2) -> tuple[float, float, float]:
    """(C on the default grid, C on a grid ``refine`` times denser, relative change)."""
    c1 = tail_bound_experiment(delta, eps, default_grid(1)).C
    c2 = tail_bound_experiment(delta, eps, default_grid(refine)).C
    return c1, c2, abs(c2 - c1) / c1


def moment_step_data(table, kind: str = "h2_23_h3") -> StepData:
    """Per-discriminant weights h3 h2^(2/3) (or h3) from a quadfield torsion table."""
    absD = np.abs(table.D)
    w = table.h3.astype(np.float64)
    if kind == "h2_23_h3":
        w = w * np.power(2.0, 2 * (table.omega - 1) / 3)
    uniq, inv = np.unique(absD, return_inverse=True)
    weights = np.zeros(len(uniq))
    np.add.at(weights, inv, w)
    return StepData(uniq.astype(np.float64), weights)


def real_data_experiment(table, delta: float = 0.2, eps: float = 0.1) -> dict:
    """Run the experiment on the measured moment sum for quadratic fields.

    A(T) grows at least linearly, so no delta > 0 fits the hypothesis and the
    ratio against the bound keeps growing with X instead of settling at a constant.
    """
    from .counting import CountSeries, fit_exponent, geometric_checkpoints

    data = moment_step_data(table)
    T_max = int(data.points[-1])
    cps = geometric_checkpoints(T_max, start=100)
    series = CountSeries("moment-A", tuple((t, data.A(t)) for t in cps))
    fit = fit_exponent(series)
    Xs = [10 ** (2 * k) for k in range(2, 7) if 10**k <= T_max]
    grid = [(X, 10.0) for X in Xs]
    rep = tail_bound_experiment(delta, eps, grid, data=data)
    ratios = [r.ratio for r in rep.rows]
    growing = all(b > a for a, b in zip(ratios, ratios[1:]))
    return {"slope": fit.slope, "delta_effective": 1 - fit.slope,
            "hypothesis_holds": 1 - fit.slope > 0, "ratios": ratios, "X": Xs,
            "ratio_increasing": growing}
