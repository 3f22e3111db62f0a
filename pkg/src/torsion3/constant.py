"""The average constant as a ratio of two series over base fields F.

    c = sum h3(F) Res zeta_F (1 + 2^r1 / 3^(r1+r2)) / (zeta_F(2) Disc(F)^2)
        / sum Res zeta_F / (zeta_F(2) Disc(F)^2)

For quadratic F the tails are bounded termwise: Res zeta_F = L(1, chi_D) is at
most L_bound(D) = a log|D| + b, h3 <= h <= sqrt|D| L_bound(D) / (2 log golden
ratio), and zeta_F(2) = zeta(2) L(2, chi_D) >= zeta(2) * zeta(4)/zeta(2) = zeta(4).
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import quadfield as qf

ZETA4 = math.pi**4 / 90
TWO_LOG_GOLDEN = 2 * math.log((1 + math.sqrt(5)) / 2)  # 0.9624..., lower bound for 2R and for pi
DEFAULT_L_BOUND = (0.5, 1.0)
SAFETY = 1 + 1e-12  # absorbs rounding in the closed-form tails


class LBoundViolation(RuntimeError):
    def __init__(self, D: int, value: float, bound: float):
        super().__init__(f"L(1, chi_D) = {value!r} exceeds L_bound = {bound!r} at D = {D}; raise the bound and rerun")
        self.D = D


def signature_factor(r1: int, r2: int) -> Fraction:
    return 1 + Fraction(2**r1, 3 ** (r1 + r2))


@dataclass(frozen=True)
class TermRecord:
    disc: int
    h3: int
    r1: int
    r2: int
    numerator: float
    denominator: float

    def __post_init__(self):
        if not (self.numerator > 0 and self.denominator > 0):
            raise ValueError(f"terms must be positive (disc={self.disc})")


def term_record(disc: int, h3: int, residue: float, zeta2: float, r1: int, r2: int) -> TermRecord:
    """Both summands for one field; the numerator reuses the denominator so the two stay consistent."""
    den = residue / (zeta2 * float(abs(disc)) ** 2)
    num = h3 * den * float(signature_factor(r1, r2))
    return TermRecord(disc, h3, r1, r2, num, den)


@dataclass(frozen=True)
class TruncatedConstant:
    Y: int
    numerator: float
    denominator: float
    fields: int
    tail_interval: tuple[float, float] | None  # enclosure of the untruncated constant
    tail_numerator: float | None = None
    tail_denominator: float | None = None
    label: str = ""

    @property
    def value(self) -> float:
        return self.numerator / self.denominator

    def to_dict(self) -> dict:
        return {
            "Y": self.Y, "fields": self.fields, "value": self.value,
            "value_hex": self.value.hex(), "numerator": self.numerator, "denominator": self.denominator,
            "tail_numerator": self.tail_numerator, "tail_denominator": self.tail_denominator,
            "tail_interval": list(self.tail_interval) if self.tail_interval else None,
            "label": self.label,
        }


def c_trivial_H() -> Fraction:
    """F = Q alone: h3 = 1, Res = 1, Disc = 1, (r1, r2) = (1, 0); zeta(2) cancels in the ratio."""
    h3, residue, disc = 1, Fraction(1), 1
    common = residue / disc**2  # times 1/zeta(2) in both sums
    return (h3 * common * signature_factor(1, 0)) / common


def c_trivial_H_sums() -> tuple[float, float]:
    """Numerator and denominator separately: (6/pi^2)(5/3) and 6/pi^2."""
    inv_z2 = 6 / math.pi**2
    return inv_z2 * float(signature_factor(1, 0)), inv_z2


def l_bound(D: int, ab: tuple[float, float] = DEFAULT_L_BOUND) -> float:
    a, b = ab
    return a * math.log(abs(D)) + b


def quadratic_tails(Y: int, ab: tuple[float, float] = DEFAULT_L_BOUND) -> tuple[float, float]:
    """Upper bounds for the numerator and denominator sums over |D| > Y.

    With L(x) = a log x + b, two fields per |D| and the termwise bounds in the
    module docstring, the numerator term is at most K n^(-3/2) L(n)^2 and the
    denominator term at most n^(-2) L(n) / zeta(4); both are decreasing, so the
    sums over n > Y are below the integrals from Y, done in closed form after x = e^u:
      int_U^inf e^(-u/2) P(u) du = 2 e^(-U/2) (P + 2P' + 4P'')(U),
      int_U^inf e^(-u) (a u + b) du = e^(-U) (a U + b + a).
    """
    a, b = ab
    U = math.log(Y)
    LU = a * U + b
    if LU <= 4 * a / 3:
        raise ValueError("bound terms are not yet decreasing at Y")
    K = 2 * float(signature_factor(2, 0)) / (TWO_LOG_GOLDEN * ZETA4)
    num = K * 2 * math.exp(-U / 2) * (LU * LU + 4 * a * LU + 8 * a * a)
    den = 2 / ZETA4 * math.exp(-U) * (LU + a)
    return num * SAFETY, den * SAFETY


def enclosure(num: float, den: float, tn: float, td: float) -> tuple[float, float]:
    return num / (den + td), (num + tn) / den


def quadratic_records(Y: int, threads: int = 1, cache: qf.FieldCache | None = None,
                      prec: int = qf.DEFAULT_PREC) -> list[qf.QuadFieldData]:
    Ds = [int(d) for d in qf.fundamental_discriminants(Y)]
    if cache is None:
        return qf.field_table(Ds, threads=threads, prec=prec)
    missing = [d for d in Ds if d not in cache]
    for rec in qf.field_table(missing, threads=threads, prec=prec):
        cache._rows[rec.D] = rec
    if missing:
        qf.write_cache(cache.path, [cache._rows[d] for d in missing])
    return [cache.get(d) for d in Ds]


def check_record(rec: qf.QuadFieldData, ab: tuple[float, float] = DEFAULT_L_BOUND) -> None:
    """Runtime validation of every termwise bound the tail argument uses."""
    bound = l_bound(rec.D, ab)
    if rec.residue > bound:
        raise LBoundViolation(rec.D, rec.residue, bound)
    if rec.zeta2 < ZETA4 or rec.h3 > rec.h:
        raise RuntimeError(f"termwise bound failed at D = {rec.D}")
    if abs(rec.D) > 4 and rec.h > math.sqrt(abs(rec.D)) * bound / TWO_LOG_GOLDEN:
        raise RuntimeError(f"class number bound failed at D = {rec.D}")


def sum_terms(terms: list[TermRecord]) -> tuple[float, float]:
    """Correctly rounded sums, hence independent of order and of how work was split."""
    return math.fsum(t.numerator for t in terms), math.fsum(t.denominator for t in terms)


def c_truncated_C2(Y: int, threads: int = 1, cache: qf.FieldCache | None = None,
                   ab: tuple[float, float] = DEFAULT_L_BOUND, prec: int = qf.DEFAULT_PREC,
                   records: list[qf.QuadFieldData] | None = None) -> TruncatedConstant:
    """Partial sums over quadratic fields with |D| <= Y and an enclosure of the full constant."""
    if Y < 100:
        raise ValueError("Y must be at least 100")
    recs = records if records is not None else quadratic_records(Y, threads, cache, prec)
    terms = []
    for rec in recs:
        check_record(rec, ab)
        terms.append(term_record(rec.D, rec.h3, rec.residue, rec.zeta2, rec.r1, rec.r2))
    num, den = sum_terms(terms)
    tn, td = quadratic_tails(Y, ab)
    return TruncatedConstant(Y, num, den, len(terms), enclosure(num, den, tn, td), tn, td, "C2")


# --- external tables ------------------------------------------------------------

TABLE_HEADER = ["disc", "h3", "residue", "zeta2", "r1", "r2"]


@dataclass
class FieldTable:
    rows: list[TermRecord]
    complete_up_to: int | None = None
    term_bound: tuple[float, float] | None = None  # (C, alpha): numerator terms at |disc| = n sum to <= C n^-alpha
    meta: dict = field(default_factory=dict)


class TableFormatError(ValueError):
    pass


def read_field_table(path) -> FieldTable:
    rows, meta = [], {}
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, val = line[1:].partition("=")
            meta[key.strip()] = val.strip()
        elif line.strip():
            body.append(line)
    rd = csv.reader(body)
    header = next(rd, None)
    if header != TABLE_HEADER:
        raise TableFormatError(f"expected header {','.join(TABLE_HEADER)}, got {header}")
    for lineno, r in enumerate(rd, start=2):
        if len(r) != 6:
            raise TableFormatError(f"row {lineno}: expected 6 fields")
        try:
            disc, h3, r1, r2 = int(r[0]), int(r[1]), int(r[4]), int(r[5])
            residue, zeta2 = float.fromhex(r[2]), float.fromhex(r[3])
        except ValueError as exc:
            raise TableFormatError(f"row {lineno}: {exc}") from None
        if h3 < 1 or r1 < 0 or r2 < 0 or disc == 0 or not (0 < residue < math.inf and 0 < zeta2 < math.inf):
            raise TableFormatError(f"row {lineno}: invalid values")
        rows.append(term_record(disc, h3, residue, zeta2, r1, r2))
    tab = FieldTable(rows, meta=meta)
    try:
        if "complete_up_to" in meta:
            tab.complete_up_to = int(float(meta["complete_up_to"]))
        if "term_bound" in meta:
            C, alpha = (float(x) for x in meta["term_bound"].split(","))
            tab.term_bound = (C, alpha)
    except ValueError as exc:
        raise TableFormatError(f"bad metadata: {exc}") from None
    return tab


def c_from_table(path, label: str = "") -> TruncatedConstant:
    """Constant from an ingested field table; enclosed only when completeness and a term bound are declared."""
    tab = read_field_table(path)
    num, den = sum_terms(tab.rows)
    Y = tab.complete_up_to or max((abs(t.disc) for t in tab.rows), default=1)
    if tab.complete_up_to is None or tab.term_bound is None:
        warnings.warn("table lacks #complete_up_to or #term_bound: truncation only, no enclosure", stacklevel=2)
        return TruncatedConstant(Y, num, den, len(tab.rows), None, None, None,
                                 label or "truncation only, no enclosure")
    C, alpha = tab.term_bound
    if alpha <= 1:
        raise TableFormatError("term_bound exponent must exceed 1")
    tn = C * tab.complete_up_to ** (1 - alpha) / (alpha - 1) * SAFETY
    # denominator terms never exceed numerator terms (h3 >= 1 and the signature factor is > 1)
    return TruncatedConstant(Y, num, den, len(tab.rows), enclosure(num, den, tn, tn), tn, tn, label)


def quadratic_term_bound(Y: int, alpha: float = 1.4, ab: tuple[float, float] = DEFAULT_L_BOUND) -> tuple[float, float]:
    """(C, alpha) with both quadratic numerator terms at |D| = n summing to <= C n^-alpha for n > Y.

    The per-n bound K L(n)^2 n^(-3/2) is rewritten as [K L(n)^2 n^(alpha - 3/2)] n^(-alpha);
    the bracket is maximal at log n = (2a/(3/2 - alpha) - b)/a or at the left end.
    """
    a, b = ab
    K = 2 * float(signature_factor(2, 0)) / (TWO_LOG_GOLDEN * ZETA4)
    g = lambda u: (a * u + b) ** 2 * math.exp((alpha - 1.5) * u)
    u_star = (2 * a / (1.5 - alpha) - b) / a
    u0 = math.log(Y)
    return K * max(g(u0), g(u_star) if u_star > u0 else 0.0) * SAFETY, alpha


def export_table(records: list[qf.QuadFieldData], path, complete_up_to: int | None = None,
                 term_bound: tuple[float, float] | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        if complete_up_to is not None:
            fh.write(f"#complete_up_to={complete_up_to}\n")
        if term_bound is not None:
            fh.write(f"#term_bound={term_bound[0]!r},{term_bound[1]!r}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TABLE_HEADER)
        for r in records:
            w.writerow([r.D, r.h3, r.residue.hex(), r.zeta2.hex(), r.r1, r.r2])
