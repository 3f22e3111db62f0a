"""Arithmetic of quadratic fields through binary quadratic forms.

Class groups are form class groups: for D < 0 the reduced forms, for D > 0
the rho-cycles of reduced indefinite forms (proper equivalence, so the
*narrow* class group).  The narrow and wide groups differ by at most a
factor 2, so their 3-parts agree; ``h2`` for D > 0 is the narrow value and
is only ever used as an upper bound.
"""

from __future__ import annotations

import csv
import math
import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterator, NamedTuple

import mpmath
import numpy as np
from scipy import special

from . import _kernels as K

SEGMENT = 1 << 22
DEFAULT_PREC = 128  # bits for regulators
THETA_CUTOFF = 60.0  # truncate the theta series once pi n^2 / |D| exceeds this
ZETA2_TAIL_TARGET = 1e-12


class NotFundamental(ValueError):
    pass


# --- fundamental discriminants --------------------------------------------


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n % 4 == 0:
        return False
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1 if d == 2 else 2
    return True


def is_fundamental(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def _require_fundamental(D: int) -> None:
    if not is_fundamental(D):
        raise NotFundamental(f"{D} is not a fundamental discriminant")


@lru_cache(maxsize=8)
def _primes_upto(n: int) -> np.ndarray:
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve)


def _squarefree_mask(lo: int, hi: int) -> np.ndarray:
    """mask[i] is True iff lo + i is squarefree, for lo >= 1."""
    mask = np.ones(max(hi - lo, 0), dtype=bool)
    for p in _primes_upto(math.isqrt(max(hi - 1, 1)) + 1):
        q = int(p) * int(p)
        if q >= hi:
            break
        start = (-lo) % q
        mask[start::q] = False
    return mask


def _fundamental_segment(lo: int, hi: int) -> tuple[np.ndarray, np.ndarray]:
    """Indicator arrays (positive, negative) of fundamental discriminants with |D| in [lo, hi)."""
    n = np.arange(lo, hi, dtype=np.int64)
    sf = _squarefree_mask(lo, hi)
    mlo = lo // 4
    msf = _squarefree_mask(max(mlo, 1), hi // 4 + 2)
    if mlo == 0:
        msf = np.concatenate([[False], msf])
    r = n % 4
    m = n // 4
    sf_m = msf[m - mlo]
    pos = ((r == 1) & sf) | ((r == 0) & np.isin(m % 4, (2, 3)) & sf_m)
    neg = ((r == 3) & sf) | ((r == 0) & np.isin(m % 4, (1, 2)) & sf_m)
    pos &= n > 1
    neg &= n > 2
    return pos, neg


def iter_fundamental_segments(limit: int, segment: int = SEGMENT) -> Iterator[np.ndarray]:
    """Fundamental discriminants with 1 < |D| <= limit, one sorted array per segment."""
    lo = 1
    while lo <= limit:
        hi = min(lo + segment, limit + 1)
        pos, neg = _fundamental_segment(lo, hi)
        n = np.arange(lo, hi, dtype=np.int64)
        # at equal |D| the positive discriminant comes first
        both = np.empty(2 * len(n), dtype=np.int64)
        keep = np.empty(2 * len(n), dtype=bool)
        both[0::2], both[1::2] = n, -n
        keep[0::2], keep[1::2] = pos, neg
        yield both[keep]
        lo = hi


def fundamental_discriminants(limit: int) -> np.ndarray:
    """All fundamental D with 1 < |D| <= limit, ordered by (|D|, sign) with D > 0 first."""
    parts = list(iter_fundamental_segments(limit))
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)


def fundamental_count_series(limit: int, checkpoints, threads: int = 1,
                             segment: int = SEGMENT) -> list[tuple[int, int, int]]:
    """(T, #positive, #negative) fundamental discriminants with |D| <= T at each checkpoint.

    Segments are sieved independently and merged by prefix sums in segment order.
    """
    cps = sorted({int(t) for t in checkpoints if 1 <= int(t) <= limit})
    bounds = [(lo, min(lo + segment, limit + 1)) for lo in range(1, limit + 1, segment)]

    def work(span):
        lo, hi = span
        pos, neg = _fundamental_segment(lo, hi)
        cp, cn = np.cumsum(pos), np.cumsum(neg)
        inside = [t for t in cps if lo <= t < hi]
        return int(cp[-1]), int(cn[-1]), [(t, int(cp[t - lo]), int(cn[t - lo])) for t in inside]

    if threads <= 1:
        parts = [work(b) for b in bounds]
    else:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(work, bounds))
    out = []
    pos_total = neg_total = 0
    for tp, tn, marks in parts:
        out.extend((t, pos_total + a, neg_total + b) for t, a, b in marks)
        pos_total += tp
        neg_total += tn
    return out


# --- forms -----------------------------------------------------------------


class QuadForm(NamedTuple):
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __str__(self) -> str:
        return f"({self.a},{self.b},{self.c})"


def principal_form(D: int) -> QuadForm:
    if D % 4 == 0:
        return QuadForm(1, 0, -D // 4)
    return QuadForm(1, 1, (1 - D) // 4)


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def compose(f: QuadForm, g: QuadForm) -> QuadForm:
    """Dirichlet composition of two primitive forms of the same discriminant (unreduced)."""
    a1, b1, c1 = f
    a2, b2, c2 = g
    D = b1 * b1 - 4 * a1 * c1
    beta = (b1 + b2) // 2
    g1, x, y = _egcd(a1, a2)
    e, s, w = _egcd(g1, beta)
    u, v = s * x, s * y
    A = a1 * a2 // (e * e)
    B = (u * a1 * b2 + v * a2 * b1 + w * ((b1 * b2 + D) // 2)) // e
    twoA = 2 * abs(A)
    B %= twoA
    if B > abs(A):
        B -= twoA
    C = (B * B - D) // (4 * A)
    return QuadForm(A, B, C)


def _reduce_definite(f: QuadForm) -> QuadForm:
    a, b, c = f
    if a < 0:
        raise ValueError("negative definite form")
    while True:
        r = (a - b) // (2 * a)
        b, c = b + 2 * r * a, a * r * r + b * r + c
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return QuadForm(a, b, c)


def _is_reduced_indefinite(f: QuadForm, s: int) -> bool:
    a, b, _ = f
    return 0 < b <= s and 2 * abs(a) + b >= s + 1 and 2 * abs(a) - b <= s


def rho(f: QuadForm, s: int) -> QuadForm:
    """One reduction step for an indefinite form; s = isqrt(D)."""
    a, b, c = f
    D = b * b - 4 * a * c
    m = 2 * abs(c)
    if abs(c) > s:
        r = (-b) % m
        if r > abs(c):
            r -= m
    else:
        r = s - ((s + b) % m)
    return QuadForm(c, r, (r * r - D) // (4 * c))


def reduce_form(f: QuadForm) -> QuadForm:
    D = f.discriminant
    if D < 0:
        return _reduce_definite(f)
    s = math.isqrt(D)
    while not _is_reduced_indefinite(f, s):
        f = rho(f, s)
    return f


def _kronecker(a: int, n: int) -> int:
    return int(K.kronecker(a, n))


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n), n >= 0."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return _kronecker(a, n)


_SPF = np.ones(2, dtype=np.int64)


def _spf(limit: int) -> np.ndarray:
    global _SPF
    if len(_SPF) <= limit:
        _SPF = K.smallest_prime_factors(max(limit, 2 * len(_SPF), 1 << 16))
    return _SPF


def _spf_for(D: int) -> np.ndarray:
    return _spf(abs(D) // 3 + 2)


# --- class groups ----------------------------------------------------------


def _vq(n: int, q: int) -> int:
    v = 0
    while n % q == 0:
        n //= q
        v += 1
    return v


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class ClassGroup:
    """Form class group of a fundamental discriminant (narrow for D > 0).

    Classes are indexed 0..h-1.  For D < 0 class i is the i-th reduced form
    in (a, b) order; for D > 0 it is the i-th rho-cycle.
    """

    def __init__(self, D: int):
        _require_fundamental(D)
        self.D = D
        spf = _spf_for(D)
        if D < 0:
            h = int(K.imag_class_number(D, spf))
            ab = K.imag_reduced_forms(D, spf, h)
            self.reps = [QuadForm(int(a), int(b), (int(b) * int(b) - D) // (4 * int(a))) for a, b in ab]
            self._index = {f: i for i, f in enumerate(self.reps)}
        else:
            ab, cyc, nc = K.real_reduced_forms(D, spf)
            if nc < 0:
                raise RuntimeError(f"rho-cycle walk failed for D={D}")
            forms = [QuadForm(int(a), int(b), (int(b) * int(b) - D) // (4 * int(a))) for a, b in ab]
            self._index = {f: int(c) for f, c in zip(forms, cyc)}
            self.reps = [None] * int(nc)
            for f, c in zip(forms, cyc):
                if self.reps[c] is None:
                    self.reps[c] = f
        self.h = len(self.reps)
        self.identity = self.index(principal_form(D))
        self._mul: dict[tuple[int, int], int] = {}

    def index(self, f: QuadForm) -> int:
        return self._index[reduce_form(f)]

    def mul(self, i: int, j: int) -> int:
        key = (i, j) if i <= j else (j, i)
        r = self._mul.get(key)
        if r is None:
            r = self.index(compose(self.reps[i], self.reps[j]))
            self._mul[key] = r
        return r

    def inverse(self, i: int) -> int:
        a, b, c = self.reps[i]
        return self.index(QuadForm(a, -b, c))

    def power(self, i: int, k: int) -> int:
        result, base = self.identity, i
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def torsion_count(self, p: int) -> int:
        """Brute force |Cl[p]|: classes g with g^p = 1."""
        return sum(1 for i in range(self.h) if self.power(i, p) == self.identity)

    def sylow(self, q: int) -> set[int]:
        """The Sylow q-subgroup, spanned by images of g -> g^(h / q^v)."""
        v = _vq(self.h, q)
        target = q**v
        m = self.h // target
        S = {self.identity}
        for g in range(self.h):
            if len(S) == target:
                break
            x = self.power(g, m)
            if x in S:
                continue
            powers = [self.identity]
            y = x
            while y not in S:
                powers.append(y)
                y = self.mul(y, x)
            S = {self.mul(s, t) for s in S for t in powers}
        if len(S) != target:
            raise RuntimeError(f"Sylow {q}-subgroup of Cl({self.D}) has size {len(S)}, expected {target}")
        return S

    def primary_exponents(self, q: int) -> list[int]:
        """Exponents e_1 >= e_2 >= ... with Sylow_q = prod Z/q^e_i."""
        if self.h % q:
            return []
        if self.h % (q * q):
            return [1]
        S = self.sylow(q)
        orders = []
        for s in S:
            k, y = 0, s
            while y != self.identity:
                y = self.power(y, q)
                k += 1
            orders.append(k)
        # r_k = number of cyclic factors of exponent >= k
        n_le = [sum(1 for o in orders if o <= k) for k in range(max(orders) + 1)]
        ranks = [round(math.log(n_le[k] / n_le[k - 1], q)) for k in range(1, len(n_le))]
        exps = []
        for i in range(ranks[0] if ranks else 0):
            exps.append(sum(1 for r in ranks if r > i))
        return exps

    def invariant_factors(self) -> list[int]:
        """d_1 | d_2 | ... with Cl = prod Z/d_i (empty for the trivial group)."""
        per_prime = {q: self.primary_exponents(q) for q in _prime_factors(self.h)}
        width = max((len(e) for e in per_prime.values()), default=0)
        factors = [1] * width
        for q, exps in per_prime.items():
            for i, e in enumerate(exps):
                factors[width - 1 - i] *= q**e
        return factors


def class_group(D: int) -> tuple[int, list[int]]:
    """(h, invariant factors) of the form class group (narrow when D > 0)."""
    G = ClassGroup(D)
    return G.h, G.invariant_factors()


def torsion_from_factors(factors: list[int], p: int) -> int:
    return p ** sum(1 for d in factors if d % p == 0)


def h_torsion(D: int, p: int) -> int:
    """|Cl[p]| for p in {2, 3}; for D > 0 this is the narrow group (exact for p = 3)."""
    if p not in (2, 3):
        raise ValueError("only p = 2 and p = 3 are supported")
    return torsion_from_factors(class_group(D)[1], p)


def three_torsion_fast(D: int, h: int) -> int:
    """h_3 from the class number, computing the Sylow 3-subgroup only when 9 | h."""
    if h % 3:
        return 1
    if h % 9:
        return 3
    G = ClassGroup(D)
    if G.h != h:
        raise RuntimeError(f"class number mismatch at D={D}")
    return 3 ** len(G.primary_exponents(3))


# --- units and L-values ----------------------------------------------------


@dataclass(frozen=True)
class FundamentalUnit:
    x: int
    y: int
    norm: int  # +1 or -1
    regulator: mpmath.mpf  # log((x + y sqrt(D)) / 2)


def fundamental_unit(D: int, prec: int = DEFAULT_PREC, max_steps: int | None = None) -> FundamentalUnit:
    """Smallest unit (x + y sqrt(D))/2 > 1, from the continued fraction of (b0 + sqrt(D))/2.

    The complete quotients (P + sqrt D)/Q satisfy N(p_k - q_k w) = +-Q_{k+1}/2,
    so the first k with Q_{k+1} = 2 yields the fundamental unit.
    """
    _require_fundamental(D)
    if D < 0:
        raise ValueError("fundamental_unit needs D > 0")
    if prec < 64:
        raise ValueError("precision must be at least 64 bits")
    s = math.isqrt(D)
    b0 = D & 1
    P, Q = b0, 2
    p0, p1 = 0, 1  # p_{k-2}, p_{k-1}
    q0, q1 = 1, 0
    cap = max_steps or 20 * (s + 10)
    for _ in range(cap):
        a = (P + s) // Q
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
        P = a * Q - P
        Q = (D - P * P) // Q
        if Q == 2:
            x, y = 2 * p1 - b0 * q1, q1
            norm = (x * x - D * y * y) // 4
            if norm not in (1, -1):
                raise RuntimeError(f"continued fraction produced a non-unit for D={D}")
            with mpmath.workprec(prec):
                reg = mpmath.log((mpmath.mpf(x) + mpmath.mpf(y) * mpmath.sqrt(D)) / 2)
            return FundamentalUnit(x, y, norm, reg)
    raise RuntimeError(f"continued fraction for D={D} exceeded {cap} steps")


def roots_of_unity(D: int) -> int:
    return {-3: 6, -4: 4}.get(D, 2)


def signature(D: int) -> tuple[int, int]:
    return (2, 0) if D > 0 else (0, 1)


def zeta_residue_from(D: int, h: int, regulator: float | None = None) -> float:
    """Res_{s=1} zeta_F = 2^r1 (2 pi)^r2 h R / (w sqrt|D|)."""
    w = roots_of_unity(D)
    if D < 0:
        return 2 * math.pi * h / (w * math.sqrt(-D))
    if regulator is None:
        raise ValueError("real fields need the regulator")
    return 4 * h * float(regulator) / (w * math.sqrt(D))


def _theta_terms(D: int, s: int):
    """Terms of the smoothed series for L(s, chi_D), s in {1, 2}, plus a tail bound."""
    f = abs(D)
    odd = D < 0
    N = int(math.ceil(math.sqrt(THETA_CUTOFF * f / math.pi))) + 1
    n = np.arange(1, N + 1, dtype=np.int64)
    chi = K.kronecker_values(D, n)
    nf = n.astype(np.float64)
    x = math.pi * nf * nf / f
    scale = (math.pi / f) ** (s - 0.5)
    if s == 2 and odd:
        t1 = chi / nf**2 * special.gammaincc(1.5, x)
        t2 = scale / special.gamma(1.5) * chi * nf * special.exp1(x)
    elif s == 2:
        t1 = chi / nf**2 * np.exp(-x)
        g = 2.0 * np.exp(-x) * (x**-0.5 - math.sqrt(math.pi) * special.erfcx(np.sqrt(x)))
        t2 = scale * chi * nf * g
    elif s == 1 and odd:
        t1 = chi / nf * special.gammaincc(1.0, x)
        t2 = scale * chi * math.sqrt(math.pi) * special.erfc(np.sqrt(x))
    else:
        t1 = chi / nf * special.erfc(np.sqrt(x))
        t2 = scale / math.sqrt(math.pi) * chi * special.exp1(x)
    # every term is below 3 n e^{-x} (pi/f + 1) for x >= 1; consecutive bounds
    # shrink by at least r < 1 past the cutoff
    xN = math.pi * (N + 1) ** 2 / f
    r = (1 + 3 / N) * math.exp(-2 * math.pi * N / f)
    tail = 3 * (N + 1) * math.exp(-xN) * (math.pi / f + 1) / (1 - r)
    return t1, t2, tail


def l_value(D: int, s: int = 2) -> float:
    """L(s, chi_D) for s in {1, 2} by the theta-function expansion."""
    t1, t2, tail = _theta_terms(D, s)
    if tail > ZETA2_TAIL_TARGET:
        raise RuntimeError(f"theta tail bound {tail:g} above target for D={D}")
    return math.fsum(t1.tolist() + t2.tolist())


def zeta_at_2(D: int) -> float:
    """Dedekind zeta of Q(sqrt D) at 2, i.e. zeta(2) L(2, chi_D); D = 1 gives zeta(2)."""
    z2 = math.pi**2 / 6
    if D == 1:
        return z2
    _require_fundamental(D)
    return z2 * l_value(D, 2)


def l2_closed_form_real(D: int) -> float:
    """L(2, chi_D) for D > 0 via the generalized Bernoulli number (exact integer sum)."""
    _require_fundamental(D)
    if D < 0:
        raise ValueError("closed form needs an even character")
    a = np.arange(1, D + 1, dtype=np.int64)
    chi = K.kronecker_row(D, D).astype(np.int64)
    s2 = int(np.sum(chi * a * a))
    return math.pi**2 * s2 / D**2.5


# --- per-field records -----------------------------------------------------


@dataclass(frozen=True)
class QuadFieldData:
    D: int
    h: int  # wide class number
    invariant_factors: tuple[int, ...]  # narrow group when D > 0
    h2: int
    h3: int
    w: int
    r1: int
    r2: int
    regulator: float  # 0.0 for D < 0
    residue: float
    zeta2: float

    @property
    def h_narrow(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def h6(self) -> int:
        return self.h2 * self.h3

    def __post_init__(self):
        if self.w != roots_of_unity(self.D):
            raise ValueError(f"w={self.w} is wrong for D={self.D}")
        if (self.r1, self.r2) != signature(self.D):
            raise ValueError("signature mismatch")
        if self.residue <= 0 or self.zeta2 <= 0:
            raise ValueError("residue and zeta2 must be positive")


def field_data(D: int, prec: int = DEFAULT_PREC) -> QuadFieldData:
    G = ClassGroup(D)
    factors = tuple(G.invariant_factors())
    h_narrow = math.prod(factors)
    if D > 0:
        u = fundamental_unit(D, prec)
        h = h_narrow if u.norm == -1 else h_narrow // 2
        reg = float(u.regulator)
    else:
        h, reg = h_narrow, 0.0
    r1, r2 = signature(D)
    return QuadFieldData(
        D=D,
        h=h,
        invariant_factors=factors,
        h2=torsion_from_factors(list(factors), 2),
        h3=torsion_from_factors(list(factors), 3),
        w=roots_of_unity(D),
        r1=r1,
        r2=r2,
        regulator=reg,
        residue=zeta_residue_from(D, h, reg),
        zeta2=zeta_at_2(D),
    )


def zeta_residue(field: QuadFieldData | int) -> float:
    if isinstance(field, int):
        field = field_data(field)
    return zeta_residue_from(field.D, field.h, field.regulator)


def field_table(Ds, threads: int = 1, prec: int = DEFAULT_PREC) -> list[QuadFieldData]:
    Ds = [int(d) for d in Ds]
    if threads <= 1:
        return [field_data(d, prec) for d in Ds]
    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(lambda d: field_data(d, prec), Ds, chunksize=64))


# --- bulk torsion data -----------------------------------------------------


@dataclass
class TorsionTable:
    """h, h3 and the number of prime factors of |D| for every fundamental |D| <= limit."""

    limit: int
    D: np.ndarray
    h: np.ndarray  # narrow for D > 0
    h3: np.ndarray
    omega: np.ndarray

    @property
    def h2(self) -> np.ndarray:
        """Genus theory: |Cl^+[2]| = 2^(omega - 1)."""
        return 2 ** (self.omega - 1)


def _chunks(arr: np.ndarray, n: int) -> list[np.ndarray]:
    if len(arr) == 0:
        return [arr]
    return [arr[i : i + n] for i in range(0, len(arr), n)]


def torsion_table(limit: int, threads: int = 1, chunk: int = 4096) -> TorsionTable:
    """Bulk class numbers and 3-torsion sizes; output is independent of ``threads``."""
    Ds = fundamental_discriminants(limit)
    spf = _spf(limit + 1)  # omega_counts indexes spf[|D|]
    blocks = _chunks(Ds, chunk)

    def work(block):
        h = K.class_numbers(block, spf)
        if (h < 0).any():
            raise RuntimeError("rho-cycle walk failed")
        h3 = np.ones(len(block), dtype=np.int64)
        h3[h % 3 == 0] = 3
        for i in np.flatnonzero(h % 9 == 0):
            h3[i] = three_torsion_fast(int(block[i]), int(h[i]))
        return h, h3, K.omega_counts(block, spf)

    if threads <= 1:
        results = [work(b) for b in blocks]
    else:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(work, blocks))
    cat = lambda k: np.concatenate([r[k] for r in results]) if results else np.empty(0, np.int64)
    return TorsionTable(limit, Ds, cat(0), cat(1), cat(2))


# --- checks tied to the discriminant identity and trivial bound ------------


def trivial_bound_check(T: int, threads: int = 1) -> tuple[float, int]:
    """max h(D) / (sqrt|D| (2 + log|D|)) over fundamental |D| <= T, and its argmax."""
    if T < 3:
        raise ValueError("T must be at least 3")
    tab = torsion_table(T, threads)
    h = tab.h.astype(np.float64)
    # wide class number for D > 0: halve when the fundamental unit has norm +1
    for i in np.flatnonzero(tab.D > 0):
        if fundamental_unit(int(tab.D[i])).norm == 1:
            h[i] /= 2
    ad = np.abs(tab.D).astype(np.float64)
    ratio = h / (np.sqrt(ad) * (2 + np.log(ad)))
    k = int(np.argmax(ratio))
    return float(ratio[k]), int(tab.D[k])


def field_discriminant(m: int) -> int:
    """Discriminant of Q(sqrt m) for squarefree m != 0, 1."""
    if m in (0, 1) or not is_squarefree(m):
        raise ValueError(f"{m} is not a squarefree integer != 0, 1")
    return m if m % 4 == 1 else 4 * m


def _squarefree_part(n: int) -> int:
    sign = -1 if n < 0 else 1
    n = abs(n)
    out, d = 1, 2
    while d * d <= n:
        while n % (d * d) == 0:
            n //= d * d
        if n % d == 0:
            out *= d
            n //= d
        d += 1
    return sign * out * n


def biquadratic_disc_check(m: int, n: int) -> tuple[int, dict[int, Fraction]]:
    """Disc of Q(sqrt m, sqrt n) as d1 d2 d3, and Disc(K)/d_i^2 for each quadratic subfield."""
    if m == n or not is_squarefree(m) or not is_squarefree(n) or 1 in (m, n):
        raise ValueError("need distinct squarefree m, n != 1")
    k = _squarefree_part(m * n)
    if k == 1:
        raise ValueError("degenerate: the three subfields are not distinct")
    ds = [field_discriminant(m), field_discriminant(n), field_discriminant(k)]
    disc = abs(ds[0] * ds[1] * ds[2])
    ratios = {d: Fraction(disc, d * d) for d in ds}
    for d, r in ratios.items():
        if r.denominator != 1 or r <= 0:
            raise RuntimeError(f"Disc(K)/{d}^2 = {r} is not a positive integer")
    return disc, ratios


# --- cache -----------------------------------------------------------------

CACHE_HEADER = ["D", "h", "invariant_factors", "h2", "h3", "w", "r1", "r2",
                "regulator", "residue", "zeta2", "crc32"]


def default_cache_dir() -> Path:
    return Path(os.environ.get("TORSION3_CACHE", Path.home() / ".cache" / "torsion3"))


def _row(rec: QuadFieldData) -> list[str]:
    body = [str(rec.D), str(rec.h), ";".join(map(str, rec.invariant_factors)), str(rec.h2), str(rec.h3),
            str(rec.w), str(rec.r1), str(rec.r2), float(rec.regulator).hex(), rec.residue.hex(), rec.zeta2.hex()]
    return body + [f"{zlib.crc32(','.join(body).encode()):08x}"]


class CacheCorrupt(ValueError):
    pass


def write_cache(path, records) -> None:
    """Append records to a CSV cache (header written when the file is new)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    new = not path.exists() or path.stat().st_size == 0
    with open(path, "a", newline="") as fh:
        w = csv.writer(fh)
        if new:
            w.writerow(CACHE_HEADER)
        for rec in records:
            w.writerow(_row(rec))


def read_cache(path) -> dict[int, QuadFieldData]:
    out: dict[int, QuadFieldData] = {}
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        if header != CACHE_HEADER:
            raise CacheCorrupt(f"unexpected header {header}")
        for lineno, row in enumerate(rd, start=2):
            if len(row) != len(CACHE_HEADER):
                raise CacheCorrupt(f"line {lineno}: wrong number of fields")
            body, crc = row[:-1], row[-1]
            if f"{zlib.crc32(','.join(body).encode()):08x}" != crc:
                raise CacheCorrupt(f"line {lineno}: checksum mismatch")
            D, h, inv, h2, h3, w, r1, r2, reg, res, z2 = body
            out[int(D)] = QuadFieldData(
                D=int(D), h=int(h),
                invariant_factors=tuple(int(x) for x in inv.split(";") if x),
                h2=int(h2), h3=int(h3), w=int(w), r1=int(r1), r2=int(r2),
                regulator=float.fromhex(reg), residue=float.fromhex(res), zeta2=float.fromhex(z2),
            )
    return out


class FieldCache:
    """Append-only CSV cache of QuadFieldData keyed by D."""

    def __init__(self, path=None):
        self.path = Path(path) if path is not None else default_cache_dir() / "quadfields.csv"
        self._rows = read_cache(self.path) if self.path.exists() else {}

    def __contains__(self, D: int) -> bool:
        return D in self._rows

    def get(self, D: int, prec: int = DEFAULT_PREC) -> QuadFieldData:
        rec = self._rows.get(D)
        if rec is None:
            rec = field_data(D, prec)
            self._rows[D] = rec
            write_cache(self.path, [rec])
        return rec

    def records(self) -> list[QuadFieldData]:
        return sorted(self._rows.values(), key=lambda r: (abs(r.D), r.D < 0))
