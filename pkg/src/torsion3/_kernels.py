"""Compiled inner loops (numba).  All functions are pure and release the GIL."""

from __future__ import annotations

import numpy as np
from numba import njit

_JIT = dict(nogil=True, cache=True)


@njit(**_JIT)
def isqrt(n):
    if n < 2:
        return n
    x = np.int64(np.sqrt(np.float64(n)))
    while x * x > n:
        x -= 1
    while (x + 1) * (x + 1) <= n:
        x += 1
    return x


@njit(**_JIT)
def kronecker(a, n):
    """Kronecker symbol (a/n) for int64 a and n >= 0."""
    if n == 0:
        return 1 if (a == 1 or a == -1) else 0
    if a % 2 == 0 and n % 2 == 0:
        return 0
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    k = 1
    if v % 2 == 1:
        r = a & 7
        if r == 3 or r == 5:
            k = -k
    a = a % n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            r = n & 7
            if r == 3 or r == 5:
                k = -k
        a, n = n, a
        if (a & 3) == 3 and (n & 3) == 3:
            k = -k
        a = a % n
    return k if n == 1 else 0


@njit(**_JIT)
def kronecker_row(D, count):
    """chi_D(1..count)."""
    out = np.empty(count, dtype=np.int8)
    for i in range(count):
        out[i] = kronecker(D, i + 1)
    return out


@njit(**_JIT)
def _divisors(n, spf, buf):
    """Write the divisors of n into buf (unsorted); return how many."""
    buf[0] = 1
    cnt = 1
    while n > 1:
        p = spf[n]
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        base = cnt
        pk = 1
        for _ in range(e):
            pk *= p
            for i in range(base):
                buf[cnt] = buf[i] * pk
                cnt += 1
    return cnt


@njit(**_JIT)
def imag_class_number(D, spf):
    """Number of reduced forms of discriminant D < 0 (all primitive when D is fundamental)."""
    ad = -D
    buf = np.empty(4096, dtype=np.int64)
    h = 0
    b = ad & 1
    while 3 * b * b <= ad:
        N = (b * b + ad) // 4
        cnt = _divisors(N, spf, buf)
        for i in range(cnt):
            a = buf[i]
            if a < b or a * a > N or a == 0:
                continue
            if b == 0 or a == b or a * a == N:
                h += 1
            else:
                h += 2
        b += 2
    return h


@njit(**_JIT)
def imag_reduced_forms(D, spf, h):
    """The h reduced forms (a, b) of discriminant D < 0, sorted by (a, b)."""
    ad = -D
    buf = np.empty(4096, dtype=np.int64)
    out = np.empty((h, 2), dtype=np.int64)
    k = 0
    b = ad & 1
    while 3 * b * b <= ad:
        N = (b * b + ad) // 4
        cnt = _divisors(N, spf, buf)
        for i in range(cnt):
            a = buf[i]
            if a < b or a * a > N or a == 0:
                continue
            out[k, 0] = a
            out[k, 1] = b
            k += 1
            if not (b == 0 or a == b or a * a == N):
                out[k, 0] = a
                out[k, 1] = -b
                k += 1
        b += 2
    order = np.argsort(out[:k, 0] * (4 * ad + 1) + out[:k, 1])
    return out[order]


@njit(**_JIT)
def real_reduced_forms(D, spf):
    """Reduced indefinite forms of discriminant D > 0 and their rho-cycle labels.

    Returns (forms[k, 2] of (a, b), cycle[k], ncycles); cycle labels follow the
    order of first appearance in the (a, b)-sorted list.
    """
    s = isqrt(D)
    buf = np.empty(4096, dtype=np.int64)
    cap = 64
    forms = np.empty((cap, 2), dtype=np.int64)
    k = 0
    b = 1 if D & 1 else 2
    while b <= s:
        N = (D - b * b) // 4
        cnt = _divisors(N, spf, buf)
        for i in range(cnt):
            a = buf[i]
            if 2 * a + b >= s + 1 and 2 * a - b <= s:
                if k + 2 > cap:
                    cap *= 2
                    nf = np.empty((cap, 2), dtype=np.int64)
                    nf[:k] = forms[:k]
                    forms = nf
                forms[k, 0] = a
                forms[k, 1] = b
                forms[k + 1, 0] = -a
                forms[k + 1, 1] = b
                k += 2
        b += 2
    forms = forms[:k]
    stride = 2 * s + 3
    off = s + 1
    keys = (forms[:, 0] + off) * stride + forms[:, 1]
    order = np.argsort(keys)
    forms = forms[order]
    # bucket[a + off] .. bucket[a + off + 1]: slice of forms with first coefficient a
    bucket = np.zeros(2 * off + 2, dtype=np.int64)
    for j in range(k):
        bucket[forms[j, 0] + off + 1] += 1
    for j in range(1, 2 * off + 2):
        bucket[j] += bucket[j - 1]
    cyc = -np.ones(k, dtype=np.int64)
    nc = 0
    for start in range(k):
        if cyc[start] >= 0:
            continue
        j = start
        while cyc[j] < 0:
            cyc[j] = nc
            a = forms[j, 0]
            bb = forms[j, 1]
            c = (bb * bb - D) // (4 * a)
            m = 2 * abs(c)
            b2 = s - ((s + bb) % m)
            if c + off < 0 or c + off > 2 * off:
                return forms, cyc, -1
            lo = bucket[c + off]
            hi = bucket[c + off + 1]
            j = -1
            for t in range(lo, hi):
                if forms[t, 1] == b2:
                    j = t
                    break
            if j < 0:
                return forms, cyc, -1
        nc += 1
    return forms, cyc, nc


@njit(**_JIT)
def real_narrow_class_number(D, spf, vis, stamp):
    """Number of rho-cycles of reduced forms of discriminant D > 0.

    ``vis`` is a scratch table of at least (2s+3)^2 int32 entries shared across
    calls; ``stamp`` must differ between calls so no clearing is needed.
    """
    s = isqrt(D)
    stride = 2 * s + 3
    off = s + 1
    buf = np.empty(4096, dtype=np.int64)
    nc = 0
    b = 1 if D & 1 else 2
    while b <= s:
        N = (D - b * b) // 4
        cnt = _divisors(N, spf, buf)
        for i in range(cnt):
            a = buf[i]
            if 2 * a + b >= s + 1 and 2 * a - b <= s:
                for sa in (a, -a):
                    if vis[(sa + off) * stride + b] == stamp:
                        continue
                    nc += 1
                    x = sa
                    y = b
                    steps = 0
                    while vis[(x + off) * stride + y] != stamp:
                        vis[(x + off) * stride + y] = stamp
                        c = (y * y - D) // (4 * x)
                        y = s - ((s + y) % (2 * abs(c)))
                        x = c
                        steps += 1
                        if steps > 4 * D:
                            return -1
                    if x != sa or y != b:
                        return -1
        b += 2
    return nc


@njit(**_JIT)
def class_numbers(Ds, spf):
    """Form class numbers (narrow for D > 0) of an array of fundamental discriminants."""
    out = np.empty(len(Ds), dtype=np.int64)
    smax = 0
    for i in range(len(Ds)):
        if Ds[i] > 0:
            smax = max(smax, isqrt(Ds[i]))
    vis = np.zeros((2 * smax + 3) * (2 * smax + 3), dtype=np.int32)
    stamp = 0
    for i in range(len(Ds)):
        D = Ds[i]
        if D < 0:
            out[i] = imag_class_number(D, spf)
        else:
            stamp += 1
            out[i] = real_narrow_class_number(D, spf, vis, stamp)
    return out


@njit(**_JIT)
def omega_counts(Ds, spf):
    """Number of distinct prime factors of |D|."""
    out = np.empty(len(Ds), dtype=np.int64)
    for i in range(len(Ds)):
        n = abs(Ds[i])
        t = 0
        while n > 1:
            p = spf[n]
            t += 1
            while n % p == 0:
                n //= p
        out[i] = t
    return out


@njit(**_JIT)
def imag_character_sum(D):
    """sum_{a=1}^{|D|} chi_D(a) a  (exact)."""
    ad = -D
    s = 0
    for a in range(1, ad + 1):
        s += kronecker(D, a) * a
    return s


@njit(**_JIT)
def kronecker_values(D, ns):
    out = np.empty(len(ns), dtype=np.float64)
    for i in range(len(ns)):
        out[i] = kronecker(D, ns[i])
    return out


def smallest_prime_factors(limit: int) -> np.ndarray:
    """spf[n] for 0 <= n <= limit (spf[0] = spf[1] = 1)."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    spf[:2] = 1
    r = int(np.sqrt(limit)) + 1
    for p in range(2, r + 1):
        if spf[p] == 0:
            seg = spf[p * p :: p]
            seg[seg == 0] = p
            spf[p] = p
    zero = spf == 0
    spf[zero] = np.arange(limit + 1)[zero]
    return spf
