"""Finite permutation groups small enough to enumerate.

Everything here works on image tuples: a permutation of degree ``n`` is the
tuple ``(p(0), ..., p(n-1))``.  Products compose right to left, so
``(p * q)(i) == p(q(i))``.  Points are 0-based internally and printed 1-based.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

MAX_CLOSURE_DEGREE = 16
DEFAULT_CAP = 10**6
MAX_ENUM_DEGREE = 9


class GroupError(ValueError):
    """Invalid input to a group operation (user error)."""


class ClosureCapExceeded(GroupError):
    pass


class VerificationError(RuntimeError):
    """An internal post-condition failed; indicates a bug, never user error."""


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _p_part(n: int, p: int) -> int:
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def _is_power_of(n: int, p: int) -> bool:
    return _p_part(n, p) == n


def _compose(p: tuple, q: tuple) -> tuple:
    return tuple(p[i] for i in q)


def _invert(p: tuple) -> tuple:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def _cycles(p: tuple, include_fixed: bool = True) -> list[tuple[int, ...]]:
    seen = [False] * len(p)
    out = []
    for start in range(len(p)):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        j = p[start]
        while j != start:
            cyc.append(j)
            seen[j] = True
            j = p[j]
        if include_fixed or len(cyc) > 1:
            out.append(tuple(cyc))
    return out


def _cycle_lengths(p: tuple) -> tuple[int, ...]:
    return tuple(sorted((len(c) for c in _cycles(p)), reverse=True))


def _order(p: tuple) -> int:
    return math.lcm(*_cycle_lengths(p))


def _power(p: tuple, k: int) -> tuple:
    n = len(p)
    if k < 0:
        p, k = _invert(p), -k
    result = tuple(range(n))
    base = p
    while k:
        if k & 1:
            result = _compose(base, result)
        base = _compose(base, base)
        k >>= 1
    return result


@dataclass(frozen=True)
class CycleType:
    lengths: tuple[int, ...]  # descending, fixed points included

    @property
    def degree(self) -> int:
        return sum(self.lengths)

    @property
    def orb(self) -> int:
        return len(self.lengths)

    def count(self, k: int) -> int:
        return self.lengths.count(k)

    def is_homogeneous(self, p: int) -> bool:
        """True when every nontrivial cycle has length ``p`` (and there is one)."""
        return p in self.lengths and set(self.lengths) <= {1, p}

    def __str__(self) -> str:
        return "[" + ",".join(map(str, self.lengths)) + "]"


@dataclass(frozen=True, order=True)
class Perm:
    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise GroupError(f"not a permutation: {self.images}")

    @classmethod
    def _raw(cls, images: tuple) -> "Perm":
        obj = object.__new__(cls)
        object.__setattr__(obj, "images", images)
        return obj

    @classmethod
    def identity(cls, degree: int) -> "Perm":
        return cls._raw(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, cycles, degree: int) -> "Perm":
        """Build from 0-based cycles, e.g. ``[(0, 1, 2), (3, 4)]``."""
        img = list(range(degree))
        used = set()
        for cyc in cycles:
            for k, x in enumerate(cyc):
                if not 0 <= x < degree or x in used:
                    raise GroupError(f"bad cycle {cyc} for degree {degree}")
                used.add(x)
                img[x] = cyc[(k + 1) % len(cyc)]
        return cls(tuple(img))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Perm") -> "Perm":
        if other.degree != self.degree:
            raise GroupError("degree mismatch in product")
        return Perm._raw(_compose(self.images, other.images))

    def __pow__(self, k: int) -> "Perm":
        return Perm._raw(_power(self.images, k))

    def inverse(self) -> "Perm":
        return Perm._raw(_invert(self.images))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def cycles(self, include_fixed: bool = False) -> list[tuple[int, ...]]:
        return _cycles(self.images, include_fixed)

    def cycle_type(self) -> CycleType:
        return CycleType(_cycle_lengths(self.images))

    def order(self) -> int:
        return _order(self.images)

    def __str__(self) -> str:
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + " ".join(str(x + 1) for x in c) + ")" for c in cyc)

    def __repr__(self) -> str:
        return f"Perm({self})"


def orb_count(h: Perm) -> int:
    """Number of cycles of ``h``, fixed points included."""
    return len(_cycles(h.images))


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_perm(text: str, degree: int | None = None) -> Perm:
    """Parse ``"(1 2 3)(4 5)"`` or an image list ``"2,3,1"`` (both 1-based)."""
    text = text.strip()
    if text.startswith("("):
        cycles = []
        for body in _CYCLE_RE.findall(text):
            pts = [int(t) - 1 for t in re.split(r"[\s,]+", body.strip()) if t]
            if pts:
                cycles.append(tuple(pts))
        if _CYCLE_RE.sub("", text).strip():
            raise GroupError(f"cannot parse cycle notation: {text!r}")
        top = max((x + 1 for c in cycles for x in c), default=1)
        n = degree if degree is not None else top
        if top > n:
            raise GroupError(f"point {top} exceeds degree {n}")
        return Perm.from_cycles(cycles, n)
    try:
        img = [int(t) - 1 for t in re.split(r"[\s,]+", text) if t]
    except ValueError:
        raise GroupError(f"cannot parse permutation: {text!r}") from None
    if degree is not None and degree != len(img):
        raise GroupError(f"image list has {len(img)} entries, degree is {degree}")
    try:
        return Perm(tuple(img))
    except GroupError:
        raise GroupError(f"not a permutation: {text!r}") from None


def parse_generators(text: str, degree: int | None = None) -> list[Perm]:
    """Generators separated by ``;``.  Degree defaults to the largest point seen."""
    parts = [s for s in (t.strip() for t in text.split(";")) if s]
    if not parts:
        raise GroupError("no generators given")
    if degree is None:
        degree = max(parse_perm(s).degree for s in parts)
    return [parse_perm(s, degree) for s in parts]


class PermGroup:
    """A permutation group with its full element list (or generators only).

    Elements are kept sorted lexicographically by image tuple, so every
    derived quantity is deterministic.
    """

    def __init__(self, degree: int, generators, elements=None, order: int | None = None):
        self.degree = degree
        self.generators = tuple(generators)
        self._elements = None if elements is None else tuple(sorted(elements))
        self._set = None if elements is None else frozenset(self._elements)
        if self._elements is not None:
            order = len(self._elements)
        self.order = order

    @property
    def has_elements(self) -> bool:
        return self._elements is not None

    def _need_elements(self):
        if self._elements is None:
            raise GroupError("operation needs the element list (generators-only group)")
        return self._elements

    @property
    def element_tuples(self) -> tuple:
        return self._need_elements()

    @property
    def elements(self) -> list[Perm]:
        return [Perm._raw(t) for t in self._need_elements()]

    def __len__(self) -> int:
        return self.order

    def __contains__(self, g) -> bool:
        self._need_elements()
        t = g.images if isinstance(g, Perm) else tuple(g)
        return t in self._set

    def __iter__(self):
        return iter(self.elements)

    def identity(self) -> Perm:
        return Perm.identity(self.degree)

    def orbit(self, x: int) -> list[int]:
        seen = {x}
        stack = [x]
        while stack:
            y = stack.pop()
            for g in self.generators:
                z = g.images[y]
                if z not in seen:
                    seen.add(z)
                    stack.append(z)
        return sorted(seen)

    def is_transitive(self) -> bool:
        return len(self.orbit(0)) == self.degree

    def prime_divisors(self) -> list[int]:
        return _prime_factors(self.order) if self.order > 1 else []

    def is_p_group(self, p: int | None = None) -> bool:
        ps = self.prime_divisors()
        if p is None:
            return len(ps) == 1
        return ps == [p]

    def cycle_type_counts(self) -> Counter:
        return Counter(_cycle_lengths(t) for t in self._need_elements())

    def __repr__(self) -> str:
        gens = ", ".join(str(g) for g in self.generators)
        return f"PermGroup(degree={self.degree}, order={self.order}, gens=[{gens}])"


def _closure(gens: list[tuple], degree: int, cap: int) -> set:
    ident = tuple(range(degree))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple(g[i] for i in x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > cap:
                        raise ClosureCapExceeded(f"closure exceeds {cap} elements")
        frontier = nxt
    return seen


def generate(gens, degree: int | None = None, cap: int = DEFAULT_CAP) -> PermGroup:
    """Close a generating set.  All generators must share one degree."""
    gens = list(gens)
    if degree is None:
        if not gens:
            raise GroupError("empty generating set needs an explicit degree")
        degree = gens[0].degree
    if any(g.degree != degree for g in gens):
        raise GroupError("degree mismatch among generators")
    if degree > MAX_CLOSURE_DEGREE:
        raise GroupError(f"closure supported only for degree <= {MAX_CLOSURE_DEGREE}")
    elems = _closure([g.images for g in gens], degree, cap)
    return PermGroup(degree, gens, elems)


def cyclic_group(n: int) -> PermGroup:
    return generate([Perm(tuple((i + 1) % n for i in range(n)))], n)


def symmetric_group(n: int) -> PermGroup:
    if n == 1:
        return generate([], 1)
    gens = [Perm.from_cycles([(0, 1)], n), Perm(tuple((i + 1) % n for i in range(n)))]
    return generate(gens, n)


def dihedral_group(n: int) -> PermGroup:
    """Symmetries of an n-gon acting on its vertices."""
    rot = Perm(tuple((i + 1) % n for i in range(n)))
    ref = Perm(tuple((-i) % n for i in range(n)))
    return generate([rot, ref], n)


# --- invariants ------------------------------------------------------------


def a_invariant(H: PermGroup) -> tuple[int, Perm]:
    """min(n - orb(h)) over non-identity h, with the first minimizer found."""
    if H.order is None or H.order <= 1:
        raise GroupError("a(H) needs a nontrivial group")
    n = H.degree
    best, arg = None, None
    for t in H.element_tuples:
        k = n - len(_cycles(t))
        if k == 0:
            continue
        if best is None or k < best:
            best, arg = k, t
    return best, Perm._raw(arg)


def homogeneous_p_cycle_witness(H: PermGroup) -> tuple[int, int, Perm]:
    """An element of prime order p made of exactly a(H)/(p-1) p-cycles.

    Obtained from a minimizer h0 of n - orb by taking h0^(|h0|/p) for the
    smallest prime p dividing |h0|; powering can only merge cycles into fixed
    points, so n - orb cannot grow, and minimality pins it.
    """
    a, h0 = a_invariant(H)
    k = h0.order()
    p = _prime_factors(k)[0]
    h = h0 ** (k // p)
    ct = h.cycle_type()
    m = ct.count(p)
    if not ct.is_homogeneous(p) or H.degree - ct.orb != a or m * (p - 1) != a:
        raise VerificationError(f"witness {h} fails the p-cycle count for a={a}")
    return p, m, h


def _p_elements(H: PermGroup, p: int) -> list[tuple]:
    return [t for t in H.element_tuples if _is_power_of(_order(t), p)]


def is_nilpotent(H: PermGroup) -> bool:
    """True iff each set of p-elements is a subgroup (unique Sylow subgroups).

    A set of p-elements closed under products contains a Sylow p-subgroup, so
    it is closed exactly when it has the Sylow order; counting is enough.
    """
    for p in H.prime_divisors():
        if len(_p_elements(H, p)) != _p_part(H.order, p):
            return False
    return True


def _crt_part_exponent(k: int, q: int) -> int:
    """Exponent e with g^e the q-part of an element of order k (q a prime power)."""
    r = k // q
    if q == 1:
        return 0
    return (r * pow(r, -1, q)) % k


# --- Sylow decomposition ---------------------------------------------------


@dataclass(frozen=True)
class SylowFactor:
    p: int
    group: PermGroup  # acts on range(len(orbit))
    orbit: tuple[int, ...]  # points of the orbit of the base point, in factor label order


@dataclass
class SylowDecomposition:
    """Permutation isomorphism of a transitive nilpotent group with a product of p-groups.

    ``coords[x]`` is the tuple of factor-local labels of point ``x``; the
    product action moves each coordinate by the corresponding p-part.
    """

    group: PermGroup
    factors: list[SylowFactor]
    coords: tuple[tuple[int, ...], ...]
    _parts_cache: dict = field(default_factory=dict, repr=False)

    @property
    def degrees(self) -> list[int]:
        return [f.group.degree for f in self.factors]

    def factor(self, p: int) -> SylowFactor | None:
        for f in self.factors:
            if f.p == p:
                return f
        return None

    def index(self, x: int) -> int:
        """Mixed-radix flattening of ``coords[x]`` (first factor least significant)."""
        idx, scale = 0, 1
        for c, d in zip(self.coords[x], self.degrees):
            idx += c * scale
            scale *= d
        return idx

    def p_parts(self, h: tuple) -> list[tuple]:
        """Split ``h`` into commuting p-parts, one per factor, in factor order."""
        got = self._parts_cache.get(h)
        if got is None:
            k = _order(h)
            got = [_power(h, _crt_part_exponent(k, _p_part(k, f.p))) for f in self.factors]
            self._parts_cache[h] = got
        return got

    def restrict(self, h: tuple, j: int) -> tuple:
        """Action of the p-part of h on factor j, in that factor's labels."""
        f = self.factors[j]
        pos = {x: i for i, x in enumerate(f.orbit)}
        hp = self.p_parts(h)[j]
        return tuple(pos[hp[x]] for x in f.orbit)

    def verify(self) -> None:
        n = self.group.degree
        if math.prod(self.degrees) != n:
            raise VerificationError("factor degrees do not multiply to n")
        if len(set(self.coords)) != n:
            raise VerificationError("relabel map is not injective")
        for f in self.factors:
            if f.group.degree != _p_part(n, f.p):
                raise VerificationError(f"factor degree for p={f.p} is not the p-part of n")
            if f.group.order != _p_part(self.group.order, f.p) or not f.group.is_transitive():
                raise VerificationError(f"factor for p={f.p} has wrong order or is intransitive")
        for h in self.group.element_tuples:
            restr = [self.restrict(h, j) for j in range(len(self.factors))]
            for x in range(n):
                want = tuple(r[c] for r, c in zip(restr, self.coords[x]))
                if self.coords[h[x]] != want:
                    raise VerificationError(f"relabel does not conjugate {Perm._raw(h)}")


def sylow_decompose(H: PermGroup, base_point: int = 0) -> SylowDecomposition:
    if not H.is_transitive():
        raise GroupError("Sylow decomposition needs a transitive group")
    if not is_nilpotent(H):
        raise GroupError("Sylow decomposition needs a nilpotent group")
    primes = H.prime_divisors()
    n = H.degree
    # transversal: g_x with g_x(base) = x
    ident = tuple(range(n))
    trans = {base_point: ident}
    stack = [base_point]
    while stack:
        y = stack.pop()
        for g in H.generators:
            z = g.images[y]
            if z not in trans:
                trans[z] = _compose(g.images, trans[y])
                stack.append(z)
    factors = []
    for p in primes:
        sylow = _p_elements(H, p)
        orbit = sorted({s[base_point] for s in sylow})
        pos = {x: i for i, x in enumerate(orbit)}
        restricted = {tuple(pos[s[x]] for x in orbit) for s in sylow}
        gens = _small_generating_set(sorted(restricted), len(orbit))
        factors.append(SylowFactor(p, PermGroup(len(orbit), [Perm._raw(g) for g in gens], restricted), tuple(orbit)))
    dec = SylowDecomposition(H, factors, ())
    coords = []
    for x in range(n):
        parts = dec.p_parts(trans[x])
        coords.append(tuple({y: i for i, y in enumerate(f.orbit)}[hp[base_point]]
                            for f, hp in zip(factors, parts)))
    dec.coords = tuple(coords)
    dec.verify()
    return dec


def _small_generating_set(elements: list[tuple], degree: int) -> list[tuple]:
    """Greedy generating set: add the first element outside the current span."""
    gens: list[tuple] = []
    span = {tuple(range(degree))}
    for t in elements:
        if t not in span:
            gens.append(t)
            span = _closure(gens, degree, DEFAULT_CAP)
            if len(span) == len(elements):
                break
    return gens


@dataclass(frozen=True)
class PPartResult:
    p: int
    m: int  # p-cycles in h
    complement_order: int  # |H'|
    m_p: int | None  # m / |H'| when it divides
    divides: bool
    factor_cycles_ok: bool

    @property
    def check(self) -> bool:
        return self.divides and self.factor_cycles_ok


def p_part_decompose_element(H: PermGroup, h: Perm, dec: SylowDecomposition | None = None) -> PPartResult:
    """Split a homogeneous prime-order element across the Sylow factors of H."""
    ct = h.cycle_type()
    nontriv = [k for k in ct.lengths if k > 1]
    if not nontriv or len(set(nontriv)) != 1 or _prime_factors(nontriv[0]) != [nontriv[0]]:
        raise GroupError(f"{h} is not a product of p-cycles for a prime p")
    if h not in H:
        raise GroupError(f"{h} is not in the group")
    p = nontriv[0]
    m = len(nontriv)
    dec = dec or sylow_decompose(H)
    j = [f.p for f in dec.factors].index(p)
    comp = H.order // dec.factors[j].group.order
    divides = m % comp == 0
    m_p = m // comp if divides else None
    img = dec.restrict(h.images, j)
    factor_ok = divides and CycleType(_cycle_lengths(img)).count(p) == m_p
    # h has order p, so all other parts must vanish
    others_trivial = all(_order(part) == 1 for i, part in enumerate(dec.p_parts(h.images)) if i != j)
    return PPartResult(p, m, comp, m_p, divides, factor_ok and others_trivial)


# --- classification of small a(H) ------------------------------------------


class Case(str, Enum):
    TWO_GROUP = "TwoGroup"
    THREE_GROUP_3CYCLE = "ThreeGroupWith3Cycle"
    C3_TIMES_H2 = "C3timesH2"
    C2_TIMES_H3 = "C2timesH3"
    THREE_GROUP_TWO_3CYCLES = "ThreeGroupTwo3Cycles"
    FIVE_GROUP_5CYCLE = "FiveGroupWith5Cycle"
    C5_TIMES_H2 = "C5timesH2"
    BEYOND_TABLE = "BeyondTable"


class ClassificationError(VerificationError):
    pass


@dataclass(frozen=True)
class ClassificationResult:
    case: Case
    a: int
    witnesses: dict

    def to_dict(self) -> dict:
        return {"case": self.case.value, "a": self.a, "witnesses": self.witnesses}


def _has_cycle_shape(G: PermGroup, p: int, count: int) -> Perm | None:
    """First element whose cycle type is exactly ``count`` p-cycles plus fixed points."""
    for t in G.element_tuples:
        ct = CycleType(_cycle_lengths(t))
        if ct.is_homogeneous(p) and ct.count(p) == count:
            return Perm._raw(t)
    return None


def classify_nilpotent(H: PermGroup) -> ClassificationResult:
    """Place a transitive nilpotent group in the small-a(H) case table.

    Every returned case has its structural claims re-derived from the group
    (Sylow factors, cycle-shape witnesses); a mismatch raises
    ``ClassificationError`` instead of returning a wrong tag.
    """
    if H.order <= 1:
        raise GroupError("classification needs a nontrivial group")
    if not H.is_transitive() or not is_nilpotent(H):
        raise GroupError("classification needs a transitive nilpotent group")
    a, _ = a_invariant(H)
    primes = H.prime_divisors()

    def fail(msg):
        raise ClassificationError(f"a(H)={a}, |H|={H.order}, degree {H.degree}: {msg}")

    if primes == [2]:
        invols = [t for t in H.element_tuples if _order(t) == 2]
        m = min(CycleType(_cycle_lengths(t)).count(2) for t in invols)
        if m != a:
            fail(f"2-group with minimal transposition count {m}")
        w = _has_cycle_shape(H, 2, m)
        return ClassificationResult(Case.TWO_GROUP, a, {"transpositions": m, "element": str(w)})

    if a < 2:
        fail("non-2-group with a(H) < 2")
    p, m, w = homogeneous_p_cycle_witness(H)
    wit = {"p": p, "m": m, "element": str(w)}
    dec = sylow_decompose(H)
    fac = {f.p: f.group for f in dec.factors}

    def is_cyclic_prime(G: PermGroup, q: int) -> bool:
        return G.order == q and G.degree == q

    def with_factor_witness(name, G, q, count):
        e = _has_cycle_shape(G, q, count)
        if e is None:
            fail(f"{name} lacks a product of {count} {q}-cycles")
        wit[name] = str(e)
        wit[name + "_order"] = G.order

    if a == 2:
        if primes != [3]:
            fail("expected a 3-group")
        with_factor_witness("H3", fac[3], 3, 1)
        return ClassificationResult(Case.THREE_GROUP_3CYCLE, a, wit)
    if a == 3:
        if primes != [2, 3] or not is_cyclic_prime(fac[3], 3):
            fail("expected C3 x H2")
        with_factor_witness("H2", fac[2], 2, 1)
        return ClassificationResult(Case.C3_TIMES_H2, a, wit)
    if a == 4:
        if primes == [5]:
            with_factor_witness("H5", fac[5], 5, 1)
            return ClassificationResult(Case.FIVE_GROUP_5CYCLE, a, wit)
        if primes == [3]:
            with_factor_witness("H3", fac[3], 3, 2)
            return ClassificationResult(Case.THREE_GROUP_TWO_3CYCLES, a, wit)
        if primes == [2, 3] and is_cyclic_prime(fac[2], 2):
            with_factor_witness("H3", fac[3], 3, 1)
            return ClassificationResult(Case.C2_TIMES_H3, a, wit)
        fail("no a=4 case matches")
    if a == 5:
        if primes != [2, 5] or not is_cyclic_prime(fac[5], 5):
            fail("expected C5 x H2")
        with_factor_witness("H2", fac[2], 2, 1)
        return ClassificationResult(Case.C5_TIMES_H2, a, wit)
    return ClassificationResult(Case.BEYOND_TABLE, a, wit)


# --- wreath product --------------------------------------------------------


def wreath_c2(H: PermGroup, closure: bool | None = None) -> PermGroup:
    """C2 wr H on 2n points: point 2i+j is copy j of block i."""
    n = H.degree
    gens = []
    for i in range(n):
        img = list(range(2 * n))
        img[2 * i], img[2 * i + 1] = 2 * i + 1, 2 * i
        gens.append(Perm._raw(tuple(img)))
    for g in H.generators:
        gens.append(Perm._raw(tuple(2 * g.images[x // 2] + x % 2 for x in range(2 * n))))
    if closure is None:
        closure = 2 * n <= MAX_CLOSURE_DEGREE
    if not closure:
        order = None if H.order is None else 2**n * H.order
        return PermGroup(2 * n, gens, None, order)
    return generate(gens, 2 * n)


# --- direct products and enumeration ---------------------------------------


def direct_product(groups: list[PermGroup]) -> PermGroup:
    """Natural product action on prod(n_i) points, first factor least significant."""
    degs = [G.degree for G in groups]
    n = math.prod(degs)
    coords = list(itertools.product(*[range(d) for d in reversed(degs)]))
    coords = [tuple(reversed(c)) for c in coords]

    def flat(c):
        idx, scale = 0, 1
        for x, d in zip(c, degs):
            idx += x * scale
            scale *= d
        return idx

    gens = []
    for j, G in enumerate(groups):
        for g in G.generators:
            img = [0] * n
            for c in coords:
                c2 = list(c)
                c2[j] = g.images[c[j]]
                img[flat(c)] = flat(c2)
            gens.append(Perm._raw(tuple(img)))
    return generate(gens, n)


def sylow_of_symmetric(p: int, k: int) -> PermGroup:
    """Iterated wreath product C_p wr ... wr C_p on p^k points."""
    n = p**k
    gens = []
    for j in range(k):
        step, span = p**j, p ** (j + 1)
        img = list(range(n))
        for x in range(span):
            img[x] = (x + step) % span
        gens.append(Perm._raw(tuple(img)))
    P = generate(gens, n)
    if P.order != _p_part(math.factorial(n), p):
        raise VerificationError("Sylow subgroup of S_n has the wrong order")
    return P


def _p_subgroups_masks(P: PermGroup, p: int):
    """All subgroups of the p-group P as (bitmask, generator indices), via chains of index p."""
    elems = P.element_tuples
    N = len(elems)
    index = {t: i for i, t in enumerate(elems)}
    mult = [[index[_compose(x, y)] for y in elems] for x in elems]
    inv = [index[_invert(x)] for x in elems]
    ident = index[tuple(range(P.degree))]
    powp = []
    for i in range(N):
        r = ident
        for _ in range(p):
            r = mult[i][r]
        powp.append(r)

    layer = {1 << ident: ()}
    out = dict(layer)
    while layer:
        nxt: dict[int, tuple] = {}
        for mask, gens in layer.items():
            members = [i for i in range(N) if mask >> i & 1]
            found = 0
            for x in range(N):
                if (mask >> x & 1) or (found >> x & 1):
                    continue
                if not mask >> powp[x] & 1:
                    continue
                xi = inv[x]
                if any(not mask >> mult[mult[x][g]][xi] & 1 for g in gens):
                    continue
                new = mask
                xp = x
                for _ in range(p - 1):
                    for y in members:
                        new |= 1 << mult[xp][y]
                    xp = mult[xp][x]
                found |= new
                if new not in nxt:
                    nxt[new] = gens + (x,)
        out.update(nxt)
        layer = nxt
    return out, elems


def _conjugating_maps(g: tuple, l: tuple):
    """Every sigma with sigma g sigma^-1 == l (cycles of g mapped onto cycles of l)."""
    cg = _cycles(g)
    cl = _cycles(l)
    by_len_g: dict[int, list] = {}
    by_len_l: dict[int, list] = {}
    for c in cg:
        by_len_g.setdefault(len(c), []).append(c)
    for c in cl:
        by_len_l.setdefault(len(c), []).append(c)
    if {k: len(v) for k, v in by_len_g.items()} != {k: len(v) for k, v in by_len_l.items()}:
        return
    lengths = sorted(by_len_g)
    per_len = []
    for k in lengths:
        src, dst = by_len_g[k], by_len_l[k]
        opts = []
        for perm in itertools.permutations(dst):
            for rots in itertools.product(range(k), repeat=len(src)):
                opts.append([(s, d, r) for s, d, r in zip(src, perm, rots)])
        per_len.append(opts)
    n = len(g)
    for choice in itertools.product(*per_len):
        sigma = [0] * n
        for block in choice:
            for s, d, r in block:
                k = len(s)
                for i in range(k):
                    sigma[s[i]] = d[(i + r) % k]
        yield tuple(sigma)


def _centralizer_size(t: tuple) -> int:
    c = Counter(_cycle_lengths(t))
    return math.prod(k**m * math.factorial(m) for k, m in c.items())


def are_conjugate(K: PermGroup, L: PermGroup) -> tuple | None:
    """A sigma in S_n with sigma K sigma^-1 == L, or None (exhaustive search)."""
    if K.degree != L.degree or K.order != L.order:
        return None
    if K.cycle_type_counts() != L.cycle_type_counts():
        return None
    gens = [g.images for g in K.generators]
    if not gens:
        return tuple(range(K.degree))
    by_type: dict[tuple, list] = {}
    for t in L.element_tuples:
        by_type.setdefault(_cycle_lengths(t), []).append(t)
    g1 = min(gens, key=lambda t: (_centralizer_size(t) * len(by_type[_cycle_lengths(t)]), t))
    lset = L._set
    for l in by_type[_cycle_lengths(g1)]:
        for sigma in _conjugating_maps(g1, l):
            sinv = _invert(sigma)
            if all(_compose(_compose(sigma, g), sinv) in lset for g in gens):
                return sigma
    return None


def _group_sort_key(G: PermGroup):
    ct = sorted(G.cycle_type_counts().items())
    return (G.order, ct, G.element_tuples)


@lru_cache(maxsize=None)
def _transitive_prime_power(p: int, k: int) -> tuple[PermGroup, ...]:
    n = p**k
    P = sylow_of_symmetric(p, k)
    masks, elems = _p_subgroups_masks(P, p)
    candidates = []
    for mask, gidx in masks.items():
        if bin(mask).count("1") < n:
            continue
        gens = [Perm._raw(elems[i]) for i in gidx]
        members = [elems[i] for i in range(len(elems)) if mask >> i & 1]
        G = PermGroup(n, gens, members)
        if G.is_transitive():
            candidates.append(G)
    candidates.sort(key=_group_sort_key)
    reps: list[PermGroup] = []
    for G in candidates:
        if not any(are_conjugate(G, R) is not None for R in reps):
            reps.append(G)
    return tuple(sorted(reps, key=_group_sort_key))


def _prime_power_split(n: int) -> list[tuple[int, int]]:
    out = []
    for p in _prime_factors(n):
        k = 0
        while n % p == 0:
            n //= p
            k += 1
        out.append((p, k))
    return out


@lru_cache(maxsize=None)
def enumerate_transitive_nilpotent(n: int) -> tuple[PermGroup, ...]:
    """Transitive nilpotent subgroups of S_n up to conjugacy, 2 <= n <= 9.

    Prime-power degrees: transitive subgroups of one Sylow subgroup of S_n,
    deduplicated by explicit conjugacy search.  Other degrees: natural
    products of the prime-power lists.
    """
    if not 2 <= n <= MAX_ENUM_DEGREE:
        raise GroupError(f"enumeration supports degrees 2..{MAX_ENUM_DEGREE}")
    split = _prime_power_split(n)
    lists = [_transitive_prime_power(p, k) for p, k in split]
    if len(lists) == 1:
        return lists[0]
    out = [direct_product(list(combo)) for combo in itertools.product(*lists)]
    return tuple(sorted(out, key=_group_sort_key))


# --- coverage --------------------------------------------------------------


class Route(str, Enum):
    TWO_GROUP = "two_group_with_transposition"
    THREE_GROUP_REMARK = "three_group_a2"
    MALLE_BOUND = "a_at_least_3"
    FRONTIER = "uncovered_frontier"


@dataclass(frozen=True)
class CoverageVerdict:
    route: Route
    newly_covered: bool
    a: int
    count_exponent: float  # predicted exponent 1/a(H) for |E(H,T)|
    nilpotent: bool
    case: str | None
    note: str = ""

    @property
    def covered(self) -> bool:
        return self.route is not Route.FRONTIER

    def to_dict(self) -> dict:
        return {
            "route": self.route.value,
            "covered": self.covered,
            "newly_covered": self.newly_covered,
            "a": self.a,
            "count_exponent": self.count_exponent,
            "nilpotent": self.nilpotent,
            "case": self.case,
            "note": self.note,
        }


_NEW_FORMS = {Case.FIVE_GROUP_5CYCLE, Case.C2_TIMES_H3, Case.C3_TIMES_H2, Case.C5_TIMES_H2}


def coverage_verdict(H: PermGroup) -> CoverageVerdict:
    """Which known result gives a finite 3-torsion average for C2 wr H."""
    if H.order <= 1:
        raise GroupError("verdict needs a nontrivial group")
    if not H.is_transitive():
        raise GroupError("verdict needs a transitive group")
    a, _ = a_invariant(H)
    if not is_nilpotent(H):
        note = "non-nilpotent: outside the nilpotent coverage argument"
        if H.degree == 3 and H.order == 6:
            note = "S3 on 3 points: smallest open case"
        elif H.degree == 5 and H.order == 10:
            note = "D5 on 5 points: smallest open case with 3 not dividing |H|"
        return CoverageVerdict(Route.FRONTIER, False, a, 1 / a, False, None, note)
    res = classify_nilpotent(H)
    if res.case is Case.TWO_GROUP:
        route = Route.TWO_GROUP
    elif a == 2:
        route = Route.THREE_GROUP_REMARK
    else:
        route = Route.MALLE_BOUND
    newly = res.case in _NEW_FORMS
    if newly and route is not Route.MALLE_BOUND:
        raise VerificationError("newly covered group not routed through the a(H) >= 3 bound")
    return CoverageVerdict(route, newly, a, 1 / a, True, res.case.value)


# --- exhaustive verification -----------------------------------------------


def verify_classification(max_degree: int = MAX_ENUM_DEGREE) -> dict:
    """Run every check over all transitive nilpotent groups of degree 2..max_degree."""
    violations = []
    per_degree = {}
    cases = Counter()
    for n in range(2, max_degree + 1):
        groups = enumerate_transitive_nilpotent(n)
        per_degree[n] = len(groups)
        for G in groups:
            tag = f"degree {n} order {G.order}"
            try:
                res = classify_nilpotent(G)
                cases[res.case.value] += 1
                if not G.is_p_group(2):
                    if res.a < 2:
                        violations.append(f"{tag}: non-2-group with a={res.a}")
                    p, m, w = homogeneous_p_cycle_witness(G)
                    if res.a % (p - 1) or n - orb_count(w) != res.a:
                        violations.append(f"{tag}: witness {w} inconsistent with a={res.a}")
                dec = sylow_decompose(G)
                for t in G.element_tuples:
                    k = _order(t)
                    if k > 1 and _prime_factors(k) == [k]:
                        r = p_part_decompose_element(G, Perm._raw(t), dec)
                        if not r.check:
                            violations.append(f"{tag}: p-part check fails for {Perm._raw(t)}")
            except (ClassificationError, VerificationError) as exc:
                violations.append(f"{tag}: {exc}")
    c5 = coverage_verdict(cyclic_group(5))
    s3 = coverage_verdict(symmetric_group(3))
    return {
        "max_degree": max_degree,
        "groups_per_degree": per_degree,
        "cases": dict(sorted(cases.items())),
        "violations": violations,
        "c5_newly_covered": c5.newly_covered,
        "s3_frontier": s3.route is Route.FRONTIER,
    }
