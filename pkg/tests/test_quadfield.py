import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsion3 import _kernels as K
from torsion3 import quadfield as qf
from torsion3.quadfield import QuadForm


def analytic_class_number(D: int) -> float:
    """h for D < 0 from the character sum; h*R for D > 0 from the log-sine sum."""
    f = abs(D)
    chi = [qf.kronecker(D, a) for a in range(1, f + 1)]
    if D < 0:
        return qf.roots_of_unity(D) / (2 * f) * abs(sum(c * a for a, c in enumerate(chi, start=1)))
    return -0.5 * math.fsum(c * math.log(math.sin(math.pi * a / f)) for a, c in enumerate(chi, start=1) if c)


def pell_brute(D: int, ymax: int = 200000):
    """Smallest y >= 1 with D y^2 +- 4 a square, by search."""
    for y in range(1, ymax):
        for s in (-4, 4):
            x2 = D * y * y + s
            x = math.isqrt(x2)
            if x * x == x2:
                return x, y
    return None


# --- discriminants -----------------------------------------------------------


def test_discriminants_to_ten():
    assert list(qf.fundamental_discriminants(10)) == [-3, -4, 5, -7, 8, -8]
    assert list(qf.fundamental_discriminants(3)) == [-3]


def test_discriminants_match_definition():
    brute = [d for n in range(2, 5001) for d in (n, -n) if qf.is_fundamental(d)]
    assert list(qf.fundamental_discriminants(5000)) == brute


def test_segmented_sieve_independent_of_segment_size():
    whole = np.concatenate(list(qf.iter_fundamental_segments(20000, segment=1 << 20)))
    parts = np.concatenate(list(qf.iter_fundamental_segments(20000, segment=977)))
    assert np.array_equal(whole, parts)


def test_count_series_segments():
    a = qf.fundamental_count_series(10**5, [10, 100, 10**5], segment=1 << 22)
    b = qf.fundamental_count_series(10**5, [10, 100, 10**5], segment=1013, threads=3)
    assert a == b and a[0] == (10, 2, 4)


@pytest.mark.parametrize("D", [1, 0, 9, -12, 12 * 4, 2])
def test_not_fundamental(D):
    assert not qf.is_fundamental(D)


# --- forms and composition -----------------------------------------------------


def test_reduced_forms_minus_23():
    G = qf.ClassGroup(-23)
    assert G.reps == [QuadForm(1, 1, 6), QuadForm(2, -1, 3), QuadForm(2, 1, 3)]


@pytest.mark.parametrize("D,h,factors", [
    (-23, 3, [3]), (-4, 1, []), (-3, 1, []), (-15, 2, [2]), (229, 3, [3]),
    (-3299, 27, [3, 9]), (-4027, 9, [3, 3]), (-3896, 36, [3, 12]), (12, 2, [2]), (32009, 9, [3, 3]),
])
def test_class_group_values(D, h, factors):
    assert qf.class_group(D) == (h, factors)


def test_class_group_rejects_nonfundamental():
    with pytest.raises(qf.NotFundamental):
        qf.class_group(-12)


@pytest.mark.parametrize("D,p,hp", [(-23, 3, 3), (-4, 3, 1), (-15, 2, 2), (-15, 3, 1)])
def test_h_torsion(D, p, hp):
    assert qf.h_torsion(D, p) == hp


@pytest.mark.parametrize("D", [-23, -47, -3299, -4027, -5, -84, 229, 1129, 4 * 79, 32009])
def test_group_laws(D):
    if not qf.is_fundamental(D):
        D = qf.field_discriminant(D)
    G = qf.ClassGroup(D)
    e = G.identity
    for i in range(G.h):
        assert G.mul(i, e) == i
        assert G.mul(i, G.inverse(i)) == e
        for j in range(G.h):
            assert G.mul(i, j) == G.mul(j, i)
            for k in range(0, G.h, max(1, G.h // 7)):
                assert G.mul(G.mul(i, j), k) == G.mul(i, G.mul(j, k))


def test_group_laws_all_discriminants():
    rng = np.random.default_rng(7)
    for D in qf.fundamental_discriminants(10**4):
        G = qf.ClassGroup(int(D))
        e = G.identity
        assert G.index(qf.principal_form(int(D))) == e
        for i, f in enumerate(G.reps):
            assert G.mul(i, e) == i
            assert G.index(qf.compose(f, QuadForm(f.a, -f.b, f.c))) == e
        for i, j, k in rng.integers(0, G.h, size=(5, 3)):
            assert G.mul(G.mul(i, j), k) == G.mul(i, G.mul(j, k))


forms_D = st.sampled_from([int(d) for d in qf.fundamental_discriminants(3000)])


@settings(max_examples=80, deadline=None)
@given(forms_D, st.integers(0, 10**6), st.integers(0, 10**6))
def test_composition_is_well_defined_on_classes(D, i, j):
    G = qf.ClassGroup(D)
    f, g = G.reps[i % G.h], G.reps[j % G.h]
    # any equivalent representative composes to the same class
    f2 = qf.rho(f, math.isqrt(D)) if D > 0 else QuadForm(f.a, f.b + 2 * f.a, f.a + f.b + f.c)
    c = qf.compose(f, g)
    assert c.discriminant == D
    assert G.index(c) == G.index(qf.compose(f2, g))


@settings(max_examples=80, deadline=None)
@given(forms_D)
def test_reduction_is_idempotent(D):
    G = qf.ClassGroup(D)
    for f in G.reps:
        assert qf.reduce_form(f) == f


# --- oracles over a range ---------------------------------------------------------


def test_class_numbers_match_analytic_formula():
    for D in qf.fundamental_discriminants(2000):
        D = int(D)
        G = qf.ClassGroup(D)
        if D < 0:
            assert G.h == round(analytic_class_number(D))
        else:
            u = qf.fundamental_unit(D)
            h = G.h if u.norm == -1 else G.h // 2
            hR = analytic_class_number(D)
            assert abs(h * float(u.regulator) - hR) <= 1e-9 * hR


def test_three_torsion_brute_force():
    for D in qf.fundamental_discriminants(3000):
        G = qf.ClassGroup(int(D))
        assert G.torsion_count(3) == qf.torsion_from_factors(G.invariant_factors(), 3)
        assert G.torsion_count(2) == qf.torsion_from_factors(G.invariant_factors(), 2)


def test_bulk_torsion_table_matches_class_groups():
    tab = qf.torsion_table(3000)
    for D, h, h3 in zip(tab.D, tab.h, tab.h3):
        hh, fac = qf.class_group(int(D))
        assert (h, h3) == (hh, qf.torsion_from_factors(fac, 3))


def test_torsion_table_threads_identical():
    a, b = qf.torsion_table(20000, threads=1), qf.torsion_table(20000, threads=3, chunk=777)
    for name in ("D", "h", "h3", "omega"):
        assert np.array_equal(getattr(a, name), getattr(b, name))


def test_genus_two_rank():
    tab = qf.torsion_table(3000)
    for D, h2 in zip(tab.D, tab.h2):
        assert h2 == qf.h_torsion(int(D), 2)


def test_real_kernel_matches_cycle_labels():
    real = np.array([d for d in qf.fundamental_discriminants(5000) if d > 0])
    spf = qf._spf(5000)
    got = K.class_numbers(real, spf)
    assert list(got) == [K.real_reduced_forms(int(d), spf)[2] for d in real]


# --- units --------------------------------------------------------------------------


@pytest.mark.parametrize("D,x,y,R", [(5, 1, 1, 0.4812118250596034), (8, 2, 1, 0.8813735870195430),
                                      (12, 4, 1, 1.3169578969248167)])
def test_fundamental_unit_examples(D, x, y, R):
    u = qf.fundamental_unit(D)
    assert (u.x, u.y) == (x, y)
    assert float(u.regulator) == pytest.approx(R, rel=1e-15)


def test_fundamental_unit_matches_pell_search():
    for D in qf.fundamental_discriminants(1500):
        if D < 0:
            continue
        got = pell_brute(int(D))
        if got is None:
            continue
        u = qf.fundamental_unit(int(D))
        assert (u.x, u.y) == got
        assert u.x**2 - D * u.y**2 == 4 * u.norm


def test_fundamental_unit_large_coefficients():
    u = qf.fundamental_unit(2089)
    assert (u.x, u.y) == (8036636280, 175834906)
    assert u.x**2 - 2089 * u.y**2 == -4


def test_fundamental_unit_errors():
    with pytest.raises(ValueError):
        qf.fundamental_unit(-4)
    with pytest.raises(RuntimeError):
        qf.fundamental_unit(2089, max_steps=3)
    with pytest.raises(ValueError):
        qf.fundamental_unit(5, prec=32)


def test_regulator_precision():
    u = qf.fundamental_unit(376, prec=200)
    with mpmath.workprec(200):
        exact = mpmath.log((u.x + u.y * mpmath.sqrt(376)) / 2)
    assert abs(u.regulator - exact) < mpmath.mpf(2) ** -190


# --- residues and zeta(2) ---------------------------------------------------------------


@pytest.mark.parametrize("D,res", [(-4, math.pi / 4), (-3, 2 * math.pi / (6 * math.sqrt(3))),
                                    (5, 0.4304089409640040), (-23, 2 * math.pi * 3 / (2 * math.sqrt(23)))])
def test_residues(D, res):
    assert qf.zeta_residue(D) == pytest.approx(res, rel=1e-12)


def test_residue_equals_l_at_one():
    for D in [-3, -4, -23, -1000003, 5, 229, 1001, 99989]:
        if qf.is_fundamental(D):
            assert qf.l_value(D, 1) == pytest.approx(qf.zeta_residue(D), rel=1e-12)


def hurwitz_l2(D):
    f = abs(D)
    with mpmath.workdps(30):
        return float(sum(qf.kronecker(D, a) * mpmath.zeta(2, mpmath.mpf(a) / f) for a in range(1, f + 1)) / f**2)


def test_zeta2_examples():
    assert qf.zeta_at_2(1) == pytest.approx(math.pi**2 / 6, rel=1e-15)
    assert qf.zeta_at_2(-4) == pytest.approx(1.6449340668482264 * 0.915965594177219, rel=1e-14)


@pytest.mark.parametrize("D", [-3, -4, -7, -8, -23, -163, -1003, 5, 8, 12, 229, 2089])
def test_l2_matches_hurwitz(D):
    if qf.is_fundamental(D):
        assert qf.l_value(D, 2) == pytest.approx(hurwitz_l2(D), rel=1e-13)


def test_l2_matches_bernoulli_closed_form():
    for D in qf.fundamental_discriminants(3000):
        if D > 0:
            assert qf.l_value(int(D), 2) == pytest.approx(qf.l2_closed_form_real(int(D)), rel=1e-13)


def test_zeta2_bounds():
    # Euler products: zeta(4) <= zeta(s)L(s) <= zeta(2)^2 at s = 2
    lo, hi = math.pi**4 / 90, (math.pi**2 / 6) ** 2
    for D in qf.fundamental_discriminants(500):
        z = qf.zeta_at_2(int(D))
        assert lo <= z <= hi


def test_theta_tail_is_small():
    for D in (-3, -99995, 99989):
        t1, t2, tail = qf._theta_terms(D, 2)
        assert tail < qf.ZETA2_TAIL_TARGET


# --- records, checks, cache -------------------------------------------------------------


def test_field_data_invariants():
    for D in qf.fundamental_discriminants(400):
        r = qf.field_data(int(D))
        assert r.h_narrow == math.prod(r.invariant_factors)
        assert r.h6 == r.h2 * r.h3
        assert r.r1 + 2 * r.r2 == 2
        assert r.residue > 0 and r.zeta2 > 0
        assert r.h in (r.h_narrow, r.h_narrow // 2)


def test_field_data_rejects_wrong_w():
    r = qf.field_data(-3)
    with pytest.raises(ValueError):
        qf.QuadFieldData(**{**r.__dict__, "w": 2})


def test_trivial_bound_small_range():
    ratio, D = qf.trivial_bound_check(100)
    assert ratio < 1
    assert 1 / (math.sqrt(3) * (2 + math.log(3))) == pytest.approx(0.186, abs=1e-3)


def test_trivial_bound_deterministic():
    assert qf.trivial_bound_check(10**4) == qf.trivial_bound_check(10**4, threads=2)


@pytest.mark.parametrize("m,n,disc,ratios", [
    (2, 3, 2304, {8: 36, 12: 16, 24: 4}),
    (-1, 2, 256, {-4: 16, 8: 4, -8: 4}),
    (5, -3, 225, {5: 9, -3: 25, -15: 1}),
])
def test_biquadratic(m, n, disc, ratios):
    d, r = qf.biquadratic_disc_check(m, n)
    assert d == disc and r == ratios


def test_biquadratic_degenerate():
    with pytest.raises(ValueError):
        qf.biquadratic_disc_check(2, 2)
    with pytest.raises(ValueError):
        qf.biquadratic_disc_check(4, 3)


def test_cache_roundtrip(tmp_path):
    path = tmp_path / "c.csv"
    cache = qf.FieldCache(path)
    recs = [cache.get(D) for D in (-23, 5, 229, -3299)]
    again = qf.FieldCache(path)
    for r in recs:
        assert again.get(r.D) == r
    assert path.read_text().splitlines()[0] == ",".join(qf.CACHE_HEADER)


def test_cache_detects_corruption(tmp_path):
    path = tmp_path / "c.csv"
    qf.write_cache(path, [qf.field_data(-23)])
    text = path.read_text().replace(",3,", ",4,", 1)
    path.write_text(text)
    with pytest.raises(qf.CacheCorrupt):
        qf.read_cache(path)
