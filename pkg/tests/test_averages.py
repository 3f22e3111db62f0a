from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsion3 import averages as av
from torsion3 import counting as ct
from torsion3 import quadfield as qf

TABLE = qf.torsion_table(20000)


def test_both_signatures_to_eight():
    pt = av.dh_average("both", 8, [8], table=TABLE).at(8)
    assert (pt.field_count, pt.sum_h3, pt.mean_h3) == (6, 6, 1)


def test_imaginary_to_25():
    # -23 is the only field in range with a class of order 3
    pt = av.dh_average("imaginary", 25, [25], table=TABLE).at(25)
    assert (pt.field_count, pt.sum_h3, pt.mean_h3) == (10, 12, Fraction(6, 5))


def test_smallest_range():
    pt = av.dh_average("imaginary", 3, [3]).at(3)
    assert pt.mean_h3 == 1


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        av.dh_average("complex", 100)
    with pytest.raises(ValueError):
        av.dh_average("both", 2)


def test_direct_sum_oracle():
    X = 5000
    imag = [qf.h_torsion(int(D), 3) for D in qf.fundamental_discriminants(X) if D < 0]
    pt = av.dh_average("imaginary", X, [X], table=TABLE).at(X)
    assert (pt.field_count, pt.sum_h3) == (len(imag), sum(imag))


def test_counts_agree_with_field_count():
    cps = ct.geometric_checkpoints(20000, count=12)
    both = av.dh_average("both", 20000, cps, table=TABLE)
    counts = ct.count_quadratic(20000, cps)
    assert [p.field_count for p in both.checkpoints] == [int(v) for v in counts.values]


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 20000))
def test_signatures_add_up(X):
    i, r, b = (av.dh_average(f, X, [X], table=TABLE).at(X) for f in av.FILTERS)
    assert i.field_count + r.field_count == b.field_count
    assert i.sum_h3 + r.sum_h3 == b.sum_h3
    assert b.mean_h3 >= 1


def test_means_approach_limits_from_below():
    cps = [10**3, 10**4, 20000]
    for filt in av.FILTERS:
        rep = av.compare_to_constant(av.dh_average(filt, 20000, cps, table=TABLE), av.LIMITS[filt])
        means = [m for _, m, _ in rep.rows]
        assert all(1 <= m < av.LIMITS[filt] for m in means)


def test_gap_report():
    rep = av.compare_to_constant(av.dh_average("imaginary", 20000, [100, 20000], table=TABLE), Fraction(2))
    assert rep.shrinking
    assert rep.rows[0][2] == 2 - rep.rows[0][1]


def test_constant_series_has_zero_gaps():
    pts = tuple(av.AveragePoint(x, 3 * x, 5 * x) for x in (10, 100, 1000))
    rep = av.compare_to_constant(av.AverageSeries("both", pts), Fraction(5, 3))
    assert all(g == 0 for _, _, g in rep.rows)
