"""The average constant c for H = C2, truncated at |D| <= Y, with its enclosure.

For trivial H the constant is exactly 5/3.  For H = C2 each quadratic field
contributes h3 Res / (zeta_F(2) |D|^2), weighted by 1 + 2^r1 / 3^(r1+r2) in
the numerator.  Both tails are bounded in closed form, so every truncation
comes with an interval containing the full constant.
"""

from torsion3 import constant as cn

print("trivial H:", cn.c_trivial_H())
for Y in (10**2, 10**3, 10**4):
    tc = cn.c_truncated_C2(Y)
    lo, hi = tc.tail_interval
    print(f"Y={Y:>6}  fields={tc.fields:>5}  c={tc.value:.7f}  enclosure [{lo:.5f}, {hi:.5f}]")
