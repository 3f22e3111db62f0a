"""Running means of h3 against the limits 2, 4/3 and 5/3.

The means creep up towards their limits from below.  The approach is known to
be slow, with a secondary term of size X^(-1/6).
"""

from torsion3 import averages as av
from torsion3 import counting as ct
from torsion3 import quadfield as qf

X = 2 * 10**5
tab = qf.torsion_table(X)
cps = ct.geometric_checkpoints(X, count=8)
for filt in av.FILTERS:
    s = av.dh_average(filt, X, cps, table=tab)
    rep = av.compare_to_constant(s, av.LIMITS[filt])
    print(f"{filt} (limit {rep.c})")
    for x, m, g in rep.rows:
        print(f"  X={x:>7}  mean={float(m):.4f}  gap={float(g):.4f}")
