"""Class groups, units and zeta data of a few quadratic fields.

D = -3299 and -3896 have non-cyclic 3-parts; 229 is the smallest real field
with a class of order 3.  The residue is computed from h R and checked against
L(1, chi_D) from the theta series.
"""

from torsion3 import quadfield as qf

for D in (-23, -3299, -3896, -4027, 229, 12, 32009):
    d = qf.field_data(D)
    line = f"D={D:>6}  h={d.h:<3} Cl={list(d.invariant_factors)!s:<8} h3={d.h3:<2} h2={d.h2}"
    if D > 0:
        u = qf.fundamental_unit(D)
        line += f"  unit=({u.x} + {u.y} sqrt{D})/2 norm {u.norm:+d}"
    print(line)
    print(f"          residue={d.residue:.12f}  L(1)={qf.l_value(D, 1):.12f}  zeta(2)={d.zeta2:.12f}")

print()
tab = qf.torsion_table(10**5)
big = tab.h3 >= 9
print(f"{len(tab.D)} fields with |D| <= 1e5; {int(big.sum())} have 3-rank 2, the first few:",
      [int(D) for D in tab.D[big][:6]])
