"""Which transitive nilpotent groups H does the 3-torsion average cover?

For each group we print the minimal index a(H), the case it falls into, and
whether the counting argument reaches it.  The cyclic group of order 5 is the
first case that needs the a(H) >= 3 route; S3 sits outside the nilpotent
family altogether.
"""

from torsion3 import permgrp as pg

examples = {
    "C2": pg.cyclic_group(2),
    "C3": pg.cyclic_group(3),
    "C4": pg.cyclic_group(4),
    "V4": pg.generate(pg.parse_generators("(1 2)(3 4); (1 3)(2 4)")),
    "C5": pg.cyclic_group(5),
    "C6": pg.cyclic_group(6),
    "D4": pg.dihedral_group(4),
    "C3 x C3": pg.generate(pg.parse_generators("(1 2 3)(4 5 6)(7 8 9); (1 4 7)(2 5 8)(3 6 9)")),
    "S3": pg.symmetric_group(3),
}

print(f"{'H':>8}  {'order':>5}  {'a':>2}  {'case':<22}  route")
for name, H in examples.items():
    a, _ = pg.a_invariant(H)
    v = pg.coverage_verdict(H)
    case = v.case or "-"
    flag = " (new)" if v.newly_covered else ""
    print(f"{name:>8}  {H.order:>5}  {a:>2}  {case:<22}  {v.route}{flag}")

print()
rep = pg.verify_classification(9)
total = sum(rep["groups_per_degree"].values())
print(f"all {total} transitive nilpotent groups of degree 2..9 checked, "
      f"{len(rep['violations'])} violations")
print("per degree:", rep["groups_per_degree"])
