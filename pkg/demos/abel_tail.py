"""Abel summation and the tail bound it gives.

First the identity sum a_i phi(t_i) = A phi | - int A phi' on a small example,
then the ratio of the tail sum S(X, Y) to X^(1 - delta/2 + eps/2) + X / Y^(delta - eps)
over a grid, for the extremal A(T) = T^(1 - delta).  Last, the same experiment
fed with the measured moment sum of quadratic fields, where it breaks down.
"""

import numpy as np

from torsion3 import abel
from torsion3 import quadfield as qf

data = abel.StepData(np.arange(1.0, 101.0), np.ones(100))
phi = abel.PowerLaw(1.0, -1.0)
r = abel.abel_identity(data, phi, phi.derivative(), 1.0, 100.0)
print(f"harmonic tail: sum={r.lhs:.15f}  via integral={r.rhs:.15f}  relative residual {r.relative:.1e}")

rep = abel.tail_bound_experiment(0.2, 0.1)
print(f"delta=0.2 eps=0.1: C = {rep.C:.5f} over {len(rep.rows)} grid points")
c1, c2, rel = abel.stability(0.2, 0.1)
print(f"refined grid: C = {c2:.5f} (relative change {rel:.1e})")
print("final shape with eps = delta/2:", abel.final_shape_check(0.2)["passed"])

real = abel.real_data_experiment(qf.torsion_table(10**5))
print(f"measured A(T): slope {real['slope']:.3f}, hypothesis holds: {real['hypothesis_holds']}, "
      f"ratios {[round(x, 2) for x in real['ratios']]}")
