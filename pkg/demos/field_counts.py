"""Field counts by discriminant and their growth exponents.

Quadratic fields grow linearly, cyclic cubic like T^(1/2), cyclic quintic like
T^(1/4): the exponent is 1/a(H).  The moment sum A(T) = sum h3 h2^(2/3) grows
at least linearly for quadratic fields, so a bound T^(1 - delta) is out of reach.
"""

from torsion3 import counting as ct

runs = {
    "C2": ct.count_quadratic(10**7, ct.geometric_checkpoints(10**7, start=10**3)),
    "C3": ct.count_cyclic(3, 10**10, ct.geometric_checkpoints(10**10, start=10**4)),
    "C5": ct.count_cyclic(5, 10**12, ct.geometric_checkpoints(10**12, start=10**4)),
    "A(T)": ct.moment_series("h2_23_h3", 10**5, ct.geometric_checkpoints(10**5, start=10**2)),
}
for name, s in runs.items():
    fit = ct.fit_exponent(s)
    print(f"{name:>5}: value at {int(s.T[-1]):.0e} = {s.values[-1]:.6g}, "
          f"slope {fit.slope:.4f} over [{fit.T_range[0]:.0e}, {fit.T_range[1]:.0e}]")
