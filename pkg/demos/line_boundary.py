"""Boundary data on intervals of the real line.

Run with ``python3 demos/line_boundary.py``.
"""
import numpy as np

from kappa.line import (IntervalSet, PanelFunction, cauchy_transform,
                        dual_construction, finite_hilbert, loewner_form,
                        loewner_real_form)

unit = IntervalSet([(-1.0, 1.0)])

x = np.array([-0.5, 0.0, 0.5])
print("H 1 on (-1, 1):", finite_hilbert(PanelFunction.constant(unit), x).real)
print("closed form    :", np.log(np.abs((1 - x) / (1 + x))) / np.pi)

for name, f0, iset in [("x on (-1, 1)", lambda t: t, unit),
                       ("1/x on [1, 2]", lambda t: 1 / t, IntervalSet([(1.0, 2.0)])),
                       ("x + 1/(x - 1.5) on (-1, 1)", lambda t: t + 1 / (t - 1.5), unit)]:
    L = loewner_form(f0, iset)
    D = loewner_real_form(f0, iset)
    print(f"\n{name}: n_neg {L.inertia.n_neg} (doubled panels {L.inertia_refined.n_neg}),"
          f" divided-difference form differs by {np.max(np.abs(L.matrix - D.matrix)):.1e}")

g0 = lambda t: (t - 0.3) ** 2 + 0.1
chk = dual_construction(g0, unit, x=np.linspace(-0.9, 0.9, 19))
print("\nCauchy transform of 1 at i:", cauchy_transform(PanelFunction.constant(unit), 1j)[0])
print("Im h(x + i eps) - g0, RMS over eps", chk.eps, ":", ["%.1e" % d for d in chk.defects])
