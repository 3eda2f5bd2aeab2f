"""Certify and solve interior interpolation problems.

Run with ``python3 demos/interior_problems.py``.
"""
import numpy as np

from kappa import BlaschkeProduct
from kappa.forms import cf_matrices, inertia, pick_matrix
from kappa.instances import random_schur_pair, near_pole_samples
from kappa.model_space import model_space_build
from kappa.instances import sarason_operator
from kappa.solvers import solve_cf_kappa, solve_pick_kappa, solve_sarason

rng = np.random.default_rng(0)

# Pick data sampled from S = f/B with two poles in the disk
pair = random_schur_pair(rng, 2)
z = near_pole_samples(rng, pair, 7)
w = pair(z)
print("Pick inertia (neg, zero, pos):", inertia(pick_matrix(z, w)).as_tuple())

rep = solve_pick_kappa(z, w)
print("status", rep.status, "deg B", rep.degree)
print("zeros of B found  ", np.round(np.sort_complex(rep.pair.B.zeros), 4))
print("zeros of B in data", np.round(np.sort_complex(pair.B.zeros), 4))
print("max |S(z) - w|", np.max(np.abs(rep.pair(z) - w)))

# Taylor data: the first coefficients of the same quotient; six
# coefficients need not see both poles
c = pair.quotient().taylor(6)
print("\nCF defect inertia:", cf_matrices(c).inertia.as_tuple())
rep = solve_cf_kappa(c)
print("status", rep.status, "matching order", rep.extra["matching_order"],
      ">= bound", rep.extra["order_bound"])

# The same values as an operator commuting with the model-space shift
M = model_space_build(BlaschkeProduct(tuple(z[:4])))
R = sarason_operator(M, w[:4])
rep = solve_sarason(M, R)
print("\nSarason status", rep.status, "kappa", rep.kappa,
      "||B(T)R - f(T)|| =", f"{rep.residuals['operator']:.2e}")
