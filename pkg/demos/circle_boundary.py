"""Negative squares from boundary data on the unit circle.

Run with ``python3 demos/circle_boundary.py``.
"""
import numpy as np

from kappa.circle import (CircleGrid, boundary_form_disk, hankel_rank,
                          monomial_basis, windowed_basis)
from kappa.instances import random_schur_pair

one = lambda u: np.ones_like(u)

# b = conj(u)^k on the whole circle: the form has k negative squares
for k in (1, 2, 3):
    g = CircleGrid(4096)
    r = boundary_form_disk(g, lambda u, k=k: np.conj(u) ** k, one, basis=monomial_basis(g, k + 2))
    print(f"conj(u)^{k}: n_neg = {r.inertia.n_neg}")

# data known only on an arc: the count grows with the basis up to deg B
rng = np.random.default_rng(3)
pair = random_schur_pair(rng, 2)
th = np.sort(np.mod(np.angle(pair.B.zeros), 2 * np.pi))
mid = th[0] + (th[1] - th[0]) / 2 if th[1] - th[0] > np.pi else th[1] + (2 * np.pi - th[1] + th[0]) / 2
g = CircleGrid(2048, [(mid + np.pi / 4, mid + 2 * np.pi - np.pi / 4)])
c = lambda u: 1 + 0.3 * u
counts = [boundary_form_disk(g, lambda u: pair(u) * c(u), c, basis=windowed_basis(g, m - 1), J=512).inertia.n_neg
          for m in range(1, 8)]
print("\narc data, basis size 1..7:", counts, "(deg B = 2)")

# full-circle samples: Hankel rank of the negative Fourier coefficients
hr = hankel_rank(CircleGrid(4096).sample(pair), 16)
print("Hankel rank", hr.rank, "gap ratio", f"{hr.gap_ratio:.2e}")
