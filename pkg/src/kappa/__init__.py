"""Negative-square counts and interpolation in generalized Schur and
Nevanlinna classes: certificates from Hermitian forms, constructive solvers
for interior problems and boundary forms on the circle and the line."""
from .errors import *  # noqa: F401,F403
from .rational import (BlaschkeProduct, RationalFunction, SchurPair,
                       krein_langer_factorize, schur_class_check)
from .forms import (Inertia, NudelmanData, cf_matrices, inertia,
                    kernel_matrix_nevanlinna, kernel_matrix_schur,
                    nudelman_form, pick_matrix, verify_pair)
from .model_space import (ModelSpace, gram_form_general, model_space_build,
                          phi_of_T, sarason_defect)
from .circle import CircleGrid, boundary_form_disk, hankel_rank
from .line import (IntervalSet, boundary_form_halfplane, cauchy_transform,
                   dual_loewner_form, finite_hilbert, loewner_form,
                   loewner_real_form)
from .solvers import (SearchConfig, SolveReport, solve_cf_kappa, solve_np0,
                      solve_pick_kappa, solve_sarason)

__version__ = "0.1.0"
