"""Model spaces ``H(C) = H^2 - C H^2``, the compressed shift and its calculus.

For a finite Blaschke product ``C`` the space is finite dimensional and is
described by the Takenaka-Malmquist orthonormal basis

    e_k(z) = sqrt(1 - |a_k|^2) / (1 - conj(a_k) z) * prod_{j<k} (z - a_j) / (1 - conj(a_j) z)

built from the zeros ``a_0, a_1, ...`` of ``C`` in the order given. Repeated
zeros are allowed; the same formula then yields the confluent basis.

For a general Schur-class ``C`` the space is handled on the truncated
Taylor-coefficient space ``C^N`` (see :func:`gram_form_general`).
"""
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import (DegreeZero, InputError, NotInCommutant, PoleNearDisk,
                     SingularDenominator, TruncationUnstable)
from .forms import Inertia, hermitian, inertia, ZERO_TOL
from .rational import (BlaschkeProduct, RationalFunction, circle_grid,
                       schur_class_check)

__all__ = [
    "ModelSpace", "model_space_build", "phi_of_T", "CommutantCandidate",
    "sarason_defect", "GeneralForm", "gram_form_general", "toeplitz_lower",
    "GRID",
]

GRID = 4096
POLE_MARGIN = 1e-6


def _tm_basis(zeros, z):
    """Rows ``e_k(z)`` of the Takenaka-Malmquist system at points ``z``."""
    z = np.asarray(z, dtype=complex)
    out = np.empty((len(zeros),) + z.shape, dtype=complex)
    prefix = np.ones_like(z)
    for k, a in enumerate(zeros):
        denom = 1.0 - np.conj(a) * z
        out[k] = np.sqrt(1.0 - abs(a) ** 2) / denom * prefix
        prefix = prefix * (z - a) / denom
    return out


@dataclass(frozen=True)
class ModelSpace:
    """Finite model space of a disk Blaschke product.

    Attributes
    ----------
    C : BlaschkeProduct
    T : ndarray
        Matrix of the compressed shift in the orthonormal basis,
        ``T[j, k] = <z e_k, e_j>``.
    grid : int
        Number of circle nodes used for the inner products.
    """

    C: BlaschkeProduct
    T: np.ndarray
    grid: int = GRID

    @property
    def n(self):
        return self.C.degree

    @property
    def zeros(self):
        return np.asarray(self.C.zeros, dtype=complex)

    def basis(self, z):
        """Evaluate the orthonormal basis; returns shape ``(n,) + z.shape``."""
        return _tm_basis(self.C.zeros, z)

    def kernel_coords(self, w):
        """Coordinates of ``K_C(w, .)`` in the basis, one column per ``w``."""
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        return np.conj(self.basis(w))

    def kernel(self, w, z):
        """``K_C(w, z) = (1 - C(z) conj C(w)) / (1 - z conj w)``."""
        return self.basis(np.asarray(z)).T @ self.kernel_coords(w)

    def coords(self, h):
        """Orthonormal coordinates of a function given as a callable."""
        u = circle_grid(self.grid)
        return np.conj(self.basis(u)) @ np.asarray(h(u), dtype=complex) / self.grid

    def defect_rank(self, tol=1e-8):
        """Rank of ``I - T^* T`` (one for a nonzero model space)."""
        D = np.eye(self.n) - self.T.conj().T @ self.T
        s = np.linalg.svd(D, compute_uv=False)
        return int(np.sum(s > tol))

    def kernel_residual(self):
        """Max of ``||T^* k_beta - conj(beta) k_beta||`` over the zeros."""
        K = self.kernel_coords(self.zeros)
        return float(np.max(np.abs(self.T.conj().T @ K - K * np.conj(self.zeros)[None, :])))


def model_space_build(C, grid=GRID):
    """Build the model space of a finite disk Blaschke product.

    Raises
    ------
    DegreeZero
        ``C`` is a unimodular constant.
    """
    if not isinstance(C, BlaschkeProduct):
        C = BlaschkeProduct(tuple(np.atleast_1d(C)))
    if C.domain != "disk":
        raise InputError("model spaces are built for disk Blaschke products")
    if C.degree == 0:
        raise DegreeZero("C has no zeros; the model space is trivial")
    u = circle_grid(grid)
    E = _tm_basis(C.zeros, u)
    T = (np.conj(E) @ (u * E).T) / grid
    return ModelSpace(C, T, grid)


def _poly_of_matrix(coeffs, A):
    """Horner evaluation of an ascending polynomial at a square matrix."""
    n = A.shape[0]
    out = np.zeros((n, n), dtype=complex)
    for a in coeffs[::-1]:
        out = out @ A + a * np.eye(n)
    return out


def phi_of_T(phi, M, margin=POLE_MARGIN):
    """``phi(T) = p(T) q(T)^{-1}`` for rational ``phi = p/q``.

    Raises
    ------
    PoleNearDisk
        A pole of ``phi`` lies within ``margin`` of the closed disk.
    SingularDenominator
        ``q(T)`` is numerically singular.
    """
    if isinstance(phi, BlaschkeProduct):
        phi = phi.to_rational()
    elif not isinstance(phi, RationalFunction):
        phi = RationalFunction.constant(phi)
    T = M.T if isinstance(M, ModelSpace) else np.asarray(M, dtype=complex)
    poles = phi.poles()
    if len(poles) and np.min(np.abs(poles)) <= 1.0 + margin:
        raise PoleNearDisk("phi has a pole too close to the closed disk")
    P = _poly_of_matrix(phi.num, T)
    Q = _poly_of_matrix(phi.den, T)
    if np.linalg.cond(Q) > 1e12:
        raise SingularDenominator("q(T) is numerically singular")
    return np.linalg.solve(Q.T, P.T).T


@dataclass(frozen=True)
class CommutantCandidate:
    """Operator ``R`` proposed to commute with the compressed shift."""

    R: np.ndarray
    commutation_residual: float

    @classmethod
    def build(cls, R, M):
        R = np.atleast_2d(np.asarray(R, dtype=complex))
        T = M.T
        if R.shape != T.shape:
            raise InputError(f"R has shape {R.shape}, expected {T.shape}")
        return cls(R, float(np.linalg.norm(T @ R - R @ T, 2)))


def sarason_defect(R, M, tol=1e-8, zero_tol=ZERO_TOL):
    """Inertia of ``I - R R^*`` in the orthonormal basis.

    Raises
    ------
    NotInCommutant
        ``||TR - RT||`` exceeds ``tol``.
    """
    if not isinstance(R, CommutantCandidate):
        R = CommutantCandidate.build(R, M)
    if R.commutation_residual > tol:
        raise NotInCommutant(
            f"commutation residual {R.commutation_residual:.3g} exceeds {tol:.3g}")
    return inertia(np.eye(M.n) - R.R @ R.R.conj().T, zero_tol)


def toeplitz_lower(coeffs, N):
    """Lower triangular Toeplitz ``N x N`` matrix of a Taylor series."""
    c = np.zeros(N, dtype=complex)
    coeffs = np.asarray(coeffs, dtype=complex)[:N]
    c[: len(coeffs)] = coeffs
    idx = np.subtract.outer(np.arange(N), np.arange(N))
    out = np.where(idx >= 0, c[np.clip(idx, 0, N - 1)], 0.0)
    return out


@dataclass(frozen=True)
class GeneralForm:
    """Result of :func:`gram_form_general`.

    ``inertia`` is the form ``G - R G R^*`` at truncation ``N``;
    ``inertia_refined`` the same at ``2N``. ``defect_inertia`` is the
    inertia of ``I - R R^*`` in the norm of ``H(C)``; it is only computed
    when ``D`` is well conditioned (``sup |C| < 1``), otherwise ``None``.
    ``G_spectrum`` lists the eigenvalues of the inclusion Gram operator,
    ``commutation_residual`` is ``||RS - SR||`` for the truncated shift.
    """

    inertia: Inertia
    inertia_refined: Inertia
    defect_inertia: Union[Inertia, None]
    G_spectrum: np.ndarray
    commutation_residual: float
    N: int


def _r_matrix(R, N):
    if isinstance(R, BlaschkeProduct):
        R = R.to_rational()
    if isinstance(R, RationalFunction):
        return toeplitz_lower(R.taylor(N), N)
    if callable(R):
        return np.asarray(R(N), dtype=complex)
    R = np.asarray(R, dtype=complex)
    if np.ndim(R) == 0:
        return R * np.eye(N)
    raise InputError("R must be a rational function, a scalar or a callable N -> matrix")


def _general_at(C, R, N, tol):
    TC = toeplitz_lower(C.taylor(N), N)
    D = hermitian(np.eye(N) - TC @ TC.conj().T)
    Rm = _r_matrix(R, N)
    if Rm.shape != (N, N):
        raise InputError(f"R(N) has shape {Rm.shape}, expected {(N, N)}")
    S = np.eye(N, k=-1)
    resid = float(np.linalg.norm(Rm @ S - S @ Rm, 2))
    # h = D g ranges over the truncated H(C); ||h||^2_{H^2} = g* D^2 g and
    # the adjoint of R on H(C) acts as R^H on coefficients
    DR = D @ Rm
    form = D @ D - DR @ DR.conj().T
    defect = None
    if np.linalg.cond(D) < 1e8:
        X = Rm.conj().T @ D
        defect = inertia(D - X.conj().T @ np.linalg.solve(D, X), tol)
    return inertia(form, tol), defect, np.linalg.eigvalsh(D), resid


def gram_form_general(C, R, N=256, tol=ZERO_TOL, commute_tol=1e-8):
    """Inertia of ``G - R G R^*`` for a Schur-class (possibly non-inner) ``C``.

    ``G`` is the Gram operator of the contractive inclusion ``H(C) -> H^2``.
    Functions are represented as ``h = D g`` with ``D = I - T_C T_C^*`` on
    the first ``N`` Taylor coefficients (``T_C`` lower triangular Toeplitz),
    in which ``H(C)`` inner products read ``<D g, g'>``.

    Parameters
    ----------
    C : RationalFunction or BlaschkeProduct
        Must pass :func:`schur_class_check`.
    R : RationalFunction, scalar or callable
        A rational ``f`` stands for ``R = f(T)``; a callable maps ``N`` to the
        ``N x N`` coefficient matrix of ``R``.

    Raises
    ------
    NotInCommutant
        ``R`` does not commute with the truncated shift.
    TruncationUnstable
        The negative count differs between ``N`` and ``2N``.
    """
    if isinstance(C, BlaschkeProduct):
        C = C.to_rational()
    elif not isinstance(C, RationalFunction):
        C = RationalFunction.constant(C)
    chk = schur_class_check(C)
    if not chk.is_schur0:
        raise InputError(f"C is not in the Schur class (sup {chk.sup_estimate:.6g})")
    i1, d1, spec, resid = _general_at(C, R, N, tol)
    if resid > commute_tol:
        raise NotInCommutant(f"commutation residual {resid:.3g} exceeds {commute_tol:.3g}")
    i2, _, _, _ = _general_at(C, R, 2 * N, tol)
    if i1.n_neg != i2.n_neg:
        raise TruncationUnstable(
            f"negative count {i1.n_neg} at N={N} but {i2.n_neg} at N={2 * N}",
            counts={N: i1.n_neg, 2 * N: i2.n_neg})
    return GeneralForm(i1, i2, d1, spec, resid, N)
