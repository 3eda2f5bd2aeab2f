"""Hermitian forms of interior interpolation data and their inertia.

Forms are returned as plain Hermitian ``numpy`` arrays (symmetrized on
construction). The Nudel'man form uses the bilinear pairing
``(x, x') = sum_i x_i x'_i`` on ``C^n``; with that pairing the matrix ``M``
of the form satisfies the Stein equation ``M = A M A^* + c c^* - b b^*``.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import (DuplicatePoints, InputError, NonConvergence,
                     PointOnBoundary, PoleHit, SamplePole,
                     SpectralRadiusTooLarge, TruncationInsufficient)
from .rational import BlaschkeProduct, RationalFunction

__all__ = [
    "Inertia", "NudelmanData", "ToeplitzDefect", "hermitian", "inertia",
    "pick_matrix", "kernel_matrix_schur", "kernel_matrix_nevanlinna",
    "cf_matrices", "solve_stein", "nudelman_form", "is_admissible",
    "verify_pair", "ZERO_TOL",
]

#: default relative eigenvalue zero tolerance
ZERO_TOL = 1e-9
_RHO_MARGIN = 1e-9


def hermitian(H):
    """Return the Hermitian part ``(H + H^*) / 2`` as a complex array."""
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    if H.shape[0] != H.shape[1]:
        raise InputError(f"matrix must be square, got shape {H.shape}")
    return 0.5 * (H + H.conj().T)


@dataclass(frozen=True)
class Inertia:
    """Signature ``(n_neg, n_zero, n_pos)`` of a Hermitian matrix."""

    n_neg: int
    n_zero: int
    n_pos: int
    tol: float = ZERO_TOL
    eigenvalues: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def dim(self):
        return self.n_neg + self.n_zero + self.n_pos

    def as_tuple(self):
        return (self.n_neg, self.n_zero, self.n_pos)

    def __eq__(self, other):
        if isinstance(other, tuple):
            return self.as_tuple() == other
        if isinstance(other, Inertia):
            return self.as_tuple() == other.as_tuple()
        return NotImplemented

    def __hash__(self):
        return hash(self.as_tuple())


def inertia(H, tol=ZERO_TOL):
    """Count negative, zero and positive eigenvalues of a Hermitian matrix.

    An eigenvalue is zero when ``|lam| <= tol * max(1, ||H||_2)``.
    """
    H = hermitian(H)
    if H.size == 0:
        return Inertia(0, 0, 0, tol, np.zeros(0))
    lam = np.linalg.eigvalsh(H)
    thresh = tol * max(1.0, float(np.max(np.abs(lam))))
    n_neg = int(np.sum(lam < -thresh))
    n_pos = int(np.sum(lam > thresh))
    return Inertia(n_neg, len(lam) - n_neg - n_pos, n_pos, tol, lam)


def _distinct_points(z, name="points"):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.ndim != 1:
        raise InputError(f"{name} must be a 1-d sequence")
    d = np.abs(z[:, None] - z[None, :]) + np.eye(len(z))
    if len(z) > 1 and d.min() < 1e-12:
        raise DuplicatePoints(f"{name} are not distinct")
    return z


def pick_matrix(points, values):
    """Pick matrix ``[(1 - w_j conj(w_k)) / (1 - z_j conj(z_k))]``."""
    z = _distinct_points(points)
    w = np.atleast_1d(np.asarray(values, dtype=complex))
    if w.shape != z.shape:
        raise InputError("points and values differ in length")
    if np.any(np.abs(z) >= 1.0 - 1e-12):
        raise PointOnBoundary("interpolation points must lie inside the disk")
    P = (1.0 - np.outer(w, w.conj())) / (1.0 - np.outer(z, z.conj()))
    return hermitian(P)


def _sample_values(fn, z):
    if isinstance(fn, (RationalFunction, BlaschkeProduct)):
        poles = fn.poles()
        if len(poles) and np.min(np.abs(z[:, None] - poles[None, :])) < 1e-12:
            raise SamplePole("a sample point sits on a pole")
    try:
        with np.errstate(divide="raise", invalid="raise"):
            vals = np.asarray(fn(z), dtype=complex)
    except (ZeroDivisionError, FloatingPointError, PoleHit) as exc:
        raise SamplePole(f"function is singular at a sample point: {exc}") from exc
    if vals.shape != z.shape:
        vals = np.array([complex(fn(zi)) for zi in z])
    if not np.all(np.isfinite(vals)):
        raise SamplePole("function is singular at a sample point")
    return vals


def kernel_matrix_schur(S, samples):
    """Gram matrix of the Schur kernel ``(1 - S(z) conj S(w)) / (1 - z conj w)``."""
    z = _distinct_points(samples, "samples")
    return pick_matrix(z, _sample_values(S, z))


def kernel_matrix_nevanlinna(f, samples):
    """Gram matrix of ``(f(z) - conj f(w)) / (z - conj w)`` on C_+ samples."""
    z = _distinct_points(samples, "samples")
    if np.any(z.imag <= 0):
        raise InputError("Nevanlinna samples must lie in the upper half-plane")
    v = _sample_values(f, z)
    K = (v[:, None] - v.conj()[None, :]) / (z[:, None] - z.conj()[None, :])
    return hermitian(K)


@dataclass(frozen=True)
class ToeplitzDefect:
    """Upper triangular Toeplitz ``T`` of ``w_0..w_n`` and ``I - T^* T``."""

    T: np.ndarray
    defect: np.ndarray
    inertia: Inertia


def cf_matrices(w, tol=ZERO_TOL):
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    n = len(w)
    T = np.zeros((n, n), dtype=complex)
    for j in range(n):
        T[j, j:] = w[: n - j]
    D = hermitian(np.eye(n) - T.conj().T @ T)
    return ToeplitzDefect(T, D, inertia(D, tol))


@dataclass(frozen=True)
class NudelmanData:
    """Data ``(A, b, c)`` on ``V = C^n`` with the full coordinate dual."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=complex))
        b = np.atleast_1d(np.asarray(self.b, dtype=complex))
        c = np.atleast_1d(np.asarray(self.c, dtype=complex))
        n = A.shape[0]
        if A.shape != (n, n) or b.shape != (n,) or c.shape != (n,):
            raise InputError("A must be n x n and b, c of length n")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def spectral_radius(self):
        return float(np.max(np.abs(np.linalg.eigvals(self.A)))) if self.n else 0.0

    @classmethod
    def pick(cls, points, values):
        z = np.asarray(points, dtype=complex)
        return cls(np.diag(z), np.asarray(values, dtype=complex), np.ones(len(z)))

    @classmethod
    def cf(cls, w):
        w = np.asarray(w, dtype=complex)
        n = len(w)
        c = np.zeros(n, dtype=complex)
        c[0] = 1.0
        return cls(np.eye(n, k=-1), w, c)


def solve_stein(A, Q, tol=1e-12, method="auto", max_iter=64):
    """Solve ``M = A M A^* + Q`` for ``rho(A) < 1``.

    ``method='direct'`` solves the Kronecker system, ``'doubling'`` runs
    ``M <- M + A_k M A_k^*``, ``A_k <- A_k^2``; ``'auto'`` picks direct below
    dimension 64.
    """
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    Q = np.atleast_2d(np.asarray(Q, dtype=complex))
    n = A.shape[0]
    if method == "auto":
        method = "direct" if n < 64 else "doubling"
    if method == "direct":
        # column-major vec: vec(A M A^*) = (conj(A) kron A) vec(M)
        K = np.eye(n * n) - np.kron(A.conj(), A)
        M = np.linalg.solve(K, Q.reshape(-1, order="F")).reshape(n, n, order="F")
        return M
    if method != "doubling":
        raise InputError(f"unknown Stein method {method!r}")
    M = Q.copy()
    Ak = A.copy()
    qn = np.linalg.norm(Q)
    for _ in range(max_iter):
        step = Ak @ M @ Ak.conj().T
        M = M + step
        Ak = Ak @ Ak
        if np.linalg.norm(step) <= tol * (np.linalg.norm(M) + qn) and \
                np.linalg.norm(Ak) <= 1.0:
            break
    else:
        raise NonConvergence("doubling iteration did not converge")
    return M


def nudelman_form(data, tol=1e-9, method="auto"):
    """Matrix of the Hermitian form ``sum_j [(A^j c, x)(A^j c, y)^- - (A^j b, x)(A^j b, y)^-]``.

    Entry ``(p, q)`` is the coefficient of ``x_p conj(y_q)``.

    Raises
    ------
    SpectralRadiusTooLarge
        ``rho(A) >= 1 - 1e-9``; the defining series need not converge.
    NonConvergence
        The Stein residual exceeds ``tol * (||M|| + ||Q||)``.
    """
    if data.spectral_radius >= 1.0 - _RHO_MARGIN:
        raise SpectralRadiusTooLarge(
            f"spectral radius {data.spectral_radius:.6g} is not below 1")
    Q = np.outer(data.c, data.c.conj()) - np.outer(data.b, data.b.conj())
    M = solve_stein(data.A, Q, method=method)
    A = data.A
    resid = np.linalg.norm(M - A @ M @ A.conj().T - Q)
    if resid > tol * (np.linalg.norm(M) + np.linalg.norm(Q)):
        raise NonConvergence(f"Stein residual {resid:.3g} above tolerance")
    return hermitian(M)


def _krylov(A, v):
    n = A.shape[0]
    K = np.empty((n, n), dtype=complex)
    x = v.copy()
    for j in range(n):
        K[:, j] = x
        x = A @ x
    return K


def is_admissible(data, tol=1e-10):
    """Check condition (iii) for the full coordinate dual.

    Every functional annihilating ``c, Ac, A^2 c, ...`` must annihilate
    ``b, Ab, ...``; by Cayley-Hamilton powers up to ``n - 1`` suffice.
    """
    Kc = _krylov(data.A, data.c)
    Kb = _krylov(data.A, data.b)
    # functionals x with x^T Kc = 0  <=>  null space of Kc^T
    u, s, vh = np.linalg.svd(Kc.T)
    scale = max(1.0, s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol * scale))
    null = vh[rank:].conj().T
    if null.shape[1] == 0:
        return True
    return bool(np.linalg.norm(null.T @ Kb) <= tol * max(1.0, np.linalg.norm(Kb)))


def _taylor_of(g, order):
    if isinstance(g, BlaschkeProduct):
        return g.taylor(order)
    if isinstance(g, RationalFunction):
        return g.taylor(order)
    g = np.asarray(g, dtype=complex)
    out = np.zeros(order, dtype=complex)
    out[: min(order, len(g))] = g[:order]
    return out


def verify_pair(data, pair, J=None, tol=1e-8, J_max=8192):
    """Residual of ``f(A) c = B(A) b`` read as truncated power series.

    Returns ``||sum_{j<=J} f_j A^j c - B_j A^j b|| + tail`` where ``tail`` is a
    geometric bound on the discarded terms (Schur-class coefficients are
    bounded by one). ``J`` doubles from 64 until the tail is below ``tol``.

    Raises
    ------
    TruncationInsufficient
        The tail bound is still above ``tol`` at ``J_max``.
    """
    A, b, c = data.A, data.b, data.c
    rho = data.spectral_radius
    if rho >= 1.0:
        raise SpectralRadiusTooLarge("verification needs rho(A) < 1")
    J = 64 if J is None else int(J)
    while True:
        fj = _taylor_of(pair.f, J + 1)
        Bj = _taylor_of(pair.B, J + 1)
        acc = np.zeros(data.n, dtype=complex)
        xc, xb = c.copy(), b.copy()
        for j in range(J + 1):
            acc += fj[j] * xc - Bj[j] * xb
            xc = A @ xc
            xb = A @ xb
        # xc, xb now hold A^{J+1} c, A^{J+1} b; later terms shrink roughly
        # like q^j with q a norm-based growth estimate of A
        head = np.linalg.norm(xc) + np.linalg.norm(xb)
        q = np.linalg.norm(np.linalg.matrix_power(A, 8), 2) ** 0.125
        q = min(max(q, rho), 1.0 - 1e-12)
        tail = head / (1.0 - q) if head > 0 else 0.0
        if tail <= tol or J >= J_max:
            break
        J *= 2
    if tail > tol:
        raise TruncationInsufficient(f"tail bound {tail:.3g} exceeds {tol:.3g} at J={J}")
    return float(np.linalg.norm(acc) + tail)
