"""Boundary machinery on the real line.

Functions on a finite union of intervals ``Delta`` are represented piecewise
polynomially: every interval is cut into equal panels and on panel ``i``
(midpoint ``m_i``, half width ``h_i``) a function is a polynomial in the local
variable ``tau = (x - m_i) / h_i`` stored by ascending power coefficients.

The finite Hilbert transform

    (H_Delta phi)(x) = PV (1/pi) int_Delta phi(t) / (t - x) dt

of such functions is evaluated in closed form. On one panel

    PV int tau^k / (tau - xi) dtau = xi^k ln|(1 - xi) / (1 + xi)| + Q_k(xi),

with ``Q_k`` the quotient polynomial of ``tau^k - xi^k`` by ``tau - xi``
integrated over ``[-1, 1]``. Products such as ``f0 * phi`` are re-interpolated
per panel (Chebyshev points, degree ``IntervalSet.degree``).
"""
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np
from numpy.polynomial import polynomial as _poly

from .errors import (AssemblyMismatch, EvaluationTooCloseToLine, InputError,
                     NodeCoincidence, TruncationUnstable)
from .forms import Inertia, hermitian, inertia, ZERO_TOL

__all__ = [
    "IntervalSet", "PanelFunction", "Hat", "hat_basis", "finite_hilbert",
    "hilbert_inner", "hilbert_matrix", "hilbert_graded", "LineForm",
    "loewner_form", "loewner_real_form", "dual_loewner_form",
    "cauchy_transform", "HalfplaneForm", "boundary_form_halfplane",
    "halfplane_coefficients", "parseval_defect", "convolution_residual",
    "DualCheck", "dual_construction",
]

DEFAULT_PANELS = 64
DEFAULT_DEGREE = 8
_FAR_GAUSS = 12
_EVAL_GAUSS = 24
_SERIES_GAUSS = 32


def _gauss(n):
    return np.polynomial.legendre.leggauss(n)


class IntervalSet:
    """Finite union of disjoint bounded closed intervals cut into panels.

    Parameters
    ----------
    intervals : sequence of (float, float)
    panels : int
        Panels per interval.
    degree : int
        Polynomial degree per panel (also the base Gauss order).
    """

    def __init__(self, intervals, panels=DEFAULT_PANELS, degree=DEFAULT_DEGREE):
        iv = sorted((float(a), float(b)) for a, b in intervals)
        if not iv:
            raise InputError("at least one interval is required")
        for (a, b) in iv:
            if not b > a:
                raise InputError(f"interval ({a}, {b}) has no positive length")
        for (a0, b0), (a1, b1) in zip(iv, iv[1:]):
            if a1 <= b0:
                raise InputError("intervals must be disjoint")
        if panels < 1 or degree < 1:
            raise InputError("panels and degree must be positive")
        self.intervals = tuple(iv)
        self.panels = int(panels)
        self.degree = int(degree)
        a, b, interval_of = [], [], []
        for k, (lo, hi) in enumerate(iv):
            edges = np.linspace(lo, hi, self.panels + 1)
            a.extend(edges[:-1])
            b.extend(edges[1:])
            interval_of.extend([k] * self.panels)
        self.a = np.array(a)
        self.b = np.array(b)
        self.m = 0.5 * (self.a + self.b)
        self.h = 0.5 * (self.b - self.a)
        self.interval_of = np.array(interval_of)
        # node table: panel i has left node L[i] and right node R[i]
        nodes, left, right = [], [], []
        for k, (lo, hi) in enumerate(iv):
            base = len(nodes)
            nodes.extend(np.linspace(lo, hi, self.panels + 1))
            left.extend(base + np.arange(self.panels))
            right.extend(base + 1 + np.arange(self.panels))
        self.nodes = np.array(nodes)
        self.left = np.array(left)
        self.right = np.array(right)

    @property
    def n_panels(self):
        return len(self.a)

    @property
    def key(self):
        return (self.intervals, self.panels, self.degree)

    @property
    def diameter(self):
        return self.intervals[-1][1] - self.intervals[0][0]

    def refined(self):
        """Same intervals with twice as many panels."""
        return IntervalSet(self.intervals, 2 * self.panels, self.degree)

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=bool)
        for lo, hi in self.intervals:
            out |= (x >= lo) & (x <= hi)
        return out

    def locate(self, x):
        """Panel index of each point (``-1`` outside ``Delta``)."""
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.b, x, side="left")
        idx = np.clip(idx, 0, self.n_panels - 1)
        inside = (x >= self.a[idx]) & (x <= self.b[idx])
        return np.where(inside, idx, -1)

    def quadrature(self, n=None):
        """Composite Gauss rule: points, weights and panel index, flattened."""
        n = self.degree if n is None else n
        t, w = _gauss(n)
        x = self.m[:, None] + self.h[:, None] * t[None, :]
        ww = self.h[:, None] * w[None, :]
        pid = np.repeat(np.arange(self.n_panels), n)
        return x.ravel(), ww.ravel(), pid

    def __repr__(self):
        return (f"IntervalSet({list(self.intervals)}, panels={self.panels}, "
                f"degree={self.degree})")


class PanelFunction:
    """Piecewise polynomial on an :class:`IntervalSet`, zero off ``Delta``.

    ``coeffs[i, k]`` multiplies ``tau^k`` on panel ``i``.
    """

    def __init__(self, iset, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (iset.n_panels, iset.degree + 1):
            raise InputError(f"coefficients of shape {coeffs.shape} do not fit {iset}")
        self.iset = iset
        self.coeffs = coeffs

    @classmethod
    def from_callable(cls, iset, fn):
        """Interpolate ``fn`` at Chebyshev-Lobatto points of every panel."""
        if isinstance(fn, PanelFunction):
            if fn.iset.key == iset.key:
                return fn
            fn = fn.__call__
        _check_knots(iset, fn)
        d = iset.degree
        tau = np.cos(np.pi * np.arange(d + 1) / d)[::-1]
        x = iset.m[:, None] + iset.h[:, None] * tau[None, :]
        vals = np.asarray(_sample(fn, x.ravel()), dtype=complex).reshape(x.shape)
        V = np.vander(tau, d + 1, increasing=True)
        coeffs = np.linalg.solve(V, vals.T).T
        return cls(iset, coeffs)

    @classmethod
    def constant(cls, iset, c=1.0):
        coeffs = np.zeros((iset.n_panels, iset.degree + 1), dtype=complex)
        coeffs[:, 0] = c
        return cls(iset, coeffs)

    @property
    def is_real(self):
        return bool(np.all(np.abs(self.coeffs.imag) <= 1e-14 * max(1.0, np.abs(self.coeffs).max())))

    def local(self, i, tau):
        return _poly.polyval(tau, self.coeffs[i])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        pid = self.iset.locate(x.ravel())
        out = np.zeros(pid.shape, dtype=complex)
        ok = pid >= 0
        if ok.any():
            p = pid[ok]
            tau = (x.ravel()[ok] - self.iset.m[p]) / self.iset.h[p]
            C = self.coeffs[p]
            acc = np.zeros(len(p), dtype=complex)
            for k in range(C.shape[1] - 1, -1, -1):
                acc = acc * tau + C[:, k]
            out[ok] = acc
        return out.reshape(x.shape)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        pid = self.iset.locate(x)
        p = np.where(pid >= 0, pid, 0)
        tau = (x - self.iset.m[p]) / self.iset.h[p]
        dc = self.coeffs[:, 1:] * np.arange(1, self.coeffs.shape[1])[None, :]
        acc = np.zeros(x.shape, dtype=complex)
        for k in range(dc.shape[1] - 1, -1, -1):
            acc = acc * tau + dc[p, k]
        return np.where(pid >= 0, acc / self.iset.h[p], 0.0)

    def end_values(self):
        """Values at the left and right end of every panel."""
        left = _poly.polyval(-1.0, self.coeffs.T)
        right = _poly.polyval(1.0, self.coeffs.T)
        return left, right

    def inner(self, other):
        """``<self, other> = int self * conj(other)`` exactly."""
        return np.vdot(other.flat, _mass(self.iset) @ self.flat)

    @property
    def flat(self):
        return self.coeffs.ravel()

    def norm(self):
        return float(np.sqrt(abs(self.inner(self))))


def _sample(fn, x):
    vals = fn(x)
    vals = np.asarray(vals, dtype=complex)
    if vals.shape != x.shape:
        vals = np.broadcast_to(vals, x.shape)
    return vals


def _check_knots(iset, fn):
    knots = getattr(fn, "knots", None)
    if knots is None:
        return
    ok = np.min(np.abs(np.asarray(knots)[:, None] - iset.nodes[None, :]), axis=1)
    if np.any(ok > 1e-12 * max(1.0, iset.diameter)):
        raise InputError("basis kinks must lie on panel nodes; choose panels as "
                         "a multiple of the hat count plus one")


@dataclass(frozen=True)
class Hat:
    """Piecewise linear hat with peak 1 at ``center``, support ``[left, right]``."""

    left: float
    center: float
    right: float

    @property
    def knots(self):
        return (self.left, self.center, self.right)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        up = (x - self.left) / (self.center - self.left)
        down = (self.right - x) / (self.right - self.center)
        return np.clip(np.minimum(up, down), 0.0, None)


def hat_basis(iset, n=7):
    """``n`` interior hats per interval on an equispaced coarse grid.

    The hats vanish at the interval ends, so they are bounded and continuous
    on the line; panels per interval should be a multiple of ``n + 1``.
    """
    out = []
    for lo, hi in iset.intervals:
        g = np.linspace(lo, hi, n + 2)
        out.extend(Hat(g[k - 1], g[k], g[k + 1]) for k in range(1, n + 1))
    return out


# ---------------------------------------------------------------------------
# log moments  int_{-1}^{1} eta^m ln|eta - eta0| d eta

@lru_cache(maxsize=None)
def _log_moments_at_one(mmax):
    """Exact ``int_{-1}^1 eta^m ln|eta - 1|`` for ``m = 0..mmax``.

    With ``y = 1 - eta`` the integral is ``int_0^2 (1 - y)^m ln y dy``, a
    rational combination ``A ln 2 + B`` evaluated in exact arithmetic.
    """
    out = np.empty(mmax + 1)
    ln2 = np.log(2.0)
    for m in range(mmax + 1):
        A = Fraction(0)
        B = Fraction(0)
        for k in range(m + 1):
            c = Fraction(comb(m, k) * (-1) ** k * 2 ** (k + 1))
            A += c / (k + 1)
            B -= c / (k + 1) ** 2
        out[m] = float(A) * ln2 + float(B)
    return out


def _log_moments(eta0, mmax):
    """``int_{-1}^1 eta^m ln|eta - eta0| d eta`` for real ``|eta0| >= 1``."""
    e = float(eta0)
    if abs(abs(e) - 1.0) <= 1e-13:
        base = _log_moments_at_one(mmax)
        if e > 0:
            return base.copy()
        return base * (-1.0) ** np.arange(mmax + 1)
    if abs(e) < 1.0:
        raise InputError("log singularity inside the integration panel")
    m = np.arange(mmax + 1)
    if abs(e) >= 2.0:
        t, w = _gauss(_EVAL_GAUSS)
        return (w[None, :] * t[None, :] ** m[:, None] * np.log(np.abs(t - e))[None, :]).sum(1)
    # graded composite rule toward the nearest end; every piece sits at
    # least one half length away from the singularity
    s = np.sign(e)
    delta = abs(e) - 1.0
    d = [2.0]
    while d[-1] > delta:
        d.append(d[-1] / 2.0)
    d.append(0.0)
    t, w = _gauss(16)
    total = np.zeros(mmax + 1)
    for d0, d1 in zip(d[:-1], d[1:]):
        lo, hi = s - s * d0, s - s * d1
        lo, hi = min(lo, hi), max(lo, hi)
        x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t
        ww = 0.5 * (hi - lo) * w
        total += (ww[None, :] * x[None, :] ** m[:, None] * np.log(np.abs(x - e))[None, :]).sum(1)
    return total


def _mu(n):
    """``int_{-1}^1 tau^k`` for ``k = 0..n-1``."""
    k = np.arange(n)
    return np.where(k % 2 == 0, 2.0 / (k + 1), 0.0)


def _q_coeffs(d):
    """``Q[k]`` = ascending coefficients (in ``xi``) of ``int (tau^k - xi^k)/(tau - xi)``."""
    mu = _mu(d + 1)
    Q = np.zeros((d + 1, d + 1))
    for k in range(1, d + 1):
        for m in range(k):
            Q[k, k - 1 - m] += mu[m]
    return Q


@lru_cache(maxsize=None)
def _mass_cached(key):
    intervals, panels, degree = key
    iset = IntervalSet(intervals, panels, degree)
    d = degree
    mu = _mu(2 * d + 1)
    blk = mu[np.add.outer(np.arange(d + 1), np.arange(d + 1))]
    from scipy.sparse import block_diag
    return block_diag([h * blk for h in iset.h], format="csr")


def _mass(iset):
    return _mass_cached(iset.key)


# ---------------------------------------------------------------------------
# Hilbert operator in panel coefficients

def _pair_near(iset, i, j):
    gap = max(iset.a[i] - iset.b[j], iset.a[j] - iset.b[i], 0.0)
    return gap < max(iset.h[i], iset.h[j]) * (1.0 - 1e-12) or gap == 0.0


def _near_block(iset, i, j, Q):
    """Exact ``(d+1) x (d+1)`` block ``W[i, k; j, l]``."""
    d = iset.degree
    alpha = iset.h[j] / iset.h[i]
    beta = (iset.m[j] - iset.m[i]) / iset.h[i]
    # powers of xi = alpha eta + beta as polynomials in eta
    xi_pow = [np.array([1.0])]
    for _ in range(d):
        xi_pow.append(_poly.polymul(xi_pow[-1], [beta, alpha]))
    eta_b = (iset.b[i] - iset.m[j]) / iset.h[j]
    eta_a = (iset.a[i] - iset.m[j]) / iset.h[j]
    lam = _log_moments(eta_b, 2 * d) - _log_moments(eta_a, 2 * d)
    t, w = _gauss(d + 2)
    xi_t = alpha * t + beta
    blk = np.empty((d + 1, d + 1))
    for k in range(d + 1):
        qk = _poly.polyval(xi_t, Q[k]) if k else np.zeros_like(t)
        pk = xi_pow[k]
        for l in range(d + 1):
            logpart = np.dot(pk, lam[l: l + len(pk)])
            polypart = np.dot(w, t ** l * qk)
            blk[k, l] = logpart + polypart
    return blk * iset.h[j] / np.pi


@lru_cache(maxsize=8)
def _hilbert_matrix_cached(key):
    intervals, panels, degree = key
    iset = IntervalSet(intervals, panels, degree)
    P, d = iset.n_panels, iset.degree
    t, w = _gauss(_FAR_GAUSS)
    x = iset.m[:, None] + iset.h[:, None] * t[None, :]            # (P, n)
    ww = iset.h[:, None] * w[None, :]
    V = t[:, None] ** np.arange(d + 1)[None, :]                   # (n, d+1)
    diff = x[:, :, None, None] - x[None, None, :, :]              # t - x
    near = np.zeros((P, P), dtype=bool)
    for i in range(P):
        for j in range(P):
            near[i, j] = _pair_near(iset, i, j)
    with np.errstate(divide="ignore"):
        K = 1.0 / diff
    K[near[:, None, :, None] & np.ones(K.shape, dtype=bool)] = 0.0
    K *= ww[:, :, None, None] * ww[None, None, :, :] / np.pi
    W = np.tensordot(np.tensordot(K, V, axes=([1], [0])), V, axes=([2], [0]))
    W = W.transpose(0, 2, 1, 3)
    Q = _q_coeffs(d)
    for i, j in zip(*np.nonzero(near)):
        W[i, :, j, :] = _near_block(iset, i, j, Q)
    W = W.reshape(P * (d + 1), P * (d + 1))
    W.setflags(write=False)
    return W


def hilbert_matrix(iset):
    """Real matrix ``W`` with ``<H_Delta F, G> = G.flat^H W^T F.flat``.

    Row index ``(i, k)`` belongs to the transformed function, column
    ``(j, l)`` to the test function: ``W[(i,k),(j,l)] = (1/pi) int_j eta^l
    PV int_i tau^k / (t - x) dt dx``.
    """
    return _hilbert_matrix_cached(iset.key)


def hilbert_inner(F, G):
    """``<H_Delta F, G>_{L^2(Delta)}`` for panel functions on the same set."""
    W = hilbert_matrix(F.iset)
    return complex(F.flat @ W @ np.conj(G.flat))


def finite_hilbert(F, x):
    """``(H_Delta F)(x)`` in closed form.

    Raises a :class:`NodeCoincidence` warning (and shifts ``x`` by ``1e-12``)
    when ``x`` hits a node at which ``F`` jumps.
    """
    iset = F.iset
    x = np.array(np.atleast_1d(x), dtype=float)
    shape = x.shape
    x = x.ravel()
    scale = max(1.0, float(np.max(np.abs(F.coeffs)))) if F.coeffs.size else 1.0
    # jumps at nodes (interval ends count as jumps to zero)
    left_vals, right_vals = F.end_values()
    jump = np.zeros(len(iset.nodes), dtype=complex)
    np.add.at(jump, iset.right, right_vals)
    np.add.at(jump, iset.left, -left_vals)
    bad_nodes = np.abs(jump) > 1e-12 * scale
    hit = np.abs(x[:, None] - iset.nodes[None, :]) <= 1e-15 * max(1.0, iset.diameter)
    clash = np.any(hit & bad_nodes[None, :], axis=1)
    if clash.any():
        warnings.warn("evaluation point on a discontinuity node; shifted by 1e-12",
                      NodeCoincidence, stacklevel=2)
        x = x + np.where(clash, 1e-12, 0.0)
    d = iset.degree
    Q = _q_coeffs(d)
    xi = (x[:, None] - iset.m[None, :]) / iset.h[None, :]        # (X, P)
    near = np.abs(xi) < 2.0
    out = np.zeros(len(x), dtype=complex)
    # far panels: plain Gauss
    t, w = _gauss(_EVAL_GAUSS)
    vals = _poly.polyval(t, F.coeffs.T)                           # (P, n)
    far_w = (vals * w[None, :])                                   # h cancels
    with np.errstate(divide="ignore", invalid="ignore"):
        far = far_w[None, :, :] / (t[None, None, :] - xi[:, :, None])
    far_sum = np.where(near, 0.0, far.sum(-1))
    out += far_sum.sum(1)
    # near panels: closed form with log terms grouped per node
    Pxi = np.zeros_like(xi, dtype=complex)
    Qxi = np.zeros_like(xi, dtype=complex)
    for k in range(d, -1, -1):
        Pxi = Pxi * xi + F.coeffs[None, :, k]
    qpoly = F.coeffs @ Q                                          # (P, d+1) in xi
    for k in range(d, -1, -1):
        Qxi = Qxi * xi + qpoly[None, :, k]
    Pxi = np.where(near, Pxi, 0.0)
    out += np.where(near, Qxi, 0.0).sum(1)
    coef = np.zeros((len(x), len(iset.nodes)), dtype=complex)
    rows = np.arange(len(x))[:, None]
    np.add.at(coef, (np.broadcast_to(rows, xi.shape), np.broadcast_to(iset.right, xi.shape)), Pxi)
    np.add.at(coef, (np.broadcast_to(rows, xi.shape), np.broadcast_to(iset.left, xi.shape)), -Pxi)
    dist = np.abs(iset.nodes[None, :] - x[:, None])
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(dist > 0, coef * np.log(np.where(dist > 0, dist, 1.0)), 0.0)
    out += logs.sum(1)
    return (out / np.pi).reshape(shape)


def _graded_rule(lo, hi, levels=34, n=16):
    """Composite Gauss rule on ``[lo, hi]`` graded geometrically toward both ends."""
    t, w = _gauss(n)
    L = hi - lo
    # breakpoints at distances L/2 * 2^-k from each end
    d = 0.5 * L * 0.5 ** np.arange(levels)
    edges = np.unique(np.concatenate([[lo, hi], lo + d, hi - d]))
    a, b = edges[:-1], edges[1:]
    x = 0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * t[None, :]
    ww = 0.5 * (b - a)[:, None] * w[None, :]
    return x.ravel(), ww.ravel()


def hilbert_graded(g, iset, x, knots=()):
    """``PV (1/pi) int_Delta g(t) / (t - x) dt`` for piecewise smooth ``g``.

    ``g`` must be vectorized and smooth between the given ``knots`` (the
    interval ends are always included); mild singularities at knots are
    absorbed by geometric grading. The principal value is taken by
    subtracting ``g(x)`` on the interval containing ``x``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    knots = np.asarray(sorted(knots), dtype=float)
    pts, wts = [], []
    for lo, hi in iset.intervals:
        kn = knots[(knots > lo) & (knots < hi)]
        edges = np.concatenate([[lo], kn, [hi]])
        for a, b in zip(edges[:-1], edges[1:]):
            t, w = _graded_rule(a, b)
            pts.append(t)
            wts.append(w)
    t = np.concatenate(pts)
    w = np.concatenate(wts)
    gt = np.asarray(g(t), dtype=complex)
    gx = np.asarray(g(x), dtype=complex)
    out = np.empty(len(x), dtype=complex)
    for n, xv in enumerate(x):
        k = 0
        for lo, hi in iset.intervals:
            inside = (t >= lo) & (t <= hi)
            if lo < xv < hi:
                k += np.sum(w[inside] * (gt[inside] - gx[n]) / (t[inside] - xv))
                k += gx[n] * np.log((hi - xv) / (xv - lo))
            else:
                k += np.sum(w[inside] * gt[inside] / (t[inside] - xv))
        out[n] = k
    return out / np.pi


def convolution_residual(phi, psi, x, knots=()):
    """Pointwise ``H[phi H psi + (H phi) psi] - (H phi)(H psi) + phi psi``.

    ``phi`` and ``psi`` are panel functions whose kinks lie in ``knots``; the
    outer transform is taken by :func:`hilbert_graded`.
    """
    iset = phi.iset
    g = lambda t: phi(t) * finite_hilbert(psi, t) + finite_hilbert(phi, t) * psi(t)
    lhs = hilbert_graded(g, iset, x, knots=knots)
    rhs = finite_hilbert(phi, x) * finite_hilbert(psi, x) - phi(x) * psi(x)
    return np.abs(lhs - rhs)


# ---------------------------------------------------------------------------
# forms

@dataclass(frozen=True)
class LineForm:
    """Hermitian form on a finite basis, with its inertia at ``iset`` and at
    the panel-doubled set."""

    matrix: np.ndarray
    inertia: Inertia
    inertia_refined: Inertia
    matrix_refined: np.ndarray
    iset: IntervalSet


def _basis_functions(iset, basis):
    if basis is None:
        basis = hat_basis(iset)
    elif isinstance(basis, (int, np.integer)):
        basis = hat_basis(iset, int(basis))
    return list(basis)


def _checked(assemble, iset, basis, tol, check):
    basis = _basis_functions(iset, basis)
    M = assemble(iset, basis)
    i1 = inertia(M, tol)
    if not check:
        return LineForm(M, i1, i1, M, iset)
    fine = iset.refined()
    M2 = assemble(fine, basis)
    i2 = inertia(M2, tol)
    if i1.n_neg != i2.n_neg:
        raise TruncationUnstable(
            f"inertia {i1.as_tuple()} with {iset.panels} panels but "
            f"{i2.as_tuple()} with {fine.panels}",
            counts={iset.panels: i1.as_tuple(), fine.panels: i2.as_tuple()})
    return LineForm(M, i1, i2, M2, iset)


def _as_function(fn):
    if callable(fn):
        return fn
    c = complex(fn)
    return lambda x: np.full(np.shape(x), c)


def _loewner_matrix(f0, iset, basis):
    f0 = _as_function(f0)
    W = hilbert_matrix(iset)
    Mass = _mass(iset)
    Phi = np.array([PanelFunction.from_callable(iset, p).flat for p in basis])
    Fphi = np.array([PanelFunction.from_callable(iset, _product(f0, p)).flat for p in basis])
    A = Fphi @ W @ Phi.conj().T                      # <H f0 phi_p, phi_q>
    G = (Mass @ Fphi.T).T @ Phi.conj().T              # <f0 phi_p, phi_q>
    M = np.pi * (A + A.conj().T) - 1j * np.pi * (G - G.conj().T)
    return hermitian(M)


def _product(f, g):
    prod = lambda x: np.asarray(f(x), dtype=complex) * np.asarray(g(x), dtype=complex)
    if hasattr(g, "knots"):
        prod.knots = g.knots
    return prod


def loewner_form(f0, iset, basis=None, tol=ZERO_TOL, check=True):
    """Matrix ``L[p, q] = pi <(H - i)(f0 phi_p), phi_q> + pi <phi_p, (H - i)(f0 phi_q)>``.

    Parameters
    ----------
    f0 : callable
        Boundary data on ``Delta`` (complex allowed).
    basis : int or sequence of callables, optional
        Hat count per interval or explicit bounded functions; default 7 hats.
    check : bool
        Recompute with doubled panels and compare inertia.

    Raises
    ------
    TruncationUnstable
        The negative count changes under panel doubling.
    """
    return _checked(lambda s, b: _loewner_matrix(f0, s, b), iset, basis, tol, check)


def _real_loewner_matrix(f0, iset, basis):
    n = max(iset.degree, 8)
    x, w, pid = iset.quadrature(n)
    fv = np.asarray(f0(x), dtype=complex)
    if np.max(np.abs(fv.imag)) > 1e-12 * max(1.0, np.max(np.abs(fv))):
        raise InputError("loewner_real_form needs real boundary data")
    fv = fv.real
    # slope at coincident nodes from the panel interpolant of f0
    slope = PanelFunction.from_callable(iset, lambda t: np.real(f0(t))).derivative(x).real
    ds = x[:, None] - x[None, :]
    same = ds == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        K = (fv[:, None] - fv[None, :]) / np.where(same, 1.0, ds)
    K = np.where(same, slope[:, None] * np.ones_like(K), K)
    Phi = np.array([np.asarray(p(x), dtype=complex) for p in basis])
    M = (Phi * w[None, :]) @ K @ (Phi * w[None, :]).conj().T
    return hermitian(M)


def loewner_real_form(f0, iset, basis=None, tol=ZERO_TOL, check=True):
    """Divided-difference form ``int int (f0(s) - f0(t))/(s - t) phi_p(s) conj(phi_q(t))``.

    Tensor Gauss on panel pairs; on the diagonal the kernel takes the value
    ``f0'(s)``. ``f0`` must be real.
    """
    return _checked(lambda s, b: _real_loewner_matrix(f0, s, b), iset, basis, tol, check)


def _dual_matrix(g0, iset, basis):
    g0 = _as_function(g0)
    x, w, _ = iset.quadrature(2 * iset.degree)
    gv = np.asarray(g0(x), dtype=complex)
    if np.max(np.abs(gv.imag)) > 1e-12 * max(1.0, np.max(np.abs(gv))):
        raise InputError("dual_loewner_form needs real g0")
    gv = gv.real
    Phi = np.array([np.asarray(p(x), dtype=complex) for p in basis])
    HPhi = np.array([finite_hilbert(PanelFunction.from_callable(iset, p), x) for p in basis])
    wg = (w * gv)[None, :]
    M = np.pi * ((Phi * wg) @ Phi.conj().T - (HPhi * wg) @ HPhi.conj().T)
    return hermitian(M)


def dual_loewner_form(g0, iset, basis=None, tol=ZERO_TOL, check=True):
    """``L[p, q] = pi int [phi_p conj(phi_q) - (H phi_p) conj(H phi_q)] g0``."""
    return _checked(lambda s, b: _dual_matrix(g0, s, b), iset, basis, tol, check)


def cauchy_transform(g0, z, iset=None):
    """``k(z) = (1/pi) int_Delta g0(t) / (t - z) dt`` for ``Im z > 0``.

    ``g0`` is a :class:`PanelFunction` (or a callable together with
    ``iset``). Panels near ``z`` are integrated in closed form with the
    principal logarithm, the others by Gauss quadrature.

    Raises
    ------
    EvaluationTooCloseToLine
        ``Im z < 1e-9``.
    """
    if not isinstance(g0, PanelFunction):
        if iset is None:
            raise InputError("a callable g0 needs an IntervalSet")
        g0 = PanelFunction.from_callable(iset, _as_function(g0))
    iset = g0.iset
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    shape = z.shape
    z = z.ravel()
    if np.any(z.imag < 1e-9):
        raise EvaluationTooCloseToLine("cauchy_transform needs Im z >= 1e-9")
    d = iset.degree
    Q = _q_coeffs(d)
    xi = (z[:, None] - iset.m[None, :]) / iset.h[None, :]
    dist = np.abs(xi - np.clip(xi.real, -1.0, 1.0))
    near = dist < 1.0
    t, w = _gauss(_EVAL_GAUSS)
    vals = _poly.polyval(t, g0.coeffs.T)
    far = ((vals * w[None, :])[None, :, :] / (t[None, None, :] - xi[:, :, None])).sum(-1)
    Pxi = np.zeros_like(xi)
    Qxi = np.zeros_like(xi)
    qpoly = g0.coeffs @ Q
    for k in range(d, -1, -1):
        Pxi = Pxi * xi + g0.coeffs[None, :, k]
        Qxi = Qxi * xi + qpoly[None, :, k]
    closed = Pxi * (np.log(1.0 - xi) - np.log(-1.0 - xi)) + Qxi
    out = np.where(near, closed, far).sum(1) / np.pi
    return out.reshape(shape)


# ---------------------------------------------------------------------------
# half-plane boundary form

def _halfplane_basis(x, j):
    """``((x - i)/(x + i))^j / (x + i)`` for an array of ``j``."""
    r = (x - 1j) / (x + 1j)
    return r[None, :] ** np.asarray(j)[:, None] / (x + 1j)[None, :]


def halfplane_coefficients(fn, iset, J, n=_SERIES_GAUSS):
    """Coefficients ``<fn, e_j>`` for ``j = -J..J`` in the orthonormal basis
    ``e_j(t) = pi^{-1/2} ((t - i)/(t + i))^j / (t + i)`` of ``L^2(R)``."""
    x, w, _ = iset.quadrature(n)
    fv = np.asarray(fn(x), dtype=complex)
    j = np.arange(-J, J + 1)
    E = _halfplane_basis(x, j) / np.sqrt(np.pi)
    return (E.conj() * (fv * w)[None, :]).sum(1)


def parseval_defect(fn, iset, J, n=_SERIES_GAUSS):
    """``||fn||^2 - sum_{|j| <= J} |<fn, e_j>|^2`` on ``Delta``."""
    x, w, _ = iset.quadrature(n)
    norm2 = float(np.sum(w * np.abs(np.asarray(fn(x))) ** 2))
    c = halfplane_coefficients(fn, iset, J, n)
    return norm2 - float(np.sum(np.abs(c) ** 2))


@dataclass(frozen=True)
class HalfplaneForm:
    """Boundary form assembled by the projection route (``matrix``) and the
    coefficient series (``series_matrix``); ``discrepancy`` is their max
    entrywise difference and ``tail`` an estimate of the series remainder."""

    matrix: np.ndarray
    series_matrix: np.ndarray
    discrepancy: float
    tail: float
    inertia: Inertia
    J: int


def _series_tail(norms):
    """Geometric extrapolation of a decaying sequence of coefficient norms."""
    last = np.asarray(norms[-8:], dtype=float)
    if last[-1] <= 0:
        return 0.0
    ratios = last[1:] / np.where(last[:-1] > 0, last[:-1], np.inf)
    r = float(np.clip(np.max(ratios), 0.0, 0.999))
    return float(last[-1] * r / (1.0 - r))


def boundary_form_halfplane(b, c, iset, basis=None, J=256, tol=1e-6,
                            zero_tol=ZERO_TOL, n=_SERIES_GAUSS):
    """Half-plane boundary form ``L(phi_p, phi_q)`` for data ``(b, c)``.

    Route (b): ``pi <Q_-(c phi_p), c phi_q> - pi <Q_-(b phi_p), b phi_q>``
    with ``Q_- = (I + iH)/2``, exact on panel functions. Route (a): the series
    ``sum_{j<=J} d_j(c phi_p) conj(d_j(c phi_q)) - (b ...)`` with
    ``d_j(x) = int ((t - i)/(t + i))^j x(t) / (t + i) dt``.

    Raises
    ------
    AssemblyMismatch
        The routes differ entrywise by more than ``tol``.
    """
    b = _as_function(b)
    c = _as_function(c)
    basis = _basis_functions(iset, basis)
    W = hilbert_matrix(iset)
    Mass = _mass(iset)

    def proj(fn):
        X = np.array([PanelFunction.from_callable(iset, _product(fn, p)).flat for p in basis])
        G = (Mass @ X.T).T @ X.conj().T
        A = X @ W @ X.conj().T
        return 0.5 * np.pi * (G + 1j * A)

    Mproj = hermitian(proj(c) - proj(b))

    x, w, _ = iset.quadrature(n)
    j = np.arange(J + 1)
    E = _halfplane_basis(x, j) * w[None, :]
    Phi = np.array([np.asarray(p(x), dtype=complex) for p in basis])
    Dc = (Phi * np.asarray(c(x))[None, :]) @ E.T          # (n_basis, J+1)
    Db = (Phi * np.asarray(b(x))[None, :]) @ E.T
    Mser = hermitian(Dc @ Dc.conj().T - Db @ Db.conj().T)
    norms = np.sum(np.abs(Dc) ** 2 + np.abs(Db) ** 2, axis=0)
    tail = _series_tail(norms)
    disc = float(np.max(np.abs(Mproj - Mser)))
    if disc > tol:
        raise AssemblyMismatch(f"series and projection routes differ by {disc:.3g}", disc)
    return HalfplaneForm(Mproj, Mser, disc, tail, inertia(Mproj, zero_tol), J)


# ---------------------------------------------------------------------------
# dual construction

@dataclass(frozen=True)
class DualCheck:
    """Boundary behaviour of ``h_eps(x) = k(x + i eps) + f0(x)``.

    ``defects[e]`` is the grid RMS of ``Im h_eps - g0``; ``real_defects``
    the grid RMS of ``Re h_eps``; ``min_imag`` the smallest ``Im k`` seen.
    """

    eps: tuple
    defects: tuple
    real_defects: tuple
    monotone: bool
    min_imag: float


def dual_construction(g0, iset, x=None, eps=(1e-2, 1e-3, 1e-4)):
    """Check that ``k + f0`` with ``f0 = -H_Delta g0`` approaches ``i g0``.

    ``k`` is the Cauchy transform of ``g0``; ``x`` defaults to the panel
    midpoints.
    """
    G = g0 if isinstance(g0, PanelFunction) else PanelFunction.from_callable(iset, _as_function(g0))
    x = G.iset.m if x is None else np.asarray(x, dtype=float)
    f0 = -finite_hilbert(G, x).real
    gx = G(x).real
    defects, rdef, mins = [], [], []
    for e in eps:
        k = cauchy_transform(G, x + 1j * e)
        h = k + f0
        defects.append(float(np.sqrt(np.mean((h.imag - gx) ** 2))))
        rdef.append(float(np.sqrt(np.mean(h.real ** 2))))
        mins.append(float(np.min(k.imag)))
    mono = all(b < a for a, b in zip(defects, defects[1:]))
    return DualCheck(tuple(eps), tuple(defects), tuple(rdef), mono, min(mins))
