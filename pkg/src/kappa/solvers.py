"""Constructive solvers for interior interpolation problems.

Definite problems are solved with the Schur algorithm. For data whose
certificate has ``kappa > 0`` negative squares, the zeros of a Blaschke
product ``B`` of degree ``kappa`` are searched so that the modified data
``B * w`` become definite; the definite solver then supplies ``f``, and
``S = f / B`` interpolates the original data.
"""
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import pade
from scipy.optimize import minimize

from .errors import InputError, PoleNearDisk, RepeatedZeros, NotInCommutant
from .forms import (Inertia, NudelmanData, cf_matrices, inertia, pick_matrix,
                    verify_pair, ZERO_TOL)
from .model_space import CommutantCandidate, ModelSpace, phi_of_T
from .rational import (BlaschkeProduct, RationalFunction, SchurPair,
                       schur_class_check)

__all__ = [
    "SearchConfig", "SolveReport", "solve_np0", "solve_cf0",
    "solve_pick_kappa", "solve_cf_kappa", "solve_sarason",
    "SOLVED", "INFEASIBLE", "SEARCH_FAILED",
]

SOLVED = "Solved"
INFEASIBLE = "Infeasible"
SEARCH_FAILED = "SearchFailed"

_UNIMODULAR = 1e-10


@dataclass(frozen=True)
class SearchConfig:
    """Settings for the Blaschke-zero search.

    Attributes
    ----------
    multistart : int
        Number of starting points; the first is ``B = z^kappa``.
    max_iter : int
        Nelder-Mead iteration cap per start.
    seed : int
        Seed of the start generator.
    margin : float
        Zeros are kept in ``|a| <= 1 - margin``.
    tol : float
        Relative feasibility tolerance on the smallest eigenvalue.
    """

    multistart: int = 32
    max_iter: int = 1500
    seed: int = 0
    margin: float = 1e-3
    tol: float = ZERO_TOL


@dataclass
class SolveReport:
    """Outcome of a solve.

    ``kappa`` is the negative count of the certificate, ``pair`` the
    verified ``(f, B)`` when ``status == "Solved"``; ``attempts`` lists
    ``(degree, status, best objective)`` for every degree tried.
    """

    status: str
    kappa: int
    certificate: Inertia
    pair: Optional[SchurPair] = None
    residuals: dict = field(default_factory=dict)
    attempts: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def solved(self):
        return self.status == SOLVED

    @property
    def degree(self):
        return self.pair.B.degree if self.pair is not None else None


# ---------------------------------------------------------------------------
# definite problems

def _step(p, q, top, bottom):
    """Apply ``[[top[0], top[1]], [bottom[0], bottom[1]]]`` to ``(p, q)``."""
    P = np.polynomial.polynomial
    return (P.polyadd(P.polymul(top[0], p), P.polymul(top[1], q)),
            P.polyadd(P.polymul(bottom[0], p), P.polymul(bottom[1], q)))


def _schur_points(z, w):
    """Schur algorithm on point data; returns numerator and denominator.

    Each step ``f = (w1 + b1 f') / (1 + conj(w1) b1 f')`` with
    ``b1 = (z - z1) / (1 - conj(z1) z)`` is applied to ``f' = p'/q'`` as a
    2 x 2 polynomial matrix; no cancellation is attempted on the way.
    """
    stack = []
    z, w = np.asarray(z, dtype=complex), np.asarray(w, dtype=complex)
    p, q = np.zeros(1, dtype=complex), np.ones(1, dtype=complex)
    while len(z):
        z1, w1 = z[0], w[0]
        if abs(w1) >= 1.0 - _UNIMODULAR:
            # boundary value: the remaining parameter is a unimodular constant
            p = np.array([w1 / abs(w1)])
            break
        stack.append((z1, w1))
        rz, rw = z[1:], w[1:]
        b = (rz - z1) / (1.0 - np.conj(z1) * rz)
        z, w = rz, (rw - w1) / (1.0 - np.conj(w1) * rw) / b
    for z1, w1 in reversed(stack):
        num = np.array([-z1, 1.0])
        den = np.array([1.0, -np.conj(z1)])
        p, q = _step(p, q, (num, w1 * den), (np.conj(w1) * num, den))
    return p, q


def solve_np0(points, values, tol=ZERO_TOL):
    """Definite Nevanlinna-Pick problem by the Schur algorithm.

    Returns a report with ``B = 1`` and ``f`` rational of degree at most the
    number of nodes, or status ``Infeasible`` when the Pick matrix has an
    eigenvalue below ``-tol * max(1, ||P||)``.
    """
    z = np.atleast_1d(np.asarray(points, dtype=complex))
    w = np.atleast_1d(np.asarray(values, dtype=complex))
    P = pick_matrix(z, w)
    cert = inertia(P, tol)
    if cert.n_neg:
        return SolveReport(INFEASIBLE, cert.n_neg, cert)
    # feed nodes with the smallest values first; the recursion is better
    # conditioned when |w_1| is far from one
    order = np.argsort(np.abs(w), kind="stable")
    f = RationalFunction(*_schur_points(z[order], w[order]), reduce=False)
    B = BlaschkeProduct()
    pair = SchurPair(f, B)
    resid = float(np.max(np.abs(f(z) - w))) if len(z) else 0.0
    chk = schur_class_check(f)
    rep = SolveReport(SOLVED, 0, cert, pair,
                      {"interpolation": resid, "sup_f": chk.sup_estimate})
    if resid > 1e-8 or not chk.is_schur0:
        rep.status = SEARCH_FAILED
        rep.extra["reason"] = "Schur recursion lost accuracy"
    return rep


def _series_mul(a, b, n):
    return np.convolve(a[:n], b[:n])[:n]


def _series_inv(a, n):
    out = np.zeros(n, dtype=complex)
    out[0] = 1.0 / a[0]
    for k in range(1, n):
        out[k] = -np.dot(a[1:k + 1], out[k - 1::-1][:k]) / a[0]
    return out


def _schur_coeffs(c):
    """Schur algorithm on Taylor data ``c_0..c_n``; returns numerator and denominator."""
    stack = []
    c = np.asarray(c, dtype=complex)
    p, q = np.zeros(1, dtype=complex), np.ones(1, dtype=complex)
    while len(c):
        n = len(c)
        g = c[0]
        if abs(g) >= 1.0 - _UNIMODULAR:
            p = np.array([g / abs(g)])
            break
        stack.append(g)
        num = c.copy()
        num[0] -= g
        den = -np.conj(g) * c
        den[0] += 1.0
        c = _series_mul(num, _series_inv(den, n), n)[1:]
    zpoly = np.array([0.0, 1.0])
    for g in reversed(stack):
        # f = (g + z f') / (1 + conj(g) z f')
        p, q = _step(p, q, (zpoly, np.array([g])), (np.conj(g) * zpoly, np.array([1.0])))
    return p, q


def solve_cf0(w, tol=ZERO_TOL):
    """Definite Caratheodory-Fejer problem by the Schur algorithm."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    td = cf_matrices(w, tol)
    if td.inertia.n_neg:
        return SolveReport(INFEASIBLE, td.inertia.n_neg, td.inertia)
    f = RationalFunction(*_schur_coeffs(w), reduce=False)
    resid = float(np.max(np.abs(f.taylor(len(w)) - w)))
    chk = schur_class_check(f)
    rep = SolveReport(SOLVED, 0, td.inertia, SchurPair(f, BlaschkeProduct()),
                      {"coefficients": resid, "sup_f": chk.sup_estimate})
    if resid > 1e-8 or not chk.is_schur0:
        rep.status = SEARCH_FAILED
        rep.extra["reason"] = "Schur recursion lost accuracy"
    return rep


# ---------------------------------------------------------------------------
# zero search

def _chart(v, kappa, margin):
    v = np.asarray(v, dtype=float).reshape(kappa, 2)
    c = v[:, 0] + 1j * v[:, 1]
    r = np.abs(c)
    scale = np.where(r > 0, np.tanh(r) / np.where(r > 0, r, 1.0), 1.0)
    return (1.0 - margin) * scale * c


def _unchart(a, margin):
    a = np.asarray(a, dtype=complex)
    r = np.minimum(np.abs(a) / (1.0 - margin), 1.0 - 1e-6)
    v = np.where(r > 0, np.arctanh(r) * a / np.where(r > 0, np.abs(a), 1.0), 0.0)
    return np.column_stack([v.real, v.imag]).ravel()


def _search(objective, kappa, cfg, guess=None):
    """Multistart Nelder-Mead maximizing ``objective(zeros)``.

    Start 0 is ``B = z^kappa`` and is accepted without optimizing when it is
    already feasible; start 1 is ``guess`` (if given); the rest are seeded
    random points of the chart. Returns ``(best zeros, best value, feasible)``;
    ``objective`` returns ``(value, feasibility threshold)``.
    """
    rng = np.random.default_rng(cfg.seed)
    best = (None, -np.inf)
    for s in range(cfg.multistart):
        if s == 0:
            v0 = np.zeros(2 * kappa)
        elif s == 1 and guess is not None:
            v0 = _unchart(guess, cfg.margin)
        else:
            v0 = rng.normal(scale=1.0, size=2 * kappa)
        val0, thr0 = objective(_chart(v0, kappa, cfg.margin))
        if val0 >= thr0 and s == 0:
            return _chart(v0, kappa, cfg.margin), val0, True
        res = minimize(lambda v: -objective(_chart(v, kappa, cfg.margin))[0], v0,
                       method="Nelder-Mead",
                       options={"maxiter": cfg.max_iter, "xatol": 1e-10, "fatol": 1e-14})
        a = _chart(res.x, kappa, cfg.margin)
        val, thr = objective(a)
        if val > best[1]:
            best = (a, val)
        if val >= thr and val > 0:
            return a, val, True
    a, val = best
    if a is None:
        return None, -np.inf, False
    _, thr = objective(a)
    return a, val, val >= thr


def _pick_guess(z, w, k):
    # values are large next to the poles of S = f/B
    return z[np.argsort(-np.abs(w), kind="stable")[:k]]


def _cf_guess(w, k):
    n = len(w)
    if n < 2 * k or k == 0:
        return None
    # degenerate data (e.g. leading zeros) gives a singular Pade system;
    # the random starts cover that case
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            _, q = pade(w, k, n - 1 - k)
        except (np.linalg.LinAlgError, ValueError):
            return None
    if not np.all(np.isfinite(q.coeffs)):
        return None
    poles = np.roots(q.coeffs) if q.order else np.zeros(0)
    poles = poles[np.abs(poles) < 1.0]
    if poles.size < k:
        return None
    return poles[np.argsort(np.abs(poles))][:k]


def _pick_objective(z, w, tol):
    def obj(a):
        B = BlaschkeProduct(tuple(a))
        P = pick_matrix(z, B(z) * w)
        lam = np.linalg.eigvalsh(P)
        return float(lam[0]), -tol * max(1.0, float(np.max(np.abs(lam))))
    return obj


def solve_pick_kappa(points, values, config=SearchConfig()):
    """Pick problem in the generalized Schur class.

    ``kappa`` is the negative count of the Pick matrix. For ``kappa > 0``
    the zeros of ``B`` are searched to make the modified Pick matrix
    (values ``B(z_j) w_j``) positive semidefinite; the degrees ``kappa``,
    ``kappa + 1``, ``kappa + 2`` are tried in turn.
    """
    z = np.atleast_1d(np.asarray(points, dtype=complex))
    w = np.atleast_1d(np.asarray(values, dtype=complex))
    cert = inertia(pick_matrix(z, w), config.tol)
    kappa = cert.n_neg
    if kappa == 0:
        rep = solve_np0(z, w, config.tol)
        rep.kappa, rep.certificate = 0, cert
        rep.attempts.append((0, rep.status, None))
        if rep.solved:
            rep.residuals["verify"] = _verify_pick(z, w, rep.pair)
        return rep
    attempts = []
    for deg in range(kappa, kappa + 3):
        if deg > len(z):
            break
        a, val, ok = _search(_pick_objective(z, w, config.tol), deg, config,
                             _pick_guess(z, w, deg))
        if not ok:
            attempts.append((deg, SEARCH_FAILED, val))
            continue
        B = BlaschkeProduct.normalized(a)
        sub = solve_np0(z, B(z) * w, config.tol)
        if not sub.solved:
            attempts.append((deg, SEARCH_FAILED, val))
            continue
        pair = SchurPair(sub.pair.f, B)
        attempts.append((deg, SOLVED, val))
        res = {"interpolation": float(np.max(np.abs(pair.f(z) - B(z) * w))),
               "sup_f": sub.residuals["sup_f"],
               "verify": _verify_pick(z, w, pair)}
        return SolveReport(SOLVED, kappa, cert, pair, res, attempts,
                           {"objective": val})
    return SolveReport(SEARCH_FAILED, kappa, cert, None, {}, attempts)


def _verify_pick(z, w, pair):
    data = NudelmanData.pick(z, w)
    try:
        return verify_pair(data, pair)
    except Exception:
        # very clustered nodes near the circle: fall back to direct evaluation
        return float(np.max(np.abs(pair.f(z) - pair.B(z) * w)))


def _cf_objective(w, tol):
    n = len(w)

    def obj(a):
        B = BlaschkeProduct(tuple(a))
        c = _series_mul(B.taylor(n), w, n)
        D = cf_matrices(c).defect
        lam = np.linalg.eigvalsh(D)
        return float(lam[0]), -tol * max(1.0, float(np.max(np.abs(lam))))
    return obj


def _matching_order(S, w, tol=1e-8):
    n = len(w)
    try:
        s = S.taylor(n)
    except Exception:
        return 0
    diff = np.abs(s - w) > tol * max(1.0, float(np.max(np.abs(w))))
    return int(np.argmax(diff)) if diff.any() else n


def solve_cf_kappa(w, config=SearchConfig()):
    """Caratheodory-Fejer problem in the generalized Schur class.

    Finds ``(f, B)`` with ``B w = f + O(z^{n+1})`` and ``deg B`` equal to
    the negative count of the Toeplitz defect. The report's ``extra``
    records the matching order of ``S = f/B`` against ``w``.
    """
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    n = len(w)
    cert = cf_matrices(w, config.tol).inertia
    kappa = cert.n_neg
    if kappa > n:
        raise InputError("negative count exceeds the data length")
    attempts = []
    for deg in range(kappa, kappa + 3):
        if deg == 0:
            a, val, ok = np.zeros(0), None, True
        else:
            a, val, ok = _search(_cf_objective(w, config.tol), deg, config, _cf_guess(w, deg))
        if not ok:
            attempts.append((deg, SEARCH_FAILED, val))
            continue
        B = BlaschkeProduct.normalized(a) if deg else BlaschkeProduct()
        c = _series_mul(B.taylor(n), w, n)
        sub = solve_cf0(c, config.tol)
        if not sub.solved:
            attempts.append((deg, SEARCH_FAILED, val))
            continue
        pair = SchurPair(sub.pair.f, B)
        attempts.append((deg, SOLVED, val))
        S = pair.f / B.to_rational() if deg else pair.f
        order = _matching_order(S, w)
        res = {"coefficients": float(np.max(np.abs(pair.f.taylor(n) - c))),
               "sup_f": sub.residuals["sup_f"]}
        return SolveReport(SOLVED, kappa, cert, pair, res, attempts,
                           {"matching_order": order, "order_bound": n - kappa})
    return SolveReport(SEARCH_FAILED, kappa, cert, None, {}, attempts)


def solve_sarason(M, R, config=SearchConfig(), commute_tol=1e-8):
    """Sarason problem on a model space with distinct zeros.

    The values ``r_i`` of the symbol at the zeros are read off the kernel
    eigenvectors of ``R^*``; the resulting Pick problem is solved and the
    identity ``B(T) R = f(T)`` is checked on matrices.

    Raises
    ------
    RepeatedZeros
        ``C`` has a repeated zero; use the Nudel'man form route instead.
    NotInCommutant
        ``||TR - RT||`` exceeds ``commute_tol``.
    """
    if not isinstance(R, CommutantCandidate):
        R = CommutantCandidate.build(R, M)
    beta = M.zeros
    if len(beta) > 1:
        gaps = np.abs(beta[:, None] - beta[None, :]) + np.eye(len(beta))
        if gaps.min() < 1e-8:
            raise RepeatedZeros("C has repeated zeros; the Pick reduction does not apply")
    if R.commutation_residual > commute_tol:
        raise NotInCommutant(f"commutation residual {R.commutation_residual:.3g}")
    K = M.kernel_coords(beta)                                     # columns k_i
    RH = R.R.conj().T
    r = np.conj(np.einsum("ji,jk,ki->i", K.conj(), RH, K) /
                np.einsum("ji,ji->i", K.conj(), K))
    rep = solve_pick_kappa(beta, r, config)
    rep.extra["symbol_values"] = r
    if rep.solved:
        try:
            BT = phi_of_T(rep.pair.B, M)
            FT = phi_of_T(rep.pair.f, M)
            rep.residuals["operator"] = float(np.linalg.norm(BT @ R.R - FT, 2))
        except PoleNearDisk:
            rep.residuals["operator"] = float("nan")
        if not rep.residuals["operator"] <= 1e-6:
            rep.status = SEARCH_FAILED
            rep.extra["reason"] = "operator identity not met"
    return rep
