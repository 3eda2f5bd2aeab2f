"""Seeded problem instances built from known solutions.

Every generator returns ``(problem, truth)``: ``problem`` is a JSON-ready
problem description (complex numbers as ``[re, im]``) and ``truth`` records
the generating pair and the negative count the instance was checked to
carry. The same generators feed the test-suite and ``kappa gen``.
"""
import numpy as np

from .errors import InputError
from .forms import cf_matrices, inertia, pick_matrix
from .model_space import model_space_build
from .rational import BlaschkeProduct, RationalFunction, SchurPair

__all__ = [
    "KINDS", "random_zeros", "random_schur_pair", "near_pole_samples",
    "generic_samples", "sarason_operator", "real_loewner_seed", "generate",
    "cplx", "uncplx", "rational_payload",
]

KINDS = ("pick", "cf", "sarason", "nudelman", "boundary-disk", "loewner",
         "loewner-real", "dual-loewner", "hankel")

_RETRIES = 200


def cplx(z):
    """Complex array to nested ``[re, im]`` lists."""
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0:
        return [float(z.real), float(z.imag)]
    return [cplx(v) for v in z]


def uncplx(x):
    """Inverse of :func:`cplx`."""
    a = np.asarray(x, dtype=float)
    if a.shape[-1:] != (2,):
        raise InputError("complex numbers are encoded as [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def rational_payload(r, conj=False):
    if isinstance(r, BlaschkeProduct):
        r = r.to_rational()
    return {"num": cplx(r.num), "den": cplx(r.den), "conj": bool(conj)}


def random_zeros(rng, k, radius=0.8, sep=0.2):
    """``k`` points in ``|z| <= radius`` at mutual distance ``>= sep``."""
    for _ in range(_RETRIES):
        z = radius * np.sqrt(rng.uniform(size=k)) * np.exp(2j * np.pi * rng.uniform(size=k))
        if k < 2 or np.min(np.abs(z[:, None] - z[None, :]) + 9 * np.eye(k)) >= sep:
            return z
    raise InputError("could not place separated points")


def random_schur_pair(rng, kappa, f_degree=2, radius=0.8):
    """Coprime pair with ``deg B = kappa`` and ``sup |f| <= 0.9``.

    ``f`` is a polynomial with coefficient l1-norm 0.9 bounded away from
    zero at the zeros of ``B``.
    """
    for _ in range(_RETRIES):
        a = random_zeros(rng, kappa, radius)
        c = rng.normal(size=f_degree + 1) + 1j * rng.normal(size=f_degree + 1)
        c *= 0.9 / np.sum(np.abs(c))
        f = RationalFunction(c)
        if kappa == 0 or np.min(np.abs(f(a))) > 0.05:
            return SchurPair(f, BlaschkeProduct.normalized(a))
    raise InputError("could not draw a coprime pair")


def generic_samples(rng, size, pair=None, radius=0.9, avoid=0.05):
    """Random nodes in the disk kept ``avoid`` away from the zeros of ``B``."""
    out = []
    zeros = np.asarray(pair.B.zeros if pair is not None else (), dtype=complex)
    while len(out) < size:
        z = radius * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        if zeros.size and np.min(np.abs(zeros - z)) < avoid:
            continue
        if out and np.min(np.abs(np.asarray(out) - z)) < 1e-3:
            continue
        out.append(z)
    return np.asarray(out)


def near_pole_samples(rng, pair, size, dist=0.02):
    """One node at distance ``dist`` from every zero of ``B``, then random ones."""
    zeros = np.asarray(pair.B.zeros, dtype=complex)
    near = zeros + dist * np.exp(2j * np.pi * rng.uniform(size=zeros.size))
    rest = generic_samples(rng, max(size - zeros.size, 0), pair)
    return np.concatenate([near, rest])[:max(size, zeros.size)]


def sarason_operator(M, values):
    """``R = r(T)`` for any ``r`` with ``r(beta_i) = values[i]`` (distinct zeros).

    Uses ``T^* k_i = conj(beta_i) k_i``: ``R = K^{-H} diag(values) K^H``.
    """
    K = M.kernel_coords(M.zeros)
    KH = K.conj().T
    return np.linalg.solve(KH, np.diag(values) @ KH)


def real_loewner_seed(rng, kappa, n_pos=1, gap=1.3):
    """Real rational ``f0 = alpha x + beta + sum s_i r_i / (x - q_i)`` on ``(-1, 1)``.

    ``kappa`` terms carry ``s = +1`` (one negative square each), ``n_pos``
    carry ``s = -1``; poles are real with ``|q| >= gap``.
    """
    x = RationalFunction.identity()
    f = RationalFunction.constant(float(rng.uniform(-0.5, 0.5))) + x * float(rng.uniform(0.2, 1.0))
    terms = []
    qs = []
    for k in range(kappa + n_pos):
        for _ in range(_RETRIES):
            q = float(rng.choice([-1.0, 1.0]) * rng.uniform(gap, 2.5))
            if all(abs(q - p) > 0.2 for p in qs):
                break
        qs.append(q)
        s = 1.0 if k < kappa else -1.0
        r = float(rng.uniform(0.5, 1.5))
        terms.append((s, r, q))
        f = f + RationalFunction([s * r], [-q, 1.0], reduce=False)
    return f, terms


def _pick(rng, kappa, size):
    if size < kappa:
        raise InputError("size must be at least kappa")
    for _ in range(_RETRIES):
        pair = random_schur_pair(rng, kappa)
        z = near_pole_samples(rng, pair, size)
        w = pair(z)
        if inertia(pick_matrix(z, w)).n_neg == kappa:
            return pair, z, w
    raise InputError("no instance with the requested negative count")


def _cf(rng, kappa, size):
    for _ in range(_RETRIES):
        pair = random_schur_pair(rng, kappa)
        if kappa and np.min(np.abs(pair.B.zeros)) < 0.2:
            continue
        w = pair.quotient().taylor(size)
        if cf_matrices(w).inertia.n_neg == kappa:
            return pair, w
    raise InputError("no instance with the requested negative count")


def generate(kind, seed=0, kappa=1, size=5):
    """Build one instance of ``kind``; returns ``(problem, truth)``.

    ``size`` is the number of nodes (pick, sarason, nudelman), of Taylor
    coefficients (cf), of basis functions (boundary, loewner, hankel).
    """
    if kind not in KINDS:
        raise InputError(f"unknown kind {kind!r}")
    if not 0 <= kappa <= 3:
        raise InputError("kappa must lie in 0..3")
    if not 1 <= size <= 64:
        raise InputError("size must lie in 1..64")
    rng = np.random.default_rng(seed)
    truth = {"kind": kind, "seed": int(seed), "kappa": int(kappa)}
    if kind in ("pick", "nudelman"):
        pair, z, w = _pick(rng, kappa, size)
        truth["pair"] = {"f": pair.f.to_dict(), "B": pair.B.to_dict()}
        if kind == "pick":
            return {"kind": kind, "z": cplx(z), "w": cplx(w)}, truth
        return {"kind": kind, "A": cplx(np.diag(z)), "b": cplx(w),
                "c": cplx(np.ones_like(z))}, truth
    if kind == "cf":
        pair, w = _cf(rng, kappa, size)
        truth["pair"] = {"f": pair.f.to_dict(), "B": pair.B.to_dict()}
        return {"kind": kind, "w": cplx(w)}, truth
    if kind == "sarason":
        for _ in range(_RETRIES):
            pair = random_schur_pair(rng, kappa)
            beta = random_zeros(rng, size, radius=0.85, sep=0.15)
            if kappa and np.min(np.abs(beta[:, None] - np.asarray(pair.B.zeros)[None, :])) < 0.05:
                continue
            r = pair(beta)
            if inertia(pick_matrix(beta, r)).n_neg == kappa:
                break
        else:
            raise InputError("no instance with the requested negative count")
        M = model_space_build(BlaschkeProduct(tuple(beta)))
        R = sarason_operator(M, r)
        truth["pair"] = {"f": pair.f.to_dict(), "B": pair.B.to_dict()}
        return {"kind": kind, "C_zeros": cplx(beta), "R": cplx(R)}, truth
    if kind in ("boundary-disk", "hankel"):
        B = BlaschkeProduct.normalized(random_zeros(rng, kappa, 0.8))
        truth["B"] = B.to_dict()
        if kind == "boundary-disk":
            return {"kind": kind, "arcs": None,
                    "b": rational_payload(B, conj=True),
                    "c": rational_payload(RationalFunction.constant(1.0)),
                    "basis_size": int(size)}, truth
        pair = random_schur_pair(rng, kappa)
        S = pair.quotient()
        truth["pair"] = {"f": pair.f.to_dict(), "B": pair.B.to_dict()}
        return {"kind": kind, "S": rational_payload(S), "m": int(max(size, 2 * kappa + 2))}, truth
    if kind in ("loewner", "loewner-real"):
        f0, terms = real_loewner_seed(rng, kappa)
        truth["terms"] = [list(t) for t in terms]
        return {"kind": kind, "intervals": [[-1.0, 1.0]], "f0": rational_payload(f0),
                "basis_size": int(size)}, truth
    # dual-loewner: nonnegative weight g0 = p^2 + 0.1 for a random real
    # quadratic p; the count of the dual form is not fixed by g0 >= 0, so the
    # sidecar records the count certified at generation time
    from .line import IntervalSet, dual_loewner_form
    p = rng.normal(size=3)
    g0 = RationalFunction(np.convolve(p, p) + np.array([0.1, 0.0, 0.0, 0.0, 0.0]))
    panels = (size + 1) * -(-64 // (size + 1))
    form = dual_loewner_form(g0, IntervalSet([(-1.0, 1.0)], panels=panels), basis=size)
    truth["kappa"] = int(form.inertia.n_neg)
    truth["kappa_source"] = "certified at generation"
    return {"kind": kind, "intervals": [[-1.0, 1.0]], "g0": rational_payload(g0),
            "basis_size": int(size)}, truth
