"""Boundary machinery on the unit circle.

All integrals are computed on a uniform grid of ``N = 2^k`` nodes
``u_m = exp(2 pi i m / N)`` with weights ``1/N``. Arc sets are realized as
node subsets. Throughout, ``Q_-`` keeps the Fourier modes ``u^j`` with
``j <= 0``; its range is the closed span of ``conj(u)^j``, ``j >= 0``.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NoCleanGap, TruncationUnstable
from .forms import Inertia, hermitian, inertia, ZERO_TOL
from .rational import BlaschkeProduct, circle_grid

__all__ = [
    "CircleGrid", "fourier_coefficients", "from_coefficients", "q_minus",
    "q_minus_samples", "moments", "BoundaryForm", "boundary_form_disk",
    "monomial_basis", "windowed_basis", "HankelRank", "hankel_rank", "mb_projection_check",
]

DEFAULT_N = 4096


@dataclass(frozen=True)
class CircleGrid:
    """Uniform circle grid with an arc set ``Delta``.

    Parameters
    ----------
    N : int
        Power of two.
    arcs : sequence of (float, float)
        Closed angle intervals ``[t0, t1]`` in radians with ``t0 <= t1``;
        ``None`` means the full circle.
    """

    N: int = DEFAULT_N
    arcs: tuple = None
    mask: np.ndarray = field(init=False, repr=False, compare=False)
    snap_error: float = field(init=False, compare=False)

    def __post_init__(self):
        N = int(self.N)
        if N < 2 or N & (N - 1):
            raise InputError(f"grid size must be a power of two, got {N}")
        theta = 2 * np.pi * np.arange(N) / N
        if self.arcs is None:
            mask = np.ones(N, dtype=bool)
            snap = 0.0
            arcs = None
        else:
            arcs = tuple(sorted((float(a), float(b)) for a, b in self.arcs))
            mask = np.zeros(N, dtype=bool)
            length = 0.0
            for a, b in arcs:
                if b < a:
                    raise InputError(f"arc ({a}, {b}) has negative length")
                if b - a >= 2 * np.pi:
                    mask[:] = True
                    length = 2 * np.pi
                    continue
                # offsets of the nodes from the arc start, taken mod 2 pi
                off = np.mod(theta - a, 2 * np.pi)
                mask |= off <= (b - a) + 1e-12
                length += b - a
            length = min(length, 2 * np.pi)
            snap = abs(mask.sum() / N - length / (2 * np.pi))
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "arcs", arcs)
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "snap_error", float(snap))

    @property
    def nodes(self):
        return circle_grid(self.N)

    @property
    def sigma(self):
        """Normalized measure of ``Delta`` as counted on the grid."""
        return float(self.mask.sum()) / self.N

    @property
    def indicator(self):
        return self.mask.astype(float)

    def sample(self, fn):
        """Samples of ``fn`` (callable or array) on the grid."""
        if callable(fn):
            vals = np.asarray(fn(self.nodes), dtype=complex)
        else:
            vals = np.asarray(fn, dtype=complex)
        if vals.ndim == 0:
            vals = np.full(self.N, complex(vals))
        if vals.shape[-1] != self.N:
            raise InputError(f"expected {self.N} samples, got {vals.shape[-1]}")
        return vals


def fourier_coefficients(samples):
    """Two-sided coefficients indexed ``-N/2 .. N/2 - 1`` (``fftshift`` order)."""
    samples = np.asarray(samples, dtype=complex)
    N = samples.shape[-1]
    return np.fft.fftshift(np.fft.fft(samples, axis=-1) / N, axes=-1)


def from_coefficients(coeffs):
    """Inverse of :func:`fourier_coefficients`."""
    coeffs = np.asarray(coeffs, dtype=complex)
    N = coeffs.shape[-1]
    return np.fft.ifft(np.fft.ifftshift(coeffs, axes=-1), axis=-1) * N


def q_minus(coeffs):
    """Zero the coefficients of positive index (``fftshift`` order input)."""
    coeffs = np.array(coeffs, dtype=complex)
    N = coeffs.shape[-1]
    coeffs[..., N // 2 + 1:] = 0.0
    return coeffs


def q_minus_samples(samples):
    """``Q_-`` applied to grid samples."""
    return from_coefficients(q_minus(fourier_coefficients(samples)))


def moments(grid, x, basis, J):
    """Moments ``int_Delta u^j x phi_p d sigma`` for ``j = 0..J``.

    Returns an array of shape ``(len(basis), J + 1)``.
    """
    x = grid.sample(x)
    phi = np.atleast_2d(np.asarray(basis, dtype=complex))
    y = x[None, :] * phi * grid.indicator[None, :]
    return np.fft.ifft(y, axis=-1)[:, : J + 1]


def monomial_basis(grid, m):
    """Samples of ``u^0 .. u^m`` restricted to ``Delta``."""
    u = grid.nodes
    return (u[None, :] ** np.arange(m + 1)[:, None]) * grid.indicator[None, :]


def windowed_basis(grid, m, power=4):
    """Monomials ``u^0 .. u^m`` times a window vanishing at the arc ends.

    On each arc ``[t0, t0 + L]`` the window is ``sin(pi (t - t0) / L)^power``,
    so the products are smooth on the circle and their moments decay fast;
    the full circle gets the constant window.
    """
    u = grid.nodes
    if grid.arcs is None:
        w = np.ones(grid.N)
    else:
        theta = 2 * np.pi * np.arange(grid.N) / grid.N
        w = np.zeros(grid.N)
        for a, b in grid.arcs:
            L = b - a
            if L >= 2 * np.pi:
                w[:] = 1.0
                break
            off = np.mod(theta - a, 2 * np.pi)
            inside = off <= L
            w[inside] = np.maximum(w[inside], np.sin(np.pi * off[inside] / L) ** power)
    return (u[None, :] ** np.arange(m + 1)[:, None]) * w[None, :]


@dataclass(frozen=True)
class BoundaryForm:
    """Boundary Hermitian form at truncation ``J`` with a ``2J`` check.

    ``sup_ratio`` is the largest grid value of ``|b / c|`` on ``Delta``
    (where ``c != 0``), reported as a diagnostic. ``truncation_error`` is
    ``||F_J - F_2J||_2``; eigenvalues within twice that of zero are counted
    as zero at ``J`` (within it at ``2J``).
    """

    matrix: np.ndarray
    inertia: Inertia
    inertia_refined: Inertia
    tail: float
    J: int
    sup_ratio: float
    truncation_error: float = 0.0


def _inertia_floor(F, tol, floor):
    """Inertia with zero level ``max(tol * max(1, ||F||), floor)``."""
    lam = np.linalg.eigvalsh(F)
    scale = max(1.0, float(np.max(np.abs(lam))) if lam.size else 0.0)
    eff = max(tol, floor / scale)
    return inertia(F, eff)


def _form_from_moments(Mc, Mb):
    return hermitian(Mc @ Mc.conj().T - Mb @ Mb.conj().T)


def boundary_form_disk(grid, b, c, basis=None, J=None, tol=ZERO_TOL, check=True):
    """Boundary form ``sum_{j=0}^J (c phi_p)^(j) conj((c phi_q)^(j)) - (b ...)``.

    Parameters
    ----------
    grid : CircleGrid
    b, c : callable or array
        Boundary data sampled on the grid.
    basis : array of shape (n, N), optional
        Grid functions; defaults to monomials ``u^0 .. u^{n-1}`` on ``Delta``
        with ``n = 8``.
    J : int, optional
        Coefficient truncation, default ``N/4``; the count is re-checked at
        ``2J`` when ``2J <= N/2``.

    Raises
    ------
    TruncationUnstable
        The negative count changes between ``J`` and ``2J``.
    """
    N = grid.N
    if basis is None:
        basis = monomial_basis(grid, 7)
    J = N // 4 if J is None else int(J)
    if not 0 <= J <= N // 2:
        raise InputError(f"J must lie in [0, N/2], got {J}")
    J2 = 2 * J if (check and 2 * J <= N // 2) else J
    Mc = moments(grid, c, basis, J2)
    Mb = moments(grid, b, basis, J2)
    F = _form_from_moments(Mc[:, : J + 1], Mb[:, : J + 1])
    F2 = _form_from_moments(Mc, Mb)
    # jump data on arcs gives moments decaying like 1/j, so the remainder of
    # the series after J is about twice the change E between J and 2J and
    # about E after 2J; eigenvalues below those levels are not resolved
    E = float(np.linalg.norm(F - F2, 2))
    i1 = _inertia_floor(F, tol, 2.0 * E)
    i2 = _inertia_floor(F2, tol, E)
    # the certificate is the negative count; zero/positive shifts are reported
    if check and i1.n_neg != i2.n_neg:
        raise TruncationUnstable(
            f"inertia {i1.as_tuple()} at J={J} but {i2.as_tuple()} at J={J2}",
            counts={J: i1.as_tuple(), J2: i2.as_tuple()})
    full_c = np.fft.ifft(grid.sample(c)[None, :] * basis * grid.indicator, axis=-1)
    full_b = np.fft.ifft(grid.sample(b)[None, :] * basis * grid.indicator, axis=-1)
    tail = float(np.max(np.sum(np.abs(full_c[:, J + 1: N // 2 + 1]) ** 2
                               + np.abs(full_b[:, J + 1: N // 2 + 1]) ** 2, axis=1)))
    bs, cs = grid.sample(b), grid.sample(c)
    keep = grid.mask & (np.abs(cs) > 0)
    ratio = float(np.max(np.abs(bs[keep] / cs[keep]))) if keep.any() else 0.0
    return BoundaryForm(F, i1, i2, tail, J, ratio, E)


@dataclass(frozen=True)
class HankelRank:
    rank: int
    singular_values: np.ndarray
    gap_ratio: float
    sup_modulus: float


def hankel_rank(samples, m, gap_tol=1e-8):
    """Numerical rank of the Hankel matrix of the negative coefficients.

    ``H[j, k] = S0^(-(j + k + 1))``, the matrix of ``h -> conj(u) Q_-(u S0 h)``
    restricted to polynomials of degree ``< m``. Singular values above
    ``gap_tol * max(1, sup |S0|)`` are counted.

    Raises
    ------
    NoCleanGap
        The ratio between the smallest retained and the largest discarded
        singular value is below 10.
    """
    samples = np.asarray(samples, dtype=complex)
    N = samples.shape[-1]
    if m > N // 4:
        raise InputError(f"Hankel size {m} exceeds N/4 = {N // 4}")
    coef = np.fft.fft(samples) / N
    # coefficient of index -n sits at position N - n
    neg = coef[(N - np.arange(1, 2 * m)) % N]
    idx = np.add.outer(np.arange(m), np.arange(m))
    H = neg[idx]
    s = np.linalg.svd(H, compute_uv=False)
    sup = float(np.max(np.abs(samples)))
    thresh = gap_tol * max(1.0, sup)
    rank = int(np.sum(s > thresh))
    upper = s[rank - 1] if rank > 0 else max(1.0, sup)
    lower = s[rank] if rank < m else 0.0
    ratio = float(upper / lower) if lower > 0 else float("inf")
    if ratio < 10.0:
        raise NoCleanGap(f"singular value gap ratio {ratio:.3g} below 10", s)
    return HankelRank(rank, s, ratio, sup)


def mb_projection_check(B, h, N=DEFAULT_N):
    """Grid residual of ``M_B Q_- M_B^* h - Q_- h - P_{uH(B)} h``.

    ``h`` is a callable or an array of ``N`` samples. The residual is the
    grid ``L^2`` norm (weights ``1/N``).
    """
    if not isinstance(B, BlaschkeProduct):
        B = BlaschkeProduct(tuple(np.atleast_1d(B)))
    u = circle_grid(N)
    h = np.asarray(h(u) if callable(h) else h, dtype=complex)
    Bu = B(u)
    lhs = Bu * q_minus_samples(np.conj(Bu) * h)
    rhs = q_minus_samples(h)
    if B.degree:
        from .model_space import _tm_basis
        E = u[None, :] * _tm_basis(B.zeros, u)
        c = np.conj(E) @ h / N
        rhs = rhs + c @ E
    return float(np.sqrt(np.mean(np.abs(lhs - rhs) ** 2)))
