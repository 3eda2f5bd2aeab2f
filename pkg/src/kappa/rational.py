"""Rational functions, Blaschke products and Kreĭn-Langer factorization.

Coefficients are stored in ascending order of degree (``c[k]`` multiplies
``z**k``), which is the order the Taylor machinery wants. Roots are computed
as companion-matrix eigenvalues (``numpy.roots``).
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (BoundaryPole, DegenerateValue, InputError, InteriorPole,
                     NotGeneralizedSchur, PoleHit)

__all__ = [
    "RationalFunction", "BlaschkeProduct", "SchurPair", "SchurCheck",
    "blaschke_eval", "krein_langer_factorize", "schur_class_check",
    "cayley_schur_to_nevanlinna", "disk_to_halfplane", "circle_grid",
    "SCHUR_GRID", "ROOT_BAND",
]

#: grid size of the boundary sup test for S_0 membership
SCHUR_GRID = 4096
#: roots with | |r| - 1 | <= ROOT_BAND are treated as lying on the circle
ROOT_BAND = 1e-9
#: relative distance under which a numerator and a denominator root cancel
CANCEL_TOL = 1e-7


def circle_grid(n):
    """``n`` equispaced points ``exp(2 pi i m / n)`` on the unit circle."""
    return np.exp(2j * np.pi * np.arange(n) / n)


def _trim(c, rtol=1e-14):
    c = np.atleast_1d(np.asarray(c, dtype=complex)).copy()
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0.0:
        return np.zeros(1, dtype=complex)
    nz = np.nonzero(np.abs(c) > rtol * scale)[0]
    return c[: nz[-1] + 1]


def _roots(c):
    """Roots of the ascending-coefficient polynomial ``c``."""
    if len(c) <= 1:
        return np.zeros(0, dtype=complex)
    return np.roots(c[::-1]).astype(complex)


def _from_roots(roots):
    """Monic ascending coefficients with the given roots."""
    return np.poly(np.asarray(roots, dtype=complex))[::-1].astype(complex) \
        if len(roots) else np.ones(1, dtype=complex)


def _deflate(c, roots):
    """Divide ``c`` by prod(z - r); the remainder is discarded."""
    if not len(roots):
        return c
    q, _ = np.polydiv(c[::-1], np.poly(np.asarray(roots, dtype=complex)))
    return np.atleast_1d(q)[::-1].astype(complex)


def _pair_roots(ra, rb, tol):
    """Greedy nearest pairing of two root lists; returns the common roots."""
    rb = list(rb)
    common = []
    for r in ra:
        if not rb:
            break
        d = np.abs(np.asarray(rb) - r)
        k = int(np.argmin(d))
        if d[k] <= tol * (1.0 + abs(r)):
            common.append(0.5 * (r + rb.pop(k)))
    return common


def _polymul(a, b):
    return np.convolve(a, b)


def _polyadd(a, b):
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=complex)
    out[: len(a)] += a
    out[: len(b)] += b
    return out


def _series_div(p, q, order):
    """First ``order`` Taylor coefficients of p/q at 0 (needs q[0] != 0)."""
    r = np.zeros(order, dtype=complex)
    pp = np.zeros(order, dtype=complex)
    pp[: min(order, len(p))] = p[:order]
    q0 = q[0]
    for k in range(order):
        acc = pp[k]
        m = min(k, len(q) - 1)
        if m:
            acc -= np.dot(q[1:m + 1], r[k - 1::-1][:m])
        r[k] = acc / q0
    return r


class RationalFunction:
    """Quotient of two complex polynomials in reduced normal form.

    Parameters
    ----------
    num, den : array_like
        Ascending coefficients. ``den`` defaults to 1.
    reduce : bool
        Cancel common numerator/denominator roots (matched within
        ``cancel_tol`` relative distance).

    The denominator is stored monic (leading coefficient 1).
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=(1.0,), reduce=True, cancel_tol=CANCEL_TOL):
        num = _trim(num)
        den = _trim(den)
        if np.all(den == 0):
            raise InputError("denominator is identically zero")
        if np.all(num == 0):
            num = np.zeros(1, dtype=complex)
            den = np.ones(1, dtype=complex)
        elif reduce and len(num) > 1 and len(den) > 1:
            common = _pair_roots(_roots(num), _roots(den), cancel_tol)
            if common:
                num = _trim(_deflate(num, common))
                den = _trim(_deflate(den, common))
        lead = den[-1]
        self.num = num / lead
        self.den = den / lead
        self.num.setflags(write=False)
        self.den.setflags(write=False)

    # construction helpers

    @classmethod
    def constant(cls, c):
        return cls([c])

    @classmethod
    def polynomial(cls, coeffs):
        return cls(coeffs)

    @classmethod
    def from_roots(cls, zeros=(), poles=(), gain=1.0):
        return cls(gain * _from_roots(zeros), _from_roots(poles))

    @classmethod
    def identity(cls):
        return cls([0.0, 1.0])

    # basic queries

    @property
    def degree(self):
        return max(len(self.num), len(self.den)) - 1

    @property
    def is_zero(self):
        return len(self.num) == 1 and self.num[0] == 0

    def zeros(self):
        return _roots(self.num)

    def poles(self):
        return _roots(self.den)

    def __call__(self, z):
        z = np.asarray(z)
        p = np.polyval(self.num[::-1], z)
        q = np.polyval(self.den[::-1], z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return p / q

    def taylor(self, order):
        """First ``order`` Taylor coefficients at the origin."""
        if abs(self.den[0]) < 1e-300:
            raise PoleHit("rational function has a pole at the origin")
        return _series_div(self.num, self.den, order)

    # arithmetic

    @staticmethod
    def _coerce(other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, BlaschkeProduct):
            return other.to_rational()
        if np.isscalar(other):
            return RationalFunction([other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        num = _polyadd(_polymul(self.num, other.den), _polymul(other.num, self.den))
        return RationalFunction(num, _polymul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RationalFunction(_polymul(self.num, other.num),
                                _polymul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(_polymul(self.num, other.den),
                                _polymul(self.den, other.num))

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def compose_mobius(self, a, b, c, d):
        """Return ``z -> self((a z + b) / (c z + d))``."""
        n = self.degree
        lin_num = np.array([b, a], dtype=complex)
        lin_den = np.array([d, c], dtype=complex)
        pow_num = [np.ones(1, dtype=complex)]
        pow_den = [np.ones(1, dtype=complex)]
        for _ in range(n):
            pow_num.append(_polymul(pow_num[-1], lin_num))
            pow_den.append(_polymul(pow_den[-1], lin_den))

        def lift(coeffs):
            out = np.zeros(1, dtype=complex)
            for k, ck in enumerate(coeffs):
                out = _polyadd(out, ck * _polymul(pow_num[k], pow_den[n - k]))
            return out

        return RationalFunction(lift(self.num), lift(self.den))

    def conj_reflect(self):
        """Return ``z -> conj(self(conj(z)))``."""
        return RationalFunction(np.conj(self.num), np.conj(self.den), reduce=False)

    def __repr__(self):
        fmt = lambda c: "[" + ", ".join(f"{v:.6g}" for v in c) + "]"
        return f"RationalFunction(num={fmt(self.num)}, den={fmt(self.den)})"

    def to_dict(self):
        return {"num": [[float(v.real), float(v.imag)] for v in self.num],
                "den": [[float(v.real), float(v.imag)] for v in self.den]}


@dataclass(frozen=True)
class BlaschkeProduct:
    """Finite Blaschke product on the disk or the upper half-plane.

    Disk:        ``c * prod (z - a_j) / (1 - conj(a_j) z)``, ``|a_j| < 1``.
    Half-plane:  ``c * prod (z - a_j) / (z - conj(a_j))``, ``Im a_j > 0``.
    """

    zeros: tuple = ()
    const: complex = 1.0
    domain: str = "disk"

    def __post_init__(self):
        zeros = tuple(complex(a) for a in np.atleast_1d(np.asarray(self.zeros, dtype=complex)))
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "const", complex(self.const))
        if self.domain not in ("disk", "halfplane"):
            raise InputError(f"unknown domain {self.domain!r}")
        if abs(abs(self.const) - 1.0) > 1e-12:
            raise InputError("Blaschke constant must be unimodular")
        for a in zeros:
            inside = abs(a) < 1.0 if self.domain == "disk" else a.imag > 0.0
            if not inside:
                raise InputError(f"Blaschke zero {a} is not inside the {self.domain}")

    @classmethod
    def normalized(cls, zeros, domain="disk"):
        """Disk product whose first nonzero Taylor coefficient is positive."""
        zeros = np.atleast_1d(np.asarray(zeros, dtype=complex))
        if domain != "disk":
            return cls(tuple(zeros), 1.0, domain)
        p = np.prod(-zeros[zeros != 0]) if np.any(zeros != 0) else 1.0
        return cls(tuple(zeros), abs(p) / p, domain)

    @property
    def degree(self):
        return len(self.zeros)

    def poles(self):
        z = np.asarray(self.zeros, dtype=complex)
        if self.domain == "disk":
            z = z[z != 0]
            return 1.0 / np.conj(z)
        return np.conj(z)

    def __call__(self, z):
        return blaschke_eval(self, z)

    def to_rational(self):
        z = np.asarray(self.zeros, dtype=complex)
        num = self.const * _from_roots(z)
        if self.domain == "disk":
            den = np.ones(1, dtype=complex)
            for a in z:
                den = _polymul(den, np.array([1.0, -np.conj(a)]))
        else:
            den = _from_roots(np.conj(z))
        return RationalFunction(num, den, reduce=False)

    def taylor(self, order):
        return self.to_rational().taylor(order)

    def to_dict(self):
        return {"zeros": [[a.real, a.imag] for a in self.zeros],
                "const": [self.const.real, self.const.imag],
                "domain": self.domain}


def blaschke_eval(B, z):
    """Evaluate a Blaschke product factor by factor.

    Raises
    ------
    PoleHit
        If ``z`` is within 1e-14 of a pole.
    """
    z = np.asarray(z, dtype=complex)
    out = np.full(z.shape, B.const, dtype=complex)
    for a in B.zeros:
        if B.domain == "disk":
            den = 1.0 - np.conj(a) * z
            if a != 0 and np.any(np.abs(z - 1.0 / np.conj(a)) < 1e-14 * max(1.0, 1.0 / abs(a))):
                raise PoleHit(f"evaluation point hits the pole 1/conj({a})")
        else:
            den = z - np.conj(a)
            if np.any(np.abs(den) < 1e-14):
                raise PoleHit(f"evaluation point hits the pole conj({a})")
        out = out * (z - a) / den
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class SchurPair:
    """Kreĭn-Langer pair: ``S = f / B`` with ``f`` in S_0."""

    f: RationalFunction
    B: BlaschkeProduct

    @property
    def kappa(self):
        return self.B.degree

    def is_coprime(self, tol=1e-9):
        if not self.B.zeros:
            return True
        return bool(np.all(np.abs(self.f(np.asarray(self.B.zeros))) > tol))

    def quotient(self):
        return self.f / self.B.to_rational()

    def __call__(self, z):
        return self.f(z) / self.B(z)


class SchurCheck(NamedTuple):
    is_schur0: bool
    sup_estimate: float


def schur_class_check(f, tol=1e-9, grid=SCHUR_GRID):
    """Approximate membership test for the Schur class S_0.

    The supremum of ``|f|`` is estimated on ``grid`` equispaced boundary
    points. Exact decision is not attempted.

    Raises
    ------
    InteriorPole
        A pole of ``f`` lies inside the disk.
    BoundaryPole
        A pole lies within ``tol`` of the unit circle.
    """
    if isinstance(f, BlaschkeProduct):
        f = f.to_rational()
    poles = f.poles()
    mod = np.abs(poles)
    if np.any(mod < 1.0 - tol):
        raise InteriorPole(f"pole of modulus {mod.min():.3g} inside the disk")
    if np.any(np.abs(mod - 1.0) <= tol):
        raise BoundaryPole("pole on the unit circle")
    sup = float(np.max(np.abs(f(circle_grid(grid)))))
    return SchurCheck(sup <= 1.0 + tol, sup)


def krein_langer_factorize(S, tol=ROOT_BAND):
    """Split a rational generalized Schur function as ``S = f / B``.

    ``B`` collects the poles of ``S`` inside the disk (with multiplicity) and
    is normalized so its first nonzero Taylor coefficient is positive.

    Raises
    ------
    BoundaryPole
        A pole of ``S`` lies within ``tol`` of the circle.
    NotGeneralizedSchur
        The numerator ``f = S B`` is not in S_0.
    """
    poles = S.poles()
    mod = np.abs(poles)
    if np.any(np.abs(mod - 1.0) <= tol):
        raise BoundaryPole("pole within tolerance of the unit circle")
    inner = poles[mod < 1.0]
    outer = poles[mod > 1.0]
    B = BlaschkeProduct.normalized(inner)
    # f = c p / (q_outer * prod (1 - conj(a) z)); the interior factors of q cancel exactly
    den = _from_roots(outer)
    for a in inner:
        den = _polymul(den, np.array([1.0, -np.conj(a)]))
    f = RationalFunction(B.const * S.num, den)
    check = schur_class_check(f, tol=tol)
    if not check.is_schur0:
        raise NotGeneralizedSchur(
            f"numerator has sup {check.sup_estimate:.6g} > 1 on the circle")
    return SchurPair(f, B)


def cayley_schur_to_nevanlinna(S):
    """Map a Schur-type value (or function) to ``i (1 + S) / (1 - S)``.

    Accepts a number, an array, a ``RationalFunction`` (returns one) or a
    callable (returns a callable).

    Raises
    ------
    DegenerateValue
        ``|1 - S| < 1e-14`` at an evaluation point.
    """
    if isinstance(S, RationalFunction):
        return RationalFunction(1j * _polyadd(S.den, S.num), _polyadd(S.den, -S.num))
    if callable(S):
        return lambda z: cayley_schur_to_nevanlinna(S(z))
    s = np.asarray(S, dtype=complex)
    if np.any(np.abs(1.0 - s) < 1e-14):
        raise DegenerateValue("S takes the value 1")
    out = 1j * (1.0 + s) / (1.0 - s)
    return out if out.ndim else complex(out)


def disk_to_halfplane(S0):
    """Return ``z -> S0((z - i) / (z + i))`` for a disk function ``S0``."""
    if isinstance(S0, BlaschkeProduct):
        S0 = S0.to_rational()
    if isinstance(S0, RationalFunction):
        return S0.compose_mobius(1.0, -1j, 1.0, 1j)
    return lambda z: S0((np.asarray(z) - 1j) / (np.asarray(z) + 1j))
