"""Acceptance criteria, one test per criterion.

Each ``criterion_N`` returns ``(ok, detail)``. Under pytest the PASS/FAIL
lines are printed in the terminal summary; ``python3 tests/test_acceptance.py``
runs the criteria directly and prints the same lines.
"""
import sys
import time
import warnings

import numpy as np
import pytest

from kappa.circle import CircleGrid, boundary_form_disk, hankel_rank, monomial_basis
from kappa.forms import (NudelmanData, cf_matrices, inertia, kernel_matrix_schur,
                         nudelman_form, pick_matrix)
from kappa.instances import (generate, generic_samples, near_pole_samples,
                             random_schur_pair, random_zeros, real_loewner_seed,
                             sarason_operator, uncplx)
from kappa.line import (IntervalSet, PanelFunction, boundary_form_halfplane,
                        cauchy_transform, convolution_residual, dual_construction,
                        finite_hilbert, hat_basis, hilbert_inner, loewner_form,
                        loewner_real_form)
from kappa.model_space import model_space_build, sarason_defect
from kappa.rational import BlaschkeProduct
from kappa.solvers import (SearchConfig, solve_cf_kappa, solve_pick_kappa,
                           solve_sarason)

TOL = 1e-9
UNIT = [(-1.0, 1.0)]


def criterion_1():
    """Kernel negative count never exceeds deg B; equal on near-pole samples."""
    rng = np.random.default_rng(1001)
    worst_excess, misses = 0, []
    for seed in range(50):
        k = seed % 4
        pair = random_schur_pair(rng, k)
        for size in range(k + 2, 21, 3):
            z = generic_samples(rng, size, pair)
            worst_excess = max(worst_excess, inertia(kernel_matrix_schur(pair, z), TOL).n_neg - k)
        z = near_pole_samples(rng, pair, max(k + 2, 8))
        if inertia(kernel_matrix_schur(pair, z), TOL).n_neg != k:
            misses.append(seed)
    ok = worst_excess <= 0 and not misses
    return ok, f"max excess {worst_excess}, near-pole misses {misses}"


def criterion_2():
    """Nudel'man form reproduces the Pick matrix and the CF defect inertia."""
    rng = np.random.default_rng(1002)
    worst, mism = 0.0, 0
    for _ in range(20):
        n = int(rng.integers(1, 9))
        z = random_zeros(rng, n, 0.9, 0.02)
        w = 2 * (rng.normal(size=n) + 1j * rng.normal(size=n))
        worst = max(worst, float(np.max(np.abs(nudelman_form(NudelmanData.pick(z, w)) - pick_matrix(z, w)))))
        c = 2 * (rng.normal(size=n) + 1j * rng.normal(size=n))
        mism += inertia(nudelman_form(NudelmanData.cf(c)), TOL) != cf_matrices(c, TOL).inertia
    return worst <= 1e-10 and mism == 0, f"max entry error {worst:.2e}, CF inertia mismatches {mism}"


def criterion_3():
    """Sarason defect inertia equals the Pick inertia at the zeros of C."""
    rng = np.random.default_rng(1003)
    mism = 0
    for _ in range(20):
        n = int(rng.integers(1, 6))
        M = model_space_build(BlaschkeProduct(tuple(random_zeros(rng, n, 0.85, 0.15))))
        r = 1.5 * (rng.normal(size=n) + 1j * rng.normal(size=n))
        mism += sarason_defect(sarason_operator(M, r), M, zero_tol=TOL) != inertia(pick_matrix(M.zeros, r), TOL)
    return mism == 0, f"{mism} mismatches in 20 model spaces"


def _solve(kind, seed, kappa, size):
    p, _ = generate(kind, seed=seed, kappa=kappa, size=size)
    cfg = SearchConfig(seed=seed)
    if kind == "pick":
        return solve_pick_kappa(uncplx(p["z"]), uncplx(p["w"]), cfg)
    if kind == "cf":
        return solve_cf_kappa(uncplx(p["w"]), cfg)
    M = model_space_build(BlaschkeProduct(tuple(uncplx(p["C_zeros"]))))
    return solve_sarason(M, uncplx(p["R"]), cfg)


def criterion_4():
    """Solver round trips on 60 seeded instances."""
    good = total = unsound = 0
    for kind in ("pick", "cf", "sarason"):
        for s in range(20):
            kappa, size = s % 3, 3 + s % 6
            rep = _solve(kind, 100 + s, kappa, max(size, kappa + 1))
            total += 1
            if rep.solved:
                unsound += rep.degree < rep.certificate.n_neg
                res = max(v for k, v in rep.residuals.items() if k != "sup_f")
                good += rep.degree == rep.kappa and res <= 1e-6 and rep.residuals["sup_f"] <= 1 + 1e-9
    rate = good / total
    return rate >= 0.95 and unsound == 0, f"{good}/{total} solved with deg B = kappa, {unsound} unsound"


def criterion_5():
    """Circle form with c = 1, b = conj(u)^k on the full circle."""
    counts = {}
    for k in (1, 2, 3):
        for N in (4096, 8192):
            g = CircleGrid(N)
            r = boundary_form_disk(g, lambda u, k=k: np.conj(u) ** k, lambda u: np.ones_like(u),
                                   basis=monomial_basis(g, k + 2))
            counts[(k, N)] = r.inertia.n_neg
    ok = all(v == k for (k, _), v in counts.items())
    return ok, ", ".join(f"k={k} N={N}: {v}" for (k, N), v in counts.items())


def criterion_6():
    """Hankel rank equals deg B with a clear singular-value gap."""
    rng = np.random.default_rng(1006)
    g = CircleGrid(4096)
    bad, ratios = [], []
    for seed in range(20):
        k = seed % 4
        pair = random_schur_pair(rng, k)
        hr = hankel_rank(g.sample(pair), 16)
        ratios.append(hr.gap_ratio)
        if hr.rank != k or not hr.gap_ratio >= 10:
            bad.append(seed)
    return not bad, f"failures {bad}, min gap ratio {min(ratios):.3g}"


def _random_pl(rng, iset, n=7):
    hats = hat_basis(iset, n)
    a = rng.normal(size=n) + 1j * rng.normal(size=n)
    fn = lambda x: sum(c * h(x) for c, h in zip(a, hats))
    fn.knots = tuple(k for h in hats for k in h.knots)
    return PanelFunction.from_callable(iset, fn), fn.knots


def criterion_7():
    """Finite Hilbert transform: closed form, skew-adjointness, convolution."""
    s = IntervalSet(UNIT)
    x = s.nodes[1:-1]
    ref = np.log(np.abs((1 - x) / (1 + x))) / np.pi
    err = float(np.max(np.abs(finite_hilbert(PanelFunction.constant(s), x) - ref)))
    rng = np.random.default_rng(1007)
    skew = conv = 0.0
    for _ in range(5):
        phi, kn = _random_pl(rng, s)
        psi, _ = _random_pl(rng, s)
        skew = max(skew, abs(hilbert_inner(phi, psi) + np.conj(hilbert_inner(psi, phi))))
        pts = rng.uniform(-0.95, 0.95, size=4)
        conv = max(conv, float(np.max(convolution_residual(phi, psi, pts, knots=kn))))
    ok = err <= 1e-8 and skew <= 1e-8 and conv <= 1e-6
    return ok, f"closed form {err:.2e}, skew {skew:.2e}, convolution {conv:.2e}"


def criterion_8():
    """Loewner, divided-difference and half-plane forms agree."""
    rng = np.random.default_rng(1008)
    s72 = IntervalSet(UNIT, panels=72)
    d_real = float(np.max(np.abs(loewner_form(lambda x: x ** 3, s72, basis=8, check=False).matrix
                                 - loewner_real_form(lambda x: x ** 3, s72, basis=8, check=False).matrix)))
    s = IntervalSet(UNIT)
    d_half = d_route = 0.0
    for k in range(3):
        f0, _ = real_loewner_seed(rng, k)
        L = loewner_form(f0, s, check=False).matrix
        d_real = max(d_real, float(np.max(np.abs(L - loewner_real_form(f0, s, check=False).matrix))))
        H = boundary_form_halfplane(lambda x, f0=f0: f0(x) - 1j, lambda x, f0=f0: f0(x) + 1j, s, tol=np.inf)
        d_half = max(d_half, float(np.max(np.abs(H.matrix - L))))
        d_route = max(d_route, H.discrepancy)
    ok = max(d_real, d_half, d_route) <= 1e-6
    return ok, f"real vs complex {d_real:.2e}, half-plane vs Loewner {d_half:.2e}, series vs projection {d_route:.2e}"


def criterion_9():
    """Loewner certification of x on (-1, 1) and 1/x on [1, 2]."""
    a = loewner_form(lambda x: x, IntervalSet(UNIT))
    b = loewner_form(lambda x: 1 / x, IntervalSet([(1.0, 2.0)]))
    got = (a.inertia.n_neg, a.inertia_refined.n_neg, b.inertia.n_neg, b.inertia_refined.n_neg)
    return got == (0, 0, 1, 1), f"x: {got[0]} -> {got[1]}, 1/x: {got[2]} -> {got[3]}"


def criterion_10():
    """Cauchy transform of nonnegative weights and the dual boundary limit."""
    rng = np.random.default_rng(1010)
    s = IntervalSet(UNIT)
    x = np.linspace(-0.9, 0.9, 37)
    min_im, nonmono = np.inf, 0
    for _ in range(10):
        p = rng.normal(size=3)
        g0 = lambda t, p=p: np.polyval(p, t) ** 2 + 0.05
        z = rng.uniform(-2, 2, size=50) + 1j * 10 ** rng.uniform(-6, 1, size=50)
        min_im = min(min_im, float(np.min(cauchy_transform(g0, z, s).imag)))
        chk = dual_construction(g0, s, x=x)
        min_im = min(min_im, chk.min_imag)
        nonmono += not chk.monotone
    ki = cauchy_transform(PanelFunction.constant(s), 1j)[0]
    err = abs(ki - 0.5j)
    ok = min_im >= -1e-10 and nonmono == 0 and err <= 1e-8
    return ok, f"min Im k {min_im:.2e}, non-monotone {nonmono}, |k(i) - i/2| {err:.2e}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]

_lines = {}


def _line(n, ok, detail, secs):
    return f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {detail} ({secs:.1f}s)"


def _evaluate(n):
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ok, detail = CRITERIA[n - 1]()
    line = _line(n, ok, detail, time.perf_counter() - t0)
    _lines[n] = line
    return ok, line


@pytest.fixture(scope="module", autouse=True)
def _summary(request):
    yield
    tr = request.config.pluginmanager.getplugin("terminalreporter")
    if tr is None:
        return
    tr.write_line("")
    for n in sorted(_lines):
        tr.write_line(_lines[n])


@pytest.mark.parametrize("n", range(1, len(CRITERIA) + 1))
def test_criterion(n):
    ok, line = _evaluate(n)
    print(line)
    assert ok, line


if __name__ == "__main__":
    failed = 0
    for n in range(1, len(CRITERIA) + 1):
        ok, line = _evaluate(n)
        print(line, flush=True)
        failed += not ok
    sys.exit(1 if failed else 0)
