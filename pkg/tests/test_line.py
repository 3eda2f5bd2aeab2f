import warnings

import numpy as np
import pytest

from kappa.errors import EvaluationTooCloseToLine, InputError, NodeCoincidence
from kappa.forms import inertia
from kappa.instances import real_loewner_seed
from kappa.line import (IntervalSet, PanelFunction, boundary_form_halfplane,
                        cauchy_transform, convolution_residual,
                        dual_construction, dual_loewner_form, finite_hilbert,
                        hat_basis, hilbert_inner, loewner_form,
                        loewner_real_form, parseval_defect)

UNIT = [(-1.0, 1.0)]


def random_piecewise_linear(rng, iset, n=7):
    """Random combination of hats; real and imaginary parts independent."""
    hats = hat_basis(iset, n)
    a = rng.normal(size=n) + 1j * rng.normal(size=n)
    fn = lambda x: sum(c * h(x) for c, h in zip(a, hats))
    fn.knots = tuple(k for h in hats for k in h.knots)
    return PanelFunction.from_callable(iset, fn), fn.knots


class TestIntervalSet:
    def test_overlap_rejected(self):
        with pytest.raises(InputError):
            IntervalSet([(0.0, 1.0), (0.5, 2.0)])

    def test_empty_interval_rejected(self):
        with pytest.raises(InputError):
            IntervalSet([(1.0, 1.0)])

    def test_nodes_increasing(self):
        s = IntervalSet([(2.0, 3.0), (-1.0, 0.0)], panels=8)
        assert np.all(np.diff(s.nodes) >= 0) and s.n_panels == 16
        assert s.refined().panels == 16

    def test_quadrature_length(self):
        s = IntervalSet([(-1.0, 0.0), (1.0, 3.0)], panels=4)
        x, w, _ = s.quadrature()
        np.testing.assert_allclose(w.sum(), 3.0)
        np.testing.assert_allclose(np.sum(w * x ** 3), (0 - 1) / 4 + (81 - 1) / 4)

    def test_knots_off_grid_rejected(self):
        # 7 hats need panels divisible by 8
        with pytest.raises(InputError):
            loewner_form(lambda x: x, IntervalSet(UNIT, panels=30), check=False)


class TestFiniteHilbert:
    def test_constant_at_origin(self):
        F = PanelFunction.constant(IntervalSet(UNIT))
        assert abs(finite_hilbert(F, 0.0)[0]) <= 1e-14

    def test_constant_log_profile(self):
        F = PanelFunction.constant(IntervalSet(UNIT))
        x = np.linspace(-0.97, 0.97, 41)
        ref = np.log(np.abs((1 - x) / (1 + x))) / np.pi
        np.testing.assert_allclose(finite_hilbert(F, x).real, ref, atol=1e-12)
        np.testing.assert_allclose(finite_hilbert(F, 0.5).real, np.log(1 / 3) / np.pi, atol=1e-14)

    def test_linear(self):
        # PV int t/(t - x) = 2 + x ln|(1-x)/(1+x)|
        F = PanelFunction.from_callable(IntervalSet(UNIT), lambda t: t)
        x = np.array([-0.6, 0.1, 0.75])
        ref = (2 + x * np.log(np.abs((1 - x) / (1 + x)))) / np.pi
        np.testing.assert_allclose(finite_hilbert(F, x).real, ref, atol=1e-12)

    def test_outside(self):
        F = PanelFunction.constant(IntervalSet(UNIT))
        x = np.array([-3.0, 1.5, 10.0])
        ref = np.log(np.abs((1 - x) / (1 + x))) / np.pi
        np.testing.assert_allclose(finite_hilbert(F, x).real, ref, atol=1e-13)

    def test_node_coincidence_warns(self):
        F = PanelFunction.constant(IntervalSet(UNIT))
        with pytest.warns(NodeCoincidence):
            v = finite_hilbert(F, 1.0)
        assert np.isfinite(v).all()

    def test_continuous_node_silent(self):
        # nodes inside the interval carry no jump for a constant
        s = IntervalSet(UNIT, panels=8)
        F = PanelFunction.constant(s)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            finite_hilbert(F, s.nodes[3])

    def test_skew_adjoint(self):
        rng = np.random.default_rng(0)
        for iv in (UNIT, [(-2.0, -0.5), (0.0, 1.5)]):
            s = IntervalSet(iv, panels=16)
            for _ in range(5):
                F = PanelFunction(s, rng.normal(size=(s.n_panels, s.degree + 1)))
                G = PanelFunction(s, rng.normal(size=(s.n_panels, s.degree + 1)))
                assert abs(hilbert_inner(F, G) + np.conj(hilbert_inner(G, F))) <= 1e-8

    def test_inner_matches_pointwise(self):
        rng = np.random.default_rng(1)
        s = IntervalSet(UNIT, panels=16)
        F, _ = random_piecewise_linear(rng, s)
        G, _ = random_piecewise_linear(rng, s)
        x, w, _ = s.quadrature(24)
        ref = np.sum(w * finite_hilbert(F, x) * np.conj(G(x)))
        assert abs(hilbert_inner(F, G) - ref) <= 1e-8


class TestConvolution:
    def test_random_piecewise_linear(self):
        rng = np.random.default_rng(2)
        s = IntervalSet(UNIT, panels=64)
        x = np.array([-0.81, -0.33, 0.05, 0.42, 0.9])
        for _ in range(3):
            phi, kn = random_piecewise_linear(rng, s)
            psi, _ = random_piecewise_linear(rng, s)
            assert np.max(convolution_residual(phi, psi, x, knots=kn)) <= 1e-6


class TestLoewner:
    def test_real_constant_is_zero(self):
        L = loewner_form(lambda x: 0 * x + 2.5, IntervalSet(UNIT))
        np.testing.assert_allclose(L.matrix, 0.0, atol=1e-10)

    def test_identity(self):
        s = IntervalSet(UNIT)
        L = loewner_form(lambda x: x, s)
        hats = hat_basis(s)
        # kernel 1: L[p, q] = int phi_p int phi_q
        m = np.array([(h.right - h.left) / 2 for h in hats])
        np.testing.assert_allclose(L.matrix, np.outer(m, m), atol=1e-10)
        assert L.inertia.n_neg == 0 and L.inertia_refined.n_neg == 0

    def test_inverse(self):
        s = IntervalSet([(1.0, 2.0)])
        L = loewner_form(lambda x: 1 / x, s)
        assert L.inertia.n_neg == 1 and L.inertia.n_pos == 0
        assert L.inertia_refined.n_neg == 1
        # kernel -1/(st)
        x, w, _ = s.quadrature(16)
        v = np.array([np.sum(w * h(x) / x) for h in hat_basis(s)])
        np.testing.assert_allclose(L.matrix, -np.outer(v, v), atol=1e-9)

    def test_real_form_agrees_identity(self):
        s = IntervalSet(UNIT)
        a = loewner_form(lambda x: x, s).matrix
        b = loewner_real_form(lambda x: x, s).matrix
        assert np.max(np.abs(a - b)) <= 1e-7

    def test_real_form_agrees_cubic(self):
        s = IntervalSet(UNIT, panels=72)
        a = loewner_form(lambda x: x ** 3, s, basis=8).matrix
        b = loewner_real_form(lambda x: x ** 3, s, basis=8).matrix
        assert np.max(np.abs(a - b)) <= 1e-6

    def test_real_form_rejects_complex(self):
        with pytest.raises(InputError):
            loewner_real_form(lambda x: x + 1j, IntervalSet(UNIT))

    def test_real_form_constant(self):
        np.testing.assert_allclose(loewner_real_form(lambda x: 0 * x - 1.0, IntervalSet(UNIT)).matrix,
                                   0.0, atol=1e-14)

    @pytest.mark.parametrize("kappa", [0, 1, 2])
    def test_seeded(self, kappa):
        for seed in range(3):
            rng = np.random.default_rng(seed)
            f0, _ = real_loewner_seed(rng, kappa)
            counts = []
            for n in (3, 7, 11):
                s = IntervalSet(UNIT, panels=(n + 1) * -(-64 // (n + 1)))
                counts.append(loewner_form(f0, s, basis=n).inertia.n_neg)
            assert max(counts) <= kappa
            assert counts[-1] == kappa

    def test_two_intervals(self):
        # 1/x on two intervals away from the pole is still one negative square
        s = IntervalSet([(-2.0, -1.0), (1.0, 2.0)])
        assert loewner_form(lambda x: 1 / x, s).inertia.n_neg == 1


class TestDualForm:
    def test_zero(self):
        L = dual_loewner_form(lambda x: 0 * x, IntervalSet(UNIT))
        np.testing.assert_allclose(L.matrix, 0.0)

    @pytest.mark.filterwarnings("ignore::kappa.errors.NodeCoincidence")
    def test_constant_matches_loewner(self):
        s = IntervalSet(UNIT)
        one = PanelFunction.constant(s)
        # -H 1 has log singularities at the ends, sampled after the shift
        f0 = lambda x: -finite_hilbert(one, x).real
        a = dual_loewner_form(lambda x: 0 * x + 1.0, s)
        b = loewner_form(f0, s)
        assert a.inertia.n_neg == b.inertia.n_neg

    def test_rejects_complex(self):
        with pytest.raises(InputError):
            dual_loewner_form(lambda x: 1j + 0 * x, IntervalSet(UNIT))


class TestCauchy:
    def test_zero(self):
        assert cauchy_transform(lambda x: 0 * x, 1j, IntervalSet(UNIT))[0] == 0

    def test_unit_at_i(self):
        k = cauchy_transform(PanelFunction.constant(IntervalSet(UNIT)), 1j)[0]
        assert abs(k - 0.5j) <= 1e-12

    def test_closed_form(self):
        z = np.array([0.3 + 1e-3j, -2 + 0.5j, 0.9 + 3j])
        ref = np.log((z - 1) / (z + 1)) / np.pi
        k = cauchy_transform(PanelFunction.constant(IntervalSet(UNIT)), z)
        np.testing.assert_allclose(k, ref, atol=1e-12)

    def test_nonnegative_imaginary_part(self):
        rng = np.random.default_rng(3)
        s = IntervalSet(UNIT)
        for _ in range(5):
            p = rng.normal(size=3)
            g0 = lambda x, p=p: np.polyval(p, x) ** 2 + 0.05
            z = rng.uniform(-2, 2, size=20) + 1j * 10 ** rng.uniform(-6, 1, size=20)
            assert np.min(cauchy_transform(g0, z, s).imag) >= -1e-10

    def test_too_close(self):
        with pytest.raises(EvaluationTooCloseToLine):
            cauchy_transform(lambda x: x, 0.2 + 1e-12j, IntervalSet(UNIT))

    def test_callable_needs_set(self):
        with pytest.raises(InputError):
            cauchy_transform(lambda x: x, 1j)


class TestDualConstruction:
    def test_constant(self):
        chk = dual_construction(lambda x: 0 * x + 1.0, IntervalSet(UNIT))
        assert chk.monotone and chk.min_imag >= -1e-10
        assert chk.defects[-1] <= 1e-3

    def test_random_weights(self):
        rng = np.random.default_rng(4)
        s = IntervalSet(UNIT)
        x = np.linspace(-0.9, 0.9, 37)
        for _ in range(5):
            p = rng.normal(size=3)
            chk = dual_construction(lambda t, p=p: np.polyval(p, t) ** 2 + 0.1, s, x=x)
            assert chk.monotone and chk.min_imag >= -1e-10


class TestHalfplane:
    def test_nonnegative(self):
        s = IntervalSet(UNIT)
        form = boundary_form_halfplane(lambda x: 0 * x, lambda x: 0 * x + 1.0, s)
        assert form.inertia.n_neg == 0 and form.discrepancy <= 1e-6

    def test_matches_loewner(self):
        s = IntervalSet(UNIT)
        for f0 in (lambda x: x, lambda x: x ** 3 - 0.5 * x, lambda x: 1 / (x - 1.5)):
            H = boundary_form_halfplane(lambda x: f0(x) - 1j, lambda x: f0(x) + 1j, s)
            L = loewner_form(f0, s, check=False)
            assert np.max(np.abs(H.matrix - L.matrix)) <= 1e-6
            assert H.discrepancy <= 1e-6

    def test_inner_function(self):
        S = lambda x: (x - 2j) / (x + 2j)
        for panels in (64, 128):
            form = boundary_form_halfplane(S, lambda x: 0 * x + 1.0, IntervalSet(UNIT, panels=panels))
            assert form.inertia.n_neg == 0

    def test_parseval(self):
        s = IntervalSet(UNIT)
        # smooth as functions on the whole line, i.e. vanishing at the ends
        for fn in (lambda x: (1 - x ** 2) ** 2, lambda x: np.cos(np.pi * x / 2) ** 2 * np.exp(1j * x)):
            assert 0 <= parseval_defect(fn, s, 128) <= 1e-6

    def test_parseval_jump_converges_slowly(self):
        # the indicator jumps at the ends: defect only halves as J doubles
        s = IntervalSet(UNIT)
        d = [parseval_defect(lambda x: 1 + 0 * x, s, J) for J in (64, 128)]
        assert d[1] < d[0] and d[1] > 1e-3

    def test_parseval_monotone(self):
        s = IntervalSet(UNIT)
        fn = lambda x: np.cos(2 * x) + 1j * x
        d = [parseval_defect(fn, s, J) for J in (4, 16, 64, 128)]
        assert all(b <= a + 1e-14 for a, b in zip(d, d[1:]))
