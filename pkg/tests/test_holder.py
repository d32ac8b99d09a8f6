import math

import numpy as np
import pytest

from nck_lab.core import (Density, Element, TraceSpace, power, quasi_norm,
                          random_density, random_element, trace)
from nck_lab.errors import DegenerateInstance, NonCommuting
from nck_lab.holder import (AnalyticFamily, MatrixPolynomial, commutator_norm,
                            h_t_identity_check, harmonic_reproduce,
                            holder_ratio, kernel_quadrature, make_profile,
                            poisson_kernel, random_commuting_unitary,
                            reduction_scaling_check, scan_constant,
                            selfadjoint_reduction, three_lines_check,
                            uniform_convexity_probe)


class TestProfile:
    def test_make_profile_fills_relations(self):
        prof = make_profile(0.5, 2.0, 0.5)
        assert prof.q == pytest.approx(1.0 / ((1 - 0.5) / 0.5 + 0.5 / 2.0))
        assert prof.alpha == pytest.approx(1.0 / 0.5 - 0.5)
        assert 0 < prof.R < prof.p

    def test_infinite_s(self):
        prof = make_profile(0.5, math.inf, 0.25)
        assert prof.alpha == pytest.approx(2.0)
        assert prof.q == pytest.approx(0.5 / 0.75)

    def test_degenerate_exponents_rejected(self):
        # p = q = s collapses the profile; theta outside (0,1) too
        with pytest.raises(ValueError):
            make_profile(0.5, 0.5, 0.5)
        with pytest.raises(ValueError):
            make_profile(0.5, 2.0, 1.0)
        with pytest.raises(ValueError):
            make_profile(0.5, 2.0, 0.5, R=0.7)


class TestKernels:
    def test_point_value(self):
        # sin(pi/2) / (2 (1 - cos(pi/2))) = 1/2
        assert poisson_kernel(0, 0.5, 0.0) == pytest.approx(0.5)

    def test_masses_are_one(self):
        for omega in np.arange(0.1, 0.95, 0.1):
            for k in (0, 1):
                _, w, tail = kernel_quadrature(k, float(omega))
                assert abs(float(np.sum(w)) - 1.0) < 1e-8
                assert tail < 1e-8

    def test_reproduce_exponential(self):
        for a in (0.1, 0.3, 1.0):
            for theta in (0.25, 0.5, 0.75):
                got = harmonic_reproduce(lambda z: np.exp(a * z), theta)
                assert abs(got - np.exp(a * theta)) < 1e-6

    def test_reproduce_linear_and_constant(self):
        assert abs(harmonic_reproduce(lambda z: z, 0.37) - 0.37) < 1e-6
        assert abs(harmonic_reproduce(lambda z: 1.0, 0.62) - 1.0) < 1e-8

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            poisson_kernel(2, 0.5, 0.0)
        with pytest.raises(ValueError):
            poisson_kernel(0, 1.5, 0.0)


class TestThreeLines:
    def test_constant_family(self):
        sp = TraceSpace.standard(3)
        rng = np.random.default_rng(0)
        a = random_element(sp, rng)
        G = AnalyticFamily(f=Element.identity(sp), poly=(a,))
        for (p0, p1) in ((0.5, 2.0), (1.0, math.inf)):
            res = three_lines_check(G, p0, p1, 0.5)
            assert res["holds"]
            assert res["lhs"] == pytest.approx(
                quasi_norm(a, 1.0 / (0.5 / p0 + 0.5 * (0.0 if math.isinf(p1)
                                                       else 1.0 / p1))))

    def test_power_family(self):
        sp = TraceSpace.standard(3)
        rng = np.random.default_rng(1)
        f = random_density(sp, rng)
        G = AnalyticFamily(f=f.element, terms=((Element.identity(sp), 0.0, 1.0,
                                                Element.identity(sp)),))
        res = three_lines_check(G, 0.5, 2.0, 0.4)
        assert res["holds"]

    def test_commutator_family(self):
        # G(z) = V f^{ga(1-z)} x + x W f^{ga(1-z)} with p0 = R < 1
        rng = np.random.default_rng(2)
        for trial in range(10):
            sp = TraceSpace.standard(3)
            f = random_density(sp, rng)
            x = random_element(sp, rng)
            V = random_commuting_unitary(f, rng)
            W = random_commuting_unitary(f, rng)
            ga = 1.2
            G = AnalyticFamily(f=f.element, terms=(
                (V, ga, -ga, Element(sp, x.entries)),
                (Element(sp, x.entries @ W.entries), ga, -ga,
                 Element.identity(sp))))
            res = three_lines_check(G, 0.45, math.inf, float(rng.uniform(0.2, 0.8)))
            assert res["holds"]

    def test_exponent_order_enforced(self):
        sp = TraceSpace.standard(2)
        G = AnalyticFamily(f=Element.identity(sp), poly=(Element.identity(sp),))
        with pytest.raises(ValueError):
            three_lines_check(G, 2.0, 1.0, 0.5)


class TestUniformConvexity:
    def test_parseval_at_p2(self):
        sp = TraceSpace.standard(2)
        rng = np.random.default_rng(3)
        F = MatrixPolynomial(tuple(random_element(sp, rng) for _ in range(3)))
        res = uniform_convexity_probe(F, 2.0)
        assert res["delta_witness"] == pytest.approx(1.0, rel=1e-6)

    def test_scalar_p1_bounded_below(self):
        sp = TraceSpace.standard(1)
        vals = []
        for b in (0.1, 0.3, 0.5):
            F = MatrixPolynomial((Element(sp, [[1.0]]), Element(sp, [[b]])))
            res = uniform_convexity_probe(F, 1.0)
            vals.append(res["delta_witness"])
        assert min(vals) > 0.1

    def test_constant_degenerate(self):
        sp = TraceSpace.standard(2)
        F = MatrixPolynomial((Element.identity(sp),))
        with pytest.raises(DegenerateInstance):
            uniform_convexity_probe(F, 1.0)

    def test_strip_point(self):
        sp = TraceSpace.standard(2)
        rng = np.random.default_rng(4)
        F = MatrixPolynomial(tuple(random_element(sp, rng) for _ in range(2)))
        res = uniform_convexity_probe(F, 1.0, point=("strip", 0.5))
        assert res["delta_witness"] > 0


class TestCommutator:
    def test_commuting_plus(self):
        sp = TraceSpace.standard(3)
        rng = np.random.default_rng(5)
        f = random_density(sp, rng)
        x = power(f.element, 2.0)  # commutes with f
        I = Element.identity(sp)
        got = commutator_norm(x, f, I, I, 0.7, 1.0, sign=1)
        fb = power(f.element, 0.7)
        want = 2.0 * quasi_norm(Element(sp, x.entries @ fb.entries), 1.0)
        assert got == pytest.approx(want, rel=1e-9)

    def test_commuting_minus_vanishes(self):
        sp = TraceSpace.standard(3)
        rng = np.random.default_rng(6)
        f = random_density(sp, rng)
        x = power(f.element, 0.5)
        I = Element.identity(sp)
        got = commutator_norm(x, f, I, I, 1.1, 0.5, sign=-1)
        assert got == pytest.approx(0.0, abs=1e-8)

    def test_beta_zero(self):
        sp = TraceSpace.standard(2)
        rng = np.random.default_rng(7)
        f = random_density(sp, rng)
        x = random_element(sp, rng)
        I = Element.identity(sp)
        got = commutator_norm(x, f, I, I, 0.0, 2.0, sign=1)
        assert got == pytest.approx(2.0 * quasi_norm(x, 2.0), rel=1e-9)

    def test_noncommuting_unitary_rejected(self):
        sp = TraceSpace.standard(2)
        rng = np.random.default_rng(8)
        f = random_density(sp, rng)
        q, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
        V = Element(sp, q)
        with pytest.raises(NonCommuting):
            commutator_norm(Element.identity(sp), f, V, Element.identity(sp),
                            0.5, 1.0)

    def test_degenerate_zero_x(self):
        sp = TraceSpace.standard(2)
        rng = np.random.default_rng(9)
        f = random_density(sp, rng)
        prof = make_profile(0.5, 2.0, 0.5)
        I = Element.identity(sp)
        with pytest.raises(DegenerateInstance):
            holder_ratio(prof, Element.zero(sp), f, I, I)

    def test_scalar_ratio_with_theta_prime_theta(self):
        # 1x1 commutative case: with exponents (1-theta, theta) the ratio is
        # exactly |V + W|^theta <= 2^theta, independent of the weight
        rng = np.random.default_rng(10)
        for w in (1.0, 2.5):
            sp = TraceSpace(1, (w,))
            prof = make_profile(0.5, 2.0, 0.5, R=0.45)
            f = Density(Element(sp, [[1.0 / w]]), full_support=True)
            x = Element(sp, [[1.7 - 0.3j]])
            for _ in range(20):
                V = Element(sp, [[np.exp(1j * rng.uniform(0, 2 * np.pi))]])
                W = Element(sp, [[np.exp(1j * rng.uniform(0, 2 * np.pi))]])
                lhs = commutator_norm(x, f, V, W,
                                      prof.alpha * (1 - prof.theta), prof.q)
                den_p = commutator_norm(x, f, V, W, prof.alpha, prof.p)
                den_s = quasi_norm(x, prof.s)
                if den_p < 1e-12:
                    continue
                ratio = lhs / (den_p ** (1 - prof.theta) * den_s ** prof.theta)
                vw = abs(V.entries[0, 0] + W.entries[0, 0])
                assert ratio == pytest.approx(vw ** prof.theta, rel=1e-9)
                assert ratio <= 2.0 ** prof.theta + 1e-9


class TestScan:
    def test_small_scan_finite(self):
        profs = [make_profile(0.5, 2.0, 0.5, R=0.45)]
        reports = scan_constant(profs, [2, 3], instances=20, seed=0)
        rep = reports[0]
        assert rep["report"].value > 0
        assert set(rep["per_dim_max"]) == {2, 3}
        assert rep["report"].witness["x"].shape[0] in (2, 3)

    def test_scan_deterministic(self):
        profs = [make_profile(0.5, math.inf, 0.25, R=0.45)]
        a = scan_constant(profs, [2], instances=10, seed=5)
        b = scan_constant(profs, [2], instances=10, seed=5)
        assert a[0]["report"].value == b[0]["report"].value


class TestReduction:
    def test_selfadjointness(self):
        sp = TraceSpace.standard(3)
        rng = np.random.default_rng(11)
        x = random_element(sp, rng)
        f = random_density(sp, rng)
        V = random_commuting_unitary(f, rng)
        W = random_commuting_unitary(f, rng)
        xt, ft, vt, wt = selfadjoint_reduction(x, f, V, W)
        assert np.allclose(xt.entries, xt.entries.conj().T)
        assert trace(ft.element).real == pytest.approx(1.0)

    def test_scaling_factors(self):
        rng = np.random.default_rng(12)
        for trial in range(5):
            sp = TraceSpace.standard(3)
            x = random_element(sp, rng)
            f = random_density(sp, rng)
            V = random_commuting_unitary(f, rng)
            W = random_commuting_unitary(f, rng)
            res = reduction_scaling_check(x, f, V, W, alpha=1.5, theta=0.4,
                                          p=0.5, q=0.8)
            assert res["q_residual"] < 1e-9
            assert res["p_residual"] < 1e-9

    def test_theta_zero_factor(self):
        # at theta = 0 both exponents collapse to 2^{1/p - alpha}
        rng = np.random.default_rng(13)
        sp = TraceSpace.standard(2)
        x = random_element(sp, rng)
        f = random_density(sp, rng)
        I = Element.identity(sp)
        res = reduction_scaling_check(x, f, I, I, alpha=1.5, theta=1e-12,
                                      p=0.5, q=0.5)
        assert res["p_residual"] < 1e-9
        assert res["q_residual"] < 1e-6


class TestHTIdentity:
    def test_t_zero(self):
        sp = TraceSpace.standard(3)
        rng = np.random.default_rng(14)
        f = random_density(sp, rng)
        x = random_element(sp, rng)
        assert h_t_identity_check(x, f, gamma=1.3, alpha=1.5, t=0.0) < 1e-10

    def test_scalar_f(self):
        sp = TraceSpace.standard(1)
        f = Density(Element(sp, [[1.0]]), full_support=True)
        x = Element(sp, [[2.0 - 1.0j]])
        assert h_t_identity_check(x, f, gamma=1.5, alpha=2.0, t=0.7) < 1e-12

    def test_random_t(self):
        rng = np.random.default_rng(15)
        sp = TraceSpace.standard(4)
        for _ in range(10):
            f = random_density(sp, rng)
            x = random_element(sp, rng)
            t = float(rng.uniform(-3, 3))
            assert h_t_identity_check(x, f, gamma=1.4, alpha=1.5, t=t) < 1e-9
