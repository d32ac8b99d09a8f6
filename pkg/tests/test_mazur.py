import numpy as np
import pytest

from nck_lab.core import (Density, Element, TraceSpace, quasi_norm,
                          random_density, random_element, trace)
from nck_lab.errors import DegenerateInstance
from nck_lab.mazur import (acc_check, holder_exponent_estimate,
                           kosaki_remark_check, mazur_map,
                           squares_lipschitz_check)


def _unit(sp, rng, p):
    g = random_element(sp, rng)
    return (1.0 / quasi_norm(g, p)) * g


class TestMazurMap:
    def test_p_equals_q_identity(self):
        sp = TraceSpace.standard(3)
        rng = np.random.default_rng(0)
        x = random_element(sp, rng)
        out = mazur_map(x, 1.0, 1.0)
        assert np.allclose(out.entries, x.entries)

    def test_positive_diagonal(self):
        sp = TraceSpace.standard(2)
        x = Element(sp, np.diag([2.0, 3.0]).astype(complex))
        out = mazur_map(x, 2.0, 1.0)
        assert np.allclose(out.entries, np.diag([4.0, 9.0]))

    def test_sphere_to_sphere(self):
        rng = np.random.default_rng(1)
        for (p, q) in ((0.5, 1.0), (1.0, 2.0), (2.0, 0.5)):
            for _ in range(20):
                sp = TraceSpace.standard(int(rng.integers(1, 5)))
                x = _unit(sp, rng, p)
                y = mazur_map(x, p, q)
                assert abs(quasi_norm(y, q) - 1.0) < 1e-10

    def test_general_norm_relation(self):
        # ||M(x)||_q = ||x||_p^{p/q} off the sphere too
        sp = TraceSpace.standard(3)
        rng = np.random.default_rng(2)
        x = random_element(sp, rng)
        for (p, q) in ((0.5, 1.5), (2.0, 1.0)):
            got = quasi_norm(mazur_map(x, p, q), q)
            assert got == pytest.approx(quasi_norm(x, p) ** (p / q), rel=1e-9)

    def test_bad_exponents(self):
        sp = TraceSpace.standard(2)
        with pytest.raises(ValueError):
            mazur_map(Element.identity(sp), 0.0, 1.0)


class TestExponentEstimate:
    def test_identity_slope(self):
        est = holder_exponent_estimate(1.0, 1.0, 3, pairs=32, seed=0)
        assert abs(est.exponent - 1.0) < 0.05
        assert est.regression_r2 > 0.99

    def test_smooth_direction_slope(self):
        est = holder_exponent_estimate(2.0, 1.0, 3, pairs=48, seed=1)
        assert est.exponent >= 0.95 - 0.05

    def test_deterministic(self):
        a = holder_exponent_estimate(1.0, 2.0, 3, pairs=32, seed=7)
        b = holder_exponent_estimate(1.0, 2.0, 3, pairs=32, seed=7)
        assert a.exponent == b.exponent

    def test_too_few_pairs(self):
        with pytest.raises(ValueError):
            holder_exponent_estimate(1.0, 2.0, 2, pairs=4)


class TestAccCheck:
    def test_commuting_degenerate(self):
        sp = TraceSpace.standard(3)
        rng = np.random.default_rng(3)
        f = random_density(sp, rng)
        # x = f commutes; the minus-sign commutator vanishes on both sides
        x = f.element
        with pytest.raises(DegenerateInstance):
            acc_check(x, f, 0.5, 1.0, gamma=0.1, sign=-1)

    def test_scalar_ratio_bounded(self):
        # 1x1 case with gamma = p/q reduces to the scalar power inequality
        sp = TraceSpace.standard(1)
        rng = np.random.default_rng(4)
        p, q = 0.5, 1.0
        for _ in range(50):
            a = float(rng.uniform(0.1, 3.0))
            x = Element(sp, [[1.0]])
            f = Density(Element(sp, [[1.0]]), full_support=True)
            # scale-insensitive scalar instance through the plus sign
            r = acc_check(x, f, p, q, gamma=p / q, sign=1)
            assert r <= 2.0 + 1e-9

    def test_grid_bounded(self):
        # gamma slightly below p^2 / (2q): ratio stays bounded over a scan
        rng = np.random.default_rng(5)
        p, q = 0.5, 1.0
        gamma = (p * p / (2.0 * q)) * 0.95
        worst = 0.0
        for _ in range(200):
            sp = TraceSpace.standard(3)
            f = random_density(sp, rng)
            x = random_element(sp, rng, hermitian=True)
            x = (1.0 / quasi_norm(x, np.inf)) * x
            sign = int(rng.choice([-1, 1]))
            try:
                r = acc_check(x, f, p, q, gamma, sign)
            except DegenerateInstance:
                continue
            worst = max(worst, r)
        assert np.isfinite(worst) and worst < 50.0


class TestSquares:
    def test_equal_inputs(self):
        sp = TraceSpace.standard(2)
        rng = np.random.default_rng(6)
        g = _unit(sp, rng, 1.0)
        res = squares_lipschitz_check(g, g, 1.0)
        assert res["holds"] and res["lhs"] == pytest.approx(0.0, abs=1e-12)

    def test_opposite_inputs(self):
        sp = TraceSpace.standard(2)
        rng = np.random.default_rng(7)
        g = _unit(sp, rng, 0.5)
        res = squares_lipschitz_check(g, -1.0 * g, 0.5)
        assert res["holds"] and res["lhs"] == pytest.approx(0.0, abs=1e-12)

    def test_random_scan(self):
        rng = np.random.default_rng(8)
        for p in (0.5, 1.0):
            for _ in range(100):
                sp = TraceSpace.standard(int(rng.integers(1, 5)))
                g = _unit(sp, rng, p)
                h = _unit(sp, rng, p)
                assert squares_lipschitz_check(g, h, p)["holds"]


class TestKosaki:
    def test_commuting(self):
        sp = TraceSpace.standard(3)
        rng = np.random.default_rng(9)
        f = random_density(sp, rng)
        x = f.element  # commutes with f
        res = kosaki_remark_check(x, f, 0.5)
        assert res["holds"] and res["lhs"] == pytest.approx(0.0, abs=1e-10)

    def test_unitary_diagonal_x(self):
        sp = TraceSpace.standard(3)
        rng = np.random.default_rng(10)
        f = random_density(sp, rng)
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=3))
        x = Element(sp, np.diag(phases))
        assert kosaki_remark_check(x, f, 0.5)["holds"]

    def test_random_scan(self):
        rng = np.random.default_rng(11)
        for p in (0.25, 0.5, 0.75):
            for _ in range(100):
                sp = TraceSpace.standard(int(rng.integers(1, 5)))
                f = random_density(sp, rng)
                x = random_element(sp, rng)
                nx = quasi_norm(x, np.inf)
                if nx > 0:
                    x = (1.0 / nx) * x
                assert kosaki_remark_check(x, f, p)["holds"]

    def test_p_range_enforced(self):
        sp = TraceSpace.standard(2)
        f = Density(Element(sp, np.eye(2) / 2.0), full_support=True)
        with pytest.raises(ValueError):
            kosaki_remark_check(Element.identity(sp), f, 1.0)
