import numpy as np
import pytest

from conftest import assert_same_tfm, oracle_points, safe_eval

from dstk.analysis import (
    StabilityRegion,
    h2_norm,
    is_minimum_phase,
    is_stable,
    mcmillan_degree,
    minimality_report,
    minreal,
    normal_rank,
    poles,
    stability_region,
    zeros,
)
from dstk.exceptions import NonstrictlyProperContinuous, UnstableSystem
from dstk.ops import RationalMatrixData, inverse, parallel, realize_rational, series, transpose_dual
from dstk.system import eval_tfm, make_system, random_system


def lag(a=1.0, domain="continuous"):
    """1/(s+a)."""
    return make_system([[-a]], [[1.0]], [[1.0]], [[-1.0]], [[0.0]], domain)


def derivative_sys():
    """Minimal order-2 realization of G(s) = s."""
    return make_system(np.eye(2), [[0.0, 1.0], [0.0, 0.0]], [[0.0], [1.0]], [[1.0, 0.0]], [[0.0]], "continuous")


def rational(entries, p, m, domain="continuous"):
    return realize_rational(RationalMatrixData(p, m, entries), domain)


class TestStabilityRegion:
    def test_kinds(self):
        lhp = StabilityRegion.left_half_plane()
        assert lhp.contains(-0.1) and not lhp.contains(0.0) and not lhp.contains(1j)
        disk = StabilityRegion.unit_disk()
        assert disk.contains(0.5j) and not disk.contains(1.0)
        hp = StabilityRegion.half_plane(-2.0)
        assert hp.contains(-3.0) and not hp.contains(-1.0)
        dk = StabilityRegion.disk(2.0)
        assert dk.contains(1.5) and not dk.contains(2.5)
        assert lhp.contains(lhp.real_point()) and disk.contains(disk.real_point())

    def test_boundary_and_reflect(self):
        lhp = StabilityRegion.left_half_plane()
        assert lhp.on_boundary(1e-12 + 3j)
        assert lhp.contains(lhp.reflect(2.0 + 1j))
        disk = StabilityRegion.unit_disk()
        assert disk.on_boundary(np.exp(0.3j))
        assert disk.contains(disk.reflect(3.0 - 2j))
        assert disk.contains(disk.reflect(1.0))  # boundary point pulled inside

    def test_domain_map(self):
        assert stability_region("continuous").is_half_plane
        assert not stability_region("discrete").is_half_plane


class TestNormalRank:
    def test_column_of_one_and_s(self):
        g = rational([[([1.0], [1.0])], [([0.0, 1.0], [1.0])]], 2, 1)
        assert normal_rank(g) == 1

    def test_zero_static(self):
        g = make_system(np.zeros((0, 0)), None, np.zeros((0, 4)), np.zeros((2, 0)), np.zeros((2, 4)), "continuous")
        assert normal_rank(g) == 0

    def test_diag_mixed(self):
        g = rational(
            [[([1.0], [1.0, 1.0]), ([0.0], [1.0])], [([0.0], [1.0]), ([0.0, 1.0], [1.0])]], 2, 2
        )
        assert normal_rank(g) == 2

    def test_dual_invariance(self, rng):
        for _ in range(5):
            g = random_system(int(rng.integers(0, 5)), 2, 3, "continuous", rng=rng)
            assert normal_rank(g) == normal_rank(transpose_dual(g))


class TestPoles:
    def test_lag(self):
        info = poles(lag(2.0))
        assert np.allclose(info.finite, [-2.0])
        assert info.infinite_count == 0 and info.total == 1

    def test_derivative(self):
        info = poles(derivative_sys())
        assert info.finite == [] and info.infinite_count == 1 and info.total == 1

    def test_double_pole_at_zero(self):
        g = make_system([[0.0, 1.0], [0.0, 0.0]], np.eye(2), [[0.0], [1.0]], [[1.0, 0.0]], [[0.0]], "continuous")
        info = poles(g)
        assert np.allclose(info.finite, [0.0, 0.0]) and info.total == 2


class TestZeros:
    def test_biproper_lag(self):
        # (s+1)/(s+2)
        g = make_system([[-2.0]], [[1.0]], [[1.0]], [[1.0]], [[1.0]], "continuous")
        info = zeros(g)
        assert np.allclose(info.finite, [-1.0], atol=1e-8)

    def test_derivative_zero_at_origin(self):
        info = zeros(derivative_sys())
        assert np.allclose(info.finite, [0.0], atol=1e-10)
        assert info.infinite_count == 0
        np_total = poles(derivative_sys()).total
        assert np_total == info.total + info.kronecker_ranks[0] + info.kronecker_ranks[1]

    def test_wide_no_zeros(self):
        g = rational([[([1.0], [1.0]), ([0.0, 1.0], [1.0])]], 1, 2)
        info = zeros(g)
        assert info.total == 0
        assert poles(g).total == 1
        assert info.kronecker_ranks == (1, 0)

    def test_identity_random(self, rng):
        for _ in range(10):
            n = int(rng.integers(0, 6))
            proper = n < 2 or rng.uniform() < 0.6
            g = random_system(n, int(rng.integers(1, 4)), int(rng.integers(1, 4)),
                              "continuous" if rng.uniform() < 0.5 else "discrete",
                              proper=proper, rng=rng)
            zp = poles(g)
            zz = zeros(g)
            assert zp.total == zz.total + zz.kronecker_ranks[0] + zz.kronecker_ranks[1]


class TestDegreeAndPredicates:
    def test_static(self):
        g = make_system(np.zeros((0, 0)), None, np.zeros((0, 1)), np.zeros((1, 0)), [[3.0]], "continuous")
        assert mcmillan_degree(g) == 0

    def test_derivative(self):
        assert mcmillan_degree(derivative_sys()) == 1

    def test_series_degree(self):
        assert mcmillan_degree(series(lag(1.0), lag(2.0))) == 2

    def test_stability(self):
        assert is_stable(lag(1.0))
        assert not is_stable(derivative_sys())
        g = make_system([[-2.0]], [[1.0]], [[1.0]], [[3.0]], [[1.0]], "continuous")  # (s-1)/(s+2)
        assert is_stable(g) and not is_minimum_phase(g)

    def test_proper_no_infinite_poles(self, rng):
        for _ in range(5):
            g = random_system(int(rng.integers(0, 5)), 2, 2, "discrete", proper=True, rng=rng)
            assert poles(g).infinite_count == 0

    def test_degree_bounded_by_order(self, rng):
        for _ in range(8):
            n = int(rng.integers(0, 6))
            g = random_system(n, 1, 2, "continuous", proper=n < 2 or rng.uniform() < 0.5, rng=rng)
            assert mcmillan_degree(g) <= g.n


class TestMinimalityReport:
    def test_minimal_lag(self):
        rep = minimality_report(lag())
        assert rep.minimal and rep.irreducible and rep.order == 1

    def test_uncontrollable_block(self, rng):
        # stable state with zero input rows stays finite-uncontrollable
        g = lag()
        A = np.array([[-1.0, 0.0], [0.0, -3.0]])
        B = np.array([[1.0], [0.0]])
        C = np.array([[-1.0, 1.0]])
        bad = make_system(A, np.eye(2), B, C, [[0.0]], "continuous")
        rep = minimality_report(bad)
        assert not rep.finite_controllable
        assert rep.finite_observable

    def test_nondynamic_mode(self):
        # N(E) = span{1}, A N(E) = span{1}, R(E) = {0}
        g = make_system([[1.0]], [[0.0]], [[1.0]], [[1.0]], [[0.0]], "continuous")
        rep = minimality_report(g)
        assert not rep.no_nondynamic_modes
        assert rep.irreducible


class TestMinreal:
    def test_already_minimal(self, rng):
        g = lag()
        gm = minreal(g)
        assert gm.n == g.n
        assert_same_tfm(gm, g, rng)

    def test_duplicate_states_removed(self, rng):
        g = parallel(lag(), lag())
        gm = minreal(g)
        assert gm.n == 1
        assert abs(eval_tfm(gm, 1.0)[0, 0] - 1.0) < 1e-10  # 2/(s+1) at 1

    def test_inverse_realization_reduced(self, rng):
        # inverse of 1/(s+1) is s+1: McMillan degree 1 but minimal order 2
        g = inverse(lag())
        gm = minreal(g)
        assert gm.n == 2
        assert abs(eval_tfm(gm, 3.0)[0, 0] - 4.0) < 1e-10
        assert minimality_report(gm).minimal

    def test_tfm_preserved_and_reports_minimal(self, rng):
        for _ in range(8):
            n = int(rng.integers(0, 6))
            proper = n < 2 or rng.uniform() < 0.6
            dom = "continuous" if rng.uniform() < 0.5 else "discrete"
            g = random_system(n, int(rng.integers(1, 3)), int(rng.integers(1, 3)), dom, proper=proper, rng=rng)
            gm = minreal(g)
            assert gm.n <= g.n
            assert minimality_report(gm).minimal
            for lam in oracle_points(rng, 7):
                lam, a = safe_eval(gm, lam, rng)
                b = eval_tfm(g, lam)
                assert np.linalg.norm(a - b) <= 1e-8 * (1 + np.linalg.norm(b))

    def test_idempotent_order(self, rng):
        g = parallel(lag(), series(lag(), lag(2.0)))
        g1 = minreal(g)
        g2 = minreal(g1)
        assert g2.n == g1.n

    def test_degree_equals_order_iff_minimal_proper(self, rng):
        g = parallel(lag(), lag())  # order 2, degree 1
        assert mcmillan_degree(g) == 1
        gm = minreal(g)
        assert gm.n == 1 == mcmillan_degree(gm)


class TestH2Norm:
    def test_lag_analytic(self):
        # (1/2pi) integral of 1/(1+w^2) dw = 1/2, so the norm is 1/sqrt(2)
        assert abs(h2_norm(lag()) - 1.0 / np.sqrt(2.0)) < 1e-6

    def test_lag_quadrature_cross_check(self):
        w = np.logspace(-4, 4, 20001)
        vals = 1.0 / (1.0 + w**2)
        integral = 2.0 * np.trapezoid(vals, w) / (2.0 * np.pi)
        assert abs(h2_norm(lag()) - np.sqrt(integral)) < 1e-4

    def test_zero_system(self):
        g = make_system(np.zeros((0, 0)), None, np.zeros((0, 2)), np.zeros((1, 0)), np.zeros((1, 2)), "continuous")
        assert h2_norm(g) == 0.0

    def test_discrete_delay(self):
        # impulse response {0, 1, 0, ...} has unit l2 norm
        g = make_system([[0.0]], [[1.0]], [[1.0]], [[-1.0]], [[0.0]], "discrete")
        assert abs(h2_norm(g) - 1.0) < 1e-10

    def test_errors(self):
        unstable = make_system([[1.0]], [[1.0]], [[1.0]], [[-1.0]], [[0.0]], "continuous")
        with pytest.raises(UnstableSystem):
            h2_norm(unstable)
        biproper = make_system([[-1.0]], [[1.0]], [[1.0]], [[-1.0]], [[1.0]], "continuous")
        with pytest.raises(NonstrictlyProperContinuous):
            h2_norm(biproper)
