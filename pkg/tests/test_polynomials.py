import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rsequilibria.errors import DomainError, ModeError, ParameterError, SingularityError
from rsequilibria.polynomials import (
    AskeyWilsonPolynomial,
    AWParams,
    CouplingParams,
    WilsonParams,
    aw_coefficient,
    aw_difference_apply,
    aw_eigenvalue,
    aw_eval,
    aw_eval_factored,
    aw_params_from_couplings,
    aw_weight,
    cosine_series,
    difference_residual,
    gram_schmidt_oracle,
    polynomial_for,
    wilson_difference_apply,
    wilson_eigenvalue,
    wilson_eval,
    wilson_eval_factored,
    wilson_params_from_couplings,
)
from rsequilibria.roots import find_zeros

# Frozen values from mpmath.qhyper / mpmath.hyper at 50 digits (independent of this package).
TRIG = CouplingParams("trig", 0.3, 0.4, 0.5, 0.6, 0.7)
AW3_AT_037 = 0.41151154350981429468
AW3_AT_COMPLEX = 2.4257650630575686867 - 2.8731444723403776372j  # x = 0.2 + 0.3i
WILSON_1234_N2_AT_07 = 31.435554545454545455

LN2_HALF = math.log(2) / 2
couplings = st.floats(0.05, 5.0)


def trig_draw(rng):
    return CouplingParams("trig", *rng.uniform(0.05, 5, 5))


def rational_draw(rng):
    return CouplingParams("rational", *rng.uniform(0.05, 5, 5))


def e_sym(vals, k):
    from itertools import combinations

    return sum(math.prod(cmb) for cmb in combinations(vals, k))


class TestCouplingParams:
    @pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
    def test_rejects_nonpositive(self, bad):
        with pytest.raises(ParameterError):
            CouplingParams("trig", bad, 1, 1, 1, 1)
        with pytest.raises(ParameterError):
            CouplingParams("rational", 1, 1, 1, bad, 1)

    def test_unknown_mode(self):
        with pytest.raises(ParameterError):
            CouplingParams("elliptic", 1, 1, 1, 1, 1)

    @given(couplings, couplings, couplings, couplings, couplings)
    def test_g_hat(self, g, g1, g2, g3, g4):
        c = CouplingParams("trig", g, g1, g2, g3, g4)
        assert c.g_hat == g1 + g2 + g3 + g4 - g


class TestParameterMaps:
    def test_ln2_substitution(self):
        p = aw_params_from_couplings(CouplingParams("trig", *[LN2_HALF] * 5))
        for got, want in zip((p.q, p.a, p.b, p.c, p.d), (0.5, 0.5, -0.5, 0.5, -0.5)):
            assert got == pytest.approx(want, rel=1e-15)

    @given(couplings, couplings, couplings, couplings, couplings)
    def test_constraints_hold(self, g, g1, g2, g3, g4):
        p = aw_params_from_couplings(CouplingParams("trig", g, g1, g2, g3, g4))
        assert 0 < p.q < 1
        assert p.a > 0 and p.c > 0 and p.b < 0 and p.d < 0
        assert all(0 < abs(v) < 1 for v in (p.a, p.b, p.c, p.d))

    def test_mode_mismatch(self):
        with pytest.raises(ModeError):
            aw_params_from_couplings(CouplingParams("rational", 1, 1, 1, 1, 1))
        with pytest.raises(ModeError):
            wilson_params_from_couplings(TRIG)

    def test_wilson_rescaled(self):
        w = wilson_params_from_couplings(CouplingParams("rational", 2, 1, 2, 3, 4))
        assert (w.a, w.b, w.c, w.d) == (0.5, 1.0, 1.5, 2.0)

    def test_param_validation(self):
        with pytest.raises(ParameterError):
            AWParams(1.2, 0.5, 0.5, 0.5, 0.5)
        with pytest.raises(ParameterError):
            AWParams(0.5, 0.0, 0.5, 0.5, 0.5)
        with pytest.raises(ParameterError):
            WilsonParams(1, 2, -3, 4)


class TestAskeyWilson:
    P = aw_params_from_couplings(TRIG)

    def test_degree_zero(self):
        for x in (0.1, 0.7, 0.3 + 0.4j):
            assert aw_eval(self.P, 0, x) == pytest.approx(1.0, rel=1e-15)

    def test_frozen_values(self):
        assert aw_eval(self.P, 3, 0.37) == pytest.approx(AW3_AT_037, rel=1e-13)
        assert abs(aw_eval(self.P, 3, 0.2 + 0.3j) - AW3_AT_COMPLEX) < 1e-13 * abs(AW3_AT_COMPLEX)

    @pytest.mark.parametrize("n", range(1, 6))
    def test_nested_matches_series(self, n):
        poly = polynomial_for(TRIG, n)
        for x in (0.05, 0.4, 1.2, 0.3 + 0.5j):
            a, b = complex(poly.evaluate(x)), complex(poly.evaluate_series(x))
            assert abs(a - b) < 1e-13 * (1 + abs(b))

    @pytest.mark.parametrize("n", range(1, 6))
    def test_monic_in_cos(self, n):
        """Leading coefficient 1 on cos 2nx: sample on a grid and project."""
        poly = AskeyWilsonPolynomial(self.P, n)
        m = 4 * n + 4
        xs = (np.arange(m) + 0.5) * math.pi / m
        vals = np.array([float(poly.evaluate(x).real) for x in xs])
        lead = 2 / m * np.sum(vals * np.cos(2 * n * xs))
        assert lead == pytest.approx(1.0, rel=1e-12)

    def test_strong_coupling_cancellation(self):
        """The series cancels far below double precision; both routes still agree."""
        c = CouplingParams("trig", 5.0, 4.5, 0.1, 4.8, 0.2)
        poly = polynomial_for(c, 8)
        assert poly.cancellation_log2() > 200
        x = 0.6
        a, b = complex(poly.evaluate(x)), complex(poly.evaluate_series(x))
        assert abs(a - b) < 1e-13 * (1 + abs(b))

    def test_factored_against_series_complex(self):
        """Three zeros from `roots`, evaluation at complex points with |Im x| <= 2g."""
        c = CouplingParams("trig", *[LN2_HALF] * 5)
        p = aw_params_from_couplings(c)
        zeros = find_zeros(c, 3)
        rng = np.random.default_rng(4)
        for _ in range(20):
            x = complex(rng.uniform(0, math.pi / 2), rng.uniform(-2 * c.g, 2 * c.g))
            ref = aw_eval(p, 3, x)
            assert abs(ref - aw_eval_factored(zeros, x)) < 1e-10 * abs(ref)

    def test_factored_trivia(self):
        zeros = find_zeros(TRIG, 4)
        for z in zeros.positions:
            assert abs(aw_eval_factored(zeros, z)) < 1e-15
        x1 = 0.61
        assert aw_eval_factored([x1], 0.0) == pytest.approx(1 - math.cos(2 * x1), rel=1e-14)
        with pytest.raises(DomainError):
            aw_eval_factored([], 0.3)


class TestWeightAndOracle:
    P = aw_params_from_couplings(CouplingParams("trig", *[LN2_HALF] * 5))

    def test_positive(self):
        rng = np.random.default_rng(8)
        xs = (np.arange(100) + 0.5) * (math.pi / 2) / 100
        for _ in range(20):
            p = aw_params_from_couplings(trig_draw(rng))
            assert all(aw_weight(p, float(x)) > 0 for x in xs)

    def test_parameter_swap_symmetry(self):
        p = aw_params_from_couplings(TRIG)
        swapped = AWParams(p.q, p.c, p.d, p.a, p.b)
        for x in (0.2, 0.9, 1.4):
            assert aw_weight(swapped, x) == pytest.approx(aw_weight(p, x), rel=1e-14)

    @pytest.mark.parametrize("x", [0.0, math.pi / 2, -0.1, 2.0])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            aw_weight(self.P, x)

    def test_oracle_structure(self):
        polys = gram_schmidt_oracle(self.P, 3)
        assert list(polys[0]) == [1.0]
        assert all(vec[-1] == 1.0 for vec in polys)

    def test_oracle_first_step(self):
        """p1 = cos 2x + a0 with a0 = -<cos 2x, 1> / <1, 1>."""
        h = (math.pi / 2) / 512
        nodes = (np.arange(512) + 0.5) * h
        w = np.array([aw_weight(self.P, float(x)) for x in nodes])
        a0 = -np.sum(np.cos(2 * nodes) * w) / np.sum(w)
        p1 = gram_schmidt_oracle(self.P, 1)[1]
        assert p1[0] == pytest.approx(a0, rel=1e-12)
        assert abs(np.sum((np.cos(2 * nodes) + p1[0]) * w) * h) < 1e-10

    def test_quadrature_orthogonality(self):
        polys = gram_schmidt_oracle(self.P, 2)
        h = (math.pi / 2) / 512
        nodes = (np.arange(512) + 0.5) * h
        vals = [np.array([cosine_series(c, x).real for x in nodes]) for c in polys]
        w = np.array([aw_weight(self.P, float(x)) for x in nodes])
        assert abs(np.sum(vals[1] * vals[2] * w) * h) < 1e-8

    def test_oracle_matches_series_degree_two(self):
        rng = np.random.default_rng(21)
        coeffs = gram_schmidt_oracle(self.P, 2)[2]
        for x in rng.uniform(0, math.pi / 2, 50):
            ref = aw_eval(self.P, 2, x).real
            assert abs(cosine_series(coeffs, x).real - ref) < 1e-8 * max(1.0, abs(ref))

    def test_oracle_domain(self):
        with pytest.raises(DomainError):
            gram_schmidt_oracle(self.P, 5)
        with pytest.raises(DomainError):
            gram_schmidt_oracle(self.P, 2, quad_points=100)


class TestEigenvalues:
    def test_zero(self):
        assert aw_eigenvalue(TRIG, 0) == 0.0
        assert wilson_eigenvalue(CouplingParams("rational", 0.3, 1, 2, 3, 4), 0) == 0.0

    def test_direct_substitution(self):
        c = CouplingParams("trig", 1, 1, 1, 1, 1)
        assert aw_eigenvalue(c, 1) == pytest.approx((math.cosh(5) - math.cosh(3)) / 2, rel=1e-15)
        assert wilson_eigenvalue(CouplingParams("rational", 1, 1, 1, 1, 1), 1) == -4.0

    @pytest.mark.parametrize("couple", [(1.0, 0.5, 0.5, 0.5, 0.5), (2.0, 0.1, 0.1, 0.1, 0.1)])
    def test_monotone(self, couple):
        c = CouplingParams("trig", *couple)
        vals = [aw_eigenvalue(c, n) for n in range(21)]
        start = 0 if c.g_hat >= 0 else next(n for n in range(21) if 2 * n * c.g + c.g_hat > abs(c.g_hat))
        assert all(b > a for a, b in zip(vals[start:], vals[start + 1 :]))

    @given(couplings, couplings, couplings, couplings, couplings, st.integers(0, 8))
    def test_wilson_rescaling(self, g, g1, g2, g3, g4, n):
        c = CouplingParams("rational", g, g1, g2, g3, g4)
        unit = CouplingParams("rational", 1.0, g1 / g, g2 / g, g3 / g, g4 / g)
        assert wilson_eigenvalue(c, n) == pytest.approx(g * g * wilson_eigenvalue(unit, n), rel=1e-12, abs=1e-300)

    def test_mode_mismatch(self):
        with pytest.raises(ModeError):
            aw_eigenvalue(CouplingParams("rational", 1, 1, 1, 1, 1), 1)
        with pytest.raises(ModeError):
            wilson_eigenvalue(TRIG, 1)


class TestDifferenceOperator:
    def test_constants_annihilated(self):
        for x in (0.2, 0.7 + 0.1j, 1.3):
            assert abs(aw_difference_apply(TRIG, lambda z: 1.0, x)) == 0
        rat = CouplingParams("rational", 0.7, 1, 2, 3, 4)
        for x in (0.2, 3.0, 7.5):
            assert abs(wilson_difference_apply(rat, lambda z: 1.0, x)) == 0

    def test_singular_points(self):
        with pytest.raises(SingularityError):
            aw_coefficient(TRIG, 0.0)
        with pytest.raises(SingularityError):
            aw_difference_apply(TRIG, lambda z: 1.0, math.pi / 2)
        with pytest.raises(SingularityError):
            wilson_difference_apply(CouplingParams("rational", 1, 1, 1, 1, 1), lambda z: 1.0, 0.0)

    def test_real_x_never_hits_shifted_pole(self):
        for x in np.linspace(0.05, math.pi / 2 - 0.05, 40):
            assert cmath.isfinite(aw_coefficient(TRIG, x))

    def test_wilson_degree_one_closed_form(self):
        """p1(u) = u^2 - e3/e1 in the rescaled variable; D p1 = E1 p1 identically."""
        rng = np.random.default_rng(3)
        c = CouplingParams("rational", 1.0, 1, 2, 3, 4)
        e1, e3 = e_sym(c.external, 1), e_sym(c.external, 3)
        E1 = wilson_eigenvalue(c, 1)
        for x in rng.uniform(0.1, 10, 20):
            p1 = lambda z: z * z - e3 / e1  # noqa: E731
            lhs = wilson_difference_apply(c, p1, complex(x))
            assert abs(lhs - E1 * p1(x)) < 1e-12 * max(1.0, abs(E1 * p1(x)))

    @pytest.mark.parametrize("mode", ["trig", "rational"])
    def test_residuals_random(self, mode):
        rng = np.random.default_rng(17 if mode == "trig" else 18)
        for _ in range(3):
            c = CouplingParams(mode, *rng.uniform(0.05, 5, 5))
            for n in (0, 1, 4, 8):
                lo, hi = (0.1, math.pi / 2 - 0.1) if mode == "trig" else (0.1, 10.0)
                for x in rng.uniform(lo, hi, 5):
                    assert difference_residual(c, n, x).residual < 1e-9

    def test_degree_zero_exact(self):
        r = difference_residual(TRIG, 0, 0.4)
        assert r.residual == 0.0


class TestWilson:
    def test_degree_zero(self):
        assert wilson_eval(WilsonParams(1, 2, 3, 4), 0, 1.7) == pytest.approx(1.0)

    def test_frozen_value(self):
        assert wilson_eval(WilsonParams(1, 2, 3, 4), 2, 0.7).real == pytest.approx(WILSON_1234_N2_AT_07, rel=1e-14)

    @given(couplings, couplings, couplings, couplings, st.floats(0, 10))
    @settings(max_examples=20)
    def test_degree_one_closed_form(self, a, b, c, d, x):
        p = WilsonParams(a, b, c, d)
        e1, e3 = a + b + c + d, e_sym((a, b, c, d), 3)
        expected = x * x - e3 / e1
        alt = x * x + a * a - (a + b) * (a + c) * (a + d) / (a + b + c + d)
        assert expected == pytest.approx(alt, rel=1e-12, abs=1e-12)
        assert wilson_eval(p, 1, x).real == pytest.approx(expected, rel=1e-12, abs=1e-12 * max(1, x * x))

    def test_factored(self):
        c = CouplingParams("rational", 1.0, 1, 2, 3, 4)
        zeros = find_zeros(c, 3)
        p = wilson_params_from_couplings(c)
        for u in (0.3, 2.0, 5.5, 1 + 1j):
            ref = wilson_eval(p, 3, u)
            assert abs(ref - wilson_eval_factored(zeros, u)) < 1e-12 * (1 + abs(ref))
