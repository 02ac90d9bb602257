import math

import numpy as np
import pytest

from rsequilibria.errors import ChamberError, ModeError, RootCountError
from rsequilibria.equilibrium import bethe_residual
from rsequilibria.polynomials import CouplingParams
from rsequilibria.roots import (
    HALF_PI,
    Configuration,
    RootFindSettings,
    find_zeros,
    find_zeros_rational,
    find_zeros_trig,
    grid_scan_zeros,
    refine_zeros,
    zero_residuals,
)

# Frozen from an mpmath.findroot pass on mpmath.qhyper / mpmath.hyper (50 digits).
TRIG = CouplingParams("trig", 0.3, 0.4, 0.5, 0.6, 0.7)
TRIG_ZEROS_N3 = [0.450037506042062697, 0.759372024215732505, 1.07263409564652039]
RAT = CouplingParams("rational", 1.0, 1, 2, 3, 4)
RAT_ZEROS_N3 = [1.58293856559506183, 2.88643637359558508, 4.49029960678975364]


class TestConfiguration:
    def test_valid(self):
        cfg = Configuration("trig", [0.1, 0.5])
        assert cfg.n == 2 and cfg.mode == "trigonometric"
        assert np.array_equal(cfg.as_array(), [0.1, 0.5])

    @pytest.mark.parametrize(
        "mode,pos",
        [
            ("trig", []),
            ("trig", [0.0, 0.5]),
            ("trig", [0.3, HALF_PI]),
            ("trig", [0.5, 0.3]),
            ("rational", [1.0, 1.0]),
            ("rational", [-1.0, 2.0]),
            ("rational", [1.0, math.inf]),
        ],
    )
    def test_chamber_violations(self, mode, pos):
        with pytest.raises(ChamberError):
            Configuration(mode, pos)

    def test_rational_unbounded(self):
        assert Configuration("rational", [1.0, 1e6]).n == 2

    def test_refined_ignored_in_equality(self):
        a = Configuration("trig", [0.2, 0.4])
        assert a == Configuration("trig", [0.2, 0.4], refined=(0.2, 0.4))

    def test_settings_validation(self):
        with pytest.raises(ValueError):
            RootFindSettings(bisection_tol=1e-14, newton_tol=1e-13)
        with pytest.raises(ValueError):
            RootFindSettings(points_per_root=0)


class TestTrig:
    def test_symmetric_quarter_pi(self):
        c = CouplingParams("trig", 0.8, 0.4, 0.4, 1.3, 1.3)
        zeros = find_zeros_trig(c, 1)
        assert zeros.positions[0] == pytest.approx(math.pi / 4, abs=1e-12)
        assert abs(bethe_residual(c, [math.pi / 4])[0]) < 1e-14

    def test_frozen_zeros(self):
        zeros = find_zeros_trig(TRIG, 3)
        assert np.allclose(zeros.positions, TRIG_ZEROS_N3, rtol=0, atol=1e-13)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_grid_scan_oracle(self, n):
        c = CouplingParams("trig", 1.7, 0.2, 2.9, 0.6, 4.1)
        got = find_zeros(c, n).positions
        oracle = grid_scan_zeros(c, n, points=100_000 if n == 4 else 20_000)
        assert len(oracle) == n
        assert max(abs(a - b) for a, b in zip(got, oracle)) < 1e-10

    def test_mode_mismatch(self):
        with pytest.raises(ModeError):
            find_zeros_trig(RAT, 2)
        with pytest.raises(ModeError):
            find_zeros_rational(TRIG, 2)

    def test_bad_degree(self):
        with pytest.raises(ValueError):
            find_zeros(TRIG, 0)


class TestRational:
    def test_sqrt5(self):
        assert find_zeros_rational(RAT, 1).positions[0] == pytest.approx(math.sqrt(5), abs=1e-12)

    def test_frozen_zeros(self):
        zeros = find_zeros_rational(RAT, 3)
        assert np.allclose(zeros.positions, RAT_ZEROS_N3, rtol=0, atol=1e-12)

    @pytest.mark.parametrize("n", [2, 4])
    def test_grid_scan_oracle(self, n):
        c = CouplingParams("rational", 0.8, 1.3, 0.4, 2.2, 3.1)
        got = find_zeros(c, n).positions
        oracle = grid_scan_zeros(c, n, points=100_000 if n == 4 else 20_000)
        assert max(abs(a - b) for a, b in zip(got, oracle)) < 1e-10

    @pytest.mark.parametrize("g", [0.5, 2.0, 3.0])
    def test_rescaling(self, g):
        ext = (1.0, 2.0, 3.0, 4.0)
        big = find_zeros(CouplingParams("rational", g, *ext), 3).positions
        unit = find_zeros(CouplingParams("rational", 1.0, *[v / g for v in ext]), 3).positions
        assert max(abs(a - g * b) for a, b in zip(big, unit)) < 1e-10

    def test_window_growth(self):
        """Weak g pushes the zeros far past the first window, which must double."""
        c = CouplingParams("rational", 0.05, 5, 5, 5, 5)
        zeros = find_zeros(c, 3)
        u0 = max(c.external) / c.g + 3
        assert zeros.positions[-1] > c.g * u0


class TestGeneral:
    @pytest.mark.parametrize("mode", ["trig", "rational"])
    def test_exact_count_random(self, mode):
        rng = np.random.default_rng(101)
        for _ in range(20):
            c = CouplingParams(mode, *rng.uniform(0.05, 5, 5))
            for n in (1, 5, 8):
                zeros = find_zeros(c, n)
                assert zeros.n == n

    def test_deterministic(self):
        a = find_zeros(TRIG, 5)
        b = find_zeros(TRIG, 5)
        assert a.positions == b.positions

    def test_coarse_grid_escalates(self):
        coarse = RootFindSettings(points_per_root=1, refinements=3)
        assert np.allclose(find_zeros(TRIG, 3, coarse).positions, TRIG_ZEROS_N3, atol=1e-13)

    def test_coarse_grid_without_refinement_fails(self):
        coarse = RootFindSettings(points_per_root=1, refinements=0)
        with pytest.raises(RootCountError):
            find_zeros(CouplingParams("trig", 0.3, 2.0, 2.0, 2.0, 2.0), 6, coarse)

    @pytest.mark.parametrize("c", [TRIG, RAT])
    def test_refine_and_residuals(self, c):
        zeros = find_zeros(c, 4)
        refined = refine_zeros(c, zeros)
        assert refined.positions == zeros.positions
        assert all(abs(float(r) - x) < 1e-13 * max(1, x) for r, x in zip(refined.refined, zeros.positions))
        assert max(zero_residuals(c, zeros)) < 1e-12
