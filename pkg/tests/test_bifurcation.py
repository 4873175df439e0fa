import cmath
import math

import numpy as np
import pytest

from cournotlab import (
    BifurcationKind,
    DelayConfig,
    MarketParams,
    NoCrossingError,
    NotStableAtStartError,
    NumericalError,
    ParityCase,
    critical_alpha,
    flip_boundary,
    ns_boundary,
    reduced_char_poly,
    stability_region,
)
from cournotlab.spectral import EpsilonTriple



# the four delay-parity cases at the running example's parameters have
# rational critical values: eps1 and alpha = (eps1 + 1) / 0.9375
FLIP_CASES = [
    (DelayConfig(2, 2, 10), 1.0 / 9.0, 32.0 / 27.0),   # even sum, even tau2
    (DelayConfig(2, 1, 3), 1.5, 8.0 / 3.0),            # odd sum, odd tau2
    (DelayConfig(9, 7, 5), 2.0 / 3.0, 16.0 / 9.0),     # even sum, odd tau2
    (DelayConfig(3, 2, 4), 9.0, 32.0 / 3.0),           # odd sum, even tau2
]


class TestFlipBoundary:
    @pytest.mark.parametrize("delays,eps1,alpha", FLIP_CASES)
    def test_parity_cases(self, sec4, delays, eps1, alpha):
        bp = flip_boundary(sec4, delays)
        assert bp.eps1 == pytest.approx(eps1, abs=1e-9)
        assert bp.alpha_crit == pytest.approx(alpha, abs=1e-9)
        assert bp.kind is BifurcationKind.FLIP
        assert bp.theta == math.pi

    @pytest.mark.parametrize("delays,eps1,alpha", FLIP_CASES)
    def test_minus_one_is_a_root_at_the_critical_gain(self, sec4, delays, eps1, alpha):
        eps = EpsilonTriple(0.32, eps1, 0.6)
        cp = reduced_char_poly(eps, delays)
        assert abs(cp(-1.0 + 0.0j)) < 1e-10
        assert flip_boundary(sec4, delays).residual < 1e-10

    def test_parity_case_derivation(self):
        parity = ParityCase.from_delays(DelayConfig(9, 7, 5))
        assert parity.sum_parity == 0 and parity.tau2_parity == 1
        assert parity.sign_sum == 1 and parity.sign_tau2 == -1

    def test_nonpositive_alpha_rejected(self):
        # odd sum with even tau2 and eps0 + eps2 > 1 drives eps1 below -1
        p = MarketParams(b=1.0, delta=0.5, alpha=1.0, n=4, a0=2.0, a1=2.5)
        with pytest.raises(NumericalError):
            flip_boundary(p, DelayConfig(1, 0, 2))


class TestNsBoundary:
    def test_onset_for_long_public_reaction(self, sec4):
        pts = ns_boundary(sec4, DelayConfig(5, 3, 3))
        assert pts
        assert 1.41 <= min(pt.alpha_crit for pt in pts) <= 1.45

    def test_onset_for_long_private_reaction(self, sec4):
        pts = ns_boundary(sec4, DelayConfig(3, 5, 5))
        assert pts
        assert 1.26 <= min(pt.alpha_crit for pt in pts) <= 1.30

    def test_certificates(self, sec4):
        for delays in (DelayConfig(5, 3, 3), DelayConfig(3, 5, 5), DelayConfig(9, 7, 5)):
            for pt in ns_boundary(sec4, delays):
                assert pt.residual < 1e-8
                assert 1e-3 < pt.theta < math.pi - 1e-3
                assert pt.kind is BifurcationKind.NEIMARK_SACKER
                lam = cmath.exp(1j * pt.theta)
                cp = reduced_char_poly(EpsilonTriple(0.32, pt.eps1, 0.6), delays)
                assert abs(cp(lam)) < 1e-8

    def test_gain_matches_trigonometric_form(self, sec4):
        # closed trigonometric form of the crossing gain; the constant
        # term in the numerator is -eps0^2
        eps0, eps2 = 0.32, 0.6
        for delays in (DelayConfig(5, 3, 3), DelayConfig(3, 3, 0), DelayConfig(4, 4, 8)):
            tau, tau2 = delays.tau_sum, delays.tau2
            for pt in ns_boundary(sec4, delays):
                th = pt.theta
                ring = 1 + eps2**2 + 2 * eps2 * math.cos((tau2 + 1) * th)
                num = (2 * math.cos(th / 2)
                       * (eps0 * math.cos((tau + 1.5) * th)
                          + eps0 * eps2 * math.cos((tau - tau2 + 0.5) * th))
                       - math.cos(th) * ring - eps0**2)
                den = (eps0**2 + ring
                       - 2 * eps0 * math.cos((tau + 1) * th)
                       - 2 * eps0 * eps2 * math.cos((tau - tau2) * th))
                assert pt.eps1 == pytest.approx(num / den, abs=1e-9)

    def test_scan_refinement_is_stable(self, sec4):
        for delays in (DelayConfig(5, 3, 3), DelayConfig(3, 5, 5), DelayConfig(9, 7, 5)):
            coarse = ns_boundary(sec4, delays, scan_points=4096)
            fine = ns_boundary(sec4, delays, scan_points=8192)
            assert len(coarse) == len(fine)
            for a, b in zip(coarse, fine):
                assert a.theta == pytest.approx(b.theta, abs=1e-8)

    def test_no_interior_crossing_without_delays(self, sec4):
        assert ns_boundary(sec4, DelayConfig(0, 0, 0)) == []


class TestCriticalAlpha:
    def test_flip_detected_at_the_delay_free_threshold(self, sec4):
        bp = critical_alpha(sec4, DelayConfig(2, 2, 10), (0.5, 1.4))
        assert bp.kind is BifurcationKind.FLIP
        assert bp.alpha_crit == pytest.approx(1.1852, abs=1e-4)
        assert abs(bp.theta - math.pi) < 1e-3
        closed_form = flip_boundary(sec4, DelayConfig(2, 2, 10)).alpha_crit
        assert bp.alpha_crit == pytest.approx(closed_form, abs=1e-3)

    def test_neimark_sacker_detected(self, sec4):
        bp = critical_alpha(sec4, DelayConfig(5, 3, 3), (1.0, 1.6))
        assert bp.kind is BifurcationKind.NEIMARK_SACKER
        assert 1.41 <= bp.alpha_crit <= 1.45
        assert 1e-3 < bp.theta < math.pi - 1e-3
        curve_min = min(pt.alpha_crit for pt in ns_boundary(sec4, DelayConfig(5, 3, 3)))
        assert bp.alpha_crit == pytest.approx(curve_min, abs=1e-3)

    def test_mixed_parity_first_crossing(self, sec4):
        # the closed-form flip candidate (16/9) is not the first
        # instability: an interior crossing precedes it
        bp = critical_alpha(sec4, DelayConfig(9, 7, 5), (1.0, 1.7))
        assert bp.alpha_crit == pytest.approx(1.5470, abs=2e-3)
        assert bp.kind is BifurcationKind.NEIMARK_SACKER
        assert bp.alpha_crit < flip_boundary(sec4, DelayConfig(9, 7, 5)).alpha_crit

    def test_not_stable_at_start(self, sec4):
        with pytest.raises(NotStableAtStartError):
            critical_alpha(sec4, DelayConfig(2, 2, 10), (1.3, 1.6))

    def test_no_crossing_in_bracket(self, sec4):
        with pytest.raises(NoCrossingError):
            critical_alpha(sec4, DelayConfig(2, 2, 10), (0.5, 0.9))

    def test_residual_certificate(self, sec4):
        bp = critical_alpha(sec4, DelayConfig(3, 5, 5), (1.0, 1.5))
        assert bp.residual < 1e-8


class TestStabilityRegion:
    def test_running_example_boundary(self, sec4):
        rows = stability_region(sec4, [0.4])
        assert rows[0].feasible
        assert rows[0].alpha_max == pytest.approx(32.0 / 27.0, abs=1e-9)

    def test_strong_coupling_with_many_firms_is_infeasible(self, sec4):
        rows = stability_region(sec4, [0.25], n=11)
        assert not rows[0].feasible
        assert math.isnan(rows[0].alpha_max)

    def test_feasible_band_shrinks_with_firm_count(self, sec4):
        grid = np.linspace(0.02, 0.98, 49)
        def top(n):
            rows = stability_region(sec4, grid, n=n)
            feasible = [r.delta for r in rows if r.feasible]
            return max(feasible) if feasible else 0.0
        assert top(32) < top(8) < top(2)

    def test_grid_outside_unit_interval_rejected(self, sec4):
        with pytest.raises(Exception):
            stability_region(sec4, [1.2])
