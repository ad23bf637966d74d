"""Potential kernel by two independent routes, Green function at the origin,
and the walk constants."""
import numpy as np
import pytest

from walklab.errors import OutOfWindow
from walklab.laws import moments
from walklab.potential import (a_fourier, a_partial_sums,
                               build_potential_table, constants,
                               expansion_check, green_point,
                               harmonicity_residuals)


class TestFourierRoute:
    def test_zero_at_origin(self, l1):
        assert a_fourier(l1, 0) == 0.0

    def test_unit_walk_closed_form(self, srw):
        # a(x) = |x| for the unit-step walk (sigma^2 = 1)
        for x in (-7, -3, -1, 1, 3, 7):
            assert a_fourier(srw, x) == pytest.approx(abs(x), abs=1e-10)

    def test_one_sided_closed_form(self, l1):
        # no down-jumps requires sigma^2 a(-x) = x on the continuous side
        s2 = float(moments(l1).sigma2)
        for x in (1, 2, 5, 20):
            assert s2 * a_fourier(l1, -x) == pytest.approx(x, abs=1e-9)

    def test_skewed_law_one_step_value(self, l1):
        # harmonicity at 0 pins a(1): sum_z p(z) a(z) = 1 with
        # a(-2) = 3/2/sigma2..., solved by hand: a(1) = 5/4, a(-1) = 3/4
        assert a_fourier(l1, 1) == pytest.approx(1.25, abs=1e-9)
        assert a_fourier(l1, -1) == pytest.approx(0.75, abs=1e-9)


class TestPartialSumRoute:
    def test_zero_at_origin(self, l1):
        v, b = a_partial_sums(l1, 0)
        assert v == 0.0 and b == 0.0

    def test_unit_walk(self, srw):
        for x in (1, 5, -5):
            v, bound = a_partial_sums(srw, x)
            assert v == pytest.approx(abs(x), abs=1e-8)

    def test_cross_method_agreement(self, l1):
        for x in (-30, -5, 1, 10, 30, 50):
            v, bound = a_partial_sums(l1, x)
            assert v == pytest.approx(a_fourier(l1, x), abs=1e-6)

    def test_bound_is_honest(self, l1):
        # reported remainder bound dominates the observed cross-method error
        for x in (7, 23, 41):
            v, bound = a_partial_sums(l1, x)
            assert abs(v - a_fourier(l1, x)) <= max(bound, 1e-9)

    def test_window_guard(self, l1):
        with pytest.raises(OutOfWindow):
            a_partial_sums(l1, 60, X=55)


class TestPotentialTable:
    def test_positive_off_origin(self, l1_kernels):
        t = l1_kernels.table
        vals = np.delete(t.a_values, t.X)
        assert (vals > 0).all()
        assert t.a(0) == 0.0
        assert t.a_star(0) == 1.0

    def test_harmonicity(self, l1, l1_kernels):
        res = harmonicity_residuals(l1, l1_kernels.table)
        assert np.abs(res).max() < 1e-8

    def test_linear_growth_at_edges(self, l1, l1_kernels):
        t = l1_kernels.table
        s2 = float(moments(l1).sigma2)
        dev_mid = abs(s2 * t.a(40) / 40 - 1)
        dev_edge = abs(s2 * t.a(t.X) / t.X - 1)
        assert dev_edge < dev_mid

    def test_out_of_window(self, l1_kernels):
        with pytest.raises(OutOfWindow):
            l1_kernels.table.a(l1_kernels.table.X + 1)


class TestGreenPoint:
    def test_unit_walk_visit_count(self, srw_kernels):
        # expected visits to 1 from 1 before hitting 0 is exactly 2
        assert green_point(srw_kernels.table, 1, 1) == pytest.approx(
            2.0, abs=1e-9)

    def test_unit_walk_blocked_crossing(self, srw_kernels):
        # x and -x are separated by the absorbing origin
        assert green_point(srw_kernels.table, 2, -2) == pytest.approx(
            0.0, abs=1e-9)

    def test_nonnegative(self, l1_kernels):
        for x in (-3, 1, 4):
            for y in (-2, 1, 5):
                assert green_point(l1_kernels.table, x, y) >= -1e-10

    def test_duality(self, l1_kernels, l1, span3):
        # g(x,y) under p equals g(y,x) under the reflected law
        refl = build_potential_table(l1.reflected(), X=20)
        for x, y in ((1, 3), (2, -4), (-5, 2)):
            assert green_point(l1_kernels.table, x, y) == pytest.approx(
                green_point(refl, y, x), abs=1e-8)


class TestConstants:
    def test_unit_walk_all_zero(self, srw_kernels):
        c = srw_kernels.constants
        assert c.lambda3 == 0.0
        assert abs(c.c_star) < 1e-8
        assert abs(c.c_plus) < 1e-8
        assert abs(c.c_minus) < 1e-8

    def test_skewed_law_values(self, l1_kernels):
        # hand-derived from sigma^2 a(x) - |x| -> C* -+ lambda3:
        # continuous side gives C* + lambda3 = 0, so C* = 1/4, C+ = 1/2
        c = l1_kernels.constants
        assert c.lambda3 == pytest.approx(-0.25, abs=1e-15)
        assert c.c_star == pytest.approx(0.25, abs=1e-6)
        assert c.c_plus == pytest.approx(0.5, abs=1e-6)
        assert c.c_minus == pytest.approx(0.0, abs=1e-6)

    def test_one_sided_vanishing(self, span3_kernels):
        # no up-jumps above... span3 has unit down-steps: C+ = 0
        c = span3_kernels.constants
        assert abs(c.c_plus) < 1e-8
        assert c.c_minus == pytest.approx(2 / 3, abs=1e-6)

    def test_cross_check_relation(self, l1_kernels):
        c = l1_kernels.constants
        assert c.c_plus == pytest.approx(c.c_star - c.lambda3, abs=1e-6)
        assert c.c_minus == pytest.approx(c.c_star + c.lambda3, abs=1e-6)

    def test_entrance_route_agrees(self, l1_kernels):
        assert l1_kernels.c_plus_entrance == pytest.approx(
            l1_kernels.constants.c_plus, abs=1e-6)
        assert l1_kernels.c_minus_entrance == pytest.approx(
            0.0, abs=1e-10)


class TestExpansion:
    def test_residual_decays(self, l1, l1_kernels):
        rows = expansion_check(l1, l1_kernels.table, l1_kernels.constants)
        d = {int(x): abs(r) for x, r in rows}
        assert d[40] < d[10]
        assert d[40] < 1e-8

    def test_determinism(self, l1, l1_kernels):
        a = expansion_check(l1, l1_kernels.table, l1_kernels.constants)
        b = expansion_check(l1, l1_kernels.table, l1_kernels.constants)
        assert (a == b).all()


def test_fourier_vs_table(l1, l1_kernels):
    # the table is built from the Fourier route; spot-check consistency
    for x in (-11, 4, 37):
        assert l1_kernels.table.a(x) == pytest.approx(
            a_fourier(l1, x), abs=1e-12)
