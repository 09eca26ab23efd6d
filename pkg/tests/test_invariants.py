import math

import numpy as np
import pytest

from minkflow import catalog, selfsim
from minkflow.errors import DegenerateSpiral, InvalidParams
from minkflow.hyperbolic import HyperbolicNumber as HN
from minkflow.invariants import (EuclideanCurve, InvariantCurveSpec,
                                 InvariantKind, check_invariance,
                                 make_invariant_curve, point_set_deviation)
from minkflow.selfsim import MotionLaw

T_PROBE = (0.1, 0.5, 1.0)


def rotation_motion():
    return MotionLaw(lambda t: t, lambda t: 1.0,
                     lambda t: HN(0.0, 0.0), (-math.inf, math.inf))


def dilation_motion():
    return MotionLaw(lambda t: 0.0, lambda t: 1.0 + t,
                     lambda t: HN(0.0, 0.0), (-1.0, math.inf))


class TestMakeInvariantCurve:
    def test_spiral_alpha_zero_is_ray(self):
        c = make_invariant_curve(
            InvariantCurveSpec(InvariantKind.MINK_LOG_SPIRAL, {"alpha": 0.0}),
            (0.1, 5.0), n=101)
        # both diagonal components proportional to the parameter
        assert np.max(np.abs(c.xi - c.s)) < 1e-12
        assert np.max(np.abs(c.eta - c.s)) < 1e-12
        assert np.max(np.abs(c.y)) < 1e-12

    def test_spiral_alpha_half_diagonal_formula(self):
        c = make_invariant_curve(
            InvariantCurveSpec(InvariantKind.MINK_LOG_SPIRAL, {"alpha": 0.5}),
            (0.5, 2.0), n=16)
        s = c.s
        assert np.allclose(c.xi, s ** 1.5 / 1.5, atol=1e-14)
        assert np.allclose(c.eta, s ** 0.5 / 0.5, atol=1e-14)

    def test_degenerate_spiral(self):
        with pytest.raises(DegenerateSpiral):
            make_invariant_curve(
                InvariantCurveSpec(InvariantKind.MINK_LOG_SPIRAL,
                                   {"alpha": 1.0}), (0.1, 1.0))
        with pytest.raises(InvalidParams):
            make_invariant_curve(
                InvariantCurveSpec(InvariantKind.MINK_LOG_SPIRAL,
                                   {"alpha": 0.5}), (-1.0, 1.0))

    def test_exp_diagonal_satisfies_ode(self):
        c = make_invariant_curve(
            InvariantCurveSpec(InvariantKind.EXP_DIAGONAL), (-3.0, 1.5),
            n=20001)
        xip = np.gradient(c.xi, c.eta, edge_order=2)
        rel = np.max(np.abs(xip - 2 * c.xi) / np.abs(2 * c.xi))
        assert rel < 1e-6

    def test_spiral_soliton_relation(self):
        # a tau - b nu = 0 pointwise when alpha = a/b
        a, b = 1.0, 2.0
        c = make_invariant_curve(
            InvariantCurveSpec(InvariantKind.MINK_LOG_SPIRAL,
                               {"alpha": a / b}), (0.2, 6.0), n=2001)
        assert np.max(np.abs(a * c.tau - b * c.nu)) < 1e-10


class TestCheckInvariance:
    def test_line_under_dilation(self):
        c = make_invariant_curve(
            InvariantCurveSpec(InvariantKind.LINE,
                               {"direction": (1.0, 0.3)}), (-10, 10))
        dev = check_invariance(c, dilation_motion(), T_PROBE,
                               probe_fraction=(0.3, 0.7))
        assert dev < 1e-10

    def test_hyperbola_under_rotation(self):
        c = make_invariant_curve(
            InvariantCurveSpec(InvariantKind.HYPERBOLA, {"radius": 1.0}),
            (-4, 4))
        dev = check_invariance(c, rotation_motion(), T_PROBE,
                               probe_fraction=(0.2, 0.8))
        assert dev < 1e-10

    def test_spiral_under_combined_motion(self):
        alpha = 0.5
        c = make_invariant_curve(
            InvariantCurveSpec(InvariantKind.MINK_LOG_SPIRAL,
                               {"alpha": alpha}), (0.05, 12.0), n=40001)
        motion = MotionLaw(lambda t: alpha * math.log(1 + t),
                           lambda t: 1.0 + t, lambda t: HN(0, 0),
                           (-1.0, math.inf))
        dev = check_invariance(c, motion, T_PROBE,
                               probe_fraction=(0.05, 0.45))
        assert dev < 1e-8

    def test_exp_diagonal_under_screw_translation(self):
        c = make_invariant_curve(
            InvariantCurveSpec(InvariantKind.EXP_DIAGONAL), (-6.0, 2.5),
            n=40001)
        motion = MotionLaw(lambda t: t, lambda t: math.exp(t),
                           lambda t: HN.from_diagonal(0.0, t),
                           (-math.inf, math.inf))
        dev = check_invariance(c, motion, T_PROBE,
                               probe_fraction=(0.1, 0.55))
        assert dev < 1e-8

    def test_non_invariant_curve_detected(self):
        c = make_invariant_curve(
            InvariantCurveSpec(InvariantKind.HYPERBOLA, {"radius": 1.0}),
            (-4, 4))
        dev = check_invariance(c, dilation_motion(), (0.5,),
                               probe_fraction=(0.4, 0.6))
        assert dev > 1e-2


class TestEuclideanKinds:
    def test_circle(self):
        c = make_invariant_curve(
            InvariantCurveSpec(InvariantKind.CIRCLE, {"radius": 2.0}),
            (0.0, 4 * math.pi), n=401)
        assert isinstance(c, EuclideanCurve)
        assert np.allclose(np.hypot(c.x, c.y), 2.0)
        sf = c.support_functions()
        # tau = 0; with the left normal N = iT the centered circle has
        # nu = -r
        assert np.max(np.abs(sf[:, 0])) < 1e-12
        assert np.allclose(sf[:, 1], -2.0)

    def test_log_spiral_support_functions(self):
        alpha = 0.75
        c = make_invariant_curve(
            InvariantCurveSpec(InvariantKind.LOG_SPIRAL, {"alpha": alpha}),
            (0.2, 8.0), n=2001)
        sf = c.support_functions()
        denom = 1.0 + alpha * alpha
        assert np.max(np.abs(sf[:, 0] - c.s / denom)) < 1e-10
        assert np.max(np.abs(sf[:, 1] + alpha * c.s / denom)) < 1e-10
        # arc-length parametrization check
        ds = np.hypot(np.diff(c.x), np.diff(c.y))
        assert np.allclose(ds, np.diff(c.s), rtol=1e-4)


class TestDoubleRole:
    """xi = e^{2 eta} + 1 translates rigidly and screw-translates; both
    readings must generate the same evolved point sets."""

    def setup_method(self):
        self.curve = selfsim.screw_translate_curve(
            0.0, branch=-1, xi_span=(1.0 + 1e-6, 9.0), n=6001)
        shift = self.curve.eta[0] - 0.5 * math.log(self.curve.xi[0] - 1.0)
        self.shift = shift

    def test_matches_exponential(self):
        c = self.curve
        err = np.max(np.abs(
            c.xi - (np.exp(2 * (c.eta - self.shift)) + 1.0)))
        assert err < 1e-8

    def test_two_motions_same_point_set(self):
        translation = MotionLaw(
            lambda t: 0.0, lambda t: 1.0,
            lambda t: HN.from_diagonal(2.0 * t, 0.0),
            (-math.inf, math.inf))
        screw = selfsim.motion_law(
            selfsim.SolitonParams(1.0, 1.0, HN.from_diagonal(0.0, 1.0)))
        pts = self.curve.points
        n = len(pts)
        for t in T_PROBE:
            base = translation.apply(pts, t)
            probe = screw.apply(pts[int(0.25 * n):int(0.7 * n)], t)
            assert point_set_deviation(base, probe) < 1e-8

    def test_alignment_with_catalog_translator(self):
        # boost by log 2 then shift eta by +log(2)/2 and xi by +1 maps
        # xi = e^eta onto xi = e^{2 eta} + 1
        entry = catalog.get("translator-xi")
        etas = np.linspace(-2.0, 2.0, 4001)
        xis = entry.sampler(etas, 0.0)
        xi2 = 2.0 * xis          # boost: (xi, eta) -> (2 xi, eta / 2)
        eta2 = etas / 2.0
        eta3 = eta2 + math.log(2.0) / 2.0
        xi3 = xi2 + 1.0
        mapped = np.column_stack([(xi3 + eta3) / 2.0, (xi3 - eta3) / 2.0])
        base_eta = self.curve.eta - self.shift
        base = np.column_stack([(self.curve.xi + base_eta) / 2.0,
                                (self.curve.xi - base_eta) / 2.0])
        inside = (eta3 > base_eta[0] + 0.05) & (eta3 < base_eta[-1] - 0.05)
        assert point_set_deviation(base, mapped[inside]) < 1e-8
