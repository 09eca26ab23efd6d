"""Registry of closed-form flow solutions.

Twelve solutions of the split-signature flow and four of the Euclidean
curve-shortening flow, each stored as a sympy expression for the graph
variable.  Expressions give exact derivatives, so residual verification,
curvature-profile checks and length computation all run against the true
closed form rather than a resampled approximation.

Canonical names: translator-y, translator-x, translator-xi,
hyperbola-expander, screw-tanh, screw-tan, screw-coth, oval-coshcosh,
wave-coshsinh, wave-sinhsinh, wave-sinsin, interp-tan, euclid-circle,
euclid-reaper, euclid-oval, euclid-wave.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import sympy as sp
from scipy.integrate import tanhsinh

from .errors import InfiniteLength, NoProfile, UnknownSolution
from .flow import ClosedForm, FlowKind, Plane, ResidualReport, residual

_X = sp.Symbol("x", real=True)       # x or eta, depending on kind
_T = sp.Symbol("t", real=True)
_TH = sp.Symbol("theta", real=True)

DEFAULT_LEVELS = (0.02, 0.01, 0.005)
ORDER_TARGET, ORDER_TOL = 2.0, 0.3


@dataclass
class CurvatureProfile:
    """Closed-form k(theta, t), with its own time domain and theta window."""

    form: ClosedForm
    t_domain: tuple
    times: tuple
    window: Callable[[float], tuple]


@dataclass
class ExactSolution:
    name: str
    plane: Plane
    kind: FlowKind
    t_domain: tuple
    form: ClosedForm
    times: tuple                       # interior probe times
    window: Callable[[float], tuple]   # residual probe window
    finite_length: bool
    curvature_profile: CurvatureProfile | None
    notes: str
    wick_partner: str | None = None
    length_bounds: Callable[[float], tuple] | None = None

    def sampler(self, pts, t):
        return self.form(pts, t)

    def length(self, t: float) -> float:
        """Minkowski length at time t from the exact slope.

        graph_y entries integrate sqrt(1 - y'^2), lightcone entries
        sqrt(xi'), over length_bounds (default: the +-20 truncation).
        Double-exponential quadrature absorbs the inverse-square-root
        endpoint behaviour of entries that end on the light cone.
        """
        if not self.finite_length:
            raise InfiniteLength(f"{self.name} has no finite Minkowski length")
        d1 = self.form.derivative(1)
        if self.kind is FlowKind.GRAPH_Y:
            def integrand(u):
                v = d1(u, t)
                return np.sqrt(np.maximum(0.0, (1.0 - v) * (1.0 + v)))
        else:
            def integrand(u):
                return np.sqrt(np.maximum(0.0, d1(u, t)))
        lo, hi = (self.length_bounds or (lambda _: (-20.0, 20.0)))(t)
        res = tanhsinh(integrand, lo, hi, atol=1e-11, rtol=1e-11)
        return float(res.integral)


def _entry(name, plane, kind, t_domain, expr, times, window, finite,
           profile, notes, wick_partner=None, length_bounds=None):
    form = ClosedForm(expr, _X, _T, name=name)
    return ExactSolution(name, plane, kind, t_domain, form, times,
                         window if callable(window) else (lambda t, w=window: w),
                         finite, profile, notes, wick_partner, length_bounds)


def _profile(expr, t_domain, times, window):
    return CurvatureProfile(ClosedForm(expr, _TH, _T, name="k"),
                            t_domain, times,
                            window if callable(window) else (lambda t, w=window: w))


def _build_registry() -> dict:
    inf = math.inf
    x, t = _X, _T
    th = _TH
    entries = [
        _entry(
            "translator-y", Plane.MINKOWSKI, FlowKind.GRAPH_Y, (-inf, inf),
            t + sp.log(sp.cosh(x)),
            times=(-0.4, 0.1, 0.8), window=(-2.0, 2.0), finite=True,
            profile=_profile(sp.cosh(th), (-inf, inf), (-0.5, 0.0, 0.5),
                             (-2.0, 2.0)),
            notes=("rises along the y-axis at unit speed; length pi at "
                   "every t and k*cos(s) = 1 along the curve"),
        ),
        _entry(
            "translator-x", Plane.MINKOWSKI, FlowKind.GRAPH_Y, (-inf, inf),
            sp.asinh(sp.exp(t - x)),
            times=(-0.3, 0.0, 0.4), window=(-2.0, 2.5), finite=False,
            profile=_profile(-sp.sinh(th), (-inf, inf), (-0.5, 0.0, 0.5),
                             (-2.5, -0.3)),
            notes=("slides along the x-axis; one end of finite length, "
                   "the other infinite with k = 1/sinh(s)"),
        ),
        _entry(
            "translator-xi", Plane.MINKOWSKI, FlowKind.LIGHTCONE, (-inf, inf),
            sp.exp(x) + t,
            times=(-0.5, 0.2, 1.0), window=(-2.0, 2.0), finite=False,
            profile=_profile(sp.exp(-th), (-inf, inf), (-0.5, 0.0, 0.5),
                             (-2.0, 2.0)),
            notes=("translates along the xi diagonal with k = 1/s, s > 0; "
                   "also arises as the A=0 screw-translation curve"),
        ),
        _entry(
            "hyperbola-expander", Plane.MINKOWSKI, FlowKind.GRAPH_Y,
            (0.0, inf),
            sp.sqrt(x * x + 2 * t),
            times=(0.5, 1.0, 2.0), window=(-1.5, 1.5), finite=False,
            profile=_profile(1 / sp.sqrt(2 * t), (0.0, inf), (0.5, 1.0, 2.0),
                             (-2.0, 2.0)),
            notes="constant-curvature arc expanding from the light cone",
        ),
        _entry(
            "screw-tanh", Plane.MINKOWSKI, FlowKind.LIGHTCONE, (-inf, 0.5),
            (1 - 2 * t) * sp.tanh(x),
            times=(-0.5, 0.0, 0.3), window=(-2.0, 2.0), finite=True,
            profile=_profile(sp.sqrt(sp.exp(-2 * th) + 1 / (2 * t)),
                             (-inf, 0.0), (-1.5, -0.8, -0.52),
                             lambda t: (0.5 * math.log(-2.0 * t) - 4.0,
                                        0.5 * math.log(-2.0 * t) - 0.2)),
            notes=("boost + contraction toward the eta diagonal; length "
                   "pi*sqrt(1-2t), k = -tan(s) at t=0"),
        ),
        _entry(
            "screw-tan", Plane.MINKOWSKI, FlowKind.LIGHTCONE, (-0.5, inf),
            (1 + 2 * t) * sp.tan(x),
            times=(-0.2, 0.5, 1.5), window=(-1.2, 1.2), finite=False,
            profile=_profile(sp.sqrt(-sp.exp(-2 * th) + 1 / (2 * t)),
                             (0.0, inf), (0.3, 0.8, 1.5),
                             lambda t: (0.5 * math.log(2.0 * t) + 0.2,
                                        0.5 * math.log(2.0 * t) + 4.0)),
            notes="boost + expansion; infinite length, k = tanh(s) at t=0",
        ),
        _entry(
            "screw-coth", Plane.MINKOWSKI, FlowKind.LIGHTCONE, (-0.5, inf),
            -(1 + 2 * t) * sp.coth(x),
            times=(-0.2, 0.5, 1.5), window=(-3.0, -0.3), finite=False,
            profile=_profile(sp.sqrt(sp.exp(-2 * th) + 1 / (2 * t)),
                             (0.0, inf), (0.3, 0.8, 1.5), (-2.0, 2.0)),
            notes=("boost + expansion on eta < 0; mixed-length ends with "
                   "k = coth(s), s > 0, at t=0"),
        ),
        _entry(
            "oval-coshcosh", Plane.MINKOWSKI, FlowKind.GRAPH_Y, (0.0, inf),
            sp.acosh(sp.exp(t) * sp.cosh(x)),
            times=(0.5, 1.0, 2.0), window=(-2.0, 2.0), finite=True,
            profile=_profile(sp.sqrt(sp.cosh(2 * th) + sp.coth(2 * t)),
                             (0.0, inf), (0.3, 0.8, 1.5), (-1.5, 1.5)),
            notes=("upper branch; tracks the expanding hyperbola near t=0 "
                   "and the y-axis translator for large t; length grows "
                   "from 0 toward pi"),
        ),
        _entry(
            "wave-coshsinh", Plane.MINKOWSKI, FlowKind.GRAPH_Y, (-inf, inf),
            sp.asinh(sp.exp(t) * sp.cosh(x)),
            times=(-1.0, 0.0, 1.0), window=(-2.0, 2.0), finite=True,
            profile=_profile(sp.sqrt(sp.cosh(2 * th) + sp.tanh(2 * t)),
                             (-inf, inf), (-0.8, 0.0, 0.8), (-1.5, 1.5)),
            notes=("pair of sideways translators merging into the y-axis "
                   "translator; length decreases toward pi"),
        ),
        _entry(
            "wave-sinhsinh", Plane.MINKOWSKI, FlowKind.GRAPH_Y, (-inf, 0.0),
            sp.asinh(sp.exp(t) * sp.sinh(x)),
            times=(-2.0, -1.0, -0.3), window=(-2.0, 2.0), finite=True,
            profile=_profile(sp.sqrt(sp.cosh(2 * th) + sp.coth(2 * t)),
                             (-inf, 0.0), (-1.5, -0.8, -0.4),
                             lambda t: (0.5 * _acosh_clip(-1.0 / math.tanh(2 * t)) + 0.2,
                                        0.5 * _acosh_clip(-1.0 / math.tanh(2 * t)) + 2.0)),
            notes=("odd curve collapsing onto the xi diagonal as t -> 0; "
                   "length decreases to 0"),
        ),
        _entry(
            "wave-sinsin", Plane.MINKOWSKI, FlowKind.GRAPH_Y, (0.0, inf),
            sp.asin(sp.exp(-t) * sp.sin(x)),
            times=(0.1, 0.15, 0.25), window=(-2.5, 2.5), finite=False,
            profile=_profile(sp.sqrt(-sp.cosh(2 * th) + 1 / sp.tanh(2 * t)),
                             (0.0, inf), (0.1, 0.15, 0.25),
                             lambda t: _sym_window(
                                 0.45 * _acosh_clip(1.0 / math.tanh(2 * t)))),
            notes=("2*pi-periodic wave emerging from the triangle wave at "
                   "t=0 and flattening onto the x-axis"),
        ),
        _entry(
            "interp-tan", Plane.MINKOWSKI, FlowKind.LIGHTCONE,
            (0.0, math.pi / 4),
            sp.atanh(sp.tan(x) * sp.tan(2 * t)),
            times=(0.2, math.pi / 8, 0.6),
            window=lambda t: _sym_window(0.75 * (math.pi / 2 - 2.0 * t)),
            finite=True,
            profile=_profile(sp.sqrt(sp.sinh(2 * th) + 1 / sp.tan(2 * t)),
                             (0.0, math.pi / 2), (0.4, 0.8, 1.2),
                             lambda t: (0.5 * math.asinh(-1.0 / math.tan(2 * t)) + 0.2,
                                        0.5 * math.asinh(-1.0 / math.tan(2 * t)) + 2.5)),
            notes=("joins the tan-screw behaviour near t=0 to the "
                   "tanh-screw collapse near t=pi/4; length rises from 0 "
                   "to a maximum and returns to 0"),
            length_bounds=lambda t: _sym_window(
                math.atan(1.0 / math.tan(2.0 * t)) - 1e-12),
        ),
        # Euclidean curve-shortening solutions.
        _entry(
            "euclid-circle", Plane.EUCLIDEAN, FlowKind.GRAPH_Y, (-inf, 0.0),
            sp.sqrt(-2 * t - x * x),
            times=(-2.0, -1.0, -0.5),
            window=lambda t: _sym_window(0.7 * math.sqrt(-2.0 * t)),
            finite=False,
            profile=_profile(1 / sp.sqrt(-2 * t), (-inf, 0.0),
                             (-2.0, -1.0, -0.5), (-2.0, 2.0)),
            notes="upper semicircle of the shrinking round solution",
            wick_partner="hyperbola-expander",
        ),
        _entry(
            "euclid-reaper", Plane.EUCLIDEAN, FlowKind.GRAPH_Y, (-inf, inf),
            sp.log(sp.cos(x)) - t,
            times=(-1.0, 0.0, 1.0), window=(-1.2, 1.2), finite=False,
            profile=_profile(sp.cos(th), (-inf, inf), (-0.5, 0.0, 0.5),
                             (-1.2, 1.2)),
            notes="downward-translating single-arch solution",
            wick_partner="translator-y",
        ),
        _entry(
            "euclid-oval", Plane.EUCLIDEAN, FlowKind.GRAPH_Y, (-inf, 0.0),
            sp.acosh(sp.exp(-t) * sp.cos(x)),
            times=(-2.0, -1.0, -0.5),
            window=lambda t: _sym_window(0.7 * math.acos(math.exp(t))),
            finite=False,
            profile=_profile(sp.sqrt(sp.cos(2 * th) - 1 / sp.tanh(2 * t)),
                             (-inf, 0.0), (-2.0, -1.0, -0.5), (-1.0, 1.0)),
            notes="upper half of the shrinking oval (paperclip) solution",
            wick_partner="oval-coshcosh",
        ),
        _entry(
            "euclid-wave", Plane.EUCLIDEAN, FlowKind.GRAPH_Y, (-inf, inf),
            sp.asinh(sp.exp(-t) * sp.cos(x)),
            times=(-0.5, 0.0, 0.3), window=(-2.0, 2.0), finite=False,
            profile=_profile(sp.sqrt(sp.cos(2 * th) - sp.tanh(2 * t)),
                             (-inf, inf), (-0.5, 0.0, 0.3),
                             lambda t: _sym_window(
                                 0.45 * math.acos(math.tanh(2 * t)))),
            notes="periodic wave of translating arches",
            wick_partner="wave-coshsinh",
        ),
    ]
    return {e.name: e for e in entries}


def _sym_window(half: float) -> tuple:
    return (-half, half)


def _acosh_clip(v: float) -> float:
    return math.acosh(max(1.0, v))


_REGISTRY = _build_registry()


def names() -> list[str]:
    return list(_REGISTRY)


def get(name: str) -> ExactSolution:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownSolution(
            f"{name!r} is not in the registry; known names: "
            f"{', '.join(_REGISTRY)}") from None


def verify_all(levels=DEFAULT_LEVELS, order_target=ORDER_TARGET,
               order_tol=ORDER_TOL, only=None) -> list[dict]:
    """Residual-verify every registry entry on a refinement ladder.

    Each entry is probed at its three interior times; it passes when the
    observed convergence order of the max residual is order_target within
    order_tol.  Failures are entries in the result, not exceptions.
    """
    out = []
    for name in (only or names()):
        e = get(name)
        rep = residual(e.kind, e.sampler, levels, e.times, e.window, e.plane)
        ok = rep.observed_order is not None \
            and abs(rep.observed_order - order_target) <= order_tol
        out.append({"name": name, "passed": bool(ok), "report": rep})
    return out


def curvature_profile_check(name: str, n_theta: int = 21,
                            n_t: int = 7) -> ResidualReport:
    """Residual of the curvature evolution PDE for a stored profile.

    The derivatives are exact (symbolic), evaluated on a (theta, t) probe
    grid inside the profile's domain, so a true profile sits at the
    roundoff floor.
    """
    e = get(name)
    if e.curvature_profile is None:
        raise NoProfile(f"{name} stores no curvature profile")
    prof = e.curvature_profile
    k = prof.form.expr
    sign = -1 if e.plane is Plane.MINKOWSKI else +1
    resid = sp.diff(k, _T) - (k * k * sp.diff(k, _TH, 2) + sign * k ** 3)
    fn = sp.lambdify((_TH, _T), resid, modules="numpy")

    worst, sumsq, count = 0.0, 0.0, 0
    times = np.linspace(prof.times[0], prof.times[-1], n_t)
    for t in times:
        lo, hi = prof.window(float(t))
        thetas = np.linspace(lo, hi, n_theta)
        vals = np.asarray(fn(thetas, float(t)), dtype=float)
        vals = np.broadcast_to(vals, thetas.shape)
        worst = max(worst, float(np.max(np.abs(vals))))
        sumsq += float(np.sum(vals * vals))
        count += len(thetas)
    level = {"h": 0.0, "max_abs": worst, "rms": math.sqrt(sumsq / count)}
    return ResidualReport("curvature_angle", e.plane.value,
                          [float(t) for t in times], [level], None)


def length_vs_time(name: str, t_grid) -> np.ndarray:
    """(t, Minkowski length) series for a finite-length entry."""
    e = get(name)
    if not e.finite_length:
        raise InfiniteLength(f"{name} has no finite Minkowski length")
    rows = [(float(t), e.length(float(t))) for t in np.asarray(t_grid, float)]
    return np.array(rows)


# Figure-series labels: curve -> (registry name, qualitative behaviour).
LENGTH_SERIES = {
    "A": ("translator-y", "constant"),
    "B": ("screw-tanh", "decreasing"),
    "C": ("wave-sinhsinh", "decreasing"),
    "D": ("wave-coshsinh", "decreasing"),
    "E": ("oval-coshcosh", "increasing"),
    "F": ("interp-tan", "unimodal"),
}

LENGTH_GRIDS = {
    "A": (-1.0, 1.0),
    "B": (-2.0, 0.45),
    "C": (-3.0, -0.05),
    "D": (-2.0, 2.0),
    "E": (0.05, 3.0),
    "F": (0.02, math.pi / 4 - 0.02),
}
