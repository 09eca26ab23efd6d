"""Arithmetic and geometry of hyperbolic (split-complex) numbers.

A point (x, y) of the split-signature plane is identified with the number
x + h*y where h*h = +1.  Multiplication is componentwise in the diagonal
basis xi = x + y, eta = x - y, which makes the algebra isomorphic to
R (+) R.  The squared modulus |x^2 - y^2| recovers the plane's indefinite
metric, so unit-modulus numbers e^{h*theta} implement boosts.

Values are immutable and all functions are pure; everything here is safe
to use concurrently.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import LightLikeDivision

# Extended-precision scalar for product accumulation (80-bit or wider on
# the platforms we target; degrades to double where unavailable).
_LD = np.longdouble

# Relative half-width of the numerically light-like band.
LIGHT_TOL = 1e-12


class CausalClass(enum.Enum):
    SPACE_LIKE = "space-like"
    TIME_LIKE = "time-like"
    LIGHT_LIKE = "light-like"


@dataclass(frozen=True)
class HyperbolicNumber:
    """Split-complex number x + h*y with h^2 = +1.

    The standard-basis pair (x, y) is stored; the diagonal coordinates
    (xi, eta) = (x+y, x-y) are derived on demand so the two views can
    never drift apart.
    """

    x: float
    y: float = 0.0

    # -- basis views ----------------------------------------------------

    @property
    def xi(self) -> float:
        return self.x + self.y

    @property
    def eta(self) -> float:
        return self.x - self.y

    def to_diagonal(self) -> tuple[float, float]:
        return (self.xi, self.eta)

    @staticmethod
    def from_diagonal(xi: float, eta: float) -> "HyperbolicNumber":
        return HyperbolicNumber((xi + eta) / 2.0, (xi - eta) / 2.0)

    # -- ring operations ------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        return HyperbolicNumber(self.x + other.x, self.y + other.y)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return HyperbolicNumber(self.x - other.x, self.y - other.y)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __neg__(self):
        return HyperbolicNumber(-self.x, -self.y)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return HyperbolicNumber(other * self.x, other * self.y)
        other = _coerce(other)
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return HyperbolicNumber(self.x / other, self.y / other)
        return mul(self, inverse(_coerce(other)))

    # -- metric quantities ----------------------------------------------

    def conj(self) -> "HyperbolicNumber":
        return HyperbolicNumber(self.x, -self.y)

    def squared_interval(self) -> float:
        # Factored form (x-y)(x+y) avoids cancellation near the light cone.
        return self.eta * self.xi

    def modulus(self) -> float:
        return math.sqrt(abs(self.squared_interval()))

    def is_light_like(self, tol: float = LIGHT_TOL) -> bool:
        return classify(self, tol) is CausalClass.LIGHT_LIKE


def _coerce(value) -> HyperbolicNumber:
    if isinstance(value, HyperbolicNumber):
        return value
    if isinstance(value, (int, float)):
        return HyperbolicNumber(float(value), 0.0)
    raise TypeError(f"cannot interpret {value!r} as a hyperbolic number")


ONE = HyperbolicNumber(1.0, 0.0)
H = HyperbolicNumber(0.0, 1.0)
# Conjugate idempotents spanning the light cone (the diagonal basis).
H_PLUS = HyperbolicNumber(0.5, 0.5)
H_MINUS = HyperbolicNumber(0.5, -0.5)


def mul(z1: HyperbolicNumber, z2: HyperbolicNumber) -> HyperbolicNumber:
    """Product (x1*x2 + y1*y2) + h*(x1*y2 + x2*y1).

    Componentwise in the diagonal basis: (xi1*xi2, eta1*eta2).  The dot
    products are accumulated in extended precision: near the light cone
    the product's interval is a small difference of large components, and
    plain double accumulation would lose modulus multiplicativity.
    """
    x1, y1 = _LD(z1.x), _LD(z1.y)
    x2, y2 = _LD(z2.x), _LD(z2.y)
    return HyperbolicNumber(float(x1 * x2 + y1 * y2),
                            float(x1 * y2 + x2 * y1))


def inner(z1: HyperbolicNumber, z2: HyperbolicNumber) -> float:
    """Indefinite inner product x1*x2 - y1*y2 (= Re conj(z1)*z2).

    Accumulated in extended precision, matching mul.
    """
    return float(_LD(z1.x) * _LD(z2.x) - _LD(z1.y) * _LD(z2.y))


def modulus(z: HyperbolicNumber) -> float:
    return z.modulus()


def conj(z: HyperbolicNumber) -> HyperbolicNumber:
    return z.conj()


def classify(z: HyperbolicNumber, tol: float = LIGHT_TOL) -> CausalClass:
    """Causal class from the sign of x^2 - y^2.

    The light-like band is relative: |x^2 - y^2| <= tol * max(1, x^2 + y^2),
    so large coordinates classify as stably as small ones.
    """
    q = z.squared_interval()
    band = tol * max(1.0, z.x * z.x + z.y * z.y)
    if abs(q) <= band:
        return CausalClass.LIGHT_LIKE
    return CausalClass.SPACE_LIKE if q > 0 else CausalClass.TIME_LIKE


def inverse(z: HyperbolicNumber) -> HyperbolicNumber:
    """Multiplicative inverse conj(z) / (x^2 - y^2).

    Raises LightLikeDivision for zero divisors (points on the light cone).
    """
    q = z.squared_interval()
    if abs(q) <= LIGHT_TOL * max(1.0, z.x * z.x + z.y * z.y):
        raise LightLikeDivision(f"{z} is light-like and has no inverse")
    return HyperbolicNumber(z.x / q, -z.y / q)


def hyp_exp(theta: float) -> HyperbolicNumber:
    """Unit-modulus number cosh(theta) + h*sinh(theta).

    Diagonal view (e^theta, e^{-theta}); these points form the boost group
    on the right arm of the unit hyperbola.
    """
    return HyperbolicNumber(math.cosh(theta), math.sinh(theta))


def rotate(z: HyperbolicNumber, theta: float) -> HyperbolicNumber:
    """Boost z -> e^{h*theta} z; preserves modulus and causal class."""
    return mul(hyp_exp(theta), z)
