"""Discount-function families, parameter validation and impatience.

Four families are provided. Exponential, linear-times-exponential and
sum-of-exponentials are the one-switch families; Hyperbolic is included as
a falsifier (it is strictly DI but not one-switch).

All evaluation methods accept scalars or numpy arrays of times.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from oneswitch.core import DomainError, NegativeTime

# Relative slack when testing the weak inequality a <= b/c + 1, so that
# exactly-representable boundary cases are not lost to rounding of b/c.
BOUNDARY_RTOL = 1e-12


class ParamOutOfRange(DomainError):
    """Raised with the text of the first violated parameter constraint."""


def _finite(**params):
    for name, v in params.items():
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            raise ParamOutOfRange(f"parameter {name}={v!r} must be a finite real")


def _check_time(t):
    if np.any(np.asarray(t) < 0):
        raise NegativeTime("discount functions are defined for t >= 0 only")


@dataclass(frozen=True)
class Exponential:
    """D(t) = exp(-r t)."""

    r: float

    def __post_init__(self):
        _finite(r=self.r)
        if not self.r > 0:
            raise ParamOutOfRange("exponential requires r > 0")

    def __call__(self, t):
        return np.exp(-self.r * np.asarray(t, dtype=float))

    def derivative(self, t):
        return -self.r * self(t)

    def rate(self, t):
        return np.zeros_like(np.asarray(t, dtype=float)) + self.r

    def rate_derivative(self, t):
        return np.zeros_like(np.asarray(t, dtype=float)) + 0.0


@dataclass(frozen=True)
class LinearTimesExponential:
    """D(t) = (1 + c t) exp(-r t) with r >= c >= 0, r > 0."""

    c: float
    r: float

    def __post_init__(self):
        _finite(c=self.c, r=self.r)
        if not self.r > 0:
            raise ParamOutOfRange("linear-times-exponential requires r > 0")
        if not self.c >= 0:
            raise ParamOutOfRange("linear-times-exponential requires c ≥ 0")
        if not self.r >= self.c:
            raise ParamOutOfRange("linear-times-exponential requires r ≥ c")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return (1.0 + self.c * t) * np.exp(-self.r * t)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        return (self.c - self.r - self.c * self.r * t) * np.exp(-self.r * t)

    def rate(self, t):
        t = np.asarray(t, dtype=float)
        return self.r - self.c / (1.0 + self.c * t)

    def rate_derivative(self, t):
        t = np.asarray(t, dtype=float)
        return self.c**2 / (1.0 + self.c * t) ** 2


@dataclass(frozen=True)
class SumOfExponentials:
    """D(t) = a exp(-b t) + (1 - a) exp(-(b + c) t) with a, b, c > 0, a <= b/c + 1."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        _finite(a=self.a, b=self.b, c=self.c)
        for name in ("a", "b", "c"):
            if not getattr(self, name) > 0:
                raise ParamOutOfRange(f"sum-of-exponentials requires {name} > 0")
        bound = self.b / self.c + 1.0
        if not (self.a <= bound or math.isclose(self.a, bound, rel_tol=BOUNDARY_RTOL)):
            raise ParamOutOfRange(
                f"sum-of-exponentials requires a ≤ b/c + 1 (= {bound!r}), got a={self.a!r}"
            )

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        slow = np.exp(-self.b * t)
        fast = np.exp(-(self.b + self.c) * t)
        # fast + a (slow - fast), so that D(0) == 1 exactly for every a;
        # in place because this is the hot loop of every numeric scan
        slow -= fast
        slow *= self.a
        slow += fast
        return slow

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        return (
            -self.a * self.b * np.exp(-self.b * t)
            - (1.0 - self.a) * (self.b + self.c) * np.exp(-(self.b + self.c) * t)
        )

    def rate(self, t):
        t = np.asarray(t, dtype=float)
        a, b, c = self.a, self.b, self.c
        e = np.exp(-c * t)
        return (a * b + (1.0 - a) * (b + c) * e) / (a + (1.0 - a) * e)

    def rate_derivative(self, t):
        t = np.asarray(t, dtype=float)
        a, c = self.a, self.c
        e = np.exp(-c * t)
        return c**2 * e * a * (a - 1.0) / (a + (1.0 - a) * e) ** 2


@dataclass(frozen=True)
class Hyperbolic:
    """D(t) = 1 / (1 + k t)."""

    k: float

    def __post_init__(self):
        _finite(k=self.k)
        if not self.k > 0:
            raise ParamOutOfRange("hyperbolic requires k > 0")

    def __call__(self, t):
        return 1.0 / (1.0 + self.k * np.asarray(t, dtype=float))

    def derivative(self, t):
        return -self.k / (1.0 + self.k * np.asarray(t, dtype=float)) ** 2

    def rate(self, t):
        return self.k / (1.0 + self.k * np.asarray(t, dtype=float))

    def rate_derivative(self, t):
        return -self.k**2 / (1.0 + self.k * np.asarray(t, dtype=float)) ** 2


DiscountFunction = Union[Exponential, LinearTimesExponential, SumOfExponentials, Hyperbolic]
CLOSED_FORM_FAMILIES = (Exponential, LinearTimesExponential, SumOfExponentials)

FAMILY_KEYS = {
    "exponential": Exponential,
    "lin_exp": LinearTimesExponential,
    "sum_exp": SumOfExponentials,
    "hyperbolic": Hyperbolic,
}


def _from_raw_lin_exp(c1, c2, r1) -> LinearTimesExponential:
    # D(t) = (c1 + c2 t) e^{r1 t}
    _finite(c1=c1, c2=c2, r1=r1)
    if c1 != 1:
        raise ParamOutOfRange("linear-times-exponential requires c1 = 1 (D(0) = 1)")
    return LinearTimesExponential(c=float(c2), r=-float(r1))


def _from_raw_sum_exp(c1, c2, r1, r2) -> SumOfExponentials:
    # D(t) = c1 e^{r1 t} + c2 e^{r2 t}
    _finite(c1=c1, c2=c2, r1=r1, r2=r2)
    if r1 == r2:
        raise ParamOutOfRange("sum-of-exponentials requires r1 ≠ r2")
    if abs(c1 + c2 - 1.0) > 1e-12:
        raise ParamOutOfRange("sum-of-exponentials requires c1 + c2 = 1 (D(0) = 1)")
    if r1 < r2:
        return SumOfExponentials(a=float(c2), b=-float(r2), c=float(r2 - r1))
    return SumOfExponentials(a=float(c1), b=-float(r1), c=float(r1 - r2))


def validate(obj: dict) -> DiscountFunction:
    """Build a validated discount function from its JSON form.

    ``obj`` is a one-key mapping such as ``{"lin_exp": {"c": 0.01,
    "r": 0.03}}``. The raw forms ``{"lin_exp": {"c1", "c2", "r1"}}`` and
    ``{"sum_exp": {"c1", "c2", "r1", "r2"}}`` are converted to the
    normalized parameters first.
    """
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ParamOutOfRange("discount must be an object with exactly one family key")
    (key, params), = obj.items()
    if key not in FAMILY_KEYS:
        raise ParamOutOfRange(f"unknown discount family {key!r}")
    if not isinstance(params, dict):
        raise ParamOutOfRange(f"parameters of {key!r} must be an object")
    names = set(params)
    if key == "lin_exp" and names == {"c1", "c2", "r1"}:
        return _from_raw_lin_exp(params["c1"], params["c2"], params["r1"])
    if key == "sum_exp" and names == {"c1", "c2", "r1", "r2"}:
        return _from_raw_sum_exp(params["c1"], params["c2"], params["r1"], params["r2"])
    cls = FAMILY_KEYS[key]
    expected = set(cls.__dataclass_fields__)
    if names != expected:
        raise ParamOutOfRange(f"{key!r} expects parameters {sorted(expected)}, got {sorted(names)}")
    _finite(**params)
    return cls(**{k: float(v) for k, v in params.items()})


def to_json(D: DiscountFunction) -> dict:
    key = next(k for k, cls in FAMILY_KEYS.items() if isinstance(D, cls))
    return {key: {name: getattr(D, name) for name in D.__dataclass_fields__}}


def evaluate(D: DiscountFunction, t):
    _check_time(t)
    return D(t)


def derivative(D: DiscountFunction, t):
    _check_time(t)
    return D.derivative(t)


def rate(D: DiscountFunction, t):
    """Time-preference rate -D'(t)/D(t), from the family's closed form."""
    _check_time(t)
    return D.rate(t)


def rate_derivative(D: DiscountFunction, t):
    _check_time(t)
    return D.rate_derivative(t)


class Impatience(enum.Enum):
    STATIONARY = "stationary"
    STRICTLY_DI = "strictly_di"
    STRICTLY_II = "strictly_ii"
    NON_MONOTONE = "non_monotone"


@dataclass(frozen=True)
class ClosedFormRule:
    rule: str


@dataclass(frozen=True)
class NumericWitness:
    """Sample points (t, s, sigma), t < s, supporting a numeric verdict.

    ``gaps`` holds :func:`ratio_gap` at each point: positive for DI,
    negative for II.
    """

    points: tuple[tuple[float, float, float], ...]
    gaps: tuple[float, ...]

    def recheck(self, D: DiscountFunction) -> tuple[float, ...]:
        return tuple(ratio_gap(D, t, s, sigma) for t, s, sigma in self.points)


def ratio_gap(D: DiscountFunction, t, s, sigma):
    """D(t) D(s+sigma) / (D(t+sigma) D(s)) - 1; sign gives the impatience direction."""
    return D(t) * D(s + sigma) / (D(t + sigma) * D(s)) - 1.0


@dataclass(frozen=True)
class ImpatienceClass:
    tag: Impatience
    evidence: Union[ClosedFormRule, NumericWitness]


def classify_impatience(D: DiscountFunction) -> ImpatienceClass:
    """Impatience class from the closed-form parameter rules of each family."""
    if isinstance(D, Exponential):
        return ImpatienceClass(Impatience.STATIONARY, ClosedFormRule("exponential: constant rate r"))
    if isinstance(D, LinearTimesExponential):
        if D.c == 0:
            return ImpatienceClass(Impatience.STATIONARY, ClosedFormRule("lin_exp with c = 0"))
        return ImpatienceClass(
            Impatience.STRICTLY_II, ClosedFormRule("lin_exp with c > 0: rate' = c²/(1+ct)² > 0")
        )
    if isinstance(D, SumOfExponentials):
        if D.a == 1:
            return ImpatienceClass(Impatience.STATIONARY, ClosedFormRule("sum_exp with a = 1"))
        if D.a < 1:
            return ImpatienceClass(
                Impatience.STRICTLY_DI, ClosedFormRule("sum_exp with a < 1: Q(t) = c²e^{-ct}a(a-1) < 0")
            )
        return ImpatienceClass(
            Impatience.STRICTLY_II, ClosedFormRule("sum_exp with 1 < a ≤ b/c+1: Q(t) > 0")
        )
    if isinstance(D, Hyperbolic):
        return ImpatienceClass(
            Impatience.STRICTLY_DI, ClosedFormRule("hyperbolic: -ln(1+kt) strictly convex")
        )
    raise TypeError(f"not a discount function: {D!r}")
