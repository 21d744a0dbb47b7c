"""Domain types: outcomes, lotteries, dated sequences and preference models.

Outcomes are non-negative reals; in mixture contexts they are finite-support
lotteries over such reals. A dated sequence pairs outcomes with strictly
increasing, non-negative times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence, Union

import numpy as np

if TYPE_CHECKING:
    from oneswitch.discount import DiscountFunction


class DomainError(ValueError):
    """Base class for inputs that violate a domain invariant."""


class NonIncreasingTimes(DomainError):
    pass


class NegativeTime(DomainError):
    pass


class LengthMismatch(DomainError):
    pass


class ShiftOutOfDomain(DomainError):
    pass


class NegativeOutcome(DomainError):
    pass


class InvalidLottery(DomainError):
    pass


PROB_TOL = 1e-12


@dataclass(frozen=True)
class Lottery:
    """Finite-support lottery over non-negative outcomes.

    ``support`` is a tuple of ``(outcome, probability)`` pairs with distinct
    outcomes. Use :meth:`of` to build one from arbitrary pairs; it merges
    repeated outcomes and drops zero-probability atoms.
    """

    support: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.support:
            raise InvalidLottery("lottery support must be non-empty")
        xs = [x for x, _ in self.support]
        if len(set(xs)) != len(xs):
            raise InvalidLottery("lottery support outcomes must be distinct")
        for x, p in self.support:
            if not (math.isfinite(x) and x >= 0):
                raise NegativeOutcome(f"outcome {x!r} is not in [0, inf)")
            if not (0.0 <= p <= 1.0):
                raise InvalidLottery(f"probability {p!r} is not in [0, 1]")
        total = math.fsum(p for _, p in self.support)
        if abs(total - 1.0) > PROB_TOL:
            raise InvalidLottery(f"probabilities sum to {total!r}, not 1")

    @classmethod
    def of(cls, pairs: Iterable[tuple[float, float]]) -> Lottery:
        merged: dict[float, float] = {}
        for x, p in pairs:
            x, p = float(x), float(p)
            merged[x] = merged.get(x, 0.0) + p
        support = tuple(sorted((x, p) for x, p in merged.items() if p > 0.0))
        return cls(support)

    @classmethod
    def degenerate(cls, x: float) -> Lottery:
        return cls(((float(x), 1.0),))

    @classmethod
    def neutral(cls) -> Lottery:
        return cls.degenerate(0.0)

    def mix(self, lam: float, other: Lottery) -> Lottery:
        """The lottery ``self lam other``: ``self`` with weight ``lam``."""
        if not 0.0 <= lam <= 1.0:
            raise DomainError(f"mixing weight {lam!r} is not in [0, 1]")
        pairs = [(x, lam * p) for x, p in self.support]
        pairs += [(x, (1.0 - lam) * p) for x, p in other.support]
        return Lottery.of(pairs)

    def expectation(self, f) -> float:
        return math.fsum(p * f(x) for x, p in self.support)


Outcome = Union[float, Lottery]


def check_outcome(x) -> Outcome:
    if isinstance(x, Lottery):
        return x
    x = float(x)
    if not (math.isfinite(x) and x >= 0):
        raise NegativeOutcome(f"outcome {x!r} is not in [0, inf)")
    return x


@dataclass(frozen=True)
class DatedSequence:
    """Outcomes received at strictly increasing times ``t_1 < ... < t_n``."""

    outcomes: tuple[Outcome, ...]
    times: tuple[float, ...]

    def __post_init__(self):
        if len(self.outcomes) != len(self.times):
            raise LengthMismatch(
                f"{len(self.outcomes)} outcomes but {len(self.times)} times"
            )
        if not self.times:
            raise LengthMismatch("a dated sequence needs at least one outcome")
        for t in self.times:
            if not math.isfinite(t):
                raise NegativeTime(f"time {t!r} is not finite")
            if t < 0:
                raise NegativeTime(f"time {t!r} is negative")
        for a, b in zip(self.times, self.times[1:]):
            if not a < b:
                raise NonIncreasingTimes(f"times must strictly increase, got {a!r} then {b!r}")

    def __len__(self) -> int:
        return len(self.times)

    @property
    def is_lottery_sequence(self) -> bool:
        return all(isinstance(x, Lottery) for x in self.outcomes)

    def promote(self) -> DatedSequence:
        """Replace every scalar outcome by the degenerate lottery at it."""
        return DatedSequence(
            tuple(x if isinstance(x, Lottery) else Lottery.degenerate(x) for x in self.outcomes),
            self.times,
        )


def make_sequence(outcomes: Sequence, times: Sequence[float]) -> DatedSequence:
    """Validate raw vectors into a :class:`DatedSequence`."""
    if len(outcomes) != len(times):
        raise LengthMismatch(f"{len(outcomes)} outcomes but {len(times)} times")
    return DatedSequence(
        tuple(check_outcome(x) for x in outcomes),
        tuple(float(t) for t in times),
    )


def delay(seq: DatedSequence, sigma: float) -> DatedSequence:
    """Shift every time of ``seq`` by ``sigma``; negative shifts advance it."""
    if seq.times[0] + sigma < 0:
        raise ShiftOutOfDomain(
            f"shift {sigma!r} moves first time {seq.times[0]!r} below zero"
        )
    return DatedSequence(seq.outcomes, tuple(t + sigma for t in seq.times))


@dataclass(frozen=True)
class PowerUtility:
    """u(x) = scale * x**gamma, extended to lotteries by expectation.

    ``scale`` only exists to exercise the irrelevance of the utility range.
    """

    gamma: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise DomainError(f"power utility requires gamma > 0, got {self.gamma!r}")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise DomainError(f"utility scale must be > 0, got {self.scale!r}")

    def scalar(self, x: float) -> float:
        return self.scale * float(x) ** self.gamma

    def __call__(self, x: Outcome) -> float:
        if isinstance(x, Lottery):
            return x.expectation(self.scalar)
        return self.scalar(x)

    def inverse(self, v: float) -> float:
        return (v / self.scale) ** (1.0 / self.gamma)

    def values(self, seq: DatedSequence) -> np.ndarray:
        return np.array([self(x) for x in seq.outcomes], dtype=float)


@dataclass(frozen=True)
class PreferenceModel:
    """DU representation: U(x, t) = sum_i D(t_i) u(x_i)."""

    utility: PowerUtility
    discount: DiscountFunction
