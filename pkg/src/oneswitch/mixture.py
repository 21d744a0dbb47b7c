"""Mixing of dated sequences whose outcomes are lotteries.

Two sequences are first lifted onto the union of their time grids, padding
with the neutral outcome, and then mixed pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from oneswitch.core import DatedSequence, DomainError, Lottery, NonIncreasingTimes


class GridMissingTime(DomainError):
    pass


class NotALottery(DomainError):
    pass


@dataclass(frozen=True)
class TimeGrid:
    points: tuple[float, ...]

    def __post_init__(self):
        for a, b in zip(self.points, self.points[1:]):
            if not a < b:
                raise NonIncreasingTimes(f"grid points must strictly increase, got {a!r} then {b!r}")
        if self.points and self.points[0] < 0:
            raise DomainError("grid points must be non-negative")

    def __len__(self) -> int:
        return len(self.points)


def concatenate_times(t: Sequence[float], s: Sequence[float]) -> TimeGrid:
    """Sorted union t|s; equal times are merged by exact float equality."""
    return TimeGrid(tuple(sorted(set(map(float, t)) | set(map(float, s)))))


def lift(seq: DatedSequence, grid: TimeGrid) -> DatedSequence:
    """Place ``seq`` on ``grid``, with the neutral outcome at every other time."""
    at = dict(zip(seq.times, seq.outcomes))
    missing = [t for t in seq.times if t not in set(grid.points)]
    if missing:
        raise GridMissingTime(f"grid lacks sequence times {missing}")
    neutral = Lottery.neutral() if seq.is_lottery_sequence else 0.0
    return DatedSequence(tuple(at.get(l, neutral) for l in grid.points), grid.points)


def mix(seq_a: DatedSequence, lam: float, seq_b: DatedSequence) -> DatedSequence:
    """(x, t) lam (y, s): lift both onto t|s, then mix each date's lotteries."""
    if not (seq_a.is_lottery_sequence and seq_b.is_lottery_sequence):
        raise NotALottery("mix needs lottery outcomes; call DatedSequence.promote() first")
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"mixing weight {lam!r} is not in [0, 1]")
    grid = concatenate_times(seq_a.times, seq_b.times)
    za, zb = lift(seq_a, grid), lift(seq_b, grid)
    return DatedSequence(
        tuple(x.mix(lam, y) for x, y in zip(za.outcomes, zb.outcomes)),
        grid.points,
    )
