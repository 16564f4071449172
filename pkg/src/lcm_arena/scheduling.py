"""Activation strategies for synchronous rounds, plus fairness auditing.

A strategy owns per-run cursor state; build a fresh instance for every run.
All built-in randomness is seeded, so equal seeds give equal schedules.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import ProtocolError, ScheduleExhausted

ActivationSet = frozenset


def validate_activation(raw: Iterable[int], n: int) -> frozenset[int]:
    act = frozenset(int(i) for i in raw)
    if not act:
        raise ProtocolError("activation set must be non-empty")
    bad = [i for i in act if not 0 <= i < n]
    if bad:
        raise ProtocolError(f"activation indices out of range: {sorted(bad)}")
    return act


class SchedulerStrategy:
    """Produces the set of robots activated in each round."""

    kind: str = "abstract"

    def next_activation(self, round_: int, n: int) -> frozenset[int]:
        raise NotImplementedError


class FsynchAll(SchedulerStrategy):
    kind = "fsynch"

    def next_activation(self, round_: int, n: int) -> frozenset[int]:
        return frozenset(range(n))


class RoundRobinSingleton(SchedulerStrategy):
    """Fair semi-synchronous adversary activating one robot at a time."""

    kind = "round-robin"

    def next_activation(self, round_: int, n: int) -> frozenset[int]:
        return frozenset({round_ % n})


class AlternatingTerminals(SchedulerStrategy):
    """Adversary that wakes only two designated robots, strictly alternating."""

    kind = "alt-terminals"

    def __init__(self, first: int, second: int):
        self.first = int(first)
        self.second = int(second)

    def next_activation(self, round_: int, n: int) -> frozenset[int]:
        pick = self.first if round_ % 2 == 0 else self.second
        return validate_activation({pick}, n)


class Scripted(SchedulerStrategy):
    """Fixed finite schedule, e.g. a recorded adversary prefix."""

    kind = "scripted"

    def __init__(self, script: Sequence[Iterable[int]]):
        self.script = [frozenset(int(i) for i in s) for s in script]

    def next_activation(self, round_: int, n: int) -> frozenset[int]:
        if round_ >= len(self.script):
            raise ScheduleExhausted(f"script covers {len(self.script)} rounds, asked for round {round_}")
        return validate_activation(self.script[round_], n)


class RandomFair(SchedulerStrategy):
    """Seeded random subsets, forced to stay fair within a window.

    Any robot whose activation gap would reach the window is force-included,
    so every robot is activated at least once in any ``window`` consecutive
    rounds.
    """

    kind = "random-fair"

    def __init__(self, seed: int, window: int):
        if window < 1:
            raise ProtocolError("fairness window must be at least 1")
        self.window = int(window)
        self._rng = random.Random(seed)
        self._last: dict[int, int] = {}

    def next_activation(self, round_: int, n: int) -> frozenset[int]:
        act = {i for i in range(n) if self._rng.random() < 0.5}
        for i in range(n):
            if round_ - self._last.get(i, -1) >= self.window:
                act.add(i)
        if not act:
            act = {self._rng.randrange(n)}
        for i in act:
            self._last[i] = round_
        return frozenset(act)


class Interactive(SchedulerStrategy):
    """Defers each round to an external supplier (wire protocol or test callback)."""

    kind = "interactive"

    def __init__(self, supplier: Callable[[int, int], Iterable[int]] | None = None):
        self.supplier = supplier

    def next_activation(self, round_: int, n: int) -> frozenset[int]:
        if self.supplier is None:
            raise ProtocolError("interactive scheduler has no activation supplier connected")
        return validate_activation(self.supplier(round_, n), n)


@dataclass(frozen=True)
class FairnessReport:
    window: int
    max_gaps: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return all(g <= self.window for g in self.max_gaps)


def fairness_check(
    activations: Sequence[Iterable[int]], n: int, window: int
) -> FairnessReport:
    """Per-robot maximum activation gap over a finite schedule.

    The gap before a robot's first activation counts from round 0, and the
    trailing gap after its last activation counts to the end of the
    schedule; a never-activated robot gets gap ``len(activations) + 1``.
    """
    horizon = len(activations)
    last = [-1] * n
    gaps = [0] * n
    for t, act in enumerate(activations):
        for i in act:
            if not 0 <= i < n:
                raise ProtocolError(f"activation index {i} out of range")
            gaps[i] = max(gaps[i], t - last[i])
            last[i] = t
    for i in range(n):
        gaps[i] = max(gaps[i], horizon - last[i])
    return FairnessReport(window=window, max_gaps=tuple(gaps))
