"""Seeded workforce-scheduling instances.

Variables ``x(a,d,s)`` say agent ``a`` works shift ``s`` on day ``d``.  The
constraint families, in model order, are

* ``demand(d,s)``: at least ``demand`` agents on every shift
* ``window(a,d..e)``: at most ``window_cap`` worked days in every run of
  ``window_cap + 1`` consecutive days (a max-consecutive-workdays rule)
* ``dayoff(a,d)``: no shift at all on a requested day off (an equality)
* ``daycap(a,d)``: at most ``max_shifts_per_day`` shifts per agent and day

Names use 1-based indices; :class:`ScheduleParams` uses 0-based ones.
An injected conflict overrides parameters at one seeded location so that a
small group of constraints cannot hold together.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .model import EQ, GE, LE, Model, RawConstraint

INJECTIONS = ("none", "demand_exceeds_capacity", "dayoff_vs_demand", "window_cap_vs_demand")


class ScheduleError(ValueError):
    pass


@dataclass
class ScheduleParams:
    agents: int
    days: int
    shifts: int
    demand: int = 1
    max_shifts_per_day: int = 1
    # cap on worked days in any window of window_cap + 1 days; None disables
    window_cap: int | None = None
    dayoffs: list[tuple[int, int]] = field(default_factory=list)  # (agent, day)
    # extra day-off requests drawn from the seed
    random_dayoffs: int = 0
    injection: str = "none"
    seed: int = 0
    name: str = ""

    def __post_init__(self):
        self.dayoffs = [tuple(p) for p in self.dayoffs]
        for attr in ("agents", "days", "shifts", "max_shifts_per_day"):
            if getattr(self, attr) < 1:
                raise ScheduleError(f"{attr} must be positive")
        if self.demand < 0 or self.random_dayoffs < 0:
            raise ScheduleError("demand and random_dayoffs must be non-negative")
        if self.window_cap is not None and self.window_cap < 1:
            raise ScheduleError("window_cap must be positive")
        if self.injection not in INJECTIONS:
            raise ScheduleError(f"unknown injection {self.injection!r}")
        if not 0 <= self.seed < 2**64:
            raise ScheduleError("seed must be a 64-bit unsigned integer")
        for a, d in self.dayoffs:
            if not (0 <= a < self.agents and 0 <= d < self.days):
                raise ScheduleError(f"day-off ({a}, {d}) out of range")

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        return (
            f"sched-a{self.agents}-d{self.days}-s{self.shifts}-"
            f"{self.injection}-seed{self.seed}"
        )

    def to_dict(self) -> dict:
        data = asdict(self)
        data["dayoffs"] = [list(p) for p in self.dayoffs]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ScheduleParams":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ScheduleError(f"unknown parameter(s): {sorted(unknown)}")
        return cls(**data)


def var_name(a: int, d: int, s: int) -> str:
    return f"x(a{a + 1},d{d + 1},s{s + 1})"


def generate_instance(params: ScheduleParams) -> Model:
    p = params
    rng = random.Random(p.seed)
    A, D, S = p.agents, p.days, p.shifts

    def vid(a, d, s):
        return (a * D + d) * S + s

    demand = {(d, s): p.demand for d in range(D) for s in range(S)}
    dayoffs = list(dict.fromkeys(p.dayoffs))
    for _ in range(p.random_dayoffs):
        pair = (rng.randrange(A), rng.randrange(D))
        if pair not in dayoffs:
            dayoffs.append(pair)

    if p.injection == "demand_exceeds_capacity":
        d, s = rng.randrange(D), rng.randrange(S)
        demand[d, s] = A + 1
    elif p.injection == "dayoff_vs_demand":
        if not dayoffs:
            dayoffs.append((rng.randrange(A), rng.randrange(D)))
        _, d = dayoffs[0]
        demand[d, rng.randrange(S)] = A
    elif p.injection == "window_cap_vs_demand":
        k = p.window_cap
        if k is None or k + 1 > D:
            raise ScheduleError("window_cap_vs_demand needs window_cap + 1 <= days")
        start = rng.randrange(D - k)
        s = rng.randrange(S)
        for d in range(start, start + k + 1):
            demand[d, s] = A

    raw: list[RawConstraint] = []
    for d in range(D):
        for s in range(S):
            if demand[d, s] > 0:
                terms = tuple((1, vid(a, d, s)) for a in range(A))
                raw.append(RawConstraint(f"demand(d{d + 1},s{s + 1})", terms, GE, demand[d, s]))
    if p.window_cap is not None and p.window_cap < D:
        k = p.window_cap
        for a in range(A):
            for start in range(D - k):
                terms = tuple(
                    (1, vid(a, d, s)) for d in range(start, start + k + 1) for s in range(S)
                )
                # with one shift a day this counts worked days exactly
                raw.append(
                    RawConstraint(f"window(a{a + 1},d{start + 1}..d{start + k + 1})", terms, LE, k)
                )
    for a, d in dayoffs:
        terms = tuple((1, vid(a, d, s)) for s in range(S))
        raw.append(RawConstraint(f"dayoff(a{a + 1},d{d + 1})", terms, EQ, 0))
    # daycaps go last: order-driven minimizers then drop them last, and the
    # sub-models they probe stay easy for the fixed-order search
    for a in range(A):
        for d in range(D):
            terms = tuple((1, vid(a, d, s)) for s in range(S))
            raw.append(RawConstraint(f"daycap(a{a + 1},d{d + 1})", terms, LE, p.max_shifts_per_day))

    names = [var_name(a, d, s) for a in range(A) for d in range(D) for s in range(S)]
    return Model.build(names, raw)


def load_manifest(path: str | Path) -> list[ScheduleParams]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, list):
        raise ScheduleError("manifest must be a JSON list of parameter objects")
    return [ScheduleParams.from_dict(entry) for entry in data]


def save_manifest(params: list[ScheduleParams], path: str | Path) -> None:
    Path(path).write_text(json.dumps([p.to_dict() for p in params], indent=2) + "\n", encoding="utf-8")


def benchmark_suite(count: int = 30, seed: int = 0, size: str = "ci") -> list[ScheduleParams]:
    """Seeded infeasible instances with localized injected conflicts.

    ``size="ci"`` gives 200-300 constraint models that a pure-Python oracle
    handles in seconds; ``size="large"`` gives 100k+ constraints.
    """
    rng = random.Random(seed)
    injections = INJECTIONS[1:]
    suite = []
    for i in range(count):
        if size == "large":
            agents, days, shifts = rng.randint(300, 400), 180, 2
        else:
            agents, days, shifts = rng.randint(8, 10), 14, 2
        suite.append(
            ScheduleParams(
                agents=agents,
                days=days,
                shifts=shifts,
                demand=1,
                window_cap=5,
                random_dayoffs=rng.randint(0, agents),
                injection=injections[i % len(injections)],
                seed=rng.getrandbits(32),
                name=f"{size}-{i:03d}",
            )
        )
    return suite
