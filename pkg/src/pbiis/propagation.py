"""Assignment trail and slack-based unit propagation over normalized constraints.

The slack of ``sum(c_i * l_i) >= d`` under a partial assignment is the sum of
coefficients of literals that are not yet false, minus ``d``.  Negative slack
means no extension can satisfy the constraint; any unassigned literal whose
coefficient exceeds the slack is forced true.

Slacks are maintained incrementally.  :meth:`SolverState.propagate` visits
constraints in id order, round after round, exactly as a full rescan would,
but skips constraints whose slack has not dropped since they were last seen
(such a constraint can neither conflict nor imply anything new).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable

from .model import ContractViolation, Literal, Model, NormConstraint
from .stats import RunStats

UNASSIGNED = -1


@dataclass(frozen=True, slots=True)
class TrailEntry:
    var: int
    value: int
    level: int
    reason: int | None  # None for decisions, else the implying constraint id

    @property
    def is_decision(self) -> bool:
        return self.reason is None


def slack(nc: NormConstraint, state: "SolverState") -> int:
    """Recompute the slack of ``nc`` from scratch against ``state``."""
    total = 0
    for coef, lit in nc.terms:
        value = state.value[lit.var]
        if value == UNASSIGNED or lit.satisfied_by(value):
            total += coef
    return total - nc.degree


class SolverState:
    """Partial assignment, trail, implication reasons and search bookkeeping.

    ``trace`` may be a list (lines are appended) or any callable taking a line.
    """

    def __init__(
        self,
        model: Model,
        trace: list[str] | Callable[[str], None] | None = None,
    ):
        self.model = model
        n = model.num_vars
        self.value = [UNASSIGNED] * n
        self.level = [0] * n
        self.reason: list[int | None] = [None] * n
        self.trail: list[int] = []
        self.decision_vars: list[int] = []  # decision_vars[k] was decided at level k+1
        self.decision_level = 0

        self.constraints: list[NormConstraint] = []
        self._vars: list[tuple[int, ...]] = []
        self._coefs: list[tuple[int, ...]] = []
        self._pos: list[tuple[bool, ...]] = []
        self._max_coef: list[int] = []
        self._slack: list[int] = []
        self._occ: list[list[tuple[int, int, bool]]] = [[] for _ in range(n)]
        self._pending: set[int] = set()
        self._cursor: int | None = None
        self._heap: list[int] = []
        self._in_heap: set[int] = set()
        self._next: set[int] = set()

        self.tried: dict[int, set[int]] = {}
        self.core: set[str] = set()
        self.learned: list[NormConstraint] = []
        self.last_conflict: tuple[int, tuple[int, ...]] | None = None
        self.stats = RunStats(
            cons=len(model.raw), vars=n, avg_lit=model.avg_literals()
        )

        if trace is None:
            self.emit = None
        elif callable(trace):
            self.emit = trace
        else:
            self.emit = trace.append

        for nc in model.normalized:
            self._install(nc)

    # -- constraint storage -------------------------------------------------

    def _install(self, nc: NormConstraint) -> None:
        nid = len(self.constraints)
        assert nc.id == nid
        self.constraints.append(nc)
        vars_ = tuple(lit.var for _, lit in nc.terms)
        coefs = tuple(c for c, _ in nc.terms)
        pos = tuple(lit.positive for _, lit in nc.terms)
        self._vars.append(vars_)
        self._coefs.append(coefs)
        self._pos.append(pos)
        self._max_coef.append(max(coefs, default=0))
        s = -nc.degree
        for var, coef, p in zip(vars_, coefs, pos):
            value = self.value[var]
            if value == UNASSIGNED or (value == 1) == p:
                s += coef
            self._occ[var].append((nid, coef, p))
        self._slack.append(s)
        self._touch(nid)

    def add_learned(self, terms: tuple[tuple[int, Literal], ...], degree: int) -> NormConstraint:
        nc = NormConstraint(len(self.constraints), None, terms, degree)
        self._install(nc)
        self.learned.append(nc)
        self.stats.learned += 1
        if self.emit:
            self.emit(f"learn constraint={nc.id} {self.describe(nc)}")
        return nc

    def describe(self, nc: NormConstraint) -> str:
        names = self.model.variables
        lhs = " ".join(
            f"+{c} {'' if lit.positive else '~'}{names[lit.var].name}" for c, lit in nc.terms
        )
        return f"{lhs} >= {nc.degree}"

    def slack_of(self, nid: int) -> int:
        return self._slack[nid]

    # -- assignment ---------------------------------------------------------

    def _touch(self, nid: int) -> None:
        cursor = self._cursor
        if cursor is None:
            self._pending.add(nid)
        elif nid > cursor:
            if nid not in self._in_heap:
                self._in_heap.add(nid)
                heapq.heappush(self._heap, nid)
        else:
            self._next.add(nid)

    def _assign(self, var: int, value: int, reason: int | None) -> None:
        self.value[var] = value
        self.level[var] = self.decision_level
        self.reason[var] = reason
        self.trail.append(var)
        is_one = value == 1
        slacks = self._slack
        for nid, coef, p in self._occ[var]:
            if p != is_one:
                slacks[nid] -= coef
                self._touch(nid)

    def _unassign(self, var: int) -> None:
        is_one = self.value[var] == 1
        slacks = self._slack
        for nid, coef, p in self._occ[var]:
            if p != is_one:
                slacks[nid] += coef
        self.value[var] = UNASSIGNED
        self.reason[var] = None

    def is_assigned(self, var: int) -> bool:
        return self.value[var] != UNASSIGNED

    def all_assigned(self) -> bool:
        return len(self.trail) == len(self.value)

    def entries(self) -> list[TrailEntry]:
        return [
            TrailEntry(v, self.value[v], self.level[v], self.reason[v]) for v in self.trail
        ]

    def decide(self, var: int, value: int) -> None:
        if self.value[var] != UNASSIGNED:
            raise ContractViolation(f"variable {self.model.variables[var].name} already assigned")
        if value not in (0, 1):
            raise ContractViolation(f"decision value must be 0 or 1, got {value!r}")
        self.decision_level += 1
        self.decision_vars.append(var)
        self.stats.decisions += 1
        self.stats.max_dl = max(self.stats.max_dl, self.decision_level)
        self._assign(var, value, None)
        if self.emit:
            self.emit(
                f"decide var={self.model.variables[var].name} value={value} level={self.decision_level}"
            )

    def backtrack(self, level: int) -> list[int]:
        """Undo every assignment made at ``level`` or deeper.

        Level-0 assignments are permanent, so ``backtrack(0)`` behaves like
        ``backtrack(1)``.  Returns the popped decision variables, deepest last.
        """
        if not 0 <= level <= self.decision_level:
            raise ContractViolation(
                f"backtrack level {level} outside 0..{self.decision_level}"
            )
        target = max(level, 1)
        trail = self.trail
        while trail and self.level[trail[-1]] >= target:
            self._unassign(trail.pop())
        popped = self.decision_vars[target - 1 :]
        del self.decision_vars[target - 1 :]
        self.decision_level = target - 1
        self.stats.backtracks += 1
        if self.emit:
            self.emit(f"backtrack level={target}")
        return popped

    # -- propagation --------------------------------------------------------

    def propagate(self) -> int | None:
        """Run unit propagation to fixpoint.

        Returns ``None`` when no constraint is violated, otherwise the id of the
        first violated constraint met in id order.
        """
        self._next = set()
        self._heap = sorted(self._pending)
        self._in_heap = set(self._pending)
        self._pending = set()
        slacks, values = self._slack, self.value
        names = self.model.variables
        emit = self.emit
        try:
            while True:
                if not self._heap:
                    if not self._next:
                        return None
                    self._heap = sorted(self._next)
                    self._in_heap = set(self._next)
                    self._next = set()
                nid = heapq.heappop(self._heap)
                self._in_heap.discard(nid)
                self._cursor = nid
                s = slacks[nid]
                if s < 0:
                    self._pending = set(self._heap) | self._next
                    if emit:
                        emit(f"violated constraint={nid} level={self.decision_level}")
                    return nid
                if self._max_coef[nid] <= s:
                    continue
                for var, coef, p in zip(self._vars[nid], self._coefs[nid], self._pos[nid]):
                    if coef > s and values[var] == UNASSIGNED:
                        value = 1 if p else 0
                        self._assign(var, value, nid)
                        if emit:
                            emit(
                                f"imply var={names[var].name} value={value} "
                                f"level={self.decision_level} reason={nid}"
                            )
        finally:
            self._cursor = None
            self._heap = []
            self._in_heap = set()
            self._next = set()
