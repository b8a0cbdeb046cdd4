"""Feasibility oracle and IIS minimizers.

Every minimizer works over raw constraint names in model order and asks the
:class:`Oracle` whether a subset is feasible.  ``oracle_calls`` in the result
counts those queries (memo hits excluded), which is the cost measure used to
compare the methods.

The entry precondition (the input really is infeasible) is checked with a
separate uncounted query, so that e.g. the deletion filter costs exactly one
call per input constraint.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import Model
from .search import SAT, TIMEOUT, UNSAT, SearchOptions, SearchOutcome, extract_conflict_set

METHODS = ("qx", "deletion", "additive", "csea+qx")


class FeasibleInputError(ValueError):
    """A minimizer was handed a feasible constraint set."""

    def __init__(self, message: str, search: SearchOutcome | None = None):
        super().__init__(message)
        self.search = search


class OracleTimeout(TimeoutError):
    """The time budget ran out during a feasibility query."""


class Oracle:
    """Counts and memoizes feasibility queries on sub-models of ``model``."""

    def __init__(
        self,
        model: Model,
        memo: bool = True,
        learning: bool = True,
        deadline: float | None = None,
    ):
        self.model = model
        self.memo = memo
        self.learning = learning
        self.deadline = deadline  # absolute time.perf_counter() value
        self.calls = 0
        self.hits = 0
        self.history: list[tuple[str, ...]] = []  # counted queries, in order
        self._cache: dict[frozenset[str], bool] = {}

    def _solve(self, names: frozenset[str]) -> bool:
        limit = None
        if self.deadline is not None:
            limit = (self.deadline - time.perf_counter()) * 1000.0
            if limit <= 0:
                raise OracleTimeout("time limit reached before feasibility query")
        sub = self.model.restrict(names)
        outcome = extract_conflict_set(sub, SearchOptions(learning=self.learning, time_limit_ms=limit))
        if outcome.status == TIMEOUT:
            raise OracleTimeout("time limit reached during feasibility query")
        return outcome.status == SAT

    def is_feasible(self, names: Iterable[str]) -> bool:
        names = tuple(names)
        key = frozenset(names)
        if self.memo and key in self._cache:
            self.hits += 1
            return self._cache[key]
        self.calls += 1
        self.history.append(names)
        answer = self._solve(key)
        if self.memo:
            self._cache[key] = answer
        return answer

    def check_uncounted(self, names: Iterable[str]) -> bool:
        """Feasibility without touching the counter or the cache."""
        return self._solve(frozenset(names))


@dataclass
class IISResult:
    method: str
    names: tuple[str, ...]
    oracle_calls: int
    time_ms: float = 0.0
    complete: bool = True  # False when a timeout cut the run short
    verified: bool | None = None
    # csea+qx only: the conflict core that was minimized and its search outcome
    core_size: int | None = None
    search: SearchOutcome | None = None

    def to_dict(self, timing: bool = True) -> dict:
        data = {
            "method": self.method,
            "iis": list(self.names),
            "oracle_calls": self.oracle_calls,
            "time_ms": round(self.time_ms, 3),
            "verified": bool(self.verified),
        }
        if not timing:
            del data["time_ms"]
        return data


def _require_infeasible(oracle: Oracle, names: Sequence[str]) -> None:
    if oracle.check_uncounted(names):
        raise FeasibleInputError("constraint set is feasible; there is no IIS")


def _qx(oracle: Oracle, background: list[str], delta: bool, candidates: list[str]) -> list[str]:
    if delta and not oracle.is_feasible(background):
        return []
    if len(candidates) == 1:
        return list(candidates)
    split = len(candidates) // 2
    first, second = candidates[:split], candidates[split:]
    found2 = _qx(oracle, background + first, bool(first), second)
    found1 = _qx(oracle, background + found2, bool(found2), first)
    return found1 + found2


def quickxplain(
    oracle: Oracle,
    candidates: Sequence[str],
    background: Sequence[str] = (),
    check: bool = True,
) -> list[str]:
    """Preferred minimal subset S of ``candidates`` with background + S infeasible.

    Earlier candidates are preferred.  Returns names in candidate order.
    """
    candidates = list(candidates)
    background = list(background)
    if check:
        _require_infeasible(oracle, background + candidates)
        if background and not oracle.check_uncounted(background):
            return []
    if not candidates:
        return []
    found = set(_qx(oracle, background, False, candidates))
    return [c for c in candidates if c in found]


def deletion_filter(oracle: Oracle, names: Sequence[str], check: bool = True) -> list[str]:
    """Drop each constraint in turn unless that makes the rest feasible."""
    kept = list(names)
    if check:
        _require_infeasible(oracle, kept)
    for name in list(kept):
        trial = [n for n in kept if n != name]
        if not oracle.is_feasible(trial):
            kept = trial
    return kept


def additive_deletion(oracle: Oracle, names: Sequence[str], check: bool = True) -> list[str]:
    """Grow prefixes until infeasible to collect an IIS kernel, then filter it."""
    pool = list(names)
    if check:
        _require_infeasible(oracle, pool)
    kernel: list[str] = []
    while True:
        test = list(kernel)
        added = None
        for name in pool:
            if name in kernel:
                continue
            test.append(name)
            if not oracle.is_feasible(test):
                added = name
                break
        if added is None:
            # only reachable if the oracle contradicts the entry check
            raise FeasibleInputError("constraint set is feasible; there is no IIS")
        kernel.append(added)
        if len(test) == len(kernel) or not oracle.is_feasible(kernel):
            break
        # the rest of the IIS lies among the members tried before ``added``
        pool = test[:-1]
    order = {n: i for i, n in enumerate(names)}
    kernel.sort(key=order.__getitem__)
    return deletion_filter(oracle, kernel, check=False)


def verify_iis(model: Model, names: Iterable[str], learning: bool = True) -> bool:
    """Infeasible, and feasible after removing any single member."""
    names = list(names)
    oracle = Oracle(model, memo=False, learning=learning)
    if oracle.is_feasible(names):
        return False
    return all(oracle.is_feasible([n for n in names if n != drop]) for drop in names)


def _run(model, method, body, memo, learning, time_limit_ms):
    start = time.perf_counter()
    deadline = None if time_limit_ms is None else start + time_limit_ms / 1000.0
    oracle = Oracle(model, memo=memo, learning=learning, deadline=deadline)
    partial: list[str] = []
    try:
        names = body(oracle, deadline, partial)
        complete = True
    except OracleTimeout:
        names, complete = partial, False
    elapsed = (time.perf_counter() - start) * 1000.0
    return IISResult(method, tuple(model.order(names)), oracle.calls, elapsed, complete,
                     verified=None if complete else False), oracle


def minimize(
    model: Model,
    method: str,
    memo: bool = True,
    learning: bool = True,
    time_limit_ms: float | None = None,
    verify: bool = False,
) -> IISResult:
    """Run one of :data:`METHODS` on the whole model."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    if method == "csea+qx":
        return csea_then_quickxplain(model, memo, learning, time_limit_ms, verify)
    names = model.constraint_names
    algorithms = {"qx": quickxplain, "deletion": deletion_filter, "additive": additive_deletion}

    def body(oracle, deadline, partial):
        partial.extend(names)
        return algorithms[method](oracle, names)

    result, _ = _run(model, method, body, memo, learning, time_limit_ms)
    if verify and result.complete:
        result.verified = verify_iis(model, result.names, learning)
    return result


def csea_then_quickxplain(
    model: Model,
    memo: bool = True,
    learning: bool = True,
    time_limit_ms: float | None = None,
    verify: bool = False,
) -> IISResult:
    """Extract a conflict core by search, then shrink it with QuickXplain.

    ``oracle_calls`` covers the QuickXplain phase; ``time_ms`` covers both.
    """
    start = time.perf_counter()
    outcome = extract_conflict_set(
        model, SearchOptions(learning=learning, time_limit_ms=time_limit_ms)
    )
    if outcome.status == SAT:
        raise FeasibleInputError("model is feasible", outcome)
    core = list(outcome.core.names)
    if outcome.status == TIMEOUT:
        elapsed = (time.perf_counter() - start) * 1000.0
        return IISResult("csea+qx", tuple(core), 0, elapsed, False, False, len(core), outcome)
    assert outcome.status == UNSAT
    remaining = None
    if time_limit_ms is not None:
        remaining = max(time_limit_ms - outcome.stats.time_ms, 0.0)

    def body(oracle, deadline, partial):
        partial.extend(core)
        # the core is infeasible by construction, so no entry check
        return quickxplain(oracle, core, check=False)

    result, _ = _run(model, "csea+qx", body, memo, learning, remaining)
    result.time_ms = (time.perf_counter() - start) * 1000.0
    result.core_size = len(core)
    result.search = outcome
    if verify and result.complete:
        result.verified = verify_iis(model, result.names, learning)
    return result
