"""CDCL-style conflict set extraction.

:func:`extract_conflict_set` alternates propagation, conflict analysis and
decision flipping until it finds a satisfying assignment or runs out of
branches.  Every conflict is explained by walking implication reasons back
from the violated constraint; the raw constraints met on the way accumulate in
a *conflict core*, a (usually small, not necessarily minimal) infeasible
subset of the model.
"""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass, field
from typing import Callable

from .model import ContractViolation, Literal, Model, NormConstraint, strengthen
from .propagation import UNASSIGNED, SolverState
from .stats import RunStats

SAT, UNSAT, TIMEOUT = "sat", "unsat", "timeout"


@dataclass
class SearchOptions:
    learning: bool = True
    # saturation + division on learned constraints; a no-op on plain no-goods
    strengthen: bool = False
    time_limit_ms: float | None = None


@dataclass(frozen=True)
class ConflictCore:
    names: tuple[str, ...]  # model order
    total: int  # constraints in the model

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def reduction(self) -> float:
        return 1.0 - self.size / self.total if self.total else 0.0


@dataclass
class SearchOutcome:
    status: str
    assignment: list[int] | None
    core: ConflictCore | None
    stats: RunStats
    # (violated id, visited ids) of the conflict that ended an unsat run
    final_conflict: tuple[int, tuple[int, ...]] | None = None
    state: SolverState | None = field(default=None, repr=False, compare=False)

    @property
    def is_sat(self) -> bool:
        return self.status == SAT

    def core_dict(self, timing: bool = True) -> dict:
        core = self.core
        data = {
            "status": self.status,
            "core": list(core.names) if core else [],
            "cons": self.stats.cons,
            "core_size": core.size if core else 0,
            "reduction_pct": round(100 * core.reduction, 4) if core else 0.0,
            "verified_infeasible": self.status == UNSAT,
            "stats": {
                k: v
                for k, v in self.stats.to_dict().items()
                if k in ("conflicts", "decisions", "backtracks", "learned", "max_dl", "time_ms")
            },
        }
        if not timing:
            data["stats"].pop("time_ms")
        return data


def derive_learned_constraint(state: SolverState, visited) -> NormConstraint:
    """No-good over the decisions that appear in the visited constraints.

    The returned constraint says "at least one of these decisions differs".
    With no decisions involved a tautology (no terms, degree 0) is returned
    and the caller must not add it.
    """
    decisions = set()
    for nid in visited:
        for _, lit in state.constraints[nid].terms:
            var = lit.var
            if state.value[var] != UNASSIGNED and state.reason[var] is None:
                decisions.add(var)
    # the literal falsified by the current value of each decision
    terms = tuple((1, Literal(v, state.value[v] == 0)) for v in sorted(decisions))
    if not terms:
        return NormConstraint(-1, None, (), 0)
    return NormConstraint(-1, None, terms, 1)


def analyze_conflict(
    state: SolverState,
    violated: int,
    learning: bool = True,
    strengthen_learned: bool = False,
) -> int | None:
    """Trace reasons back from ``violated``; grow the core; maybe learn.

    Returns the deepest decision variable met, or ``None`` when the conflict
    only involves level-0 assignments.
    """
    if state.slack_of(violated) >= 0:
        raise ContractViolation(f"constraint {violated} is not violated")
    value, reason, level = state.value, state.reason, state.level
    stack = [violated]
    visited: list[int] = []
    seen: set[int] = set()
    latest, latest_level = None, -1
    while stack:
        nid = stack.pop()
        if nid in seen:
            continue
        seen.add(nid)
        visited.append(nid)
        for _, lit in state.constraints[nid].terms:
            var = lit.var
            if value[var] == UNASSIGNED:
                continue
            r = reason[var]
            if r is not None:
                stack.append(r)
            else:
                y = level[var]
                if y > latest_level:
                    latest, latest_level = var, y
                else:
                    assert y < latest_level or var == latest, "two decisions share a level"

    for nid in visited:
        origin = state.constraints[nid].origin
        if origin is not None:
            state.core.add(origin)
    state.stats.conflicts += 1
    state.last_conflict = (violated, tuple(visited))

    if state.emit:
        names = state.model.variables
        state.emit(
            f"conflict constraint={violated} visited={','.join(map(str, visited))} "
            f"latest={names[latest].name if latest is not None else '-'} "
            f"core={','.join(state.model.order(state.core))}"
        )

    if learning:
        nc = derive_learned_constraint(state, visited)
        if nc.terms:
            if strengthen_learned:
                nc = strengthen(nc)
            state.add_learned(nc.terms, nc.degree)
    return latest


def _flip_or_give_up(state: SolverState, var: int | None) -> bool:
    """The backtrack/flip step after a conflict.  False means unsat."""
    while True:
        if var is None:
            return False
        tried = state.tried.get(var, set())
        tried.add(state.value[var])
        if len(tried) == 2:
            state.tried.pop(var, None)
            lvl = state.level[var]
            if state.emit:
                state.emit(f"exhausted var={state.model.variables[var].name} level={lvl}")
            if lvl > 1:
                var = state.decision_vars[lvl - 2]
                continue
            return False
        old = state.value[var]
        popped = state.backtrack(state.level[var])
        # deeper decisions were made under the old value; their ledgers are stale
        for p in popped[1:]:
            state.tried.pop(p, None)
        state.tried[var] = tried
        state.decide(var, 1 - old)
        return True


def stats_snapshot(state: SolverState, status: str = "", elapsed_ms: float = 0.0) -> RunStats:
    return dataclasses.replace(
        state.stats,
        red_cons=0 if status == SAT else len(state.core),
        time_ms=elapsed_ms,
        outcome=status,
    )


def extract_conflict_set(
    model: Model,
    options: SearchOptions | None = None,
    trace: list[str] | Callable[[str], None] | None = None,
) -> SearchOutcome:
    """Decide satisfiability of ``model``; on unsat return the conflict core."""
    options = options or SearchOptions()
    start = time.perf_counter()
    deadline = None
    if options.time_limit_ms is not None:
        deadline = start + options.time_limit_ms / 1000.0
    state = SolverState(model, trace=trace)

    def finish(status: str) -> SearchOutcome:
        elapsed = (time.perf_counter() - start) * 1000.0
        stats = stats_snapshot(state, status, elapsed)
        if state.emit:
            state.emit(f"result {status}")
        if status == SAT:
            assignment = list(state.value)
            if not model.is_satisfied_by(assignment):
                raise AssertionError("search returned an assignment that violates the model")
            return SearchOutcome(SAT, assignment, None, stats, state=state)
        core = ConflictCore(tuple(model.order(state.core)), len(model.raw))
        final = state.last_conflict if status == UNSAT else None
        return SearchOutcome(status, None, core, stats, final, state=state)

    values = state.value
    while True:
        if deadline is not None and time.perf_counter() > deadline:
            return finish(TIMEOUT)
        violated = state.propagate()
        if violated is not None:
            var = analyze_conflict(state, violated, options.learning, options.strengthen)
            if not _flip_or_give_up(state, var):
                return finish(UNSAT)
        elif state.all_assigned():
            return finish(SAT)
        else:
            state.decide(values.index(UNASSIGNED), 1)


def is_satisfiable(model: Model, options: SearchOptions | None = None) -> bool:
    outcome = extract_conflict_set(model, options)
    if outcome.status == TIMEOUT:
        raise TimeoutError("search time limit reached")
    return outcome.is_sat


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def implication_dot(outcome: SearchOutcome) -> str:
    """Graphviz source for the implication graph of the run's final conflict."""
    lines = ["digraph implication {", "  rankdir=LR;"]
    if outcome.final_conflict is None or outcome.state is None:
        lines.append(f"  // no final conflict ({outcome.status})")
        lines.append("}")
        return "\n".join(lines) + "\n"
    state = outcome.state
    names = state.model.variables
    violated, visited = outcome.final_conflict
    position = {var: i for i, var in enumerate(state.trail)}

    def label(nid: int) -> str:
        origin = state.constraints[nid].origin
        return origin if origin is not None else f"learned#{nid}"

    nodes: dict[int, str] = {}
    edges: list[str] = []
    for nid in visited:
        for _, lit in state.constraints[nid].terms:
            var = lit.var
            if var in position:
                nodes[var] = names[var].name
    for var in sorted(nodes, key=position.__getitem__):
        shape = "box" if state.reason[var] is None else "ellipse"
        lines.append(
            f"  {_dot_quote(nodes[var])} [shape={shape}, "
            f"label={_dot_quote(f'{nodes[var]}={state.value[var]} @{state.level[var]}')}];"
        )
    for var in sorted(nodes, key=position.__getitem__):
        r = state.reason[var]
        if r is None:
            continue
        for _, lit in state.constraints[r].terms:
            src = lit.var
            if src != var and src in position and position[src] < position[var]:
                edges.append(
                    f"  {_dot_quote(names[src].name)} -> {_dot_quote(nodes[var])} "
                    f"[label={_dot_quote(label(r))}];"
                )
    lines.append(f"  \"#conflict\" [shape=octagon, label={_dot_quote('conflict: ' + label(violated))}];")
    for _, lit in state.constraints[violated].terms:
        if lit.var in position:
            edges.append(
                f"  {_dot_quote(names[lit.var].name)} -> \"#conflict\" [label={_dot_quote(label(violated))}];"
            )
    lines.extend(edges)
    lines.append("}")
    return "\n".join(lines) + "\n"
