"""Pseudo-Boolean model types and the normalized (>=, positive coefficient) form.

A :class:`Model` holds user-facing :class:`RawConstraint` objects, each with a
unique name, over 0/1 variables.  On construction every raw constraint is
rewritten into one (``<=``/``>=``) or two (``=``) :class:`NormConstraint`
objects of the form ``sum(c_i * l_i) >= degree`` with ``c_i > 0``.  Each
normalized constraint remembers the raw name it came from so that cores and
IISs are always reported over the user's constraints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Iterable, Mapping, Sequence

INT64_MAX = 2**63 - 1

LE, GE, EQ = "<=", ">=", "="
SENSES = (LE, GE, EQ)


class ModelError(ValueError):
    """Invalid model content (duplicate names, overflow, unknown variable, ...)."""


class ContractViolation(RuntimeError):
    """An operation was called outside its precondition."""


@dataclass(frozen=True, slots=True)
class Variable:
    id: int
    name: str


@dataclass(frozen=True, slots=True)
class Literal:
    """A variable together with the value that satisfies it."""

    var: int
    positive: bool = True

    def __invert__(self) -> "Literal":
        return Literal(self.var, not self.positive)

    def satisfied_by(self, value: int) -> bool:
        return (value == 1) == self.positive

    def __str__(self) -> str:
        return f"{'' if self.positive else '~'}x{self.var}"


@dataclass(frozen=True, slots=True)
class RawConstraint:
    name: str
    terms: tuple[tuple[int, int], ...]
    sense: str
    rhs: int

    def __post_init__(self):
        if not self.name:
            raise ModelError("constraint name must be non-empty")
        if self.sense not in SENSES:
            raise ModelError(f"{self.name}: unknown sense {self.sense!r}")
        seen = set()
        magnitude = abs(self.rhs)
        for coef, var in self.terms:
            if coef == 0:
                raise ModelError(f"{self.name}: zero coefficient on variable {var}")
            if var in seen:
                raise ModelError(f"{self.name}: variable {var} appears twice")
            seen.add(var)
            magnitude += abs(coef)
        if magnitude > INT64_MAX:
            raise ModelError(f"{self.name}: coefficient magnitudes overflow 64 bits")

    def lhs(self, assignment: Sequence[int] | Mapping[int, int]) -> int:
        return sum(coef * assignment[var] for coef, var in self.terms)

    def evaluate(self, assignment: Sequence[int] | Mapping[int, int]) -> bool:
        lhs = self.lhs(assignment)
        if self.sense == GE:
            return lhs >= self.rhs
        if self.sense == LE:
            return lhs <= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True, slots=True)
class NormConstraint:
    """``sum(coef * lit) >= degree`` with every coefficient positive.

    ``origin`` is the raw constraint name, or ``None`` for learned constraints.
    """

    id: int
    origin: str | None
    terms: tuple[tuple[int, Literal], ...]
    degree: int

    @property
    def is_tautology(self) -> bool:
        return self.degree <= 0

    def variables(self) -> list[int]:
        return [lit.var for _, lit in self.terms]

    def __str__(self) -> str:
        lhs = " ".join(f"+{c} {lit}" for c, lit in self.terms) or "0"
        return f"{lhs} >= {self.degree}"


def evaluate(nc: NormConstraint, assignment: Sequence[int] | Mapping[int, int]) -> bool:
    """True iff the normalized constraint holds under a total assignment."""
    total = 0
    for coef, lit in nc.terms:
        value = assignment[lit.var]
        if value not in (0, 1):
            raise ContractViolation(f"variable x{lit.var} is unassigned")
        if lit.satisfied_by(value):
            total += coef
    return total >= nc.degree


def _as_ge(terms, rhs, next_id, origin):
    lits = []
    degree = rhs
    for coef, var in terms:
        if coef > 0:
            lits.append((coef, Literal(var, True)))
        else:
            # a*x == |a|*(1-x) - |a|
            lits.append((-coef, Literal(var, False)))
            degree -= coef
    return NormConstraint(next_id, origin, tuple(lits), degree)


def normalize(raw: RawConstraint, next_id: int) -> list[NormConstraint]:
    """Rewrite ``raw`` into normalized >= constraints with ids from ``next_id``."""
    flipped = tuple((-c, v) for c, v in raw.terms)
    if raw.sense == GE:
        return [_as_ge(raw.terms, raw.rhs, next_id, raw.name)]
    if raw.sense == LE:
        return [_as_ge(flipped, -raw.rhs, next_id, raw.name)]
    return [
        _as_ge(raw.terms, raw.rhs, next_id, raw.name),
        _as_ge(flipped, -raw.rhs, next_id + 1, raw.name),
    ]


def strengthen(nc: NormConstraint) -> NormConstraint:
    """Saturate coefficients at the degree, then divide by their gcd rounding up.

    Both steps are valid cutting-plane rules over 0/1 variables.
    """
    if nc.degree <= 0 or not nc.terms:
        return nc
    terms = [(min(c, nc.degree), lit) for c, lit in nc.terms]
    g = 0
    for c, _ in terms:
        g = gcd(g, c)
    degree = nc.degree
    if g > 1:
        terms = [(c // g, lit) for c, lit in terms]
        degree = -(-degree // g)
    return NormConstraint(nc.id, nc.origin, tuple(terms), degree)


@dataclass(frozen=True)
class Model:
    """Named PB constraints over named binary variables.

    Build one with :meth:`Model.build`; the normalized constraints and origin
    index are derived and never edited afterwards.
    """

    variables: tuple[Variable, ...]
    raw: tuple[RawConstraint, ...]
    normalized: tuple[NormConstraint, ...] = field(repr=False)
    origin_index: Mapping[str, tuple[int, ...]] = field(repr=False)

    @classmethod
    def build(cls, variable_names: Iterable[str], raw: Iterable[RawConstraint]) -> "Model":
        names = list(variable_names)
        seen: set[str] = set()
        for name in names:
            if not name:
                raise ModelError("variable names must be non-empty")
            if name in seen:
                raise ModelError(f"duplicate variable name {name!r}")
            seen.add(name)
        variables = tuple(Variable(i, n) for i, n in enumerate(names))
        raw = tuple(raw)
        normalized: list[NormConstraint] = []
        origin_index: dict[str, tuple[int, ...]] = {}
        for rc in raw:
            if rc.name in origin_index:
                raise ModelError(f"duplicate constraint name {rc.name!r}")
            for _, var in rc.terms:
                if not 0 <= var < len(variables):
                    raise ModelError(f"{rc.name}: unknown variable id {var}")
            norm = normalize(rc, len(normalized))
            origin_index[rc.name] = tuple(nc.id for nc in norm)
            normalized.extend(norm)
        return cls(variables, raw, tuple(normalized), origin_index)

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    @property
    def constraint_names(self) -> list[str]:
        return [rc.name for rc in self.raw]

    @cached_property
    def _ids_by_name(self) -> dict[str, int]:
        return {v.name: v.id for v in self.variables}

    def var_id(self, name: str) -> int:
        try:
            return self._ids_by_name[name]
        except KeyError:
            raise ModelError(f"unknown variable {name!r}") from None

    def restrict(self, names: Iterable[str]) -> "Model":
        """Sub-model over the same variables keeping only ``names`` (model order)."""
        keep = set(names)
        unknown = keep - self.origin_index.keys()
        if unknown:
            raise ModelError(f"unknown constraint names: {sorted(unknown)}")
        return Model.build(
            (v.name for v in self.variables), (rc for rc in self.raw if rc.name in keep)
        )

    def order(self, names: Iterable[str]) -> list[str]:
        """``names`` sorted into model file order."""
        keep = set(names)
        return [rc.name for rc in self.raw if rc.name in keep]

    def is_satisfied_by(self, assignment: Sequence[int]) -> bool:
        return all(rc.evaluate(assignment) for rc in self.raw)

    def avg_literals(self) -> float:
        if not self.raw:
            return 0.0
        return sum(len(rc.terms) for rc in self.raw) / len(self.raw)
