"""Independent oracles and random instance builders shared by the test modules.

The brute-force oracle evaluates the *raw* constraints over every total
assignment with numpy, so it never touches normalization, propagation or
search code.
"""

from __future__ import annotations

import random

import numpy as np

from pbiis.model import EQ, GE, LE, Model, RawConstraint


def all_assignments(n: int) -> np.ndarray:
    """(2**n, n) matrix of 0/1 rows, row k is k in binary (variable 0 = LSB)."""
    k = np.arange(2**n, dtype=np.int64)[:, None]
    return ((k >> np.arange(n, dtype=np.int64)) & 1).astype(np.int64)


def satisfied_matrix(model: Model, names=None) -> np.ndarray:
    """Boolean (2**n,) mask of assignments satisfying the selected raw constraints."""
    n = model.num_vars
    X = all_assignments(n)
    mask = np.ones(X.shape[0], dtype=bool)
    keep = None if names is None else set(names)
    for rc in model.raw:
        if keep is not None and rc.name not in keep:
            continue
        coef = np.zeros(n, dtype=np.int64)
        for c, v in rc.terms:
            coef[v] = c
        lhs = X @ coef
        if rc.sense == GE:
            mask &= lhs >= rc.rhs
        elif rc.sense == LE:
            mask &= lhs <= rc.rhs
        else:
            mask &= lhs == rc.rhs
    return mask


def brute_feasible(model: Model, names=None) -> bool:
    return bool(satisfied_matrix(model, names).any())


def brute_is_iis(model: Model, names) -> bool:
    names = list(names)
    if brute_feasible(model, names):
        return False
    return all(brute_feasible(model, [n for n in names if n != drop]) for drop in names)


def random_weighted(rng: random.Random, name: str, n_vars: int, max_terms: int = 4, max_coef: int = 3):
    k = rng.randint(min(2, n_vars), min(max_terms, n_vars))
    vars_ = rng.sample(range(n_vars), k)
    terms = tuple((rng.randint(1, max_coef) * rng.choice((1, -1)), v) for v in vars_)
    r = rng.random()
    sense = GE if r < 0.45 else LE if r < 0.9 else EQ
    lo = sum(c for c, _ in terms if c < 0)
    hi = sum(c for c, _ in terms if c > 0)
    span = max(1, (hi - lo) * 2 // 3)
    if sense == GE:
        rhs = lo + rng.randint(1, span)
    elif sense == LE:
        rhs = hi - rng.randint(1, span)
    else:
        rhs = rng.randint(lo, hi)
    return RawConstraint(name, terms, sense, rhs)


def random_cardinality(rng: random.Random, name: str, n_vars: int, size: int = 3):
    """``sum of literals >= k`` (or ``<=``/``=``) over random signed literals."""
    k = min(size, n_vars)
    vars_ = rng.sample(range(n_vars), k)
    signs = [rng.choice((1, -1)) for _ in vars_]
    negated = sum(1 for s in signs if s < 0)
    terms = tuple(zip(signs, vars_))
    r = rng.random()
    if r < 0.7:
        return RawConstraint(name, terms, GE, rng.randint(1, min(2, k)) - negated)
    if r < 0.9:
        return RawConstraint(name, terms, LE, rng.randint(0, k - 1) - negated)
    return RawConstraint(name, terms, EQ, rng.randint(0, k) - negated)


def random_raw(rng: random.Random, name: str, n_vars: int):
    if rng.random() < 0.5:
        return random_weighted(rng, name, n_vars)
    return random_cardinality(rng, name, n_vars)


def random_model(
    rng: random.Random,
    n_vars: int | None = None,
    n_cons: int | None = None,
    max_vars: int = 12,
    max_cons: int = 15,
) -> Model:
    n_vars = n_vars or rng.randint(min(4, max_vars), max_vars)
    n_cons = n_cons if n_cons is not None else rng.randint(min(4, max_cons), max_cons)
    raw = [random_raw(rng, f"c{i}", n_vars) for i in range(n_cons)]
    return Model.build([f"x{i}" for i in range(n_vars)], raw)


def random_infeasible_models(seed: int, count: int, **kw) -> list[Model]:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        m = random_model(rng, **kw)
        if not brute_feasible(m):
            out.append(m)
    return out


def pair_model(extra: int = 0) -> Model:
    """A: x1 >= 1 and B: x1 <= 0, plus ``extra`` irrelevant constraints."""
    names = ["x1"] + [f"y{i}" for i in range(extra)]
    raw = [RawConstraint("A", ((1, 0),), GE, 1), RawConstraint("B", ((1, 0),), LE, 0)]
    raw += [RawConstraint(f"I{i}", ((1, i + 1),), GE, 1) for i in range(extra)]
    return Model.build(names, raw)


def random_card_model(rng: random.Random, n_vars: int = 10, min_cons: int = 8, max_cons: int = 15) -> Model:
    """Only 3-literal cardinality rows: UNSAT cases here usually need search."""
    raw = [random_cardinality(rng, f"c{i}", n_vars) for i in range(rng.randint(min_cons, max_cons))]
    return Model.build([f"x{i}" for i in range(n_vars)], raw)


def random_3sat(rng: random.Random, n_vars: int = 12, n_clauses: int = 52) -> Model:
    """Random 3-literal clauses near the phase transition: most runs need real search."""
    raw = []
    for i in range(n_clauses):
        vars_ = rng.sample(range(n_vars), 3)
        signs = [rng.choice((1, -1)) for _ in vars_]
        negated = sum(1 for s in signs if s < 0)
        raw.append(RawConstraint(f"k{i}", tuple(zip(signs, vars_)), GE, 1 - negated))
    return Model.build([f"x{i}" for i in range(n_vars)], raw)
