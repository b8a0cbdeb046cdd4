import itertools
import random

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from pbiis.model import (
    EQ,
    GE,
    INT64_MAX,
    LE,
    ContractViolation,
    Literal,
    Model,
    ModelError,
    NormConstraint,
    RawConstraint,
    evaluate,
    normalize,
    strengthen,
)

from .helpers import all_assignments, random_model, random_raw, satisfied_matrix


def lit(v, positive=True):
    return Literal(v, positive)


def test_le_flips_into_negated_literals():
    raw = RawConstraint("c", ((2, 0), (3, 1)), LE, 4)
    (nc,) = normalize(raw, 0)
    assert nc.terms == ((2, lit(0, False)), (3, lit(1, False)))
    assert nc.degree == 1
    assert nc.origin == "c"


def test_eq_splits_into_two():
    raw = RawConstraint("c", ((1, 0), (1, 1)), EQ, 1)
    first, second = normalize(raw, 7)
    assert (first.id, second.id) == (7, 8)
    assert first.terms == ((1, lit(0)), (1, lit(1))) and first.degree == 1
    assert second.terms == ((1, lit(0, False)), (1, lit(1, False))) and second.degree == 1


def test_negative_coefficient_moves_to_degree():
    raw = RawConstraint("c", ((-2, 0), (1, 1)), GE, 0)
    (nc,) = normalize(raw, 0)
    assert nc.terms == ((2, lit(0, False)), (1, lit(1)))
    assert nc.degree == 2


def test_literal_negation_is_involutive():
    a = lit(3)
    assert ~a != a
    assert ~~a == a
    assert a.satisfied_by(1) and not a.satisfied_by(0)
    assert (~a).satisfied_by(0)


def _truth_table_agrees(raw, n):
    norm = normalize(raw, 0)
    for bits in itertools.product((0, 1), repeat=n):
        assert raw.evaluate(bits) == all(evaluate(nc, bits) for nc in norm), (raw, bits)


def test_normalization_truth_tables_500_random():
    rng = random.Random(11)
    for i in range(500):
        n = rng.randint(1, 10)
        _truth_table_agrees(random_raw(rng, f"c{i}", n), n)


@given(
    st.lists(st.tuples(st.integers(-5, 5).filter(bool), st.booleans()), min_size=1, max_size=6),
    st.sampled_from((LE, GE, EQ)),
    st.integers(-12, 12),
)
def test_normalization_equivalence_property(rows, sense, rhs):
    terms = tuple((c, v) for v, (c, _) in enumerate(rows))
    _truth_table_agrees(RawConstraint("c", terms, sense, rhs), len(terms))


def test_model_level_equivalence():
    rng = random.Random(5)
    for _ in range(40):
        m = random_model(rng, max_vars=10)
        X = all_assignments(m.num_vars)
        mask = satisfied_matrix(m)
        for row, expected in zip(X, mask):
            assert all(evaluate(nc, row) for nc in m.normalized) == bool(expected)


def test_norm_coefficients_positive_and_variables_distinct():
    rng = random.Random(3)
    for _ in range(50):
        m = random_model(rng)
        for nc in m.normalized:
            assert all(c > 0 for c, _ in nc.terms)
            assert len(set(nc.variables())) == len(nc.terms)


def test_evaluate_examples():
    assert evaluate(NormConstraint(0, "c", ((1, lit(0)), (1, lit(1))), 1), [0, 1])
    assert not evaluate(NormConstraint(0, "c", ((2, lit(0, False)), (3, lit(1, False))), 1), [1, 1])


def test_evaluate_unassigned_is_contract_violation():
    nc = NormConstraint(0, "c", ((1, lit(0)),), 1)
    with pytest.raises(ContractViolation):
        evaluate(nc, [-1])
    with pytest.raises(ContractViolation):
        evaluate(nc, {0: None})


def test_evaluate_matches_raw_arithmetic():
    rng = random.Random(9)
    for i in range(200):
        n = rng.randint(2, 8)
        raw = random_raw(rng, f"c{i}", n)
        x = [rng.randint(0, 1) for _ in range(n)]
        lhs = sum(c * x[v] for c, v in raw.terms)
        expected = {GE: lhs >= raw.rhs, LE: lhs <= raw.rhs, EQ: lhs == raw.rhs}[raw.sense]
        assert all(evaluate(nc, x) for nc in normalize(raw, 0)) == expected


@pytest.mark.parametrize(
    "terms, sense, rhs, message",
    [
        (((0, 0),), GE, 1, "zero coefficient"),
        (((1, 0), (2, 0)), GE, 1, "appears twice"),
        (((1, 0),), "<", 1, "unknown sense"),
        (((INT64_MAX, 0),), GE, 1, "overflow"),
    ],
)
def test_raw_constraint_validation(terms, sense, rhs, message):
    with pytest.raises(ModelError, match=message):
        RawConstraint("c", terms, sense, rhs)


def test_magnitude_cap_is_inclusive():
    RawConstraint("c", ((INT64_MAX - 1, 0),), GE, 1)


def test_model_validation():
    with pytest.raises(ModelError, match="duplicate constraint"):
        Model.build(["x"], [RawConstraint("a", ((1, 0),), GE, 1)] * 2)
    with pytest.raises(ModelError, match="duplicate variable"):
        Model.build(["x", "x"], [])
    with pytest.raises(ModelError, match="unknown variable"):
        Model.build(["x"], [RawConstraint("a", ((1, 1),), GE, 1)])
    with pytest.raises(ModelError, match="non-empty"):
        RawConstraint("", ((1, 0),), GE, 1)


def test_origin_index_total():
    rng = random.Random(2)
    m = random_model(rng, n_cons=15)
    back = {}
    for name, ids in m.origin_index.items():
        rc = next(r for r in m.raw if r.name == name)
        assert len(ids) == (2 if rc.sense == EQ else 1)
        for i in ids:
            back[i] = name
    assert sorted(back) == list(range(len(m.normalized)))
    assert all(m.normalized[i].origin == back[i] for i in back)


def test_tautology_kept():
    m = Model.build(["x"], [RawConstraint("t", ((1, 0),), GE, -2)])
    assert len(m.normalized) == 1
    assert m.normalized[0].is_tautology


@settings(max_examples=30)
@given(st.randoms(use_true_random=False))
def test_normalization_order_independent(rnd):
    m = random_model(random.Random(rnd.random()))
    perm = list(m.raw)
    rnd.shuffle(perm)
    m2 = Model.build([v.name for v in m.variables], perm)

    def contents(model):
        return {name: [(nc.terms, nc.degree) for nc in (model.normalized[i] for i in ids)]
                for name, ids in model.origin_index.items()}

    assert contents(m) == contents(m2)


def test_restrict_keeps_model_order_and_variables():
    m = random_model(random.Random(4), n_cons=10)
    names = m.constraint_names
    sub = m.restrict([names[5], names[1], names[3]])
    assert sub.constraint_names == [names[1], names[3], names[5]]
    assert sub.num_vars == m.num_vars
    with pytest.raises(ModelError):
        m.restrict(["nope"])


def test_strengthen_saturates_and_divides():
    nc = NormConstraint(0, None, ((4, lit(0)), (6, lit(1)), (2, lit(2))), 3)
    out = strengthen(nc)
    # saturate to 3,3,2 -> gcd 1, unchanged degree
    assert [c for c, _ in out.terms] == [3, 3, 2] and out.degree == 3
    out = strengthen(NormConstraint(0, None, ((4, lit(0)), (6, lit(1))), 7))
    assert [c for c, _ in out.terms] == [2, 3] and out.degree == 4
    nogood = NormConstraint(0, None, ((1, lit(0)), (1, lit(1, False))), 1)
    assert strengthen(nogood) == nogood


@given(st.lists(st.integers(1, 9), min_size=1, max_size=5), st.integers(1, 20))
def test_strengthen_preserves_solutions(coefs, degree):
    nc = NormConstraint(0, None, tuple((c, lit(i)) for i, c in enumerate(coefs)), degree)
    out = strengthen(nc)
    for bits in itertools.product((0, 1), repeat=len(coefs)):
        assert evaluate(nc, bits) == evaluate(out, bits)
