import random

import pytest

from pbiis.minimize import (
    METHODS,
    FeasibleInputError,
    Oracle,
    additive_deletion,
    csea_then_quickxplain,
    deletion_filter,
    minimize,
    quickxplain,
    verify_iis,
)
from pbiis.model import GE, LE, Model, RawConstraint

from .helpers import brute_feasible, brute_is_iis, pair_model, random_infeasible_models, random_model


def abc_model():
    """A: x1 >= 1, B: x2 >= 1, C: x1 <= 0."""
    raw = [
        RawConstraint("A", ((1, 0),), GE, 1),
        RawConstraint("B", ((1, 1),), GE, 1),
        RawConstraint("C", ((1, 0),), LE, 0),
    ]
    return Model.build(["x1", "x2"], raw)


@pytest.fixture(scope="module")
def infeasible_corpus():
    return random_infeasible_models(seed=123, count=100)


def test_oracle_basics():
    m = Model.build(["x1", "x2"], [RawConstraint("c", ((1, 0), (1, 1)), GE, 3)])
    o = Oracle(m)
    assert o.is_feasible([]) is True
    assert o.is_feasible(["c"]) is False
    assert o.calls == 2
    assert o.is_feasible(["c"]) is False
    assert (o.calls, o.hits) == (2, 1)
    o.check_uncounted(["c"])
    assert o.calls == 2
    cold = Oracle(m, memo=False)
    cold.is_feasible(["c"])
    cold.is_feasible(["c"])
    assert (cold.calls, cold.hits) == (2, 0)


def test_oracle_matches_brute_force_on_subsets():
    rng = random.Random(50)
    for _ in range(300):
        m = random_model(rng)
        names = [n for n in m.constraint_names if rng.random() < 0.6]
        assert Oracle(m).is_feasible(names) == brute_feasible(m, names)


def test_quickxplain_examples():
    m = pair_model()
    assert quickxplain(Oracle(m), ["A", "B"]) == ["A", "B"]
    assert quickxplain(Oracle(abc_model()), ["A", "B", "C"]) == ["A", "C"]


def test_quickxplain_background():
    o = Oracle(abc_model())
    assert quickxplain(o, ["B", "C"], background=["A"]) == ["C"]
    # infeasible background needs nothing from the candidates
    assert quickxplain(o, ["B"], background=["A", "C"]) == []


def test_feasible_input_is_an_error():
    m = pair_model(3)
    for fn in (quickxplain, deletion_filter, additive_deletion):
        with pytest.raises(FeasibleInputError):
            fn(Oracle(m), ["A", "I0", "I1"])
    with pytest.raises(FeasibleInputError, match="model is feasible"):
        csea_then_quickxplain(m.restrict(["A", "I0"]))


def test_deletion_examples():
    o = Oracle(pair_model(), memo=False)
    assert deletion_filter(o, ["A", "B"]) == ["A", "B"]
    assert o.calls == 2
    m = pair_model(5)
    o = Oracle(m, memo=False)
    assert deletion_filter(o, m.constraint_names) == ["A", "B"]
    assert o.calls == 7


def test_additive_stops_at_first_infeasible_prefix():
    names = ["x1"] + [f"y{i}" for i in range(8)]
    raw = [RawConstraint("A", ((1, 0),), GE, 1)]
    raw += [RawConstraint(f"I{i}", ((1, i + 1),), GE, 1) for i in range(7)]
    raw += [RawConstraint("B", ((1, 0),), LE, 0), RawConstraint("I7", ((1, 8),), GE, 1)]
    m = Model.build(names, raw)
    order = m.constraint_names
    assert order.index("A") == 0 and order.index("B") == 8
    o = Oracle(m, memo=False)
    assert additive_deletion(o, order) == ["A", "B"]
    # growth: prefixes of length 1..9, the ninth (ending at B) is the first infeasible one
    assert o.history[:9] == [tuple(order[:k]) for k in range(1, 10)]
    assert "I7" not in {n for q in o.history for n in q}


def test_additive_singleton():
    for pos in range(6):
        raw = [RawConstraint(f"I{i}", ((1, i),), GE, 1) for i in range(5)]
        raw.insert(pos, RawConstraint("bad", ((1, 0), (1, 1)), GE, 3))
        m = Model.build([f"x{i}" for i in range(5)], raw)
        assert additive_deletion(Oracle(m), m.constraint_names) == ["bad"]
        assert minimize(m, "csea+qx").names == ("bad",)


def test_verify_iis_examples():
    m = pair_model(1)
    assert verify_iis(m, ["A", "B"])
    assert not verify_iis(m, ["A", "B", "I0"])
    assert not verify_iis(m, ["A"])


@pytest.mark.parametrize("method", METHODS)
def test_methods_return_iis_on_random_corpus(method, infeasible_corpus):
    for m in infeasible_corpus:
        result = minimize(m, method, verify=True)
        assert result.complete and result.verified
        assert brute_is_iis(m, result.names)
        assert list(result.names) == m.order(result.names)


def test_quickxplain_output_is_subset_of_candidates(infeasible_corpus):
    for m in infeasible_corpus[:40]:
        names = m.constraint_names
        rng = random.Random(len(names))
        extra = [n for n in names if rng.random() < 0.5]
        cand = m.order(set(extra) | set(minimize(m, "qx").names))
        out = quickxplain(Oracle(m), cand)
        assert set(out) <= set(cand)


def test_csea_qx_output_within_core(infeasible_corpus):
    strict = 0
    for m in infeasible_corpus:
        result = csea_then_quickxplain(m, verify=True)
        core = set(result.search.core.names)
        assert set(result.names) <= core and result.verified
        assert result.core_size == len(core)
        strict += len(core) > len(result.names)
    assert strict > 0


def test_memo_never_changes_output(infeasible_corpus):
    for m in infeasible_corpus[:50]:
        for method in METHODS:
            a = minimize(m, method, memo=True)
            b = minimize(m, method, memo=False)
            assert a.names == b.names
            assert a.oracle_calls <= b.oracle_calls


def test_deletion_calls_equal_input_size(infeasible_corpus):
    for m in infeasible_corpus:
        assert minimize(m, "deletion", memo=False).oracle_calls == len(m.raw)


def test_root_singleton_csea_qx_calls():
    m = Model.build(["x1", "x2"], [RawConstraint("c", ((1, 0), (1, 1)), GE, 3)])
    result = minimize(m, "csea+qx", verify=True)
    assert result.names == ("c",) and result.verified and result.oracle_calls <= 2


def test_timeout_returns_unverified_partial():
    m = pair_model(4)
    for method in METHODS:
        result = minimize(m, method, time_limit_ms=0, verify=True)
        assert not result.complete
        assert result.verified is False
        assert result.to_dict()["verified"] is False


def test_result_json_shape():
    result = minimize(pair_model(), "deletion", verify=True)
    data = result.to_dict()
    assert list(data) == ["method", "iis", "oracle_calls", "time_ms", "verified"]
    assert data["iis"] == ["A", "B"] and data["verified"] is True
    assert "time_ms" not in result.to_dict(timing=False)


def test_unknown_method():
    with pytest.raises(ValueError):
        minimize(pair_model(), "elastic")
