"""Reading and writing models: the JSON model format and a subset of OPB.

JSON::

    {"variables": ["x1", "x2"],
     "constraints": [{"name": "A", "terms": [[2, "x1"], [3, "x2"]],
                      "sense": "<=", "rhs": 4}]}

OPB lines look like ``+2 x1 +3 x2 >= 4 ;``.  Constraints are named ``C1..Cn``
in file order; ``*`` starts a comment and an optional
``* #variable= N #constraint= M`` header is checked against the body.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from .model import SENSES, Model, ModelError, RawConstraint


class ModelParseError(ModelError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


def model_to_dict(model: Model) -> dict:
    names = [v.name for v in model.variables]
    return {
        "variables": names,
        "constraints": [
            {
                "name": rc.name,
                "terms": [[coef, names[var]] for coef, var in rc.terms],
                "sense": rc.sense,
                "rhs": rc.rhs,
            }
            for rc in model.raw
        ],
    }


def save_model(model: Model) -> str:
    return json.dumps(model_to_dict(model), indent=2) + "\n"


def model_from_dict(data) -> Model:
    if not isinstance(data, dict):
        raise ModelParseError("model must be a JSON object")
    variables = data.get("variables", [])
    constraints = data.get("constraints", [])
    if not isinstance(variables, list) or not all(isinstance(v, str) for v in variables):
        raise ModelParseError('"variables" must be a list of strings')
    if not isinstance(constraints, list):
        raise ModelParseError('"constraints" must be a list')
    ids = {}
    for i, name in enumerate(variables):
        if name in ids:
            raise ModelError(f"duplicate variable name {name!r}")
        ids[name] = i
    raw = []
    for k, entry in enumerate(constraints):
        try:
            name, terms, sense, rhs = entry["name"], entry["terms"], entry["sense"], entry["rhs"]
        except (TypeError, KeyError) as exc:
            raise ModelParseError(f"constraint #{k + 1}: missing field {exc}") from None
        if not isinstance(name, str):
            raise ModelParseError(f"constraint #{k + 1}: name must be a string")
        if sense not in SENSES:
            raise ModelParseError(f"{name}: sense must be one of {SENSES}")
        if not _is_int(rhs):
            raise ModelParseError(f"{name}: rhs must be an integer")
        parsed = []
        for term in terms:
            if (
                not isinstance(term, list)
                or len(term) != 2
                or not _is_int(term[0])
                or not isinstance(term[1], str)
            ):
                raise ModelParseError(f"{name}: terms must be [coefficient, variable] pairs")
            if term[1] not in ids:
                raise ModelError(f"{name}: unknown variable {term[1]!r}")
            parsed.append((term[0], ids[term[1]]))
        raw.append(RawConstraint(name, tuple(parsed), sense, rhs))
    return Model.build(variables, raw)


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def load_json(text: str) -> Model:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelParseError(exc.msg, exc.lineno, exc.colno) from None
    return model_from_dict(data)


_HEADER = re.compile(r"#variable=\s*(\d+)\s+#constraint=\s*(\d+)")
_TOKEN = re.compile(r"\S+")
_VAR = re.compile(r"x([1-9]\d*)$")
_COEF = re.compile(r"[+-]?\d+$")


def load_opb(text: str) -> Model:
    header = None
    rows = []
    max_var = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("*"):
            m = _HEADER.search(stripped)
            if m and header is None:
                header = (int(m.group(1)), int(m.group(2)))
            continue
        if stripped.startswith("min:") or stripped.startswith("max:"):
            raise ModelParseError("objective functions are not supported", lineno, 1)
        tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(line)]
        if tokens[-1][0] == ";":
            tokens.pop()
        elif tokens[-1][0].endswith(";"):
            tok, col = tokens[-1]
            tokens[-1] = (tok[:-1], col)
        else:
            raise ModelParseError("constraint must end with ';'", lineno, len(line))
        if len(tokens) < 2:
            raise ModelParseError("incomplete constraint", lineno, 1)
        (sense, scol), (rhs_tok, rcol) = tokens[-2], tokens[-1]
        if sense not in SENSES:
            raise ModelParseError(f"expected relation, got {sense!r}", lineno, scol)
        if not _COEF.match(rhs_tok):
            raise ModelParseError(f"expected integer right-hand side, got {rhs_tok!r}", lineno, rcol)
        body = tokens[:-2]
        if len(body) % 2:
            raise ModelParseError("terms must be coefficient/variable pairs", lineno, body[-1][1] if body else 1)
        terms = []
        for (ctok, ccol), (vtok, vcol) in zip(body[::2], body[1::2]):
            if not _COEF.match(ctok):
                raise ModelParseError(f"expected coefficient, got {ctok!r}", lineno, ccol)
            m = _VAR.match(vtok)
            if not m:
                raise ModelParseError(f"expected variable x<i>, got {vtok!r}", lineno, vcol)
            index = int(m.group(1))
            max_var = max(max_var, index)
            terms.append((int(ctok), index - 1))
        rows.append((lineno, terms, sense, int(rhs_tok)))

    n_vars = max_var
    if header is not None:
        declared_vars, declared_cons = header
        if max_var > declared_vars:
            raise ModelParseError(f"variable x{max_var} exceeds #variable= {declared_vars}")
        if declared_cons != len(rows):
            raise ModelParseError(f"#constraint= {declared_cons} but found {len(rows)} constraints")
        n_vars = declared_vars
    raw = []
    for k, (lineno, terms, sense, rhs) in enumerate(rows, start=1):
        try:
            raw.append(RawConstraint(f"C{k}", tuple(terms), sense, rhs))
        except ModelError as exc:
            raise ModelParseError(str(exc), lineno, 1) from None
    return Model.build((f"x{i}" for i in range(1, n_vars + 1)), raw)


def load_model(text: str) -> Model:
    """Parse JSON or OPB, deciding by the first non-blank character."""
    if text.lstrip().startswith("{"):
        return load_json(text)
    return load_opb(text)


def read_model(path: str | Path) -> Model:
    return load_model(Path(path).read_text(encoding="utf-8"))


def write_model(model: Model, path: str | Path) -> None:
    Path(path).write_text(save_model(model), encoding="utf-8")
