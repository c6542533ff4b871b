"""JSON model files: an algebra, a selection table, a prior, and optionally λ.

Events are written as lists of atom names in declaration order (``[]`` is
bottom) and rationals as ``"p/q"`` strings, so files stay exact and
readable::

    {
      "schema_version": "1",
      "atoms": ["a1", "a2", "a3"],
      "selection": [{"antecedent": ["a2", "a3"],
                     "image": {"a1": ["a2", "a3"], "a2": ["a2"], "a3": ["a3"]}},
                    ...],
      "probability": {"a1": "1/2", "a2": "1/4", "a3": "1/4"},
      "lambda": [{"antecedent": ["a2", "a3"], "atom": "a1",
                  "weights": {"a2": "1/2", "a3": "1/2"}}, ...]
    }

``selection`` must list every antecedent, ``⊥`` included; ``lambda`` lists
every cell with a non-bottom antecedent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

from .algebra import Algebra
from .belief import ProbabilityDist, to_fraction
from .errors import InvalidEventError, ModelFileError
from .selection import SelectionFunction
from .update import DistributionFunction, validate_lambda

SCHEMA_VERSION = "1"


@dataclass(frozen=True)
class Model:
    selection: SelectionFunction
    probability: ProbabilityDist | None = None
    lam: DistributionFunction | None = None

    @property
    def algebra(self) -> Algebra:
        return self.selection.algebra


def _rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def to_dict(model: Model) -> dict[str, Any]:
    alg = model.algebra
    f = model.selection
    names = alg.atom_names
    out: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "atoms": list(names),
        "selection": [
            {
                "antecedent": alg.names_of(a),
                "image": {names[alpha]: alg.names_of(f(a, alpha)) for alpha in alg.atoms()},
            }
            for a in alg.events()
        ],
    }
    if model.probability is not None:
        out["probability"] = {
            name: _rational(w) for name, w in zip(names, model.probability.weights)
        }
    if model.lam is not None:
        out["lambda"] = [
            {
                "antecedent": alg.names_of(a),
                "atom": names[alpha],
                "weights": {
                    names[beta]: _rational(w)
                    for beta, w in sorted(model.lam.cell(a, alpha).items())
                    if w
                },
            }
            for a in range(1, alg.size)
            for alpha in alg.atoms()
        ]
    return out


def _require(data, key, kind, where):
    if not isinstance(data, dict) or key not in data:
        raise ModelFileError("missing field", f"{where}.{key}" if where else key)
    value = data[key]
    if not isinstance(value, kind):
        raise ModelFileError(f"expected {kind.__name__}", f"{where}.{key}" if where else key)
    return value


def _event(alg: Algebra, spec, field: str) -> int:
    if not isinstance(spec, list) or not all(isinstance(s, str) for s in spec):
        raise ModelFileError("an event is a list of atom names", field)
    if len(set(spec)) != len(spec):
        raise ModelFileError("repeated atom in event", field)
    try:
        return alg.event(spec)
    except InvalidEventError as exc:
        raise ModelFileError(str(exc), field) from None


def _atom(alg: Algebra, name, field: str) -> int:
    if name not in alg.atom_names:
        raise ModelFileError(f"unknown atom {name!r}", field)
    return alg.atom_names.index(name)


def _rational_field(value, field: str) -> Fraction:
    if not isinstance(value, str):
        raise ModelFileError('rationals are written as "p/q" strings', field)
    try:
        return to_fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ModelFileError(f"not a rational: {value!r}", field) from None


def from_dict(data: Any) -> Model:
    if not isinstance(data, dict):
        raise ModelFileError("a model file holds a JSON object")
    version = _require(data, "schema_version", str, "")
    if version != SCHEMA_VERSION:
        raise ModelFileError(f"unsupported schema version {version!r}", "schema_version")
    atoms = _require(data, "atoms", list, "")
    try:
        alg = Algebra(len(atoms), tuple(atoms))
    except (ValueError, TypeError) as exc:
        raise ModelFileError(str(exc), "atoms") from None

    rows = _require(data, "selection", list, "")
    n = alg.atom_count
    table: list[int | None] = [None] * (alg.size * n)
    for i, row in enumerate(rows):
        where = f"selection[{i}]"
        a = _event(alg, _require(row, "antecedent", list, where), f"{where}.antecedent")
        image = _require(row, "image", dict, where)
        if table[a * n] is not None:
            raise ModelFileError("antecedent listed twice", f"{where}.antecedent")
        if set(image) != set(alg.atom_names):
            raise ModelFileError("image must give exactly one event per atom", f"{where}.image")
        for name, spec in image.items():
            alpha = _atom(alg, name, f"{where}.image")
            table[a * n + alpha] = _event(alg, spec, f"{where}.image.{name}")
    missing = [a for a in alg.events() if table[a * n] is None]
    if missing:
        raise ModelFileError(
            f"selection table is not total: no row for {alg.format(missing[0])}", "selection"
        )
    f = SelectionFunction(alg, tuple(table))

    P = None
    if "probability" in data:
        weights = _require(data, "probability", dict, "")
        if set(weights) != set(alg.atom_names):
            raise ModelFileError("give one weight per atom", "probability")
        values = [_rational_field(weights[name], f"probability.{name}") for name in alg.atom_names]
        if any(v <= 0 for v in values):
            raise ModelFileError("probability weights must be positive", "probability")
        if sum(values) != 1:
            raise ModelFileError(
                f"probability not normalized (weights sum to {sum(values)})", "probability"
            )
        P = ProbabilityDist(alg, tuple(values))

    lam = None
    if "lambda" in data:
        cells: dict[tuple[int, int], dict[int, Fraction]] = {}
        for i, entry in enumerate(_require(data, "lambda", list, "")):
            where = f"lambda[{i}]"
            a = _event(alg, _require(entry, "antecedent", list, where), f"{where}.antecedent")
            alpha = _atom(alg, _require(entry, "atom", str, where), f"{where}.atom")
            weights = _require(entry, "weights", dict, where)
            if (a, alpha) in cells:
                raise ModelFileError("cell listed twice", where)
            cells[a, alpha] = {
                _atom(alg, name, f"{where}.weights"): _rational_field(w, f"{where}.weights.{name}")
                for name, w in weights.items()
            }
        lam = DistributionFunction(f, cells)
        ok, violations = validate_lambda(lam)
        if not ok:
            v = violations[0]
            a, alpha = v.cell
            raise ModelFileError(
                f"{v.constraint} constraint violated: {v.message}",
                f"lambda cell ({alg.format(a)}, {alg.atom_names[alpha]})",
            )
    return Model(f, P, lam)


def loads(text: str) -> Model:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from None
    return from_dict(data)


def load(path) -> Model:
    return loads(Path(path).read_text(encoding="utf-8"))


def dumps(model: Model) -> str:
    return json.dumps(to_dict(model), indent=2, ensure_ascii=False) + "\n"


def dump(model: Model, path) -> None:
    Path(path).write_text(dumps(model), encoding="utf-8")
