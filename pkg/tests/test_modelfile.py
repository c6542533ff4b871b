import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from imago import catalog
from imago.errors import ModelFileError
from imago.modelfile import Model, dump, dumps, from_dict, load, loads, to_dict
from imago.update import random_lambda

from conftest import MODELS, selection_with_prior


def test_shipped_models_match_the_catalog():
    assert load(MODELS / "worked_example.json") == catalog.worked_model()
    assert load(MODELS / "stalnaker.json") == catalog.stalnaker_model()


@pytest.mark.parametrize("model", [catalog.worked_model(), catalog.stalnaker_model()])
def test_round_trip(tmp_path, model):
    path = tmp_path / "m.json"
    dump(model, path)
    assert load(path) == model
    assert dumps(load(path)) == dumps(model)


@settings(max_examples=60)
@given(selection_with_prior(normal=True), st.integers(0, 2**32), st.booleans())
def test_round_trip_random_models(fp, seed, with_lambda):
    f, P = fp
    lam = random_lambda(f, random.Random(seed)) if with_lambda else None
    model = Model(f, P, lam)
    assert loads(dumps(model)) == model


@given(selection_with_prior())
def test_round_trip_without_lambda(fp):
    f, P = fp
    model = Model(f, P)
    assert from_dict(to_dict(model)) == model


def test_rationals_and_events_are_written_readably():
    data = to_dict(catalog.worked_model())
    assert data["probability"] == {"a1": "1/2", "a2": "1/4", "a3": "1/4"}
    row = next(r for r in data["selection"] if r["antecedent"] == ["a2", "a3"])
    assert row["image"] == {"a1": ["a2", "a3"], "a2": ["a2"], "a3": ["a3"]}


def test_event_specs_are_normalized():
    data = to_dict(catalog.worked_model())
    for row in data["selection"]:
        row["antecedent"] = list(reversed(row["antecedent"]))
        row["image"] = {k: list(reversed(v)) for k, v in row["image"].items()}
    assert to_dict(from_dict(data)) == to_dict(catalog.worked_model())


def _worked_data():
    return to_dict(catalog.worked_model())


def _error(data) -> ModelFileError:
    with pytest.raises(ModelFileError) as err:
        from_dict(data)
    return err.value


def test_probability_not_normalized():
    data = _worked_data()
    data["probability"]["a1"] = "2/5"  # weights sum to 9/10
    err = _error(data)
    assert "probability not normalized" in str(err)
    assert "9/10" in str(err)
    assert err.field == "probability"


@pytest.mark.parametrize(
    "mutate, field",
    [
        (lambda d: d.pop("atoms"), "atoms"),
        (lambda d: d.update(schema_version="2"), "schema_version"),
        (lambda d: d["probability"].update(a1=0.5), "probability.a1"),
        (lambda d: d["probability"].update(a1="x/y"), "probability.a1"),
        (lambda d: d["probability"].pop("a3"), "probability"),
        (lambda d: d["selection"].pop(), "selection"),
        (lambda d: d["selection"][2].update(antecedent=["a9"]), "selection[2].antecedent"),
        (lambda d: d["selection"][2]["image"].update(a1=["a1", "a1"]), "selection[2].image.a1"),
        (lambda d: d["selection"][2]["image"].pop("a1"), "selection[2].image"),
        (lambda d: d["selection"].append(d["selection"][0]), "selection[8].antecedent"),
        (lambda d: d["lambda"][0]["weights"].update(a1="1/2"), "lambda cell ({a1}, a1)"),
        (lambda d: d["lambda"][0].update(atom="zz"), "lambda[0].atom"),
    ],
)
def test_field_diagnostics(mutate, field):
    data = _worked_data()
    mutate(data)
    err = _error(data)
    assert err.field == field
    assert str(err).startswith(field)


def test_non_positive_probability():
    data = _worked_data()
    data["probability"].update(a1="0", a2="1/2", a3="1/2")
    assert "positive" in str(_error(data))


def test_json_syntax_errors_report_position():
    text = dumps(catalog.worked_model()).replace('"atoms"', "atoms", 1)
    with pytest.raises(ModelFileError) as err:
        loads(text)
    assert err.value.field.startswith("line 3 column")


def test_model_without_probability():
    data = _worked_data()
    del data["probability"], data["lambda"]
    model = from_dict(data)
    assert model.probability is None and model.lam is None


def test_top_level_must_be_an_object():
    with pytest.raises(ModelFileError):
        loads(json.dumps([1, 2]))
