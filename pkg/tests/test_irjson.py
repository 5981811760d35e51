from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import conv, dropout, make_ir
from gen import random_ir
from fnnlint.errors import SchemaError, VersionError
from fnnlint.irjson import load_ir_json, save_ir_json


def test_dropout_serialization():
    doc = json.loads(save_ir_json(make_ir(dropout(0.5))))
    assert doc["layers"] == [{"kind": "Dropout", "rate": 0.5}]
    assert doc["format_version"] == 1
    assert doc["learner"] == {"optimizer": None, "loss": None}


def test_absent_fields_are_omitted():
    doc = json.loads(save_ir_json(make_ir(conv())))
    assert set(doc["layers"][0]) == {"kind", "filters", "kernel", "strides", "padding", "use_bias"}


def test_version_gate():
    with pytest.raises(VersionError):
        load_ir_json('{"format_version": 2, "source_path": "x", "layers": []}')


@pytest.mark.parametrize(
    "mutate, path",
    [
        (lambda d: d.update(extra=1), "$.extra"),
        (lambda d: d["layers"][0].update(bogus=True), "$.layers[0].bogus"),
        (lambda d: d["layers"][0].update(filters="32"), "$.layers[0].filters"),
        (lambda d: d["layers"][0].update(kernel=[3]), "$.layers[0].kernel"),
        (lambda d: d["layers"][0].update(kind="LSTM"), "$.layers[0].kind"),
        (lambda d: d["layers"][0].pop("kind"), "$.layers[0].kind"),
        (lambda d: d["learner"].update(lr=0.1), "$.learner.lr"),
        (lambda d: d.pop("source_path"), "$.source_path"),
        (lambda d: d["layers"][0].update(filters=0), "$.layers[0]"),
    ],
)
def test_schema_errors_name_the_path(mutate, path):
    doc = json.loads(save_ir_json(make_ir(conv())))
    mutate(doc)
    with pytest.raises(SchemaError) as exc:
        load_ir_json(json.dumps(doc))
    assert exc.value.path == path


def test_malformed_json():
    with pytest.raises(SchemaError):
        load_ir_json("{not json")


def test_null_activation_accepted():
    doc = json.loads(save_ir_json(make_ir(conv())))
    doc["layers"][0]["activation"] = None
    assert load_ir_json(json.dumps(doc)) == make_ir(conv())


@settings(max_examples=200, deadline=None)
@given(st.randoms(use_true_random=False))
def test_round_trip_identity(rng):
    ir = random_ir(rng)
    assert load_ir_json(save_ir_json(ir)) == ir


def test_round_trip_200_seeded():
    for seed in range(200):
        ir = random_ir(random.Random(seed))
        assert load_ir_json(save_ir_json(ir, indent=None)) == ir
