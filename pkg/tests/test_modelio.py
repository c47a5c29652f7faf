import json

import numpy as np
import pytest

from qmc.datasets import generate
from qmc.encoders import EncoderSpec, fit_feature_map
from qmc.errors import SchemaError
from qmc.modelio import load_model, save_model
from qmc.prediction import predict_proba
from qmc.states import validate_density
from qmc.training import train

SPECS = [
    EncoderSpec("softmax", 2, 4, beta=30.0),
    EncoderSpec("coherent", 2, 5),
    EncoderSpec("squeezed", 2, 4, r=1.5),
    EncoderSpec("rff", 2, rff_dim=20, rff_seed=9, gamma=5.0),
]


@pytest.fixture(scope="module")
def data():
    return generate("moons", 80, seed=1)


@pytest.mark.parametrize("binary", [False, True])
@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.kind)
def test_round_trip(tmp_path, data, spec, binary):
    model = train(data, fit_feature_map(spec, data.features), "mixed")
    path = tmp_path / "m.bin"
    save_model(model, path, binary=binary)
    back = load_model(path)
    np.testing.assert_array_equal(back.rho, model.rho)
    assert back.spec == model.spec
    assert back.labels == model.labels and back.mode == model.mode and back.n_train == model.n_train
    assert validate_density(back.rho).ok
    Q = np.random.default_rng(0).normal(size=(50, 2))
    np.testing.assert_array_equal(predict_proba(back, Q)[0], predict_proba(model, Q)[0])


def test_json_layout(tmp_path, data):
    model = train(data, fit_feature_map(SPECS[0], data.features), "classical")
    path = tmp_path / "m.json"
    save_model(model, path)
    d = json.loads(path.read_text())
    assert d["format_version"] == 1
    assert d["shape"] == [16, 2]
    assert len(d["rho"]) == 32 and len(d["rho"][0]) == 32 and len(d["rho"][0][0]) == 2
    assert d["encoder"]["kind"] == "softmax" and "gamma" not in d["encoder"]


def test_binary_header(tmp_path, data):
    model = train(data, fit_feature_map(SPECS[0], data.features))
    path = tmp_path / "m.qmc"
    save_model(model, path, binary=True)
    raw = path.read_bytes()
    assert raw[:4] == b"QMC1"
    length = int.from_bytes(raw[4:12], "little")
    assert len(raw) == 12 + length + 32 * 32 * 16


def test_truncated_binary(tmp_path, data):
    model = train(data, fit_feature_map(SPECS[0], data.features))
    path = tmp_path / "m.qmc"
    save_model(model, path, binary=True)
    path.write_bytes(path.read_bytes()[:-16])
    with pytest.raises(SchemaError):
        load_model(path)


@pytest.mark.parametrize(
    "content", ["not json", json.dumps({"format_version": 2}), json.dumps({"format_version": 1})]
)
def test_malformed(tmp_path, content):
    path = tmp_path / "m.json"
    path.write_text(content)
    with pytest.raises(SchemaError):
        load_model(path)


def test_inconsistent_shape(tmp_path, data):
    model = train(data, fit_feature_map(SPECS[0], data.features))
    path = tmp_path / "m.json"
    save_model(model, path)
    d = json.loads(path.read_text())
    d["shape"] = [8, 2]
    path.write_text(json.dumps(d))
    with pytest.raises(SchemaError):
        load_model(path)
