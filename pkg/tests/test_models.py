import json
import os

import pytest

from services.cdga import validate
from services.exceptions import ModelLoadError, ModelValidationError, UnknownModelError
from services.model_service import ModelPair, model_service


def test_builtins():
    names = model_service.builtin_names()
    assert len(names) == 11
    assert {"S2", "S7", "CP3", "S2xS3", "S3xS3"} <= set(names)
    for name in names:
        pair = model_service.builtin(name)
        assert pair.name == name
        assert validate(pair.pd) == []
        assert validate(pair.sullivan) == []


def test_unknown_builtin():
    with pytest.raises(UnknownModelError, match="unknown builtin 'RP2'"):
        model_service.builtin("RP2")


def test_default_degree(s2):
    assert s2.default_degree == 12
    assert ModelPair.of(s2.sullivan).default_degree == 10


def test_data_files_match_the_builtins(data_dir, s2, cp2):
    for filename, model in [
        ("S2.pd.json", s2.pd),
        ("S2.sullivan.json", s2.sullivan),
        ("CP2.pd.json", cp2.pd),
    ]:
        loaded = model_service.load(os.path.join(data_dir, filename))
        assert model_service.dumps(loaded) == model_service.dumps(model)


def test_dumps_is_stable(cp2):
    text = model_service.dumps(cp2.pd)
    assert text.endswith("\n")
    assert model_service.dumps(model_service.parse(text)) == text
    assert json.loads(text)["orientation"] == {"x^2": "1"}


def test_missing_orientation():
    text = json.dumps(
        {
            "name": "S2",
            "kind": "pd-cdga",
            "basis": [{"label": "1", "degree": 0}, {"label": "x", "degree": 2}],
            "unit": "1",
            "dimension": 2,
        }
    )
    with pytest.raises(ModelLoadError, match="orientation required for pd-cdga"):
        model_service.parse(text, "s2.json")


def test_bad_coefficient_names_the_field():
    text = json.dumps({"name": "S3", "kind": "sullivan", "generators": [{"name": "x", "degree": 3}],
                       "differential": [{"label": "x", "value": {"x": "half"}}]})
    with pytest.raises(ModelLoadError, match="differential.0.value"):
        model_service.parse(text)


def test_sullivan_model_may_not_carry_products():
    text = json.dumps({"name": "S3", "kind": "sullivan", "generators": [{"name": "x", "degree": 3}],
                       "product": [{"left": "x", "right": "x", "value": {}}]})
    with pytest.raises(ModelLoadError, match="product table is not allowed for sullivan"):
        model_service.parse(text)


def test_invalid_json_reports_the_position():
    with pytest.raises(ModelLoadError, match=r"broken.json:2:\d+: invalid JSON"):
        model_service.parse('{"name": "S2",\n  "kind": }', "broken.json")


def test_degree_one_basis_element_fails_validation(tmp_path):
    path = tmp_path / "circle.json"
    path.write_text(
        json.dumps(
            {
                "name": "S1",
                "kind": "pd-cdga",
                "basis": [{"label": "1", "degree": 0}, {"label": "t", "degree": 1}],
                "unit": "1",
                "dimension": 1,
                "orientation": {"t": "1"},
            }
        ),
        encoding="utf-8",
    )
    model = model_service.read(str(path))
    assert model.name == "S1"
    with pytest.raises(ModelValidationError, match="1-connected input required"):
        model_service.load(str(path))


def test_unreadable_file(tmp_path):
    with pytest.raises(ModelLoadError, match="cannot read model file"):
        model_service.read(str(tmp_path / "missing.json"))


def test_export_builtins(tmp_path):
    written = model_service.export_builtins(str(tmp_path / "models"))
    assert len(written) == 22
    s3 = model_service.load(str(tmp_path / "models" / "S3.sullivan.json"))
    assert s3.generators == (("x", 3),)
    product = model_service.load(str(tmp_path / "models" / "S2xS3.pd.json"))
    assert product.dimension == 5
