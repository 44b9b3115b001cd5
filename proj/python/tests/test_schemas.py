import json
import pathlib

import jsonschema
import pytest
from referencing import Registry, Resource

import ccs

ROOT = pathlib.Path(__file__).resolve().parents[2]
SCHEMAS = ROOT / "docs" / "schemas"
FIXTURES = ROOT / "tests" / "fixtures"


@pytest.fixture(scope="module")
def registry():
    resources = []
    for path in SCHEMAS.glob("*.json"):
        schema = json.loads(path.read_text())
        resources.append((path.name, Resource.from_contents(schema)))
    return Registry().with_resources(resources)


def check(registry, name, instance):
    schema = registry.contents(name)
    jsonschema.Draft202012Validator(schema, registry=registry).validate(instance)


@pytest.fixture(scope="module")
def outputs():
    pdf, labels = ccs.synth_document("two", pages=2, seed=3)
    parsed = ccs.parse(pdf)
    model = ccs.train([ccs.with_labels(parsed, labels)], config={"n_trees": 5, "n_refinement_stages": 1, "folds": 2})
    return {
        "parsed-document.v1.json": parsed,
        "labels.v1.json": ccs.predict(model, parsed),
        "structured-document.v1.json": ccs.assemble(parsed, labels),
        "rf-model.v1.json": model,
        "detections.v1.json": ccs.detect(parsed),
    }


@pytest.mark.parametrize("name", ["parsed-document.v1.json", "labels.v1.json", "structured-document.v1.json",
                                  "rf-model.v1.json", "detections.v1.json"])
def test_outputs_match_schema(registry, outputs, name):
    check(registry, name, outputs[name])


@pytest.mark.parametrize("fixture", sorted(FIXTURES.glob("annotation_ui_*.json")), ids=lambda p: p.stem)
def test_recorded_annotation_payloads(registry, fixture):
    check(registry, "annotation-record.v1.json", json.loads(fixture.read_text()))


def test_fresh_record_with_count_is_rejected(registry):
    record = json.loads((FIXTURES / "annotation_ui_fresh.json").read_text())
    record["corrections_count"] = 0
    with pytest.raises(jsonschema.ValidationError):
        check(registry, "annotation-record.v1.json", record)
