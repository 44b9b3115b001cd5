import pytest

import ccs


@pytest.fixture(scope="module")
def sample():
    pdf, labels = ccs.synth_document("single", pages=2, seed=7, name="sample")
    parsed = ccs.parse(pdf)
    return pdf, parsed, labels


def test_parse(sample):
    pdf, parsed, labels = sample
    assert parsed["schema"] == "parsed-document.v1"
    assert len(parsed["pages"]) == 2
    assert ccs.validate(parsed) == []
    assert ccs.parse(pdf) == parsed
    assert [len(p["labels"]) for p in labels["pages"]] == [len(p["cells"]) for p in parsed["pages"]]


def test_train_predict_assemble(sample):
    _, parsed, labels = sample
    labeled = ccs.with_labels(parsed, labels)
    model = ccs.train([labeled], config={"n_trees": 10, "n_refinement_stages": 1, "folds": 2})
    assert model["schema"] == "rf-model.v1"
    predicted = ccs.predict(model, parsed)
    assert [len(p["labels"]) for p in predicted["pages"]] == [len(p["cells"]) for p in parsed["pages"]]

    truth = [l for p in labels["pages"] for l in p["labels"]]
    guess = [l for p in predicted["pages"] for l in p["labels"]]
    metrics = ccs.evaluate(truth, guess, ["title", "author", "subtitle", "text", "picture", "table"])
    assert metrics["macro_f1"] > 0.5

    structured = ccs.assemble(parsed, labels)
    assert structured["schema"] == "structured-document.v1"
    assert structured["description"]["title"]
    assert structured == ccs.assemble(labeled)


def test_detect(sample):
    _, parsed, _ = sample
    assert ccs.detect(parsed)["schema"] == "detections.v1"


def test_session_stats():
    records = [{"schema": "annotation-record.v1", "schema_version": 1, "doc_id": "d", "page_number": i + 1,
                "labels": ["text"], "annotator": "a", "started_ms": i * 30000, "submitted_ms": (i + 1) * 30000,
                "source": "fresh", "corrections_count": None} for i in range(10)]
    stats = ccs.session_stats(records)
    assert stats["windows"][0]["rate"] == 2.0


def test_errors():
    with pytest.raises(ccs.CcsError) as err:
        ccs.parse(b"not a pdf")
    assert err.value.args[0] == "parse-failure"
    with pytest.raises(ccs.CcsError) as err:
        ccs.evaluate(["text"], ["text", "text"], ["text"])
    assert err.value.args[0] == "shape-error"
