"""Python bindings for the ccs document conversion pipeline.

Documents travel as their canonical JSON text; the helpers below decode the
results into dicts.
"""

import json

from . import _core
from ._core import CcsError

__all__ = ["CcsError", "parse", "train", "predict", "assemble", "evaluate", "validate", "detect",
           "synth_document", "session_stats", "with_labels"]


def _text(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def parse(pdf: bytes, normalization=None, threads: int = 1, source_name: str = "") -> dict:
    return json.loads(_core.parse(pdf, _text(normalization) if normalization else "", threads, source_name))


def train(parsed_docs, config=None, labels=None) -> dict:
    return json.loads(_core.train([_text(d) for d in parsed_docs], _text(config) if config else "", labels or []))


def predict(model, parsed, stage: int = -1) -> dict:
    return json.loads(_core.predict(_text(model), _text(parsed), stage))


def assemble(parsed, labels=None, config=None) -> dict:
    return json.loads(_core.assemble(_text(parsed), _text(labels) if labels else None, _text(config) if config else ""))


def evaluate(truth, predicted, labels) -> dict:
    return json.loads(_core.evaluate(list(truth), list(predicted), list(labels)))


def validate(parsed) -> list:
    return _core.validate(_text(parsed))


def detect(parsed) -> dict:
    return json.loads(_core.detect(_text(parsed)))


def synth_document(layout: str = "single", pages: int = 2, seed: int = 1, name: str = "synthetic"):
    pdf, labels = _core.synth_document(layout, pages, seed, name)
    return pdf, json.loads(labels)


def session_stats(records, retrains=(), window: int = 10) -> dict:
    return json.loads(_core.session_stats(_text(list(records)), list(retrains), window))


def with_labels(parsed: dict, labels: dict) -> dict:
    """Copy of a parsed document with labels written onto its cells."""
    out = json.loads(json.dumps(parsed))
    by_page = {p["page_number"]: p["labels"] for p in labels["pages"]}
    for page in out["pages"]:
        names = by_page[page["page_number"]]
        for cell in page["cells"]:
            cell["label"] = names[cell["id"]]
    return out
