import pathlib

import pytest

yaml = pytest.importorskip("yaml")

DOCS = pathlib.Path(__file__).resolve().parents[2] / "docs"

ROUTES = {
    "/collections": {"get", "post"},
    "/collections/{collection_id}": {"get"},
    "/collections/{collection_id}/documents": {"get", "post"},
    "/collections/{collection_id}/models": {"post"},
    "/collections/{collection_id}/stats": {"get"},
    "/documents/{doc_id}": {"get"},
    "/documents/{doc_id}/pages/{n}": {"get"},
    "/documents/{doc_id}/pages/{n}/annotation": {"get", "post", "put"},
    "/documents/{doc_id}/convert": {"post"},
    "/documents/{doc_id}/detect": {"post"},
    "/models/{model_id}": {"get"},
    "/models/{model_id}/download": {"get"},
    "/tasks/{task_id}": {"get"},
    "/tasks/{task_id}/result": {"get"},
}


def load():
    return yaml.safe_load((DOCS / "openapi.yaml").read_text())


def refs(node):
    if isinstance(node, dict):
        for k, v in node.items():
            if k == "$ref":
                yield v
            else:
                yield from refs(v)
    elif isinstance(node, list):
        for v in node:
            yield from refs(v)


def test_routes_match_service():
    paths = load()["paths"]
    methods = {"get", "post", "put", "delete", "patch"}
    assert {p: set(ops) & methods for p, ops in paths.items()} == ROUTES


def test_refs_resolve():
    spec = load()
    for ref in refs(spec):
        if ref.startswith("#/"):
            node = spec
            for part in ref[2:].split("/"):
                node = node[part]
        else:
            assert (DOCS / ref).is_file(), ref
