from __future__ import annotations

import pytest

from dingotk.ontology import load_ontology
from dingotk.shapes import default_dingo_shapes
from dingotk.turtle import parse_turtle

from importlib import resources


def embedded(name: str) -> str:
    return resources.files("dingotk").joinpath(f"data/{name}").read_text("utf-8")


@pytest.fixture(scope="session")
def snapshot_text():
    return embedded("dingo.ttl")


@pytest.fixture(scope="session")
def snapshot_graph(snapshot_text):
    return parse_turtle(snapshot_text)


@pytest.fixture(scope="session")
def snapshot_schema(snapshot_graph):
    return load_ontology(snapshot_graph)


@pytest.fixture(scope="session")
def dingo_shapes(snapshot_schema):
    return default_dingo_shapes(snapshot_schema)
