import json
import random
from pathlib import Path

import pytest

from rgk.cpm import curtain_rod, random_glued, single_wheel, structure_object, torus_graph, wheel_cover
from rgk.graph import GraphError
from rgk.io import (DocumentError, chordal_document, dump_document, glued_from_json, glued_to_json,
                    grading_from_block, load_document, num_in, num_out, parse_json, rep_from_json,
                    rep_to_json, to_dot)
from rgk.quiver import random_rep, type_a_quiver
from rgk.ribbon import RibbonError, genus

DATA = Path(__file__).parent / "data"
GRAPHS = ["wheel", "curtain_rod", "torus", "circle", "theta", "theta_twisted"]


@pytest.mark.parametrize("name", GRAPHS)
def test_roundtrip_byte_identical(name):
    text = (DATA / f"{name}.json").read_text()
    doc = load_document(text)
    assert dump_document(doc) == text
    assert load_document(dump_document(doc)) == doc


@pytest.mark.parametrize("name", GRAPHS)
def test_dot_deterministic(name):
    doc = load_document((DATA / f"{name}.json").read_text())
    dot = to_dot(doc)
    assert dot == to_dot(load_document(dump_document(doc)))
    assert dot.startswith("graph rgk {") and dot.endswith("}\n")
    # every edge is drawn once
    assert sum(1 for line in dot.splitlines() if " -- " in line) == len(doc.graph.edges)


def test_dot_marks_zero_section():
    doc = load_document((DATA / "wheel.json").read_text())
    bold = [line for line in to_dot(doc).splitlines() if "style=bold" in line]
    assert len(bold) == len(doc.zero_section)


def test_parse_error_position():
    with pytest.raises(DocumentError, match="line 3, column 1"):
        parse_json((DATA / "broken.json").read_text())


def test_invalid_graphs():
    with pytest.raises((GraphError, DocumentError), match="loop"):
        load_document((DATA / "loop.json").read_text())
    with pytest.raises((GraphError, RibbonError, DocumentError), match="degree at most 4"):
        load_document((DATA / "degree5.json").read_text())


def test_document_field_errors():
    good = json.loads((DATA / "theta.json").read_text())
    for key in ("vertices", "edges", "orders"):
        bad = dict(good)
        del bad[key]
        with pytest.raises(DocumentError, match=key):
            load_document(json.dumps(bad))
    bad = dict(good, format="something-else")
    with pytest.raises(DocumentError, match="format"):
        load_document(json.dumps(bad))


def test_genus_from_documents():
    assert genus(load_document((DATA / "theta.json").read_text()).ribbon) == 0
    assert genus(load_document((DATA / "theta_twisted.json").read_text()).ribbon) == 1


def test_numbers():
    assert num_out(num_in("3/6")) == "1/2"
    assert num_out(num_in(4)) == 4
    for bad in (True, "x", None):
        with pytest.raises(DocumentError):
            num_in(bad)


def test_grading_block_roundtrip():
    doc = load_document((DATA / "wheel.json").read_text())
    Gr = grading_from_block(doc)
    assert Gr is not None


def test_rep_roundtrip():
    Q = type_a_quiver("<>>")
    rng = random.Random(3)
    M = random_rep(Q, [1, 2, 0, 1], rng)
    assert rep_from_json(rep_to_json(M)) == M
    with pytest.raises(DocumentError):
        rep_from_json({"format": "nope"})


@pytest.mark.parametrize("C", [curtain_rod(), torus_graph(), single_wheel(2, 1)])
def test_glued_roundtrip(C):
    cov = wheel_cover(C)
    O = structure_object(C, cov)
    assert glued_from_json(json.loads(json.dumps(glued_to_json(O))), cov) == O
    X = random_glued(cov, random.Random(0))
    assert glued_from_json(glued_to_json(X), cov) == X


def test_chordal_document():
    C = torus_graph()
    doc = chordal_document(C)
    assert load_document(dump_document(doc)).chordal == C
