"""Regenerate the JSON fixtures under tests/data/."""
import pathlib

from rgk import io as rio
from rgk.cpm import bare_circle, curtain_rod, single_wheel, torus_graph
from rgk.quiver import bot_plus_top

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"


def write(name, data):
    (OUT / name).write_text(rio.dumps(data))


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, C in [("wheel", single_wheel(2, 1)), ("curtain_rod", curtain_rod()),
                    ("torus", torus_graph()), ("circle", bare_circle(2))]:
        doc = rio.chordal_document(C, {"kind": "compass"})
        write(f"{name}.json", rio.document_to_json(doc))
    # theta graph, once with matching orders (planar) and once with one reversed (genus 1)
    edges = [{"id": e, "ends": ["p", "q"], "interval": [0, 1]} for e in ("a", "b", "c")]
    for name, oq in (("theta.json", ["a", "c", "b"]), ("theta_twisted.json", ["a", "b", "c"])):
        write(name, {"format": rio.GRAPH_FORMAT, "vertices": ["p", "q"], "edges": edges,
                     "orders": {"p": ["a", "b", "c"], "q": oq}})
    write("loop.json", {"format": rio.GRAPH_FORMAT, "vertices": ["p"],
                        "edges": [{"id": "l", "ends": ["p", "p"], "interval": [0, 1]}],
                        "orders": {"p": ["l"]}})
    # a zero-section circle with a vertex of degree five
    z = [{"id": "z1", "ends": ["x", "y"], "interval": [0, 1]},
         {"id": "z2", "ends": ["y", "x"], "interval": [0, 1]}]
    free = [{"id": f"f{k}", "ends": ["x", None], "interval": [0, 1]} for k in range(3)]
    write("degree5.json", {"format": rio.GRAPH_FORMAT, "vertices": ["x", "y"], "edges": z + free,
                           "orders": {"x": ["z1", "f0", "f1", "z2", "f2"], "y": ["z1", "z2"]},
                           "zero_section": ["z1", "z2"]})
    write("bot_plus_top.json", bot_plus_top().to_json())
    a3 = {"vertices": 3, "arrows": [["a", 0, 1], ["b", 2, 1]]}
    write("rep_a3.json", {"format": rio.REP_FORMAT, "quiver": a3, "dims": [1, 1, 1],
                          "maps": {"a": [[1]], "b": [[1]]}})
    write("rep_a3_simple.json", {"format": rio.REP_FORMAT, "quiver": a3, "dims": [0, 1, 0], "maps": {}})
    (OUT / "broken.json").write_text('{"format": "rgk-graph/1",\n  "vertices": [\n}\n')


if __name__ == "__main__":
    main()
