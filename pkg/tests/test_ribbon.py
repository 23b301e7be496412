import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from rgk.cyclic import all_cyclic_orders, cyclic_from_list, join
from rgk.graph import FREE, Collapse, EdgeMap, GraphMorphism, make_graph
from rgk.ribbon import (ContractionError, RibbonError, RibbonGraph, all_chordal_graphs,
                        boundary_components, compose_partial_contractions, compose_simple,
                        contract_edge, genus, identity_partial, leaf_cyclic_order, open_restriction,
                        partial_contraction, random_ribbon_graph, simple_contraction, validate_chordal)


def faces(R):
    """Independent face count: orbits of (vertex rotation) o (edge flip) on sides.

    A side is (edge, end index); free ends are walked off the graph.
    """
    G = R.graph
    nxt = {}
    for e in G.edges:
        for k, x in enumerate(e.ends):
            if x is FREE:
                continue
            o = R.orders[x]
            f = o.R((e.id, x))[0]
            fe = G.edge(f)
            nxt[(e.id, 1 - k)] = (f, 0 if fe.ends[0] == x else 1)
    # paths start at sides nothing leads into; every other orbit is a cycle
    sides = [(e.id, k) for e in G.edges for k in (0, 1)]
    into = set(nxt.values())
    seen, count = set(), 0
    for s in sorted(sides, key=lambda s: s in into):
        if s in seen:
            continue
        count += 1
        x = s
        while x is not None and x not in seen:
            seen.add(x)
            x = nxt.get(x)
    return count


def circle_ribbon(n=2):
    G = make_graph([f"v{i}" for i in range(n)], [(f"e{i}", f"v{i}", f"v{(i + 1) % n}") for i in range(n)])
    return RibbonGraph.build(G, {f"v{i}": [f"e{(i - 1) % n}", f"e{i}"] for i in range(n)})


def theta(twisted=False):
    G = make_graph(["p", "q"], [("a", "p", "q"), ("b", "p", "q"), ("c", "p", "q")])
    return RibbonGraph.build(G, {"p": ["a", "b", "c"], "q": ["a", "b", "c"] if twisted else ["a", "c", "b"]})


def test_circle_boundary():
    R = circle_ribbon()
    W = boundary_components(R)
    assert len(W) == 2 and all(w.compact for w in W)
    assert genus(R) == 0


def test_theta():
    assert len(boundary_components(theta())) == 3 and genus(theta()) == 0
    assert len(boundary_components(theta(True))) == 1 and genus(theta(True)) == 1


def test_star_of_trivalent():
    G = make_graph(["c"], [("a", "c", None), ("b", "c", None), ("d", "c", None)])
    R = RibbonGraph.build(G, {"c": ["a", "b", "d"]})
    W = boundary_components(R)
    assert len(W) == 3 and not any(w.compact for w in W)
    L = leaf_cyclic_order(R)
    assert L == cyclic_from_list(["a", "b", "d"])


def test_degree_one_rejected():
    G = make_graph(["p", "q"], [("a", "p", "q"), ("b", "q", None)])
    with pytest.raises(RibbonError, match="degree 1"):
        RibbonGraph.build(G, {"p": ["a"], "q": ["a", "b"]})


def test_genus_needs_compact_connected():
    G = make_graph(["c"], [("a", "c", None), ("b", "c", None)])
    with pytest.raises(RibbonError):
        genus(RibbonGraph.build(G, {"c": ["a", "b"]}))


@settings(max_examples=60)
@given(st.integers(1, 6), st.integers(0, 4), st.integers(0, 3), st.integers(0, 2 ** 31))
def test_sides_partitioned(n, extra, free, seed):
    R = random_ribbon_graph(random.Random(seed), n, extra if n > 1 else 0, free)
    W = boundary_components(R)
    darts = [d for w in W for d in w.darts]
    assert len(darts) == len(set(darts)) == 2 * len(R.graph.edges)
    assert len(W) == faces(R)


@settings(max_examples=60)
@given(st.integers(2, 6), st.integers(0, 4), st.integers(0, 2 ** 31))
def test_genus_nonnegative_integer(n, extra, seed):
    R = random_ribbon_graph(random.Random(seed), n, extra, 0, compact=True)
    v, e, b = len(R.graph.vertices), len(R.graph.edges), faces(R)
    assert (2 - v + e - b) % 2 == 0
    assert genus(R) == (2 - v + e - b) // 2 >= 0


def subdivide(R, eid):
    G = R.graph
    e = G.edge(eid)
    H = G.subdivide(eid, "mid")
    orders = {}
    for x, lst in R.order_lists().items():
        orders[x] = [f"{eid}~a" if (y == eid and x == e.u) else f"{eid}~b" if y == eid else y for y in lst]
    orders["mid"] = [f"{eid}~a", f"{eid}~b"]
    return RibbonGraph.build(H, orders)


@settings(max_examples=40)
@given(st.integers(2, 5), st.integers(0, 3), st.integers(0, 2 ** 31))
def test_genus_subdivision_invariant(n, extra, seed):
    rng = random.Random(seed)
    R = random_ribbon_graph(rng, n, extra, 0, compact=True)
    eid = rng.choice([e.id for e in R.graph.edges])
    S = subdivide(R, eid)
    assert genus(S) == genus(R)
    assert len(boundary_components(S)) == len(boundary_components(R))


def two_vertex_tree(ou, ov):
    """Trivalent-ish u, v joined by m; leaves free."""
    lu = [x for x in ou if x != "m"]
    lv = [x for x in ov if x != "m"]
    G = make_graph(["u", "v"], [("m", "u", "v")] + [(x, "u", None) for x in lu] + [(x, "v", None) for x in lv])
    return RibbonGraph.build(G, {"u": ou, "v": ov})


def test_leaf_order_is_join_trivalent():
    T = two_vertex_tree(["m", "a", "b"], ["m", "c", "d"])
    J = join(cyclic_from_list([("m", "u"), ("a", "u"), ("b", "u")]), ("m", "u"),
             cyclic_from_list([("m", "v"), ("c", "v"), ("d", "v")]), ("m", "v"))
    assert leaf_cyclic_order(T) == cyclic_from_list([h[0] for h in J.as_list()])


def test_leaf_order_is_join_all_small():
    for ku, kv in product(range(2, 5), repeat=2):
        for ou in all_cyclic_orders(["m"] + [f"a{i}" for i in range(ku - 1)]):
            for ov in all_cyclic_orders(["m"] + [f"b{i}" for i in range(kv - 1)]):
                T = two_vertex_tree(ou.as_list(), ov.as_list())
                J = join(ou, "m", ov, "m")
                assert leaf_cyclic_order(T) == J


def random_tree(rng, n):
    vs = [f"t{i}" for i in range(n)]
    edges = [(f"i{k}", vs[rng.randrange(k + 1)], vs[k + 1]) for k in range(n - 1)]
    deg = {v: 0 for v in vs}
    for _, a, b in edges:
        deg[a] += 1
        deg[b] += 1
    for v in vs:
        for _ in range(max(0, 2 - deg[v]) + rng.randint(0, 1)):
            edges.append((f"l{len(edges)}", v, None))
    G = make_graph(vs, edges)
    orders = {}
    for v in vs:
        inc = G.incident(v)
        rng.shuffle(inc)
        orders[v] = inc
    return RibbonGraph.build(G, orders)


@given(st.integers(1, 5), st.integers(0, 2 ** 31))
def test_leaf_operator_single_cycle(n, seed):
    T = random_tree(random.Random(seed), n)
    L = leaf_cyclic_order(T)
    assert L.elements == frozenset(e.id for e in T.graph.noncompact_edges())


def test_leaf_order_needs_tree():
    with pytest.raises(RibbonError):
        leaf_cyclic_order(circle_ribbon())


# -- chordal -------------------------------------------------------------

def chordal_vertex(order):
    """Zero-section circle x - y with extra free half-edges at x in the given order."""
    extra = [h for h in order if h not in ("z1", "z2")]
    G = make_graph(["x", "y"], [("z1", "x", "y"), ("z2", "y", "x")] + [(h, "x", None) for h in extra])
    return RibbonGraph.build(G, {"x": order, "y": ["z1", "z2"]})


def test_wheel_is_chordal():
    from rgk.cpm import single_wheel
    C = single_wheel(2, 1)
    assert validate_chordal(C.ribbon, C.zero_section) == C


def test_chordal_clauses():
    validate_chordal(chordal_vertex(["z1", "n", "z2", "s"]), {"z1", "z2"})
    with pytest.raises(RibbonError, match="degree at most 4"):
        validate_chordal(chordal_vertex(["z1", "a", "b", "z2", "c"]), {"z1", "z2"})
    with pytest.raises(RibbonError, match="same side"):
        validate_chordal(chordal_vertex(["z1", "a", "b", "z2"]), {"z1", "z2"})
    G = make_graph(["x", "y", "w"], [("z1", "x", "y"), ("z2", "y", "x"), ("c", "x", "w"), ("f", "w", None)])
    R = RibbonGraph.build(G, {"x": ["z1", "c", "z2"], "y": ["z1", "z2"], "w": ["c", "f"]})
    with pytest.raises(RibbonError, match="'w' is missing from the zero section"):
        validate_chordal(R, {"z1", "z2"})
    with pytest.raises(RibbonError, match="not bivalent"):
        validate_chordal(chordal_vertex(["z1", "z2"]), {"z1"})


def test_chordal_degrees():
    for n in (1, 2, 3):
        for C in all_chordal_graphs(n):
            assert all(C.graph.degree(v) in (2, 3, 4) for v in C.graph.vertices)


def test_chordal_enumeration_counts():
    # frozen from the enumerator; the n = 1 count is checked by hand below
    assert [len(list(all_chordal_graphs(n))) for n in (1, 2, 3)] == [3, 41, 394]
    # one vertex on a circle of length two: no chords, one N chord, or one N and one S
    degs = sorted(tuple(sorted(C.graph.degree(v) for v in C.graph.vertices)) for C in all_chordal_graphs(1))
    assert len(degs) == 3


# -- contractions --------------------------------------------------------

def test_identity_contraction():
    R = theta()
    from rgk.graph import identity_morphism
    simple_contraction(R, R, identity_morphism(R.graph))


def test_join_contraction_and_rejection():
    T = two_vertex_tree(["m", "a", "b"], ["m", "c", "d"])
    S, m = contract_edge(T, "m", "w")
    assert S.order_lists()["w"] == ["a", "b", "c", "d"]
    simple_contraction(T, S, m)
    bad = RibbonGraph.build(S.graph, {"w": ["a", "c", "b", "d"]})
    with pytest.raises(ContractionError, match="minimal pair"):
        simple_contraction(T, bad, GraphMorphism.build(T.graph, bad.graph, m.vertex_map, m.edge_action))


def test_contraction_closed_under_composition():
    rng = random.Random(3)
    for _ in range(20):
        R = random_ribbon_graph(rng, 4, 1, 1)
        tree_edges = [e.id for e in R.graph.compact_edges()]
        rng.shuffle(tree_edges)
        try:
            S, m1 = contract_edge(R, tree_edges[0])
            T, m2 = contract_edge(S, tree_edges[1])
        except RibbonError:
            continue  # would create a loop
        f = simple_contraction(R, S, m1)
        g = simple_contraction(S, T, m2)
        compose_simple(f, g)


def path4():
    G = make_graph(["x1", "x2", "x3", "x4"], [("e1", "x1", "x2"), ("e2", "x2", "x3"), ("e3", "x3", "x4"),
                                              ("l", "x1", None), ("r", "x4", None)])
    return RibbonGraph.build(G, {"x1": ["l", "e1"], "x2": ["e1", "e2"], "x3": ["e2", "e3"], "x4": ["e3", "r"]})


def test_restriction_then_contraction():
    X = path4()
    f = open_restriction(X, ["x2", "x3"], ["e1", "e2", "e3"])
    U = f.target
    Y, m = contract_edge(U, "e2")
    g = partial_contraction(U, U.graph.vertices, U.graph.edge_ids, Y, m)
    h = compose_partial_contractions(f, g)
    assert h.open_vertices == {"x2", "x3"} and h.open_edges == {"e1", "e2", "e3"}
    assert h.map.edge_action["e2"] == Collapse("x2+x3")
    assert h.target == Y


def test_unrestricted_composition_is_plain():
    X = path4()
    Y, m1 = contract_edge(X, "e1")
    Z, m2 = contract_edge(Y, "e2")
    f = partial_contraction(X, X.graph.vertices, X.graph.edge_ids, Y, m1)
    g = partial_contraction(Y, Y.graph.vertices, Y.graph.edge_ids, Z, m2)
    h = compose_partial_contractions(f, g)
    assert h.open_vertices == frozenset(X.graph.vertices)
    assert h.map.vertex_map == {"x1": "x1+x2+x3", "x2": "x1+x2+x3", "x3": "x1+x2+x3", "x4": "x4"}


@settings(max_examples=30)
@given(st.integers(0, 2 ** 31))
def test_partial_composition_associative(seed):
    from rgk.cpm import local_contractions
    rng = random.Random(seed)
    X = random_ribbon_graph(rng, rng.randint(2, 4), 1, 1)
    f = rng.choice(local_contractions(X))
    g = rng.choice(local_contractions(f.target) or [identity_partial(f.target)])
    h = rng.choice(local_contractions(g.target) or [identity_partial(g.target)])
    left = compose_partial_contractions(compose_partial_contractions(f, g), h)
    right = compose_partial_contractions(f, compose_partial_contractions(g, h))
    assert left == right


def test_interface_mismatch():
    with pytest.raises(ContractionError, match="interface"):
        compose_partial_contractions(identity_partial(theta()), identity_partial(path4()))
