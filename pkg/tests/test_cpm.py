import random
from itertools import product

import pytest

from rgk.cpm import (CYCLE, PATH, CPMError, base_graph, bare_circle, cpm_hom, curtain_rod,
                     direct_sum_glued, dualizable, dualizable_from_indices, euler, gt_axioms,
                     is_covering, local_contractions, make_glued, maximal_sieve, pullback_sieve,
                     random_glued, sieve, single_wheel, star_sieve, structure_object,
                     subdivide_zero_edge, torus_graph, transport_glued, uncovered, wheel_cover,
                     zero_glued)
from rgk.graph import make_graph
from rgk.ribbon import (PartialContraction, RibbonGraph, contract_edge, identity_partial,
                        open_restriction, random_ribbon_graph, star_partial, validate_chordal)


def index_tuples(max_sum, min_len=1):
    for s in range(1, max_sum + 1):
        for m in range(min_len, s + 1):
            for a in product(range(1, s + 1), repeat=m):
                if sum(a) == s:
                    yield a


# -- base graph and dualizability ----------------------------------------

def test_single_wheel_base():
    B = base_graph(single_wheel(2, 1))
    assert B.shape == PATH and B.vertices == ("Z0",)
    assert sorted(len(b.chords) for b in B.edges) == [1, 2]
    assert not any(b.compact for b in B.edges)


def test_wheel_indices():
    D = dualizable(single_wheel(2, 1))
    assert D and D.indices.shape == PATH and D.indices.values == (1, 2)


def test_torus_base_is_cycle():
    D = dualizable(torus_graph())
    assert D and D.indices.shape == CYCLE and D.indices.values == (1, 1)
    assert all(b.compact for b in D.base.edges)


def test_bare_circle_not_dualizable():
    D = dualizable(bare_circle(2))
    assert not D and "degree 0" in D.reason


@pytest.mark.parametrize("shape,a", [(PATH, a) for a in index_tuples(5, 2)] +
                         [(CYCLE, a) for a in index_tuples(5, 2)])
def test_indices_roundtrip(shape, a):
    C = dualizable_from_indices(shape, a)
    D = dualizable(C)
    assert D and D.indices.shape == shape
    if shape == PATH:
        assert D.indices.values == a
    else:
        # a ring has no preferred starting point or direction
        vals = D.indices.values
        rots = {a[k:] + a[:k] for k in range(len(a))}
        assert vals in rots | {tuple(reversed(r)) for r in rots}


def test_same_side_rejected():
    # one Z-circle carrying two noncompact chords, both to the north
    G = make_graph(["p", "q"], [("z0", "p", "q"), ("z1", "q", "p"), ("n0", "p", None), ("n1", "q", None)])
    R = RibbonGraph.build(G, {"p": ["z0", "n0", "z1"], "q": ["z1", "n1", "z0"]})
    C = validate_chordal(R, {"z0", "z1"})
    D = dualizable(C)
    assert not D


# -- Hom ------------------------------------------------------------------

def test_torus_end():
    O = structure_object(torus_graph())
    h = cpm_hom(O, O)
    assert h == (0, 1, 1) and euler(h) == 0


@pytest.mark.parametrize("C", [single_wheel(1, 1), single_wheel(2, 3), curtain_rod()])
def test_path_shapes_have_rigid_structure_object(C):
    O = structure_object(C)
    assert cpm_hom(O, O) == (0, 1, 0)


def test_zero_object():
    cov = wheel_cover(curtain_rod())
    Z = zero_glued(cov)
    O = structure_object(cov.chordal, cov)
    assert cpm_hom(Z, Z) == cpm_hom(Z, O) == cpm_hom(O, Z) == (0, 0, 0)


def test_glue_shape_checked():
    cov = wheel_cover(curtain_rod())
    O = structure_object(cov.chordal, cov)
    bad = {c: ([[1, 0]], g0) for c, (g1, g0) in O.glue.items()}
    with pytest.raises(CPMError):
        make_glued(cov, O.reps, bad)


@pytest.mark.parametrize("seed", range(6))
def test_additivity(seed):
    rng = random.Random(seed)
    C = [curtain_rod(), torus_graph(), single_wheel(1, 2)][seed % 3]
    cov = wheel_cover(C)
    O = structure_object(C, cov)
    X = random_glued(cov, rng)
    Y = random_glued(cov, rng)
    assert X is not None and Y is not None
    S = direct_sum_glued(X, Y)
    for other in (O, X):
        lhs = cpm_hom(S, other)
        rhs = tuple(p + q for p, q in zip(cpm_hom(X, other), cpm_hom(Y, other)))
        assert lhs == rhs
        lhs = cpm_hom(other, S)
        rhs = tuple(p + q for p, q in zip(cpm_hom(other, X), cpm_hom(other, Y)))
        assert lhs == rhs


def test_direct_sum_of_structure_objects():
    C = torus_graph()
    O = structure_object(C)
    OO = direct_sum_glued(O, O)
    assert cpm_hom(OO, OO) == (0, 4, 4)


def test_refinement_keeps_hom():
    C = curtain_rod()
    O = structure_object(C)
    e = min(C.zero_section)
    C2 = subdivide_zero_edge(C, e)
    cov2 = wheel_cover(C2)
    assert cpm_hom(transport_glued(O, cov2), transport_glued(O, cov2)) == cpm_hom(O, O)
    with pytest.raises(CPMError):
        subdivide_zero_edge(C, next(iter(C.chords())))


# -- sieves ---------------------------------------------------------------

def path_graph(n):
    vs = [f"x{i}" for i in range(n)]
    es = [(f"e{i}", vs[i], vs[i + 1]) for i in range(n - 1)] + [("l", vs[0], None), ("r", vs[-1], None)]
    G = make_graph(vs, es)
    orders = {}
    for i, v in enumerate(vs):
        orders[v] = [e for e, a, b in es if v in (a, b)]
    return RibbonGraph.build(G, orders)


def test_star_sieve_covers():
    X = path_graph(4)
    assert is_covering(star_sieve(X))
    assert is_covering(maximal_sieve(X))
    assert uncovered(sieve(X)) == list(X.graph.vertices)


def test_missing_star_reported():
    X = path_graph(4)
    U = star_sieve(X, ["x0", "x1", "x3"])
    assert uncovered(U) == ["x2"]
    # a contraction through x2 does not count: it is not an open inclusion
    S, m = contract_edge(X, "e1")
    g = PartialContraction(X, frozenset(X.graph.vertices), frozenset(X.graph.edge_ids), S, m)
    assert uncovered(sieve(X, list(U.generators) + [g])) == ["x2"]


def test_pullback_of_maximal_is_maximal():
    X = path_graph(3)
    M = maximal_sieve(X)
    for f in local_contractions(X):
        P = pullback_sieve(f, M)
        assert is_covering(P)
        assert all(P.contains(h) for h in local_contractions(f.target, 2))


def test_identity_pullback():
    X = path_graph(3)
    U = star_sieve(X, ["x0", "x2"])
    P = pullback_sieve(identity_partial(X), U)
    for h in local_contractions(X):
        assert P.contains(h) == U.contains(h)


def test_star_pullback_along_open():
    X = path_graph(4)
    S = ["x1", "x2"]
    es = {e for v in S for e in X.graph.incident(v)}
    f = open_restriction(X, S, es)
    P = pullback_sieve(f, star_sieve(X))
    W = f.target
    Q = star_sieve(W)
    for h in local_contractions(W):
        assert P.contains(h) == Q.contains(h)
    assert is_covering(P)


def test_pullback_along_contraction_not_covering():
    # contracting the middle edge merges two stars; nothing in the star
    # sieve factors through the merged vertex, so the pullback misses it
    X = path_graph(2)
    S, m = contract_edge(X, "e0")
    f = PartialContraction(X, frozenset(X.graph.vertices), frozenset(X.graph.edge_ids), S, m)
    assert not is_covering(pullback_sieve(f, star_sieve(X)))


def test_sieve_generator_must_start_at_base():
    X, Y = path_graph(2), path_graph(3)
    with pytest.raises(CPMError):
        sieve(X, [identity_partial(Y)])


@pytest.mark.parametrize("seed", range(4))
def test_axioms_random(seed):
    rng = random.Random(seed)
    X = random_ribbon_graph(rng, rng.randint(2, 4), extra_edges=1, free_edges=1)
    members = local_contractions(X)
    opens = [star_partial(X, v) for v in X.graph.vertices] + [identity_partial(X)]
    for _ in range(3):
        U = sieve(X, list(star_sieve(X).generators) + rng.sample(members, 2))
        V = sieve(X, rng.sample(members, min(3, len(members))))
        assert all(gt_axioms(X, U, V, opens).values())
