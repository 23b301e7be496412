import pytest
from hypothesis import given, strategies as st

from rgk.mirror import (MirrorError, balloon_ext1, balloon_hom, bb_compare, cech_oracle, chain,
                        character, direct_sum, make_descent, nodal_end_ring, parse_twist, perf_hom,
                        ring, sections, shift, structure_sheaf, tilting_twists, truncation,
                        zero_object)


def brute_sections(p, q, z, bound=60):
    m, n = z
    return sorted((i, j) for i in range(bound) for j in range(bound)
                  if (i - m) % p == 0 and (n - j) % q == 0 and (i - m) // p == (n - j) // q)


@given(st.integers(1, 4), st.integers(1, 4), st.integers(-8, 12), st.integers(-8, 12))
def test_sections_brute(p, q, m, n):
    assert sorted(sections(p, q, (m, n))) == brute_sections(p, q, (m, n))


def test_projective_line():
    assert balloon_hom(1, 1, "O", "O(1)") == 2
    assert balloon_hom(1, 1, "O(1)", "O") == 0
    assert balloon_ext1(1, 1, "O(2)", "O") == 1
    assert balloon_ext1(1, 1, "O", "O") == 0


def test_parse_twist():
    assert parse_twist(2, 3, "O") == (0, 0)
    assert parse_twist(2, 3, "O(1)") == (2, 0)
    assert parse_twist(2, 3, "O(1,-2)") == (1, -2)
    with pytest.raises(MirrorError, match="lattice"):
        parse_twist(2, 3, "L(1)")


def test_linear_equivalence():
    # p x1 = q x2, so the two presentations of c have the same sections
    for p, q in [(1, 1), (2, 3), (3, 2)]:
        for k in range(-2, 4):
            assert len(sections(p, q, (k * p, 0))) == len(sections(p, q, (0, k * q)))


@pytest.mark.parametrize("p,q", [(1, 1), (1, 2), (2, 2), (2, 3), (3, 1)])
def test_tilting_collection_is_exceptional_free(p, q):
    T = tilting_twists(p, q)
    assert len(T) == p + q
    for x in T:
        assert balloon_hom(p, q, x, x) == 1
        for y in T:
            assert balloon_ext1(p, q, x, y) == 0


def test_characters():
    assert character(3, 2, (4, 1), 0) == 1
    assert character(3, 2, (4, 1), 1) == 1


@pytest.mark.parametrize("d", range(0, 8))
def test_nodal_end_ring(d):
    # pairs of polynomials of degree <= d agreeing at 0
    assert nodal_end_ring(d) == 2 * d + 1


def test_nodal_negative():
    with pytest.raises(MirrorError):
        nodal_end_ring(-1)


@pytest.mark.parametrize("a1,a2", [(1, 1), (1, 2), (2, 1), (2, 2), (1, 3), (3, 2)])
def test_bb(a1, a2):
    rep = bb_compare(a1, a2)
    assert rep.passed, rep.mismatch
    assert rep.quiver_hom == [[rep.balloon_hom[rep.permutation[i]][rep.permutation[j]]
                               for j in range(a1 + a2)] for i in range(a1 + a2)]


def test_bb_wrong_balloon():
    rep = bb_compare(1, 2, against=(2, 2))
    assert not rep.passed and "sizes differ" in rep.mismatch


def test_shapes():
    assert chain(1, 2, 3).balloons == [(1, 2), (2, 3)]
    assert ring(1, 2).nodes == [(0, 1), (1, 0)]
    with pytest.raises(MirrorError):
        chain(1)
    with pytest.raises(MirrorError):
        ring(0, 1)


@pytest.mark.parametrize("S", [chain(1, 1), chain(2, 1, 3), ring(1, 1), ring(1, 2, 1)])
def test_perf_hom_matches_cech(S):
    O = structure_sheaf(S)
    h = perf_hom(S, O, O)
    assert (h.get(0, 0), h.get(1, 0)) == cech_oracle(S)
    assert h.get(-1, 0) == 0


def test_cech_values():
    assert cech_oracle(chain(1, 2, 3, 4)) == (1, 0)
    assert cech_oracle(ring(1, 1, 1)) == (1, 1)


def test_zero_and_shift():
    S = ring(1, 1)
    O, Z = structure_sheaf(S), zero_object(S)
    assert perf_hom(S, Z, O) == {} and perf_hom(S, O, Z) == {}
    h = perf_hom(S, O, O)
    h1 = perf_hom(S, O, shift(O, 1))
    assert h1 == {k - 1: v for k, v in h.items()}


def test_direct_sum_additive():
    S = chain(1, 2)
    O = structure_sheaf(S)
    OO = direct_sum(O, O)
    h = perf_hom(S, O, O)
    assert perf_hom(S, OO, O) == {k: 2 * v for k, v in h.items()}
    assert perf_hom(S, OO, OO) == {k: 4 * v for k, v in h.items()}


def test_descent_glue_must_be_equivariant():
    S = chain(1, 2, 2)
    # O(1,0) on the second balloon has character 1 at its order-2 point, O has 0
    with pytest.raises(MirrorError, match="equivariant"):
        make_descent(S, [[((0, 0), 0)], [((1, 0), 0)]], {(0, 0): [[1]]})


def test_truncation_env(monkeypatch):
    monkeypatch.setenv("RGK_TRUNCATION", "7")
    assert truncation() == 7
    assert truncation(3) == 3
    monkeypatch.delenv("RGK_TRUNCATION")
    assert truncation() == 25
