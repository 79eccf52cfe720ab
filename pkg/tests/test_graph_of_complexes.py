import pytest
from hypothesis import given, strategies as st

from cubetop.complex_core import check_npc, graph
from cubetop.errors import AttachmentNotLocalIsometry, HypothesisFailure, MalformedInput, NotLocalIsometry
from cubetop.graph_of_complexes import (
    GogEdge,
    GraphOfComplexes,
    assemble_total_space,
    augment,
    check_gluing_criterion,
    validate_gog,
)
from cubetop.hyperplanes import check_special
from cubetop.morphisms import identity_map, make_map

from helpers import T, circle, fixture, loop, power_cycle, rose, torus, words


def gog(name):
    return fixture(name).pick("gog")[1]


def test_torus_gog_total_space():
    S = assemble_total_space(gog("torus_gog")).complex
    assert S.summary() == {"dimension": 2, "vertices": 2, "edges": 4, "squares": 2}
    assert check_npc(S).passed


def test_f2z_total_space():
    S = assemble_total_space(gog("f2z_gog")).complex
    assert len(S.squares) == 4 and check_npc(S).passed


def test_no_edges_is_a_disjoint_union():
    G = GraphOfComplexes(("A", "B"), (rose(), torus()))
    S = assemble_total_space(G).complex
    assert (S.n_vertices, len(S.edges), len(S.squares)) == (2, 4, 1)


def test_augment_adds_one_cylinder_per_map():
    G = gog("torus_gog")
    assert augment(G, []) == G
    H = augment(G, [(0, power_cycle(circle(), 2))])
    assert len(H.vertex_spaces) == 2 and len(H.edges) == 2
    S = assemble_total_space(H).complex
    before = assemble_total_space(G).complex
    # each source edge contributes two squares of the subdivided band
    assert len(S.squares) == len(before.squares) + 4


def test_augment_rejects_bad_maps():
    G = gog("torus_gog")
    with pytest.raises(NotLocalIsometry):
        augment(G, [(0, loop(rose(), 0))])
    folded = make_map(graph(2, [(0, 1), (0, 1)]), circle(), [0, 0], [(0, T), (0, T)])
    with pytest.raises(NotLocalIsometry):
        augment(G, [(0, folded)])


@given(st.lists(st.sampled_from(["a", "b", "ab", "a^2", "ab^-1", "bab^-1"]), min_size=1, max_size=3),
       st.integers(0, 2))
def test_augment_preserves_nonpositive_curvature(ws, copies):
    X = rose()
    G = GraphOfComplexes(("V",), (X,), (GogEdge("t", circle(), 0, loop(X, 0), 0, loop(X, 1)),))
    H = augment(G, [(0, words(X, *ws))] * copies)
    assert check_npc(assemble_total_space(H).complex).passed


def test_criterion_examples():
    assert check_gluing_criterion(gog("torus_gog")).passed
    rep = check_gluing_criterion(gog("wallmerge_gog"))
    assert rep.conditions["2"] == "fail"
    assert any(w["condition"] == 2 and w["edge_space_walls"] == [0, 1] for w in rep.witnesses)
    rep = check_gluing_criterion(gog("interosc_gog"))
    assert rep.conditions["4"] == "fail"
    assert any(w["condition"] == 4 and "pendant_edge" in w for w in rep.witnesses)


def test_criterion_parallel_matches_serial():
    G = gog("interosc_gog")
    assert check_gluing_criterion(G, jobs=1).to_dict() == check_gluing_criterion(G, jobs=3).to_dict()


def test_criterion_needs_special_pieces():
    M = fixture("mobius").complex("mobius")
    assert not check_special(M).special
    G = GraphOfComplexes(("M",), (M,))
    with pytest.raises(HypothesisFailure):
        check_gluing_criterion(G)


def test_attachment_must_be_local_isometry():
    X = rose()
    twice = make_map(graph(2, [(0, 1), (0, 1)]), X, [0, 0], [(0, T), (0, T)])
    G = GraphOfComplexes(("V",), (X,), (GogEdge("t", twice.source, 0, twice, 0, twice),))
    with pytest.raises(AttachmentNotLocalIsometry):
        validate_gog(G)


def test_spaces_must_be_connected():
    X = rose()
    two = graph(2, [])
    f = make_map(two, X, [0, 0], [])
    with pytest.raises(MalformedInput):
        validate_gog(GraphOfComplexes(("V",), (X,), (GogEdge("t", two, 0, f, 0, f),)))
    with pytest.raises(MalformedInput):
        validate_gog(GraphOfComplexes(("V",), (two,)))


def test_identity_attachment_is_a_mapping_torus():
    X = circle()
    G = GraphOfComplexes(("V",), (X,), (GogEdge("t", X, 0, identity_map(X), 0, identity_map(X)),))
    S = assemble_total_space(G).complex
    assert S.summary() == {"dimension": 2, "vertices": 2, "edges": 4, "squares": 2}


def test_cylinder_diagnostic_tracks_condition_four():
    ok = check_gluing_criterion(gog("torus_gog"))
    assert all(d["cylinder_special"] for d in ok.diagnostics)
    bad = check_gluing_criterion(gog("interosc_gog"))
    flagged = {(w["edge"], w["end"]) for w in bad.witnesses if w["condition"] == 4}
    assert flagged <= {(d["edge"], d["end"]) for d in bad.diagnostics if not d["cylinder_special"]}
