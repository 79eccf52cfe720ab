import random

import pytest
from hypothesis import given, settings, strategies as st

from cubetop.complex_core import graph
from cubetop.cores import EMPTY_KEY, SubgroupRep, conjugacy_key, rep_from_words
from cubetop.errors import BoundedModeInconclusive
from cubetop.graph_of_complexes import GogEdge, GraphOfComplexes
from cubetop.morphisms import identity_map, is_local_isometry, make_map
from cubetop.stature import depth, enumerate_big_trees, height, intersect_reps, stature

from helpers import T, circle, fixture, loop, power_cycle, rose, torus, words
from oracles import (
    LGraph,
    base_orbit_size,
    coset_action,
    height_oracle,
    same_class,
    stature_oracle,
    trim,
)


def rep(X, *ws):
    return rep_from_words(X, list(ws))


# --- keys and intersections -------------------------------------------------

def test_conjugacy_keys():
    X = rose()
    assert rep(X, "a").key() == rep(X, "bab^-1").key()
    assert rep(X, "a").key() != rep(X, "a^2").key()
    assert conjugacy_key(make_map(graph(1, []), X, [0], [])) == EMPTY_KEY
    assert rep(X, "ab").key() == rep(X, "ba").key()


def test_intersections():
    C = circle()
    k = intersect_reps(rep(C, "a^2"), rep(C, "a^3"))
    assert k.complex.n_vertices == 6 and len(k.complex.edges) == 6
    A = rep(rose(), "a", "bab^-1")
    assert intersect_reps(A, A).key() == A.key()
    assert intersect_reps(rep(rose(), "a"), rep(rose(), "b")).is_trivial()


def _transitive(rng, n):
    while True:
        pa, pb = rng.sample(range(n), n), rng.sample(range(n), n)
        seen, stack = {0}, [0]
        while stack:
            u = stack.pop()
            for w in (pa[u], pb[u]):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) == n:
            return pa, pb


def _stabiliser_words(pa, pb):
    path, order = {0: ""}, [0]
    for u in order:
        for letter, perm in (("a", pa), ("b", pb)):
            if perm[u] not in path:
                path[perm[u]] = path[u] + letter
                order.append(perm[u])
    gens = []
    for u in path:
        for letter, perm in (("a", pa), ("b", pb)):
            w = path[u] + letter + "".join(c.swapcase() for c in reversed(path[perm[u]]))
            while any(w[i] == w[i + 1].swapcase() for i in range(len(w) - 1)):
                i = next(i for i in range(len(w) - 1) if w[i] == w[i + 1].swapcase())
                w = w[:i] + w[i + 2:]
            if w:
                gens.append(w)
    return gens


@given(st.randoms(use_true_random=False), st.integers(1, 8), st.integers(1, 8))
@settings(max_examples=25)
def test_intersection_index_matches_coset_enumeration(rng, n1, n2):
    g1, g2 = _stabiliser_words(*_transitive(rng, n1)), _stabiliser_words(*_transitive(rng, n2))
    k = intersect_reps(rep(rose(), *g1), rep(rose(), *g2))
    assert k.complex.n_vertices == base_orbit_size(coset_action(g1), coset_action(g2))


# --- height ------------------------------------------------------------------

def test_height_examples():
    X = rose()
    r = height(words(X, "a"))
    assert (r.verdict, r.height) == ("finite", 1)
    r = height(words(X, "a^2"))
    assert (r.verdict, r.height) == ("finite", 2)
    assert r.witness == [0, 1] and r.witness_words == ["", "a"]
    assert height(identity_map(X)).height == 1
    assert height(make_map(graph(1, []), X, [0], [])).height == 0


@pytest.mark.parametrize("k", [1, 2, 3])
def test_height_of_powers_matches_oracle(k):
    assert height(words(rose(), f"a^{k}")).height == height_oracle(["a" * k]) == k


@given(st.lists(st.text("aAbB", min_size=1, max_size=3), min_size=1, max_size=2))
@settings(max_examples=30)
def test_height_bounds_the_coset_search(gens):
    r = height(words(rose(), *gens), budget=4)
    found = height_oracle(gens, word_length=2, cap=3)
    if r.verdict == "finite":
        assert r.height >= found
    else:
        assert found >= 1


def test_height_rejects_square_targets():
    with pytest.raises(BoundedModeInconclusive):
        height(loop(torus(), 0))


# --- depth --------------------------------------------------------------------

def test_depth_examples():
    C = circle()
    assert depth([rep(C, "a")]).depth == 1
    r = depth([rep(C, "a^2"), rep(C, "a^3")])
    assert r.certified and r.depth == 2
    assert depth([SubgroupRep(make_map(graph(1, []), C, [0], []))]).depth == 0


def test_plain_depth_skips_finite_index_steps():
    C = circle()
    assert depth([rep(C, "a^2"), rep(C, "a^3")], variant="plain").depth == 1


# --- big trees -------------------------------------------------------------------

def test_big_trees_torus_gog():
    G = fixture("torus_gog").pick("gog")[1]
    loop_a = conjugacy_key(loop(circle(), 0))
    for r in range(1, 5):
        (rec,) = enumerate_big_trees(G, r)
        assert rec.status == "frontier-open" and rec.stabilizer.key() == loop_a


def test_big_trees_free_hnn():
    G = fixture("free_hnn_gog").pick("gog")[1]
    (rec,) = enumerate_big_trees(G, 3)
    assert rec.status == "maximal-certified" and len(rec.tree_edges) == 1
    assert rec.stabilizer.key() == rep(rose(), "a").key()


def test_big_tree_without_cycle_is_skipped():
    X = rose()
    seg = graph(2, [(0, 1)])
    f = make_map(seg, X, [0, 0], [(0, T)])
    G = GraphOfComplexes(("V",), (X,), (GogEdge("t", seg, 0, f, 0, f),))
    assert enumerate_big_trees(G, 2) == []


def test_big_tree_shape_does_not_depend_on_edge_order():
    # the stabilizer is read off at the start edge, so only the tree shape is order free
    X = rose()
    ea, eb = loop(X, 0), loop(X, 1)
    L = ea.source
    forward = (GogEdge("s", L, 0, ea, 0, eb), GogEdge("t", L, 0, eb, 0, ea))
    shapes = []
    for edges in (forward, forward[::-1]):
        G = GraphOfComplexes(("V",), (X,), edges)
        shapes.append(sorted((len(r.tree_edges), r.status) for r in enumerate_big_trees(G, 2)))
    assert shapes[0] == shapes[1]


# --- stature ---------------------------------------------------------------------

def test_stature_examples():
    for name, count in (("torus_gog", 1), ("f2z_gog", 1), ("free_hnn_gog", 2)):
        r = stature(fixture(name).pick("gog")[1])
        assert r.verdict == "finite" and len(r.classes) == count
    r = stature(fixture("f2z_gog").pick("gog")[1])
    assert r.classes[0].rep.key() == conjugacy_key(identity_map(rose()))


def test_stature_parallel_matches_serial():
    G = fixture("irr_candidate_gog").pick("gog")[1]
    a, b = stature(G, 2, 2, jobs=1), stature(G, 2, 2, jobs=3)
    assert a.to_dict() == b.to_dict()


def _random_gog(rng):
    """Retry until the two random labellings are both immersions."""
    while True:
        G = _try_random_gog(rng)
        if G is not None:
            return G


def _try_random_gog(rng):
    X = rose()
    n = rng.randint(1, 3)
    edges = [(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(n, n + 2))]
    C = graph(n, edges)
    if not C.is_connected():
        return None
    f = make_map(C, X, [0] * n, [(rng.randrange(2), rng.random() < 0.5) for _ in edges])
    g = make_map(C, X, [0] * n, [(rng.randrange(2), rng.random() < 0.5) for _ in edges])
    if not (is_local_isometry(f) and is_local_isometry(g)):
        return None
    return GraphOfComplexes(("V",), (X,), (GogEdge("t", C, 0, f, 0, g),))


@given(st.randoms(use_true_random=False), st.integers(1, 2))
@settings(max_examples=40)
def test_stature_matches_oracle(rng, budget):
    G = _random_gog(rng)
    r = stature(G, budget, budget)
    finite, counts, store = stature_oracle(G, budget, budget)
    assert (r.verdict == "finite") == finite
    assert r.counts == counts
    mine = [LGraph.from_map(c.rep.map) for c in r.classes]
    theirs = [trim(g) for g in store[0]]
    assert all(sum(same_class(g, h) for h in theirs) == 1 for g in mine)


def test_stature_finite_implies_depth_bound():
    rng = random.Random(5)
    checked = 0
    while checked < 10:
        G = _random_gog(rng)
        r = stature(G, 3, 3)
        if r.verdict != "finite":
            continue
        ge = G.edges[0]
        d = depth([SubgroupRep(ge.iota_map), SubgroupRep(ge.tau_map)])
        if d.certified:
            assert d.depth <= len(r.classes)
        checked += 1


def test_stature_rejects_square_vertex_spaces():
    X = torus()
    G = GraphOfComplexes(("V",), (X,), (GogEdge("t", X, 0, identity_map(X), 0, identity_map(X)),))
    with pytest.raises(BoundedModeInconclusive):
        stature(G)


def test_power_cycles_over_circle():
    # sanity for the fixtures: intersections of <a^2> and <a^3> close up at <a^6>
    r = depth([SubgroupRep(power_cycle(circle(), 2)), SubgroupRep(power_cycle(circle(), 3))])
    assert r.class_count == 3
