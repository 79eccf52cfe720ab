"""Small builders shared by the test modules."""

import random

from cubetop.complex_core import CubeComplex, graph
from cubetop.cores import rep_from_words
from cubetop.document import load_document
from cubetop.fixtures import fixture_path
from cubetop.morphisms import make_map

T, F = True, False


def rose():
    return graph(1, [(0, 0), (0, 0)], ("a", "b"))


def circle():
    return graph(1, [(0, 0)], ("a",))


def torus():
    return CubeComplex(1, ((0, 0), (0, 0)), (((0, T), (1, T), (0, F), (1, F)),), ("a", "b"))


def c3():
    return graph(3, [(0, 1), (1, 2), (2, 0)], ("a", "b", "c"))


def cycle_over(X, word):
    """Closed immersed path spelled by ``word`` (list of (edge, forward)) as a cycle graph."""
    n = len(word)
    edges, vmap = [], []
    for i, (e, fwd) in enumerate(word):
        t, h = X.edges[e]
        vmap.append(t if fwd else h)
        edges.append((i, (i + 1) % n))
    return make_map(graph(n, edges), X, vmap, list(word))


def power_cycle(X, k, e=0):
    return cycle_over(X, [(e, T)] * k)


def loop(X, e):
    return make_map(graph(1, [(0, 0)]), X, [X.edges[e][0]], [(e, T)])


def words(X, *ws):
    return rep_from_words(X, list(ws)).map


def fixture(name):
    return load_document(fixture_path(name))


def random_square_complex(rng: random.Random, max_squares=20):
    """A random valid complex: random edges, squares found by closing random 3-step walks."""
    n = rng.randint(1, 5)
    m = rng.randint(1, 8)
    edges = [(rng.randrange(n), rng.randrange(n)) for _ in range(m)]
    steps = {}
    for e, (t, h) in enumerate(edges):
        steps.setdefault(t, []).append(((e, T), h))
        steps.setdefault(h, []).append(((e, F), t))
    squares = []
    target = rng.randint(0, max_squares)
    for _ in range(target * 6):
        if len(squares) >= target:
            break
        start = rng.randrange(n)
        if start not in steps:
            continue
        path, v = [], start
        for _ in range(3):
            side, v = rng.choice(steps[v])
            path.append(side)
        closing = [side for side, w in steps.get(v, []) if w == start]
        if not closing:
            continue
        squares.append(tuple(path + [rng.choice(closing)]))
    return CubeComplex(n, tuple(edges), tuple(squares))


def random_product_complex(rng: random.Random, drop=0.0):
    """Product of two small random graphs, optionally with some squares removed; always NPC."""
    def rand_graph():
        n = rng.randint(1, 3)
        return n, [(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(1, 3))]

    (n1, e1), (n2, e2) = rand_graph(), rand_graph()
    vid = {(a, b): a * n2 + b for a in range(n1) for b in range(n2)}
    edges, horiz, vert = [], {}, {}
    for i, (t, h) in enumerate(e1):
        for b in range(n2):
            horiz[i, b] = len(edges)
            edges.append((vid[t, b], vid[h, b]))
    for j, (t, h) in enumerate(e2):
        for a in range(n1):
            vert[a, j] = len(edges)
            edges.append((vid[a, t], vid[a, h]))
    squares = []
    for i, (t1, h1) in enumerate(e1):
        for j, (t2, h2) in enumerate(e2):
            if rng.random() < drop:
                continue
            squares.append(((horiz[i, t2], T), (vert[h1, j], T), (horiz[i, h2], F), (vert[t1, j], F)))
    return CubeComplex(n1 * n2, tuple(edges), tuple(squares))
