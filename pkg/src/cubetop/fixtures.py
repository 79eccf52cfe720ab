"""Shipped example documents.

Each fixture is built by a function here and frozen as ``fixtures/<name>.json``;
``emit_fixture`` copies the frozen bytes, and the test suite checks the two agree.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .document import canonical_json
from .errors import UnknownFixture

T, F = True, False


def _edges(pairs, labels):
    return [{"tail": t, "head": h, "label": lbl} for (t, h), lbl in zip(pairs, labels)]


def _cx(n, pairs, labels, squares=()):
    return {"vertices": n, "edges": _edges(pairs, labels),
            "squares": [[[e, o] for e, o in sq] for sq in squares]}


def _map(source, target, vertices, edges):
    return {"source": source, "target": target, "vertices": vertices,
            "edges": [[e, o] for e, o in edges]}


def _rose():
    return _cx(1, [(0, 0), (0, 0)], "ab")


def _circle():
    return _cx(1, [(0, 0)], "a")


def _cycle(n, label="a"):
    return _cx(n, [(i, (i + 1) % n) for i in range(n)], [f"{label}{i}" for i in range(n)])


# --- complexes ---------------------------------------------------------------

def torus():
    return {"complex": {"torus": _cx(1, [(0, 0), (0, 0)], "ab", [[(0, T), (1, T), (0, F), (1, F)]])}}


def mobius():
    # u0=0 u1=1 w0=2 w1=3; rungs r0, r1 cross the core, the strip closes with a flip
    pairs = [(0, 2), (1, 3), (0, 1), (2, 3), (1, 2), (0, 3)]
    labels = ["r0", "r1", "t0", "b0", "t1", "b1"]
    squares = [[(2, T), (1, T), (3, F), (0, F)],
               [(4, T), (0, F), (5, T), (1, F)]]
    return {"complex": {"mobius": _cx(4, pairs, labels, squares)}}


def corner3():
    # three squares around one corner with no cube to fill them
    pairs = [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (2, 5), (3, 5), (3, 6), (1, 6)]
    labels = ["e0", "e1", "e2", "f01", "g01", "f12", "g12", "f20", "g20"]
    squares = [[(0, T), (3, T), (4, F), (1, F)],
               [(1, T), (5, T), (6, F), (2, F)],
               [(2, T), (7, T), (8, F), (0, F)]]
    return {"complex": {"corner3": _cx(7, pairs, labels, squares)}}


def interosc():
    # one square with opposite corners identified: its two walls cross and also meet at a bare corner
    return {"complex": {"interosc": _cx(3, [(0, 1), (1, 0), (2, 0), (0, 2)], "abcd",
                                        [[(0, T), (1, T), (2, F), (3, F)]])}}


def _osc_host():
    pairs = [(0, 1), (1, 2), (3, 2), (0, 3), (1, 4), (4, 5), (2, 5), (4, 3)]
    squares = [[(0, T), (1, T), (2, F), (3, F)], [(2, T), (6, T), (5, F), (7, T)]]
    return _cx(6, pairs, "abcdhfeg", squares)


def c3():
    X = _cx(3, [(0, 1), (1, 2), (2, 0)], "abc")
    path2 = _cx(3, [(0, 1), (1, 2)], ["p0", "p1"])
    path3 = _cx(4, [(0, 1), (1, 2), (2, 3)], ["p0", "p1", "p2"])
    seg = _cx(2, [(0, 1)], ["p0"])
    return {
        "complex": {"c3": X, "path2": path2, "path3": path3, "segment": seg},
        "map": {
            "abc": _map("path3", "c3", [0, 1, 2, 0], [(0, T), (1, T), (2, T)]),
            "ab": _map("path2", "c3", [0, 1, 2], [(0, T), (1, T)]),
            "a": _map("segment", "c3", [0, 1], [(0, T)]),
            "b": _map("segment", "c3", [1, 2], [(1, T)]),
            "c": _map("segment", "c3", [2, 0], [(2, T)]),
        },
        "presentation": {
            "abc_path": {"base": "c3", "cones": ["abc"]},
            "ab_c": {"base": "c3", "cones": ["ab", "c"]},
            "abc_edges": {"base": "c3", "cones": ["a", "b", "c"]},
        },
    }


def c3_abc_edges():
    doc = c3()
    return {"complex": {k: doc["complex"][k] for k in ("c3", "segment")},
            "map": {k: doc["map"][k] for k in "abc"},
            "presentation": {"abc_edges": doc["presentation"]["abc_edges"]}}


# --- presentations over the rose -------------------------------------------

def wedge2_cyc6():
    return {
        "complex": {"wedge2": _rose(), "cyc6": _cycle(6), "cyc12": _cycle(12),
                    "loop": _cx(1, [(0, 0)], ["l"])},
        "map": {
            "cyc6": _map("cyc6", "wedge2", [0] * 6, [(0, T)] * 6),
            "cyc12": _map("cyc12", "wedge2", [0] * 12, [(0, T)] * 12),
            "loop_b": _map("loop", "wedge2", [0], [(1, T)]),
        },
        "presentation": {"P": {"base": "wedge2", "cones": ["cyc6"]}},
    }


def wedge2_a6b():
    cyc7 = _cx(7, [(i, (i + 1) % 7) for i in range(7)], [f"w{i}" for i in range(7)])
    return {
        "complex": {"wedge2": _rose(), "cyc7": cyc7},
        "map": {"a6b": _map("cyc7", "wedge2", [0] * 7, [(0, T)] * 6 + [(1, T)])},
        "presentation": {"P": {"base": "wedge2", "cones": ["a6b"]}},
    }


def free_height():
    return {
        "complex": {"wedge2": _rose()},
        "map": {"a": {"target": "wedge2", "words": ["a"]},
                "a2": {"target": "wedge2", "words": ["a^2"]},
                "a_bab": {"target": "wedge2", "words": ["a", "bab^-1"]}},
    }


def circle_depth():
    return {
        "complex": {"circle": _circle()},
        "map": {"a2": {"target": "circle", "words": ["a^2"]},
                "a3": {"target": "circle", "words": ["a^3"]}},
        "family": {"F": {"maps": ["a2", "a3"]}},
    }


def circle_covers():
    return {
        "complex": {"circle": _circle(), "cyc2": _cycle(2), "cyc3": _cycle(3)},
        "map": {"c2": _map("cyc2", "circle", [0, 0], [(0, T)] * 2),
                "c3": _map("cyc3", "circle", [0, 0, 0], [(0, T)] * 3)},
        "family": {"F": {"maps": ["c2", "c3"]}},
    }


def torus_cover():
    doc = torus()
    doc["cover"] = {"double": {"base": "torus", "degree": 2, "perms": {"a": "(1 2)"}}}
    doc["complex"]["loop"] = _cx(1, [(0, 0)], ["l"])
    doc["map"] = {"loop_a": _map("loop", "torus", [0], [(0, T)]),
                  "double": {"cover": "double"}}
    return doc


# --- graphs of complexes ---------------------------------------------------

def _gog(vertices, edges):
    return {"vertices": vertices, "edges": edges}


def torus_gog():
    return {"complex": {"circle": _circle()},
            "gog": {"G": _gog({"V": "circle"},
                              {"t": {"space": "circle", "iota": ["V", "id"], "tau": ["V", "id"]}})}}


def f2z_gog():
    return {"complex": {"wedge2": _rose()},
            "gog": {"G": _gog({"V": "wedge2"},
                              {"t": {"space": "wedge2", "iota": ["V", "id"], "tau": ["V", "id"]}})}}


def free_hnn_gog():
    return {
        "complex": {"wedge2": _rose(), "loop": _cx(1, [(0, 0)], ["l"])},
        "map": {"to_a": _map("loop", "wedge2", [0], [(0, T)]),
                "to_b": _map("loop", "wedge2", [0], [(1, T)])},
        "gog": {"G": _gog({"V": "wedge2"},
                          {"t": {"space": "loop", "iota": ["V", "to_a"], "tau": ["V", "to_b"]}})},
    }


def irr_candidate_gog():
    # found by a random search over immersed graphs; the class count keeps growing for small budgets
    space = _cx(3, [(1, 2), (2, 1), (0, 0), (1, 2), (0, 1)], [f"g{i}" for i in range(5)])
    return {
        "complex": {"wedge2": _rose(), "gamma": space},
        "map": {
            "iota": _map("gamma", "wedge2", [0] * 3, [(0, T), (0, T), (0, T), (1, T), (1, T)]),
            "tau": _map("gamma", "wedge2", [0] * 3, [(1, T), (0, F), (0, F), (0, F), (1, T)]),
        },
        "gog": {"G": _gog({"V": "wedge2"},
                          {"t": {"space": "gamma", "iota": ["V", "iota"], "tau": ["V", "tau"]}})},
    }


def wallmerge_gog():
    doc = torus()
    doc["complex"]["cyc2"] = _cycle(2)
    doc["map"] = {"wrap": _map("cyc2", "torus", [0, 0], [(0, T), (0, T)])}
    doc["gog"] = {"G": _gog({"T": "torus", "C": "cyc2"},
                            {"w": {"space": "cyc2", "iota": ["T", "wrap"], "tau": ["C", "id"]}})}
    return doc


def interosc_gog():
    # the path a·h enters the host along a and leaves along the pendant h;
    # the wall through a also contains f, which touches the path only at z
    return {
        "complex": {"host": _osc_host(), "path": _cx(3, [(0, 1), (1, 2)], ["p0", "p1"])},
        "map": {"ah": _map("path", "host", [0, 1, 4], [(0, T), (4, T)])},
        "gog": {"G": _gog({"X": "host", "A": "path"},
                          {"i": {"space": "path", "iota": ["X", "ah"], "tau": ["A", "id"]}})},
    }


REGISTRY = {
    f.__name__: f
    for f in (torus, mobius, corner3, interosc, c3, c3_abc_edges, wedge2_cyc6, wedge2_a6b,
              free_height, circle_depth, circle_covers, torus_cover, torus_gog, f2z_gog,
              free_hnn_gog, irr_candidate_gog, wallmerge_gog, interosc_gog)
}


def fixture_names():
    return sorted(REGISTRY)


def build_fixture(name):
    if name not in REGISTRY:
        raise UnknownFixture(f"no fixture named {name!r}", available=fixture_names())
    return {"schema": 1, **REGISTRY[name]()}


def fixture_text(name):
    """Frozen bytes of a shipped fixture."""
    if name not in REGISTRY:
        raise UnknownFixture(f"no fixture named {name!r}", available=fixture_names())
    return resources.files("cubetop").joinpath("fixtures").joinpath(f"{name}.json").read_text()


def fixture_path(name):
    fixture_text(name)
    return Path(str(resources.files("cubetop").joinpath("fixtures").joinpath(f"{name}.json")))


def emit_fixture(name, out_dir="."):
    text = fixture_text(name)
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    path = Path(out_dir) / f"{name}.json"
    path.write_text(text)
    return path


def regenerate(out_dir):
    """Rewrite every frozen fixture from its builder."""
    for name in fixture_names():
        (Path(out_dir) / f"{name}.json").write_text(canonical_json(build_fixture(name)))
