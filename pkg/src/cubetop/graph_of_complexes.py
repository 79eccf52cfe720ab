"""Graphs of cube complexes: total spaces, augmentation, and the gluing criterion."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .complex_core import CubeComplex, disjoint_union
from .errors import (
    AttachmentNotLocalIsometry,
    HypothesisFailure,
    MalformedInput,
    NotLocalIsometry,
    UnsupportedDimension,
)
from .hyperplanes import check_special, compute_walls, crossing_pairs, inter_osculates, wall_index
from .morphisms import check_local_isometry, identity_map, is_injective, mapping_cylinder
from .parallel import parallel_map


@dataclass(frozen=True)
class GogEdge:
    name: str
    space: CubeComplex
    iota: int                 # index of the vertex at the ι end
    iota_map: object          # CombinatorialMap space -> vertex space
    tau: int
    tau_map: object

    def end(self, which):
        return (self.iota, self.iota_map) if which == "iota" else (self.tau, self.tau_map)


@dataclass(frozen=True)
class GraphOfComplexes:
    vertex_names: tuple
    vertex_spaces: tuple
    edges: tuple = ()

    def vertex_index(self, name):
        return self.vertex_names.index(name)

    def summary(self):
        return {
            "vertices": list(self.vertex_names),
            "edges": [
                {"name": e.name, "iota": self.vertex_names[e.iota], "tau": self.vertex_names[e.tau],
                 "space": e.space.summary()}
                for e in self.edges
            ],
        }

    def attachment_failures(self):
        out = []
        for e in self.edges:
            for which in ("iota", "tau"):
                rep = check_local_isometry(e.end(which)[1])
                if not rep.passed:
                    out.append({"edge": e.name, "end": which, "witness": rep.failures[0]})
        return out


def validate_gog(G):
    for name, X in zip(G.vertex_names, G.vertex_spaces):
        if not X.is_connected():
            raise MalformedInput(f"vertex space {name!r} is not connected")
    for e in G.edges:
        if not e.space.is_connected():
            raise MalformedInput(f"edge space {e.name!r} is not connected")
    failures = G.attachment_failures()
    if failures:
        raise AttachmentNotLocalIsometry("attaching map is not a local isometry", witness=failures[0])
    return G


@dataclass
class TotalSpace:
    complex: CubeComplex
    vertex_offsets: list       # (vertex, edge, square) offsets per vertex space
    edge_bands: list           # per edge: middle-copy vertex ids and band cells

    def to_dict(self):
        return {
            "complex": self.complex.to_dict(),
            "summary": self.complex.summary(),
            "vertex_offsets": [list(o) for o in self.vertex_offsets],
            "edge_bands": self.edge_bands,
        }


def assemble_total_space(G):
    """Glue vertex spaces with bands ``X_e × [-1, 1]`` subdivided at 0."""
    validate_gog(G)
    base, offsets = disjoint_union(list(G.vertex_spaces))
    nv = base.n_vertices
    edges = list(base.edges)
    labels = list(base.labels) if base.labels else [None] * len(edges)
    squares = list(base.squares)
    bands = []
    for ge in G.edges:
        Y = ge.space
        if Y.squares:
            raise UnsupportedDimension("edge spaces must be graphs to build the total space")
        lo_v, lo_e, _ = offsets[ge.iota]
        hi_v, hi_e, _ = offsets[ge.tau]
        mid = [nv + y for y in range(Y.n_vertices)]
        nv += Y.n_vertices
        mid_e = []
        for e, (t, h) in enumerate(Y.edges):
            mid_e.append(len(edges))
            edges.append((mid[t], mid[h]))
            labels.append(Y.labels[e] if Y.labels else None)
        low_rung, high_rung = [], []
        for y in range(Y.n_vertices):
            low_rung.append(len(edges))
            edges.append((lo_v + ge.iota_map.vertex_map[y], mid[y]))
            labels.append(f"{ge.name}-")
            high_rung.append(len(edges))
            edges.append((mid[y], hi_v + ge.tau_map.vertex_map[y]))
            labels.append(f"{ge.name}+")
        band_squares = []
        for e, (t, h) in enumerate(Y.edges):
            ie, ikeep = ge.iota_map.edge_map[e]
            te, tkeep = ge.tau_map.edge_map[e]
            band_squares.append(len(squares))
            squares.append(((lo_e + ie, ikeep), (low_rung[h], True),
                            (mid_e[e], False), (low_rung[t], False)))
            band_squares.append(len(squares))
            squares.append(((mid_e[e], True), (high_rung[h], True),
                            (hi_e + te, not tkeep), (high_rung[t], False)))
        bands.append({"edge": ge.name, "middle_vertices": mid, "middle_edges": mid_e,
                      "squares": band_squares})
    C = CubeComplex(nv, tuple(edges), tuple(squares), tuple(labels))
    return TotalSpace(C, offsets, bands)


def augment(G, extra):
    """Attach a mapping cylinder for each ``(vertex index, local isometry into X_v)``."""
    names = list(G.vertex_names)
    spaces = list(G.vertex_spaces)
    edges = list(G.edges)
    for i, (v, f) in enumerate(extra):
        rep = check_local_isometry(f)
        if not rep.passed:
            raise NotLocalIsometry("extra map is not a local isometry", witness=rep.failures[0])
        if f.target != G.vertex_spaces[v]:
            raise NotLocalIsometry("extra map does not land in the named vertex space")
        name = f"{G.vertex_names[v]}~{i}"
        names.append(name)
        spaces.append(f.source)
        edges.append(GogEdge(f"cyl{i}", f.source, len(spaces) - 1, identity_map(f.source), v, f))
    return GraphOfComplexes(tuple(names), tuple(spaces), tuple(edges))


@dataclass
class CriterionReport:
    passed: bool
    conditions: dict
    witnesses: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    def to_dict(self):
        return {
            "passed": self.passed,
            "verdict": "finite special cover guaranteed" if self.passed else "criterion fails",
            "conditions": self.conditions,
            "witnesses": self.witnesses,
            "diagnostics": self.diagnostics,
        }


def _check_end(args):
    ge, which, Xv = args
    _, phi = ge.end(which)
    Xe = ge.space
    out = []
    rep = check_local_isometry(phi)
    injective = is_injective(phi)
    if not rep.passed or not injective:
        w = {"condition": 1, "edge": ge.name, "end": which}
        if not rep.passed:
            w["link_failure"] = rep.failures[0]
        if not injective:
            w["non_injective"] = True
        out.append(w)
    e_walls = compute_walls(Xe)
    v_walls = compute_walls(Xv)
    v_index = wall_index(Xv, v_walls)
    image = {w.id: v_index[phi.edge_map[w.dual_edges[0]][0]] for w in e_walls}
    e_cross = crossing_pairs(Xe, e_walls)
    v_cross = crossing_pairs(Xv, v_walls)
    for a, b in itertools.combinations(range(len(e_walls)), 2):
        if image[a] == image[b]:
            out.append({"condition": 2, "edge": ge.name, "end": which,
                        "edge_space_walls": [a, b], "vertex_space_wall": image[a]})
        elif (a, b) not in e_cross:
            pair = (min(image[a], image[b]), max(image[a], image[b]))
            if pair in v_cross:
                out.append({"condition": 3, "edge": ge.name, "end": which,
                            "edge_space_walls": [a, b], "vertex_space_walls": list(pair),
                            "crossing_square": v_cross[pair]})
    if rep.passed and injective:
        for wid in sorted(set(image.values())):
            io = inter_osculates(Xv, v_walls[wid], phi)
            if io["inter_osculates"]:
                out.append({"condition": 4, "edge": ge.name, "end": which, "wall": wid,
                            "pendant_edge": io["witness_edge"], "crossing_edge": io["crossing_edge"]})
    else:
        out.append({"condition": 4, "edge": ge.name, "end": which, "skipped": "map not an embedding"})
    if rep.passed and Xe.dimension <= 1:
        # secondary diagnostic only: the cylinder form is not used in the verdict
        cyl = check_special(mapping_cylinder(phi).complex)
        out.append({"diagnostic": "cylinder", "edge": ge.name, "end": which, "cylinder_special": cyl.special,
                    "cylinder_failure": cyl.failures[0] if cyl.failures else None})
    return out


def check_gluing_criterion(G, jobs=1):
    """Evaluate the four edge-attachment conditions at both ends of every edge."""
    for kind, name, X in (
        [("vertex", n, X) for n, X in zip(G.vertex_names, G.vertex_spaces)]
        + [("edge", e.name, e.space) for e in G.edges]
    ):
        rep = check_special(X)
        if not rep.special:
            raise HypothesisFailure(f"{kind} space {name} is not special",
                                    space=name, witness=rep.failures[0])
    tasks = [(ge, which, G.vertex_spaces[ge.end(which)[0]]) for ge in G.edges for which in ("iota", "tau")]
    results = parallel_map(_check_end, tasks, jobs)
    found = [w for chunk in results for w in chunk]
    witnesses = [w for w in found if "condition" in w]
    diagnostics = [w for w in found if "diagnostic" in w]
    conditions = {}
    for c in (1, 2, 3, 4):
        hits = [w for w in witnesses if w["condition"] == c]
        if any("skipped" not in w for w in hits):
            conditions[str(c)] = "fail"
        elif hits:
            conditions[str(c)] = "not evaluated"
        else:
            conditions[str(c)] = "pass"
    passed = all(v == "pass" for v in conditions.values())
    return CriterionReport(passed, conditions, witnesses, diagnostics)
