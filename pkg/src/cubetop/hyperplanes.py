"""Walls (immersed hyperplanes) of square complexes and the specialness pathologies."""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field

from .complex_core import HEAD, TAIL, CubeComplex, induced_subcomplex, vertex_link
from .errors import NotLocallyConvex, UnsupportedDimension
from .morphisms import CoverSpec, build_cover, check_local_isometry, inclusion_map

# square axis 0 is dual to sides 0 and 2, axis 1 to sides 1 and 3
AXIS_SIDES = ((0, 2), (1, 3))


class _ParityUF:
    """Union-find carrying the parity of each element relative to its root."""

    def __init__(self, n):
        self.parent = list(range(n))
        self.parity = [0] * n

    def find(self, a):
        path = []
        while self.parent[a] != a:
            path.append(a)
            a = self.parent[a]
        root, acc = a, 0
        for node in reversed(path):
            acc ^= self.parity[node]
            self.parity[node] = acc
            self.parent[node] = root
        return root

    def rel(self, a):
        self.find(a)
        return self.parity[a]

    def union(self, a, b, p):
        """Impose ``bit(a) ^ bit(b) == p``; returns False on contradiction."""
        ra, rb = self.find(a), self.find(b)
        pa, pb = self.parity[a], self.parity[b]
        if ra == rb:
            return (pa ^ pb) == p
        if rb < ra:
            ra, rb, pa, pb = rb, ra, pb, pa
        self.parent[rb] = ra
        self.parity[rb] = pa ^ pb ^ p
        return True


@dataclass
class Wall:
    id: int
    dual_edges: list
    midcubes: list
    two_sided: bool = True
    embedded: bool = True
    side_embedded: bool = True
    self_osculating: bool = False
    coorientation: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    inter_osculating: list = field(default_factory=list)

    @property
    def squares(self):
        return sorted({m[1] for m in self.midcubes if m[0] == "square"})

    def to_dict(self):
        return {
            "id": self.id,
            "dual_edges": self.dual_edges,
            "midcubes": self.midcubes,
            "two_sided": self.two_sided,
            "embedded": self.embedded,
            "side_embedded": self.side_embedded,
            "self_osculating": self.self_osculating,
            "inter_osculating": self.inter_osculating,
            "witnesses": self.witnesses,
        }


def _require_dim(X):
    if X.dimension > 2:
        raise UnsupportedDimension("walls are computed for dimension <= 2 only")


def compute_walls(X):
    """Partition of midcubes into walls; ids follow the smallest dual edge."""
    _require_dim(X)
    uf = _ParityUF(len(X.edges))
    clashes = []
    for s, sq in enumerate(X.squares):
        for axis, (i, j) in enumerate(AXIS_SIDES):
            (e0, o0), (e2, o2) = sq[i], sq[j]
            if not uf.union(e0, e2, 1 ^ o0 ^ o2):
                clashes.append((e0, s, axis))
    # roots move as later squares merge classes, so resolve them at the end
    conflicts = defaultdict(list)
    for e0, s, axis in clashes:
        conflicts[uf.find(e0)].append([s, axis])
    groups = defaultdict(list)
    for e in range(len(X.edges)):
        groups[uf.find(e)].append(e)
    roots = sorted(groups, key=lambda r: min(groups[r]))
    wall_of = {}
    walls = []
    for wid, r in enumerate(roots):
        for e in groups[r]:
            wall_of[e] = wid
        bad = conflicts.get(r, [])
        w = Wall(wid, sorted(groups[r]), [["edge", e] for e in sorted(groups[r])])
        if bad:
            w.two_sided = False
            w.witnesses["one_sided"] = {"square": bad[0][0], "axis": bad[0][1]}
        else:
            w.coorientation = {e: uf.rel(e) for e in groups[r]}
        walls.append(w)
    for s, sq in enumerate(X.squares):
        for axis, (i, _) in enumerate(AXIS_SIDES):
            walls[wall_of[sq[i][0]]].midcubes.append(["square", s, axis])
        if wall_of[sq[0][0]] == wall_of[sq[1][0]]:
            w = walls[wall_of[sq[0][0]]]
            w.embedded = False
            w.witnesses.setdefault("self_intersection", {"square": s})
    _osculation(X, walls, wall_of)
    return walls


def wall_index(X, walls=None):
    walls = walls if walls is not None else compute_walls(X)
    return {e: w.id for w in walls for e in w.dual_edges}


def _corner_pairs(X):
    """Set of (vertex, sorted link-vertex pair) realised by square corners."""
    out = set()
    for s in range(len(X.squares)):
        for k, v in enumerate(X.square_corners(s)):
            out.add((v, tuple(sorted(X.corner_pair(s, k)))))
    return out


def _osculation(X, walls, wall_of):
    ends, _ = X.incidence()
    corners = _corner_pairs(X)
    for v in range(X.n_vertices):
        by_wall = defaultdict(list)
        for lv in ends.get(v, []):
            by_wall[wall_of[lv[0]]].append(lv)
        for wid, lvs in by_wall.items():
            w = walls[wid]
            for a, b in itertools.combinations(lvs, 2):
                if a[0] == b[0]:
                    continue  # the two ends of one loop
                if (v, tuple(sorted((a, b)))) in corners:
                    continue  # a self-crossing square, reported separately
                direct = None
                if w.two_sided:
                    side_a = w.coorientation[a[0]] ^ a[1]
                    side_b = w.coorientation[b[0]] ^ b[1]
                    direct = side_a == side_b
                if direct is False:
                    w.witnesses.setdefault("indirect_osculation",
                                           {"vertex": v, "edges": [a[0], b[0]]})
                    continue
                w.self_osculating = True
                w.side_embedded = False
                w.witnesses.setdefault("self_osculation", {"vertex": v, "edges": [a[0], b[0]]})


def crossing_pairs(X, walls=None):
    """Map ``(wi, wj)`` with wi < wj to the first square where they cross."""
    walls = walls if walls is not None else compute_walls(X)
    wall_of = wall_index(X, walls)
    out = {}
    for s, sq in enumerate(X.squares):
        a, b = wall_of[sq[0][0]], wall_of[sq[1][0]]
        if a != b:
            out.setdefault((min(a, b), max(a, b)), s)
    return out


def inter_osculations(X, walls=None):
    """Crossing wall pairs that also meet at a vertex outside any common square."""
    walls = walls if walls is not None else compute_walls(X)
    wall_of = wall_index(X, walls)
    crossing = crossing_pairs(X, walls)
    ends, _ = X.incidence()
    corners = _corner_pairs(X)
    found = {}
    for v in range(X.n_vertices):
        lvs = ends.get(v, [])
        for a, b in itertools.combinations(lvs, 2):
            wa, wb = wall_of[a[0]], wall_of[b[0]]
            if wa == wb:
                continue
            pair = (min(wa, wb), max(wa, wb))
            if pair not in crossing or pair in found:
                continue
            if (v, tuple(sorted((a, b)))) not in corners:
                found[pair] = {"walls": list(pair), "vertex": v, "edges": [a[0], b[0]],
                               "crossing_square": crossing[pair]}
    return [found[p] for p in sorted(found)]


@dataclass
class SpecialnessReport:
    special: bool
    walls: list
    failures: list

    def to_dict(self):
        return {
            "special": self.special,
            "wall_count": len(self.walls),
            "walls": [w.to_dict() for w in self.walls],
            "failures": self.failures,
        }


def check_special(X):
    walls = compute_walls(X)
    failures = []
    for w in walls:
        if not w.embedded:
            failures.append({"kind": "self_intersection", "wall": w.id, **w.witnesses["self_intersection"]})
        if not w.two_sided:
            failures.append({"kind": "one_sided", "wall": w.id, **w.witnesses["one_sided"]})
        if w.self_osculating:
            failures.append({"kind": "self_osculation", "wall": w.id, **w.witnesses["self_osculation"]})
    for io in inter_osculations(X, walls):
        a, b = io["walls"]
        walls[a].inter_osculating.append(b)
        walls[b].inter_osculating.append(a)
        failures.append({"kind": "inter_osculation", **io})
    return SpecialnessReport(not failures, walls, failures)


def wall_carrier(X, wall):
    """Image carrier: closed cells meeting the wall, with its inclusion into ``X``."""
    es = set(wall.dual_edges)
    ss = wall.squares
    for s in ss:
        es.update(e for e, _ in X.squares[s])
    vs = {v for e in es for v in X.edges[e]}
    C, vl, el, sl = induced_subcomplex(X, vs, es, ss)
    return C, inclusion_map(C, X, vl, el, sl)


def _subcomplex_cells(A):
    """Vertex and edge sets of an embedded subcomplex given as an inclusion map."""
    return set(A.vertex_map), {e for e, _ in A.edge_map}


def inter_osculates(X, wall, A):
    """Does ``wall`` cross ``A`` and also meet ``A`` along an edge touching it once?"""
    report = check_local_isometry(A)
    if not report.passed or len(set(A.vertex_map)) != len(A.vertex_map):
        raise NotLocallyConvex("subcomplex is not embedded and locally convex",
                               witness=report.failures[0] if report.failures else None)
    av, ae = _subcomplex_cells(A)
    crossing = sorted(e for e in wall.dual_edges if e in ae)
    touching = []
    for e in wall.dual_edges:
        if e in ae:
            continue
        if len(set(X.edges[e]) & av) == 1:
            touching.append(e)
    result = bool(crossing) and bool(touching)
    out = {"inter_osculates": result, "wall": wall.id}
    if result:
        out["witness_edge"] = touching[0]
        out["crossing_edge"] = crossing[0]
    return out


def _z2_cocycles(X):
    """All maps edges -> Z/2 whose square boundaries sum to zero, modulo nothing (small X)."""
    # spanning forest edges are fixed to 0; the rest are free, filtered by squares
    parent = list(range(X.n_vertices))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    free = []
    for e, (t, h) in enumerate(X.edges):
        rt, rh = find(t), find(h)
        if rt != rh:
            parent[max(rt, rh)] = min(rt, rh)
        else:
            free.append(e)
    for bits in itertools.product((0, 1), repeat=len(free)):
        phi = [0] * len(X.edges)
        for e, b in zip(free, bits):
            phi[e] = b
        if all(sum(phi[e] for e, _ in sq) % 2 == 0 for sq in X.squares):
            yield phi


def double_cover_for_wall(X, wall):
    """A degree-2 cover in which every wall over ``wall`` is two-sided, or None."""
    for phi in _z2_cocycles(X):
        if not any(phi):
            continue
        spec = CoverSpec(X, 2, tuple((1, 0) if b else (0, 1) for b in phi))
        C, p = build_cover(spec)
        lifted = [w for w in compute_walls(C) if p.edge_map[w.dual_edges[0]][0] in wall.dual_edges]
        if lifted and all(w.two_sided for w in lifted):
            return spec
    return None
