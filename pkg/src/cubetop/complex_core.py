"""Finite combinatorial cube complexes of dimension at most 2.

A complex is stored as a vertex count, a tuple of oriented edges
``(tail, head)`` and a tuple of squares.  A square is a closed boundary
path of four sides, each side an ``(edge id, forward)`` pair; side ``k``
runs from corner ``k`` to corner ``k + 1``.

Link vertices are ``(edge id, end)`` pairs with ``end`` in ``{TAIL, HEAD}``:
the link of ``v`` has one vertex for every edge end sitting at ``v``.
"""

from __future__ import annotations

from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field
from typing import Optional

from .errors import (
    BudgetExceeded,
    InconsistentAttachment,
    MalformedInput,
    NotNpc,
    UnknownCell,
    UnsupportedDimension,
)

TAIL = 0
HEAD = 1
DEFAULT_CELL_CAP = 10**6


def side_start(edges, side):
    e, fwd = side
    t, h = edges[e]
    return t if fwd else h


def side_end(edges, side):
    e, fwd = side
    t, h = edges[e]
    return h if fwd else t


def start_end(side):
    """Link vertex of the edge end where ``side`` starts."""
    e, fwd = side
    return (e, TAIL if fwd else HEAD)


def finish_end(side):
    """Link vertex of the edge end where ``side`` finishes."""
    e, fwd = side
    return (e, HEAD if fwd else TAIL)


@dataclass(frozen=True)
class CubeComplex:
    n_vertices: int
    edges: tuple = ()
    squares: tuple = ()
    labels: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        object.__setattr__(
            self, "squares", tuple(tuple((int(e), bool(o)) for e, o in sq) for sq in self.squares)
        )
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def dimension(self):
        if self.squares:
            return 2
        if self.edges:
            return 1
        return 0

    @property
    def cell_count(self):
        return self.n_vertices + len(self.edges) + len(self.squares)

    def label(self, e):
        if self.labels is None or self.labels[e] is None:
            return f"e{e}"
        return self.labels[e]

    def square_corners(self, s):
        """Vertices at corners 0..3 of square ``s``."""
        return tuple(side_start(self.edges, side) for side in self.squares[s])

    def corner_pair(self, s, k):
        """The link edge contributed by corner ``k`` of square ``s``."""
        sq = self.squares[s]
        return finish_end(sq[(k - 1) % 4]), start_end(sq[k])

    def link_vertices_at(self, v):
        out = []
        for e, (t, h) in enumerate(self.edges):
            if t == v:
                out.append((e, TAIL))
            if h == v:
                out.append((e, HEAD))
        return sorted(out)

    def endpoint(self, link_vertex):
        e, end = link_vertex
        return self.edges[e][end]

    def other_endpoint(self, link_vertex):
        e, end = link_vertex
        return self.edges[e][1 - end]

    def incidence(self):
        """Per-vertex sorted link vertices and per-vertex square corners (cached, read-only)."""
        cached = self.__dict__.get("_incidence")
        if cached is None:
            cached = self._compute_incidence()
            object.__setattr__(self, "_incidence", cached)
        return cached

    def _compute_incidence(self):
        ends = defaultdict(list)
        for e, (t, h) in enumerate(self.edges):
            ends[t].append((e, TAIL))
            ends[h].append((e, HEAD))
        corners = defaultdict(list)
        for s in range(len(self.squares)):
            for k, v in enumerate(self.square_corners(s)):
                corners[v].append((s, k))
        return {v: sorted(ends[v]) for v in range(self.n_vertices)}, dict(corners)

    def neighbours(self):
        adj = defaultdict(set)
        for t, h in self.edges:
            adj[t].add(h)
            adj[h].add(t)
        return adj

    def vertex_components(self):
        """List of sorted vertex lists, ordered by smallest vertex."""
        parent = list(range(self.n_vertices))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for t, h in self.edges:
            rt, rh = find(t), find(h)
            if rt != rh:
                parent[max(rt, rh)] = min(rt, rh)
        groups = defaultdict(list)
        for v in range(self.n_vertices):
            groups[find(v)].append(v)
        return [groups[r] for r in sorted(groups)]

    def is_connected(self):
        return self.n_vertices > 0 and len(self.vertex_components()) == 1

    def to_dict(self):
        edges = []
        for e, (t, h) in enumerate(self.edges):
            item = {"tail": t, "head": h}
            if self.labels is not None and self.labels[e] is not None:
                item["label"] = self.labels[e]
            edges.append(item)
        return {
            "vertices": self.n_vertices,
            "edges": edges,
            "squares": [[[e, o] for e, o in sq] for sq in self.squares],
        }

    def summary(self):
        return {
            "dimension": self.dimension,
            "vertices": self.n_vertices,
            "edges": len(self.edges),
            "squares": len(self.squares),
        }


def graph(n_vertices, edges, labels=None):
    """Convenience constructor for 1-dimensional complexes."""
    return CubeComplex(n_vertices, tuple(edges), (), labels)


def attachment_violations(X):
    """All invariant violations of ``X`` as dicts (empty when valid)."""
    out = []
    for e, (t, h) in enumerate(X.edges):
        for which, v in (("tail", t), ("head", h)):
            if not (0 <= v < X.n_vertices):
                out.append({"cell": ["edge", e], "problem": f"{which} vertex {v} does not exist"})
    if out:
        return out
    for s, sq in enumerate(X.squares):
        if len(sq) != 4:
            out.append({"cell": ["square", s], "problem": "square must have 4 sides"})
            continue
        bad = [k for k, (e, _) in enumerate(sq) if not (0 <= e < len(X.edges))]
        if bad:
            out.append({"cell": ["square", s], "side": bad[0], "problem": "unknown edge"})
            continue
        for k in range(4):
            if side_end(X.edges, sq[k]) != side_start(X.edges, sq[(k + 1) % 4]):
                out.append(
                    {"cell": ["square", s], "side": k, "problem": "boundary path is not closed"}
                )
                break
    return out


def from_dict(raw):
    """Parse the ``complex`` block of the file format (no validation)."""
    if not isinstance(raw, dict):
        raise MalformedInput("complex block must be an object")
    if raw.get("cubes"):
        raise UnsupportedDimension("cubes of dimension 3 or more are not supported")
    try:
        n = int(raw["vertices"])
        edges, labels = [], []
        for item in raw.get("edges", []):
            if isinstance(item, dict):
                edges.append((int(item["tail"]), int(item["head"])))
                labels.append(item.get("label"))
            else:
                edges.append((int(item[0]), int(item[1])))
                labels.append(item[2] if len(item) > 2 else None)
        squares = []
        for sq in raw.get("squares", []):
            sides = []
            for side in sq:
                e, o = side
                if not isinstance(o, bool):
                    raise MalformedInput("square side orientation must be a boolean")
                sides.append((int(e), o))
            squares.append(tuple(sides))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"cannot parse complex: {exc}") from exc
    if n < 0:
        raise MalformedInput("vertex count must be non-negative")
    has_labels = any(lbl is not None for lbl in labels)
    return CubeComplex(n, tuple(edges), tuple(squares), tuple(labels) if has_labels else None)


def validate_complex(raw):
    """Parse and validate; raises ``InconsistentAttachment`` listing violations."""
    X = raw if isinstance(raw, CubeComplex) else from_dict(raw)
    violations = attachment_violations(X)
    if violations:
        first = violations[0]
        raise InconsistentAttachment(
            f"{first['cell'][0]} {first['cell'][1]}: {first['problem']}",
            violations=violations,
        )
    return X


@dataclass
class LinkComplex:
    vertex: int
    vertices: list
    # unordered pair (sorted tuple) -> list of (square, corner)
    edges: dict = field(default_factory=dict)

    @property
    def multiplicity(self):
        return {pair: len(cells) for pair, cells in self.edges.items()}

    def adjacency(self):
        adj = defaultdict(set)
        for u, w in self.edges:
            if u != w:
                adj[u].add(w)
                adj[w].add(u)
        return adj

    def is_simplicial(self):
        return all(u != w and len(c) == 1 for (u, w), c in self.edges.items())

    def to_dict(self):
        return {
            "vertex": self.vertex,
            "link_vertices": [list(lv) for lv in self.vertices],
            "link_edges": [
                {"ends": [list(u), list(w)], "multiplicity": len(c), "cells": [list(x) for x in c]}
                for (u, w), c in sorted(self.edges.items())
            ],
        }


def vertex_link(X, v, _incidence=None):
    if not (0 <= v < X.n_vertices):
        raise UnknownCell(f"no vertex {v}", cell=["vertex", v])
    ends, corners = _incidence or X.incidence()
    link = LinkComplex(v, list(ends.get(v, [])))
    for s, k in corners.get(v, []):
        u, w = X.corner_pair(s, k)
        link.edges.setdefault(tuple(sorted((u, w))), []).append((s, k))
    for cells in link.edges.values():
        cells.sort()
    return link


def link_triangles(link):
    """Triples of pairwise adjacent link vertices, sorted."""
    adj = link.adjacency()
    out = []
    for u in sorted(adj):
        for w in sorted(adj[u]):
            if w <= u:
                continue
            for z in sorted(adj[u] & adj[w]):
                if z > w:
                    out.append((u, w, z))
    return out


@dataclass
class NpcReport:
    passed: bool
    failures: list

    def to_dict(self):
        return {"passed": self.passed, "failures": self.failures}


def check_npc(X):
    X = validate_complex(X)
    failures = []
    inc = X.incidence()
    for v in range(X.n_vertices):
        link = vertex_link(X, v, inc)
        for (u, w), cells in sorted(link.edges.items()):
            if u == w:
                failures.append({"vertex": v, "kind": "non_simplicial", "reason": "repeated_vertex",
                                 "simplex": [list(u), list(w)], "cells": [list(c) for c in cells]})
            elif len(cells) > 1:
                failures.append({"vertex": v, "kind": "non_simplicial", "reason": "multiplicity",
                                 "simplex": [list(u), list(w)], "multiplicity": len(cells),
                                 "cells": [list(c) for c in cells]})
        # a 2-dimensional complex has no 2-simplices in its links, so any
        # pairwise adjacent triple is an empty triangle
        for tri in link_triangles(link):
            failures.append({"vertex": v, "kind": "non_flag", "reason": "empty_triangle",
                             "simplex": [list(t) for t in tri]})
    return NpcReport(not failures, failures)


def is_npc(X):
    return check_npc(X).passed


class _UF:
    def __init__(self):
        self.parent = []

    def add(self):
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, a):
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra > rb:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


@dataclass
class BallComplex:
    base: CubeComplex
    center: int
    radius: int
    complex: CubeComplex
    vertex_image: tuple
    edge_image: tuple
    square_image: tuple
    distance: tuple

    @property
    def root(self):
        return 0

    def boundary_vertex(self, p):
        return self.distance[p] >= self.radius

    def cell_is_boundary(self, kind, i):
        C = self.complex
        if kind == "vertex":
            verts = [i]
        elif kind == "edge":
            verts = list(C.edges[i])
        else:
            verts = list(C.square_corners(i))
        return any(self.boundary_vertex(p) for p in verts)

    def interior_vertices(self):
        return [p for p in range(self.complex.n_vertices) if self.distance[p] < self.radius]

    def summary(self):
        return {
            "center": self.center,
            "radius": self.radius,
            **self.complex.summary(),
            "interior_vertices": len(self.interior_vertices()),
        }


class _Development:
    """Grows a simply connected complex mapping to ``X`` by completing links and folding."""

    def __init__(self, X, cap):
        self.X = X
        self.cap = cap
        self.ends, self.corners = X.incidence()
        self.vuf, self.euf = _UF(), _UF()
        self.vimg, self.edge_data, self.sq = [], [], []

    def new_vertex(self, x):
        self.vimg.append(x)
        self._check_cap()
        return self.vuf.add()

    def new_edge(self, tail, head, xe):
        self.edge_data.append([tail, head, xe])
        self._check_cap()
        return self.euf.add()

    def _check_cap(self):
        if len(self.vimg) + len(self.edge_data) + len(self.sq) > self.cap:
            raise BudgetExceeded("ball development exceeded the cell cap", cap=self.cap)

    def canonical(self):
        """Rebuild maps from (vertex, link vertex) to edge, and corner to square."""
        vf, ef = self.vuf.find, self.euf.find
        at = {}
        for e in range(len(self.edge_data)):
            if ef(e) != e:
                continue
            t, h, xe = self.edge_data[e]
            t, h = vf(t), vf(h)
            self.edge_data[e][0], self.edge_data[e][1] = t, h
            at[(t, xe, TAIL)] = e
            at[(h, xe, HEAD)] = e
        corner = {}
        for i, (xs, sides) in enumerate(self.sq):
            if sides is None:
                continue
            sides[:] = [ef(e) for e in sides]
            for k in range(4):
                p = self._corner_vertex(xs, sides, k)
                corner[(p, xs, k)] = i
        return at, corner

    def _corner_vertex(self, xs, sides, k):
        t, h, _ = self.edge_data[sides[k]]
        fwd = self.X.squares[xs][k][1]
        return self.vuf.find(t if fwd else h)

    def fold(self):
        changed = True
        while changed:
            changed = False
            vf, ef = self.vuf.find, self.euf.find
            seen = {}
            for e in range(len(self.edge_data)):
                if ef(e) != e:
                    continue
                t, h, xe = self.edge_data[e]
                t, h = vf(t), vf(h)
                for key, other in (((t, xe, TAIL), h), ((h, xe, HEAD), t)):
                    if key in seen and seen[key][0] != e:
                        e2, other2 = seen[key]
                        self.euf.union(e, e2)
                        self.vuf.union(other, other2)
                        changed = True
                        break
                    seen[key] = (e, other)
                if changed:
                    break
            if changed:
                continue
            sq_seen = {}
            for i, (xs, sides) in enumerate(self.sq):
                if sides is None:
                    continue
                key = (xs, ef(sides[0]))
                if key in sq_seen:
                    j = sq_seen[key]
                    for a, b in zip(self.sq[j][1], sides):
                        if self.euf.union(a, b):
                            changed = True
                        ta, ha, _ = self.edge_data[a]
                        tb, hb, _ = self.edge_data[b]
                        if self.vuf.union(ta, tb) | self.vuf.union(ha, hb):
                            changed = True
                    self.sq[i] = (xs, None)
                    changed = True
                else:
                    sq_seen[key] = i

    def distances(self, root):
        root = self.vuf.find(root)
        adj = defaultdict(list)
        for e in range(len(self.edge_data)):
            if self.euf.find(e) == e:
                t, h, _ = self.edge_data[e]
                t, h = self.vuf.find(t), self.vuf.find(h)
                adj[t].append(h)
                adj[h].append(t)
        dist = {root: 0}
        queue = deque([root])
        while queue:
            p = queue.popleft()
            for q in adj[p]:
                if q not in dist:
                    dist[q] = dist[p] + 1
                    queue.append(q)
        return dist

    def complete_edges(self, p, at):
        x = self.vimg[p]
        made = False
        for xe, end in self.ends.get(x, []):
            if (p, xe, end) in at:
                continue
            other = self.X.edges[xe][1 - end]
            q = self.new_vertex(other)
            e = self.new_edge(p, q, xe) if end == TAIL else self.new_edge(q, p, xe)
            at[(p, xe, end)] = e
            made = True
        return made

    def complete_squares(self, p, at, corner):
        x = self.vimg[p]
        made = False
        for xs, k in self.corners.get(x, []):
            if (p, xs, k) in corner:
                continue
            sides_x = self.X.squares[xs]
            sides = [None] * 4
            # side k leaves p, side k-1 arrives at p
            ek, fk = sides_x[k]
            sides[k] = at[(p, ek, TAIL if fk else HEAD)]
            ep, fp = sides_x[(k - 1) % 4]
            sides[(k - 1) % 4] = at[(p, ep, HEAD if fp else TAIL)]
            t, h, _ = self.edge_data[sides[k]]
            w1 = self.vuf.find(h if fk else t)
            t, h, _ = self.edge_data[sides[(k - 1) % 4]]
            w3 = self.vuf.find(t if fp else h)
            k1, k2 = (k + 1) % 4, (k + 2) % 4
            w2 = self.new_vertex(side_end(self.X.edges, sides_x[k1]))
            for idx, a, b in ((k1, w1, w2), (k2, w2, w3)):
                xe, fwd = sides_x[idx]
                sides[idx] = self.new_edge(a, b, xe) if fwd else self.new_edge(b, a, xe)
            self.sq.append((xs, sides))
            corner[(p, xs, k)] = len(self.sq) - 1
            made = True
        return made


def universal_cover_ball(X, base, r, cap=DEFAULT_CELL_CAP, require_npc=True):
    """Closed stars of the vertices at distance < r from a lift of ``base``."""
    X = validate_complex(X)
    if not (0 <= base < X.n_vertices):
        raise UnknownCell(f"no vertex {base}", cell=["vertex", base])
    if r < 0:
        raise ValueError("radius must be non-negative")
    if require_npc:
        report = check_npc(X)
        if not report.passed:
            raise NotNpc("complex is not nonpositively curved", witness=report.failures[0])
    # squares can identify vertices two steps beyond the last completed layer
    reach = r if X.dimension <= 1 else r + 1
    dev = _Development(X, cap)
    root = dev.new_vertex(base)
    while True:
        at, corner = dev.canonical()
        dist = dev.distances(root)
        todo = sorted(p for p, d in dist.items() if d < reach)
        made = False
        for p in todo:
            made |= dev.complete_edges(p, at)
        if made:
            dev.fold()
            continue
        at, corner = dev.canonical()
        for p in todo:
            made |= dev.complete_squares(p, at, corner)
        if made:
            dev.fold()
            continue
        break
    return _extract_ball(X, dev, root, base, r)


def _extract_ball(X, dev, root, base, r):
    at, corner = dev.canonical()
    dist = dev.distances(root)
    root = dev.vuf.find(root)
    interior = {p for p, d in dist.items() if d < r}
    # BFS discovery order with ties broken by the image edge end
    order = {root: 0}
    queue = deque([root])
    edge_order = []
    edge_seen = set()
    while queue:
        p = queue.popleft()
        if p not in interior:
            continue
        for xe, end in dev.ends.get(dev.vimg[p], []):
            e = at[(p, xe, end)]
            if e in edge_seen:
                continue
            edge_seen.add(e)
            edge_order.append(e)
            t, h, _ = dev.edge_data[e]
            q = h if end == TAIL else t
            if q not in order:
                order[q] = len(order)
                queue.append(q)
    sq_order = []
    sq_seen = set()
    for p in sorted(interior, key=order.get):
        for xs, k in dev.corners.get(dev.vimg[p], []):
            i = corner[(p, xs, k)]
            if i not in sq_seen:
                sq_seen.add(i)
                sq_order.append(i)
    # squares may reach vertices/edges not yet listed (opposite corners)
    for i in sq_order:
        for e in dev.sq[i][1]:
            if e not in edge_seen:
                edge_seen.add(e)
                edge_order.append(e)
                for q in dev.edge_data[e][:2]:
                    if q not in order:
                        order[q] = len(order)
    eidx = {e: n for n, e in enumerate(edge_order)}
    edges = tuple((order[dev.edge_data[e][0]], order[dev.edge_data[e][1]]) for e in edge_order)
    squares = []
    for i in sq_order:
        xs, sides = dev.sq[i]
        squares.append(tuple((eidx[e], X.squares[xs][k][1]) for k, e in enumerate(sides)))
    inv = sorted(order, key=order.get)
    labels = None
    if X.labels is not None:
        labels = tuple(X.labels[dev.edge_data[e][2]] for e in edge_order)
    C = CubeComplex(len(inv), edges, tuple(squares), labels)
    return BallComplex(
        base=X,
        center=base,
        radius=r,
        complex=C,
        vertex_image=tuple(dev.vimg[p] for p in inv),
        edge_image=tuple(dev.edge_data[e][2] for e in edge_order),
        square_image=tuple(dev.sq[i][0] for i in sq_order),
        distance=tuple(dist[p] for p in inv),
    )


def disjoint_union(complexes):
    """Disjoint union plus per-piece vertex/edge/square offsets."""
    nv, edges, squares, labels, offsets = 0, [], [], [], []
    any_labels = any(C.labels is not None for C in complexes)
    for C in complexes:
        eo = len(edges)
        offsets.append((nv, eo, len(squares)))
        edges.extend((t + nv, h + nv) for t, h in C.edges)
        squares.extend(tuple((e + eo, o) for e, o in sq) for sq in C.squares)
        labels.extend(C.labels if C.labels is not None else [None] * len(C.edges))
        nv += C.n_vertices
    return CubeComplex(nv, tuple(edges), tuple(squares), tuple(labels) if any_labels else None), offsets


def induced_subcomplex(X, vertices, edges=None, squares=None):
    """Subcomplex on the given cells, renumbered; returns (complex, vmap, emap, smap)."""
    vs = sorted(set(vertices))
    vmap = {v: i for i, v in enumerate(vs)}
    es = sorted(set(edges)) if edges is not None else [
        e for e, (t, h) in enumerate(X.edges) if t in vmap and h in vmap
    ]
    emap = {e: i for i, e in enumerate(es)}
    ss = sorted(set(squares)) if squares is not None else [
        s for s, sq in enumerate(X.squares) if all(e in emap for e, _ in sq)
    ]
    C = CubeComplex(
        len(vs),
        tuple((vmap[X.edges[e][0]], vmap[X.edges[e][1]]) for e in es),
        tuple(tuple((emap[e], o) for e, o in X.squares[s]) for s in ss),
        tuple(X.labels[e] for e in es) if X.labels is not None else None,
    )
    return C, vs, es, ss


def link_multiplicities(X):
    """Counter of (vertex, sorted link edge) over all corners; used by oracles and tests."""
    out = Counter()
    for s in range(len(X.squares)):
        for k, v in enumerate(X.square_corners(s)):
            out[(v, tuple(sorted(X.corner_pair(s, k))))] += 1
    return out
