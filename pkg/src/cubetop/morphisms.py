"""Combinatorial maps, local isometries, finite covers, elevations and mapping cylinders."""

from __future__ import annotations

import re
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Optional

from .complex_core import (
    HEAD,
    TAIL,
    CubeComplex,
    check_npc,
    side_end,
    side_start,
    validate_complex,
    vertex_link,
)
from .errors import MalformedInput, NotCombinatorial, NotLocalIsometry, SquareInconsistency


def _dihedral(tsq):
    """Yield (side index map, reflected) for the 8 symmetries of a square boundary."""
    for r in range(4):
        yield tuple((k + r) % 4 for k in range(4)), False
    for r in range(4):
        yield tuple((r - k) % 4 for k in range(4)), True


@dataclass(frozen=True)
class CombinatorialMap:
    """Cell map ``source -> target``.

    ``edge_map[e] = (target edge, preserves orientation)``; ``square_map[s]
    = (target square, side index map, reflected)`` where source side ``k``
    lands on target side ``side_map[k]``.
    """

    source: CubeComplex
    target: CubeComplex
    vertex_map: tuple
    edge_map: tuple
    square_map: tuple = ()

    def link_image(self, lv):
        e, end = lv
        te, keep = self.edge_map[e]
        return (te, end if keep else 1 - end)

    def side_image(self, side):
        e, fwd = side
        te, keep = self.edge_map[e]
        return (te, fwd if keep else not fwd)

    def to_dict(self, source_id=None, target_id=None):
        out = {
            "vertices": list(self.vertex_map),
            "edges": [[e, keep] for e, keep in self.edge_map],
        }
        if source_id is not None:
            out["source"] = source_id
        if target_id is not None:
            out["target"] = target_id
        return out

    def cell_images(self):
        return {
            "vertices": list(self.vertex_map),
            "edges": [e for e, _ in self.edge_map],
            "squares": [s for s, _, _ in self.square_map],
        }


def _square_assignment(source, target, vertex_map, edge_map, index=None):
    if index is None:
        index = defaultdict(list)
        for t, sq in enumerate(target.squares):
            index[tuple(sorted(e for e, _ in sq))].append(t)
    out = []
    for s, sq in enumerate(source.squares):
        img = []
        for e, fwd in sq:
            te, keep = edge_map[e]
            img.append((te, fwd if keep else not fwd))
        corner0 = vertex_map[side_start(source.edges, sq[0])]
        found = None
        for t in index.get(tuple(sorted(e for e, _ in img)), []):
            tsq = target.squares[t]
            for smap, refl in _dihedral(tsq):
                ok = True
                for k in range(4):
                    te, tf = tsq[smap[k]]
                    if refl:
                        tf = not tf
                    if (te, tf) != img[k]:
                        ok = False
                        break
                if ok and side_start(target.edges, img[0]) == corner0:
                    found = (t, smap, refl)
                    break
            if found:
                break
        if found is None:
            raise NotCombinatorial(f"square {s} has no image square", cell=["square", s])
        out.append(found)
    return tuple(out)


def make_map(source, target, vertex_map, edge_map, square_map=None):
    """Build and validate a combinatorial map; squares are derived when omitted."""
    vertex_map = tuple(int(v) for v in vertex_map)
    edge_map = tuple((int(e), bool(k)) for e, k in edge_map)
    if len(vertex_map) != source.n_vertices or len(edge_map) != len(source.edges):
        raise NotCombinatorial("map does not cover every source cell")
    for v in vertex_map:
        if not (0 <= v < target.n_vertices):
            raise NotCombinatorial(f"vertex image {v} does not exist")
    for e, (t, h) in enumerate(source.edges):
        te, keep = edge_map[e]
        if not (0 <= te < len(target.edges)):
            raise NotCombinatorial(f"edge image {te} does not exist", cell=["edge", e])
        tt, th = target.edges[te]
        if not keep:
            tt, th = th, tt
        if (vertex_map[t], vertex_map[h]) != (tt, th):
            raise NotCombinatorial(
                f"edge {e} endpoints do not map to the endpoints of edge {te}", cell=["edge", e]
            )
    if square_map is None:
        square_map = _square_assignment(source, target, vertex_map, edge_map)
    return CombinatorialMap(source, target, vertex_map, edge_map, tuple(square_map))


def identity_map(X):
    return CombinatorialMap(
        X,
        X,
        tuple(range(X.n_vertices)),
        tuple((e, True) for e in range(len(X.edges))),
        tuple((s, (0, 1, 2, 3), False) for s in range(len(X.squares))),
    )


def compose(f, g):
    """``g ∘ f`` for ``f: A -> B`` and ``g: B -> C``."""
    vm = tuple(g.vertex_map[v] for v in f.vertex_map)
    em = []
    for te, keep in f.edge_map:
        ge, gkeep = g.edge_map[te]
        em.append((ge, keep == gkeep))
    sm = []
    for t, smap, refl in f.square_map:
        u, gmap, grefl = g.square_map[t]
        sm.append((u, tuple(gmap[smap[k]] for k in range(4)), refl != grefl))
    return CombinatorialMap(f.source, g.target, vm, tuple(em), tuple(sm))


def restrict(f, sub, vs, es, ss):
    """Restriction of ``f`` to a subcomplex produced by ``induced_subcomplex``."""
    return CombinatorialMap(
        sub,
        f.target,
        tuple(f.vertex_map[v] for v in vs),
        tuple(f.edge_map[e] for e in es),
        tuple(f.square_map[s] for s in ss),
    )


def inclusion_map(sub, X, vs, es, ss):
    return CombinatorialMap(
        sub,
        X,
        tuple(vs),
        tuple((e, True) for e in es),
        tuple((s, (0, 1, 2, 3), False) for s in ss),
    )


@dataclass
class LocalIsometryReport:
    passed: bool
    failures: list

    def to_dict(self):
        return {"passed": self.passed, "failures": self.failures}


def check_local_isometry(f):
    """Link maps must be injective with full image at every source vertex."""
    Y, X = f.source, f.target
    yinc, xinc = Y.incidence(), X.incidence()
    failures = []
    for y in range(Y.n_vertices):
        x = f.vertex_map[y]
        ly = vertex_link(Y, y, yinc)
        lx = vertex_link(X, x, xinc)
        seen = {}
        for lv in ly.vertices:
            img = f.link_image(lv)
            if img in seen:
                failures.append({"vertex": y, "kind": "non_injective",
                                 "link_vertices": [list(seen[img]), list(lv)], "image": list(img)})
            else:
                seen[img] = lv
        src_pairs = {tuple(sorted(p)) for p in ly.edges}
        img_pairs = defaultdict(list)
        for pair in src_pairs:
            img_pairs[tuple(sorted(f.link_image(v) for v in pair))].append(pair)
        for ipair, pairs in sorted(img_pairs.items()):
            if len(pairs) > 1:
                failures.append({"vertex": y, "kind": "non_injective",
                                 "link_edges": [[list(a), list(b)] for a, b in sorted(pairs)]})
        for u, w in sorted(lx.edges):
            if u in seen and w in seen and u != w:
                pre = tuple(sorted((seen[u], seen[w])))
                if pre not in src_pairs:
                    failures.append({"vertex": y, "kind": "non_full",
                                     "link_vertices": [list(pre[0]), list(pre[1])],
                                     "image_simplex": [list(u), list(w)]})
    return LocalIsometryReport(not failures, failures)


def is_local_isometry(f):
    return check_local_isometry(f).passed


def require_local_isometry(f, what="map", exc=NotLocalIsometry):
    report = check_local_isometry(f)
    if not report.passed:
        raise exc(f"{what} is not a local isometry", witness=report.failures[0])


def is_injective(f):
    return (
        len(set(f.vertex_map)) == len(f.vertex_map)
        and len({e for e, _ in f.edge_map}) == len(f.edge_map)
        and len({s for s, _, _ in f.square_map}) == len(f.square_map)
    )


def is_isomorphism(h):
    return (
        is_injective(h)
        and len(h.vertex_map) == h.target.n_vertices
        and len(h.edge_map) == len(h.target.edges)
        and len(h.square_map) == len(h.target.squares)
    )


def find_morphism(f, g, y0, z0):
    """The unique map ``h: Y -> Z`` with ``g∘h = f`` and ``h(y0) = z0``, or None.

    ``Y`` must be connected and ``g`` locally injective on links; the
    lift is then forced edge by edge.
    """
    Y, Z = f.source, g.source
    if f.vertex_map[y0] != g.vertex_map[z0]:
        return None
    zends, _ = Z.incidence()
    zlook = {}
    for z, lvs in zends.items():
        for lv in lvs:
            zlook[(z, g.link_image(lv))] = lv
    vm = {y0: z0}
    em = {}
    yends, _ = Y.incidence()
    queue = deque([y0])
    while queue:
        y = queue.popleft()
        z = vm[y]
        for lv in yends.get(y, []):
            target_lv = zlook.get((z, f.link_image(lv)))
            if target_lv is None:
                return None
            e, end = lv
            ze, zend = target_lv
            keep = end == zend
            if e in em:
                if em[e] != (ze, keep):
                    return None
                continue
            em[e] = (ze, keep)
            other = Y.edges[e][1 - end]
            zother = Z.edges[ze][1 - zend]
            if other in vm:
                if vm[other] != zother:
                    return None
            else:
                vm[other] = zother
                queue.append(other)
    if len(vm) != Y.n_vertices:
        return None
    try:
        h = make_map(Y, Z, [vm[y] for y in range(Y.n_vertices)],
                     [em[e] for e in range(len(Y.edges))])
    except NotCombinatorial:
        return None
    # squares must lie over the same square of X
    for s, (t, _, _) in enumerate(h.square_map):
        if g.square_map[t][0] != f.square_map[s][0]:
            return None
    return h


def morphisms_between(f, g):
    """All maps ``Y -> Z`` over ``X`` (``Y`` connected, nonempty)."""
    if f.source.n_vertices == 0:
        return []
    out = []
    for z in range(g.source.n_vertices):
        h = find_morphism(f, g, 0, z)
        if h is not None:
            out.append(h)
    return out


def isomorphism_between(f, g):
    if f.source.summary() != g.source.summary():
        return None
    for h in morphisms_between(f, g):
        if is_isomorphism(h):
            return h
    return None


def maps_isomorphic(f, g):
    return isomorphism_between(f, g) is not None


# --- finite covers ---------------------------------------------------------

_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text, degree):
    """Cycle notation on ``{1..degree}`` to a 0-based permutation tuple."""
    perm = list(range(degree))
    text = (text or "").strip()
    if text in ("", "id", "()"):
        return tuple(perm)
    if _CYCLE.sub("", text).strip():
        raise MalformedInput(f"bad cycle notation: {text!r}")
    seen = set()
    for body in _CYCLE.findall(text):
        pts = [int(p) for p in body.replace(",", " ").split()]
        for p in pts:
            if not (1 <= p <= degree) or p in seen:
                raise MalformedInput(f"bad cycle notation: {text!r}")
            seen.add(p)
        for a, b in zip(pts, pts[1:] + pts[:1]):
            perm[a - 1] = b - 1
    return tuple(perm)


def format_cycles(perm):
    seen, parts = set(), []
    for i in range(len(perm)):
        if i in seen or perm[i] == i:
            seen.add(i)
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(str(j + 1))
            j = perm[j]
        parts.append("(" + " ".join(cyc) + ")")
    return "".join(parts) or "()"


def _invert(perm):
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return tuple(inv)


@dataclass(frozen=True)
class CoverSpec:
    base: CubeComplex
    degree: int
    perms: tuple  # per edge: tail sheet i -> head sheet perms[e][i]

    @classmethod
    def from_cycles(cls, base, degree, by_edge):
        """``by_edge`` maps edge id or edge label to cycle notation; missing edges are identity."""
        perms = [tuple(range(degree))] * len(base.edges)
        for key, text in by_edge.items():
            if isinstance(key, int) or (isinstance(key, str) and key.isdigit()):
                targets = [int(key)]
            else:
                targets = [e for e in range(len(base.edges)) if base.label(e) == key]
                if not targets:
                    raise MalformedInput(f"no edge labelled {key!r}")
            for e in targets:
                perms[e] = parse_cycles(text, degree)
        return cls(base, degree, tuple(perms))

    def to_dict(self):
        return {"degree": self.degree, "perms": {str(e): format_cycles(p) for e, p in enumerate(self.perms)}}


def square_composite(spec, s):
    """Sheet permutation obtained by running once around square ``s``."""
    cur = list(range(spec.degree))
    for e, fwd in spec.base.squares[s]:
        p = spec.perms[e] if fwd else _invert(spec.perms[e])
        cur = [p[c] for c in cur]
    return tuple(cur)


def build_cover(spec):
    """Degree-n cover and its covering map; vertex (v, i) has id ``v*n + i``."""
    X, n = spec.base, spec.degree
    for s in range(len(X.squares)):
        comp = square_composite(spec, s)
        if comp != tuple(range(n)):
            raise SquareInconsistency(
                f"square {s} boundary permutation is {format_cycles(comp)}",
                square=s, composite=format_cycles(comp),
            )
    edges, labels, em = [], [], []
    for e, (t, h) in enumerate(X.edges):
        for i in range(n):
            edges.append((t * n + i, h * n + spec.perms[e][i]))
            labels.append(X.labels[e] if X.labels else None)
            em.append((e, True))
    squares, sm = [], []
    for s, sq in enumerate(X.squares):
        for i in range(n):
            sheet, sides = i, []
            for e, fwd in sq:
                if fwd:
                    sides.append((e * n + sheet, True))
                    sheet = spec.perms[e][sheet]
                else:
                    sheet = _invert(spec.perms[e])[sheet]
                    sides.append((e * n + sheet, False))
            squares.append(tuple(sides))
            sm.append((s, (0, 1, 2, 3), False))
    C = CubeComplex(X.n_vertices * n, tuple(edges), tuple(squares),
                    tuple(labels) if X.labels else None)
    p = CombinatorialMap(C, X, tuple(v for v in range(X.n_vertices) for _ in range(n)),
                         tuple(em), tuple(sm))
    return C, p


@dataclass
class Elevation:
    map: CombinatorialMap          # elevated map into the cover
    to_source: CombinatorialMap    # covering of the original domain
    basepoint: tuple               # (y0, sheet)
    degree: int

    def to_dict(self):
        return {
            "basepoint": list(self.basepoint),
            "degree": self.degree,
            "complex": self.map.source.to_dict(),
            "map": self.map.to_dict(),
        }


def elevation(f, cover, y0, sheet):
    """Component of ``Y ⊗ X̂`` through ``(y0, sheet)`` with its two projections."""
    from .fiber_product import fiber_product  # fiber products build on this module

    Xhat, p = cover
    n = p.source.n_vertices // max(p.target.n_vertices, 1)
    xhat0 = f.vertex_map[y0] * n + sheet
    for comp in fiber_product(f, p):
        if (y0, xhat0) in comp.vertex_pairs:
            return Elevation(comp.proj_b, comp.proj_a, (y0, sheet),
                             comp.complex.n_vertices // max(f.source.n_vertices, 1))
    raise ValueError("basepoint does not lie over the map")


def elevations(f, cover, y0=0):
    """Elevations at ``y0`` over every orbit of sheets, ordered by smallest sheet."""
    Xhat, p = cover
    n = p.source.n_vertices // max(p.target.n_vertices, 1)
    out, covered = [], set()
    for sheet in range(n):
        if sheet in covered:
            continue
        el = elevation(f, cover, y0, sheet)
        for y, xh in _pairs(el):
            if y == y0:
                covered.add(xh % n)
        out.append(el)
    return out


def _pairs(el):
    return list(zip(el.to_source.vertex_map, el.map.vertex_map))


# --- mapping cylinders -----------------------------------------------------

@dataclass
class MappingCylinder:
    complex: CubeComplex
    source_inclusion: CombinatorialMap
    target_inclusion: CombinatorialMap
    pi1_isomorphism: str  # "exact" for graph sources

    def to_dict(self):
        return {
            "complex": self.complex.to_dict(),
            "summary": self.complex.summary(),
            "pi1_isomorphism": self.pi1_isomorphism,
        }


def mapping_cylinder(f):
    """``X ∪ Y×[0,1]`` with ``Y×{1}`` glued along ``f``; graph domains only."""
    from .errors import UnsupportedDimension

    require_local_isometry(f)
    Y, X = f.source, f.target
    if Y.dimension > 1:
        raise UnsupportedDimension("mapping cylinders need a 1-dimensional domain")
    nx = X.n_vertices
    edges = list(X.edges)
    labels = list(X.labels) if X.labels else [None] * len(X.edges)
    squares = list(X.squares)
    ybase = len(edges)
    for t, h in Y.edges:
        edges.append((t + nx, h + nx))
    labels.extend(Y.labels if Y.labels else [None] * len(Y.edges))
    rungs = len(edges)
    for y in range(Y.n_vertices):
        edges.append((y + nx, f.vertex_map[y]))
        labels.append(f"r{y}")
    for e, (t, h) in enumerate(Y.edges):
        xe, keep = f.edge_map[e]
        squares.append(((ybase + e, True), (rungs + h, True), (xe, not keep), (rungs + t, False)))
    C = CubeComplex(nx + Y.n_vertices, tuple(edges), tuple(squares), tuple(labels))
    yin = CombinatorialMap(Y, C, tuple(y + nx for y in range(Y.n_vertices)),
                           tuple((ybase + e, True) for e in range(len(Y.edges))), ())
    xin = CombinatorialMap(X, C, tuple(range(nx)), tuple((e, True) for e in range(len(X.edges))),
                           tuple((s, (0, 1, 2, 3), False) for s in range(len(X.squares))))
    return MappingCylinder(C, yin, xin, "exact")
