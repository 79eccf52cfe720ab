"""Fiber products of local isometries, and symmetric / principal / stable families."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional

from .complex_core import DEFAULT_CELL_CAP, CubeComplex, universal_cover_ball
from .cores import core_of, iso_key, trim_indices
from .errors import BoundedModeInconclusive, BudgetExceeded
from .morphisms import (
    CombinatorialMap,
    compose,
    find_morphism,
    identity_map,
    is_isomorphism,
    morphisms_between,
)


@dataclass
class FiberComponent:
    complex: CubeComplex
    projections: tuple          # one map per factor
    vertex_pairs: tuple         # tuples of factor vertices, in component order
    over: CombinatorialMap      # K -> X
    essential: bool
    projection_iso: tuple = field(default=())

    @property
    def proj_a(self):
        return self.projections[0]

    @property
    def proj_b(self):
        return self.projections[1]

    def to_dict(self):
        return {
            "vertices": [list(p) for p in self.vertex_pairs],
            "summary": self.complex.summary(),
            "essential": self.essential,
            "projection_iso": list(self.projection_iso),
            "complex": self.complex.to_dict(),
        }


def simply_connected(K, cap=DEFAULT_CELL_CAP):
    """Exact π1-triviality for a finite connected NPC complex.

    Graphs: a tree test. Square complexes: a nontrivial π1 is infinite, so
    the ball of radius ``diam + 1`` in the universal cover has more
    vertices than ``K`` exactly when π1 is nontrivial.
    """
    if K.n_vertices == 0:
        return True
    if not K.squares:
        return len(K.edges) == K.n_vertices - 1
    adj = K.neighbours()
    diam = 0
    for s in range(K.n_vertices):
        dist = {s: 0}
        frontier = [s]
        while frontier:
            nxt = []
            for v in frontier:
                for w in adj[v]:
                    if w not in dist:
                        dist[w] = dist[v] + 1
                        nxt.append(w)
            frontier = nxt
        diam = max(diam, max(dist.values()))
    ball = universal_cover_ball(K, 0, diam + 1, cap=cap, require_npc=False)
    return ball.complex.n_vertices == K.n_vertices


def _pair_product(f, g):
    """Cells of ``A ⊗ B`` for maps to the same target; pairs are (a, b)."""
    A, B = f.source, g.source
    by_x = defaultdict(list)
    for b, x in enumerate(g.vertex_map):
        by_x[x].append(b)
    vpairs = [(a, b) for a, x in enumerate(f.vertex_map) for b in by_x.get(x, [])]
    by_xe = defaultdict(list)
    for eb, (xe, _) in enumerate(g.edge_map):
        by_xe[xe].append(eb)
    epairs = []
    for ea, (xe, ka) in enumerate(f.edge_map):
        ta, ha = A.edges[ea]
        for eb in by_xe.get(xe, []):
            kb = g.edge_map[eb][1]
            tb, hb = B.edges[eb]
            same = ka == kb
            epairs.append(((ea, eb), (ta, tb if same else hb), (ha, hb if same else tb), same))
    by_xs = defaultdict(list)
    for sb, (xs, _, _) in enumerate(g.square_map):
        by_xs[xs].append(sb)
    spairs = []
    for sa, (xs, smap_a, refl_a) in enumerate(f.square_map):
        for sb in by_xs.get(xs, []):
            _, smap_b, refl_b = g.square_map[sb]
            inv_b = {t: k for k, t in enumerate(smap_b)}
            sides, bsides = [], []
            for k, (ea, fwd) in enumerate(A.squares[sa]):
                j = inv_b[smap_a[k]]
                bsides.append(j)
                sides.append(((ea, B.squares[sb][j][0]), fwd))
            spairs.append(((sa, sb), tuple(sides), (tuple(bsides), refl_a != refl_b)))
    return vpairs, epairs, spairs


def _components(vpairs, epairs, spairs):
    parent = {p: p for p in vpairs}

    def find(p):
        while parent[p] != p:
            parent[p] = parent[parent[p]]
            p = parent[p]
        return p

    for _, t, h, _ in epairs:
        a, b = find(t), find(h)
        if a != b:
            parent[max(a, b)] = min(a, b)
    groups = defaultdict(lambda: ([], [], []))
    for p in vpairs:
        groups[find(p)][0].append(p)
    for ep in epairs:
        groups[find(ep[1])][1].append(ep)
    epair_root = {ep[0]: find(ep[1]) for ep in epairs}
    for sp in spairs:
        groups[epair_root[sp[1][0][0]]][2].append(sp)
    return [groups[r] for r in sorted(groups)]


def _build_component(maps, vs, es, ss, target):
    """Assemble a component complex from tuples of factor cells."""
    vs = sorted(vs)
    vid = {p: i for i, p in enumerate(vs)}
    es = sorted(es)
    eid = {ep[0]: i for i, ep in enumerate(es)}
    ss = sorted(ss)
    lead = maps[0]
    labels = None
    if lead.source.labels is not None:
        labels = tuple(lead.source.labels[ep[0][0]] for ep in es)
    K = CubeComplex(
        len(vs),
        tuple((vid[t], vid[h]) for _, t, h, _ in es),
        tuple(tuple((eid[key], fwd) for key, fwd in sides) for _, sides, _ in ss),
        labels,
    )
    projections = []
    for i, m in enumerate(maps):
        vm = tuple(p[i] for p in vs)
        em = tuple((ep[0][i], ep[3][i]) for ep in es)
        # factor 0 squares are laid out verbatim; factor 1 via the side pairing
        sm = [(key[i], (0, 1, 2, 3), False) if i == 0 else (key[i], *pairing)
              for key, _, pairing in ss]
        projections.append(CombinatorialMap(K, m.source, vm, em, tuple(sm)))
    over = compose(projections[0], maps[0])
    return K, tuple(projections), tuple(vs), over


def _flatten_pairs(vpairs, epairs, spairs):
    e = [(k, t, h, (True, same)) for k, t, h, same in epairs]
    return list(vpairs), e, list(spairs)


def fiber_product(f, g, *, classify=True):
    """Components of ``A ⊗_X B`` ordered by smallest vertex pair."""
    vpairs, epairs, spairs = _pair_product(f, g)
    out = []
    for vs, es, ss in _components(vpairs, epairs, spairs):
        v, e, s = _flatten_pairs(vs, es, ss)
        K, projs, vp, over = _build_component((f, g), v, e, s, f.target)
        out.append(_finish(K, projs, vp, over, classify))
    return out


def _finish(K, projs, vp, over, classify):
    essential = not simply_connected(K) if classify else None
    iso = tuple(is_isomorphism(p) for p in projs) if classify else ()
    return FiberComponent(K, projs, vp, over, essential, iso)


def multiple_fiber_product(maps, *, classify=True):
    """Iterated binary products, flattened; projections go to every factor."""
    if len(maps) < 2:
        raise ValueError("need at least two maps")
    # state: (map K -> X, list of projections K -> factor)
    states = [(maps[0], [identity_map(maps[0].source)])]
    for g in maps[1:]:
        nxt = []
        for over, projs in states:
            for c in fiber_product(over, g, classify=False):
                new_projs = [compose(c.proj_a, p) for p in projs] + [c.proj_b]
                nxt.append((c.over, new_projs, c.vertex_pairs))
        states = [(o, p) for o, p, _ in nxt]
    out = []
    for over, projs in states:
        K = over.source
        vp = tuple(tuple(p.vertex_map[v] for p in projs) for v in range(K.n_vertices))
        out.append(_finish(K, tuple(projs), vp, over, classify))
    out.sort(key=lambda c: min(c.vertex_pairs) if c.vertex_pairs else ())
    return out


def universal_map(p, q, f, g):
    """The map ``Z -> A ⊗ B`` induced by a commuting square ``f∘p = g∘q`` (Z connected).

    Returns ``(component index, map into that component)``; the map is unique
    because each vertex must go to the pair ``(p(z), q(z))``.
    """
    fp, gq = compose(p, f), compose(q, g)
    if fp.vertex_map != gq.vertex_map or fp.edge_map != gq.edge_map:
        raise ValueError("square does not commute")
    start = (p.vertex_map[0], q.vertex_map[0])
    for i, c in enumerate(fiber_product(f, g, classify=False)):
        if start in c.vertex_pairs:
            return i, find_morphism(fp, c.over, 0, c.vertex_pairs.index(start))
    raise ValueError("basepoint pair missing from the fiber product")


# --- automorphisms, symmetry ----------------------------------------------

def automorphisms(f):
    """Self-isomorphisms of connected ``Y`` over ``X``, as vertex permutations."""
    return [h for h in morphisms_between(f, f) if is_isomorphism(h)]


def covering_degree(h):
    """Degree if ``h`` is a covering map of connected complexes, else None."""
    K, Y = h.source, h.target
    kends, kcorners = K.incidence()
    yends, ycorners = Y.incidence()
    for v in range(K.n_vertices):
        y = h.vertex_map[v]
        if len(kends.get(v, [])) != len(yends.get(y, [])):
            return None
        if len(kcorners.get(v, [])) != len(ycorners.get(y, [])):
            return None
        if len({h.link_image(lv) for lv in kends.get(v, [])}) != len(kends.get(v, [])):
            return None
    if Y.n_vertices == 0 or K.n_vertices % Y.n_vertices:
        return None
    if len(set(h.vertex_map)) != Y.n_vertices:
        return None
    return K.n_vertices // Y.n_vertices


def index_kind(h):
    """Classify ``π1 K -> π1 Y`` for a local isometry of connected complexes.

    Returns ``("iso", 1)``, ``("finite", n)`` or ``("infinite", None)``;
    raises BoundedModeInconclusive when a square complex is neither
    covered nor simply connected.
    """
    if is_isomorphism(h):
        return ("iso", 1)
    K, Y = h.source, h.target
    k_sc, y_sc = simply_connected(K), simply_connected(Y)
    if k_sc:
        return ("finite", 1) if y_sc else ("infinite", None)
    if y_sc:
        raise AssertionError("local isometry from non-simply-connected into simply connected")
    if not K.squares and not Y.squares:
        ck, _, _ = core_of(h)
        yvs, yes = trim_indices(Y)
        yv_index = {v: i for i, v in enumerate(yvs)}
        ye_index = {e: i for i, e in enumerate(yes)}
        from .complex_core import induced_subcomplex
        from .morphisms import CombinatorialMap as _CM

        ysub, _, _, _ = induced_subcomplex(Y, yvs, yes, [])
        cmap = _CM(ck.source, ysub, tuple(yv_index[v] for v in ck.vertex_map),
                   tuple((ye_index[e], k) for e, k in ck.edge_map), ())
        deg = covering_degree(cmap)
        return ("finite", deg) if deg else ("infinite", None)
    deg = covering_degree(h)
    if deg:
        return ("finite", deg)
    raise BoundedModeInconclusive(
        "finite-index test for square complexes needs a covering map",
        source=K.summary(), target=Y.summary(),
    )


@dataclass
class SymmetryReport:
    symmetric: bool
    components: list
    witness: Optional[dict] = None

    def to_dict(self):
        out = {"symmetric": self.symmetric, "components": self.components}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def is_symmetric(f):
    comps = fiber_product(f, f)
    rows, witness = [], None
    for i, c in enumerate(comps):
        if all(c.projection_iso):
            kind = "isomorphic"
        else:
            kinds = [index_kind(p)[0] for p in c.projections]
            if "finite" in kinds or "iso" in kinds:
                kind = "finite_index"
            else:
                kind = "infinite_index"
        rows.append({"component": i, "vertices": [list(p) for p in c.vertex_pairs], "kind": kind})
        if kind == "finite_index" and witness is None:
            witness = {"component": i, "vertices": [list(p) for p in c.vertex_pairs],
                       "summary": c.complex.summary()}
    return SymmetryReport(witness is None, rows, witness)


# --- principal components and stability ----------------------------------

def _dedupe(maps):
    out, seen = [], set()
    for m in maps:
        k = iso_key(m)
        if k not in seen:
            seen.add(k)
            out.append(m)
    return out


def _factor_through(f, g):
    """A map ``h`` with ``g∘h = f`` (Y connected), or None."""
    for z in range(g.source.n_vertices):
        h = find_morphism(f, g, 0, z)
        if h is not None:
            return h
    return None


def product_pool(family, depth):
    """Essential components of multiple fiber products of length <= depth.

    Returns ``(pool, growing)`` where ``growing`` says the last level
    still produced new isomorphism classes.
    """
    pool = _dedupe([m for m in family])
    keys = {iso_key(m) for m in pool}
    level = list(pool)
    growing = False
    for _ in range(1, depth):
        new = []
        for z in level:
            for y in family:
                for c in fiber_product(z, y):
                    if not c.essential:
                        continue
                    k = iso_key(c.over)
                    if k not in keys:
                        keys.add(k)
                        new.append(c.over)
        growing = bool(new)
        if not new:
            break
        pool.extend(new)
        level = new
    return pool, growing


@dataclass
class PrincipalResult:
    principal: list
    pool_size: int
    certified: bool
    rows: list

    def to_dict(self):
        return {
            "principal": [m.source.to_dict() for m in self.principal],
            "pool_size": self.pool_size,
            "certified_to_budget": self.certified,
            "rows": self.rows,
        }


def principal_components(family, depth=3):
    pool, growing = product_pool(family, depth)
    if growing:
        raise BudgetExceeded(
            "product pool still growing at depth budget",
            depth=depth, frontier=[m.source.summary() for m in pool[-3:]],
        )
    principal, rows = [], []
    for i, z in enumerate(pool):
        failure = None
        for j, w in enumerate(pool):
            for c in fiber_product(z, w):
                kind = index_kind(c.proj_a)[0]
                if kind == "finite":
                    failure = {"against": j, "vertices": [list(p) for p in c.vertex_pairs]}
                    break
            if failure:
                break
        sym = is_symmetric(z).symmetric
        rows.append({"candidate": i, "summary": z.source.summary(), "principal": failure is None,
                     "symmetric": sym, "witness": failure})
        if failure is None:
            principal.append(z)
    return PrincipalResult(principal, len(pool), True, rows)


def hausdorff_to_image(K, h):
    """Max distance from a vertex of ``K`` to the image of ``h: Y_k -> K``."""
    image = set(h.vertex_map)
    adj = K.neighbours()
    dist = {v: 0 for v in image}
    frontier = list(image)
    while frontier:
        nxt = []
        for v in frontier:
            for w in adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    nxt.append(w)
        frontier = nxt
    return max(dist.values()) if dist else 0


@dataclass
class StabilityReport:
    stable: bool
    violations: list
    kappa: Optional[int]

    def to_dict(self):
        return {"stable": self.stable, "violations": self.violations, "kappa": self.kappa}


def check_stable(family):
    violations = []
    for i, y in enumerate(family):
        rep = is_symmetric(y)
        if not rep.symmetric:
            violations.append({"clause": 1, "pair": [i, i], "witness": rep.witness})
    for i, yi in enumerate(family):
        for j, yj in enumerate(family):
            if i == j:
                continue
            h = _factor_through(yi, yj)
            if h is not None and index_kind(h)[0] == "finite":
                violations.append({"clause": 2, "pair": [i, j],
                                   "witness": {"vertex_map": list(h.vertex_map)}})
    kappa = 0
    for i, yi in enumerate(family):
        for j in range(i, len(family)):
            yj = family[j]
            for c in fiber_product(yi, yj):
                if not c.essential or any(c.projection_iso):
                    continue
                best = None
                for k, yk in enumerate(family):
                    h = _factor_through(yk, c.over)
                    if h is not None and index_kind(h)[0] in ("finite", "iso"):
                        d = hausdorff_to_image(c.complex, h)
                        if best is None or d < best:
                            best = d
                if best is None:
                    violations.append({"clause": 3, "pair": [i, j],
                                       "component": [list(p) for p in c.vertex_pairs]})
                else:
                    kappa = max(kappa, best)
    return StabilityReport(not violations, violations, None if violations else kappa)
