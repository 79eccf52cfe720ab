"""Height, depth, big-trees and the stature closure for graphs of graphs."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .cores import SubgroupRep, canonical_form, conjugacy_key, core_of, form_to_key, path_word
from .errors import BoundedModeInconclusive, ClassBudgetExceeded
from .fiber_product import fiber_product, index_kind
from .morphisms import (
    CombinatorialMap,
    compose,
    find_morphism,
    identity_map,
    is_isomorphism,
    morphisms_between,
)
from .parallel import parallel_map


def _require_graph(X, what="vertex space"):
    if X.squares:
        raise BoundedModeInconclusive(f"{what} is 2-dimensional; exact mode needs graphs")


def _core_rep(f, basepoint=None):
    core, vs, _ = core_of(f, keep=(basepoint,) if basepoint is not None else ())
    bp = vs.index(basepoint) if basepoint is not None and basepoint in vs else None
    return SubgroupRep(core, bp)


# --- intersections ---------------------------------------------------------

def intersect_reps(A, B, offset=None):
    """Core of the component of ``A ⊗ B`` through ``offset = (a, b)``.

    The default offset pairs the two basepoints, giving the intersection
    of the based subgroups themselves.
    """
    _require_graph(A.map.target)
    if offset is None:
        offset = (A.basepoint or 0, B.basepoint or 0)
    offset = tuple(offset)
    for c in fiber_product(A.map, B.map):
        if offset in c.vertex_pairs:
            return _core_rep(c.over, c.vertex_pairs.index(offset))
    raise ValueError("offset does not lie over a common vertex")


def essential_intersections(A, B):
    """Unpointed cores of every infinite intersection ``A ∩ B^g``."""
    out = []
    for c in fiber_product(A.map, B.map):
        if c.essential:
            out.append(_core_rep(c.over))
    return out


def contained_in(A, B):
    """Is the class of ``A`` conjugate into the class of ``B``? (unpointed cores)"""
    a = core_of(A.map)[0]
    b = core_of(B.map)[0]
    if a.source.n_vertices == 0:
        return True
    for z in range(b.source.n_vertices):
        h = find_morphism(a, b, 0, z)
        if h is not None:
            return h
    return None


# --- height ----------------------------------------------------------------

@dataclass
class HeightResult:
    verdict: str
    height: Optional[int]
    budget: int
    witness: Optional[list] = None
    level_counts: list = field(default_factory=list)
    witness_words: list = field(default_factory=list)

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "height": self.height,
            "budget": self.budget,
            "witness_cosets": self.witness,
            "witness_words": self.witness_words,
            "level_counts": self.level_counts,
        }


def _coordinate_key(over, coords):
    """Canonical form of a component together with its unordered coordinate sets."""
    labels = [tuple(sorted(c)) for c in coords]
    return form_to_key(canonical_form(over, vertex_labels=labels))


def height(f, budget=6):
    """Largest h with an essential component of ``Y^{⊗h}`` at pairwise distinct coordinates."""
    _require_graph(f.target, "target")
    rep = _core_rep(f)
    y = rep.map
    if rep.is_trivial():
        return HeightResult("finite", 0, budget, [], [0])
    # a level entry: (map K -> X, per-vertex coordinate tuples)
    level = [(y, [(v,) for v in range(y.source.n_vertices)])]
    counts = [1]
    best = (1, level[0][1][0])
    for h in range(2, budget + 1):
        nxt, seen = [], set()
        for over, coords in level:
            for c in fiber_product(over, y):
                if not c.essential:
                    continue
                new = [coords[a] + (b,) for a, b in c.vertex_pairs]
                if any(len(set(t)) < len(t) for t in new[:1]):
                    continue
                key = _coordinate_key(c.over, new)
                if key in seen:
                    continue
                seen.add(key)
                nxt.append((c.over, new))
        counts.append(len(nxt))
        if not nxt:
            return HeightResult("finite", best[0], budget, list(best[1]), counts,
                                _coset_words(y, best[1]))
        best = (h, nxt[0][1][0])
        level = nxt
    return HeightResult("exceeded-budget", None, budget, list(best[1]), counts,
                        _coset_words(y, best[1]))


def _coset_words(y, coords):
    """Closed words ``g_i`` with the i-th coordinate reached from the first along ``g_i``."""
    return [path_word(y, coords[0], c) for c in coords]


# --- closures and depth ----------------------------------------------------

def intersection_closure(reps, rounds):
    """Conjugacy classes of infinite intersections of conjugates, up to ``rounds`` sweeps.

    Returns ``(classes, stable)`` with classes in discovery order.
    """
    classes = {}
    for r in reps:
        if not r.is_trivial():
            core = _core_rep(r.map)
            classes.setdefault(core.key(), core)
    done = set()
    for _ in range(rounds):
        keys = list(classes)
        added = False
        for i, ka in enumerate(keys):
            for kb in keys[i:]:
                if (ka, kb) in done:
                    continue
                done.add((ka, kb))
                for k in essential_intersections(classes[ka], classes[kb]):
                    if k.key() not in classes:
                        classes[k.key()] = k
                        added = True
        if not added:
            return list(classes.values()), True
    # one more sweep decides whether the last round was already closed
    keys = list(classes)
    for i, ka in enumerate(keys):
        for kb in keys[i:]:
            if (ka, kb) in done:
                continue
            for k in essential_intersections(classes[ka], classes[kb]):
                if k.key() not in classes:
                    return list(classes.values()), False
    return list(classes.values()), True


def containment_order(classes, require_infinite_index=False):
    """Pairs (i, j) with class i properly contained (up to conjugacy) in class j."""
    edges = []
    keys = [c.key() for c in classes]
    for i, a in enumerate(classes):
        for j, b in enumerate(classes):
            if i == j or keys[i] == keys[j]:
                continue
            h = contained_in(a, b)
            if h is None:
                continue
            if require_infinite_index:
                kind, _ = index_kind(h)
                if kind != "infinite":
                    continue
            edges.append((i, j))
    return edges


def _longest_chain(n, edges):
    succ = {i: [] for i in range(n)}
    for i, j in edges:
        succ[i].append(j)
    memo = {}

    def longest(i):
        if i not in memo:
            best = [i]
            for j in sorted(succ[i]):
                cand = [i] + longest(j)
                if len(cand) > len(best):
                    best = cand
            memo[i] = best
        return memo[i]

    chain = []
    for i in range(n):
        c = longest(i)
        if len(c) > len(chain):
            chain = c
    return chain


@dataclass
class DepthResult:
    verdict: str
    depth: int
    variant: str
    certified: bool
    chain: list
    class_count: int
    budget: int

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "depth": self.depth,
            "variant": self.variant,
            "certified": self.certified,
            "chain": self.chain,
            "class_count": self.class_count,
            "budget": self.budget,
        }


def depth(family, variant="commensurable", budget=3):
    """Longest strictly increasing chain of infinite intersections of conjugates."""
    for r in family:
        _require_graph(r.map.target)
    classes, stable = intersection_closure(family, budget)
    edges = containment_order(classes, require_infinite_index=(variant == "plain"))
    chain = _longest_chain(len(classes), edges)
    described = [{"key": classes[i].key(), "summary": classes[i].complex.summary(),
                  "rank": classes[i].rank()} for i in chain]
    return DepthResult("finite" if stable else "exceeded-budget", len(chain), variant, stable,
                       described, len(classes), budget)


# --- stature ---------------------------------------------------------------

@dataclass
class TransectionClass:
    vertex: str
    key: str
    rep: SubgroupRep
    witness: dict
    lowest: bool = False

    def to_dict(self):
        return {
            "vertex": self.vertex,
            "key": self.key,
            "rank": self.rep.rank(),
            "summary": self.rep.complex.summary(),
            "lowest": self.lowest,
            "witness": self.witness,
        }


@dataclass
class StatureResult:
    verdict: str
    budgets: dict
    classes: list
    counts: list

    def by_vertex(self):
        out = {}
        for c in self.classes:
            out.setdefault(c.vertex, []).append(c)
        return out

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "budgets": self.budgets,
            "class_count": len(self.classes),
            "class_counts_by_round": self.counts,
            "classes": [c.to_dict() for c in self.classes],
        }


def _ends_at(G, v):
    """(edge, map at v, map at other end, other vertex, end name) for every edge end at ``v``."""
    out = []
    for ge in G.edges:
        if ge.iota == v:
            out.append((ge, ge.iota_map, ge.tau_map, ge.tau, "iota"))
        if ge.tau == v:
            out.append((ge, ge.tau_map, ge.iota_map, ge.iota, "tau"))
    return out


def _intersect_task(args):
    a, b = args
    return [k.map for k in essential_intersections(SubgroupRep(a), SubgroupRep(b))]


def _transfer_task(args):
    a, here, there = args
    out = []
    for c in fiber_product(a, here):
        if c.essential:
            out.append(_core_rep(compose(c.proj_b, there)).map)
    return out


def stature(G, depth=3, radius=3, jobs=None):
    """Closure of edge-group images under intersections and transfers.

    Each round runs up to ``depth`` intersection sweeps per vertex group and
    then one transfer sweep across every edge; at most ``radius`` rounds.
    """
    for X in G.vertex_spaces:
        _require_graph(X)
    store = [dict() for _ in G.vertex_names]

    def add(v, fmap, witness):
        rep = _core_rep(fmap)
        if rep.is_trivial():
            return False
        key = rep.key()
        if key in store[v]:
            return False
        store[v][key] = TransectionClass(G.vertex_names[v], key, rep, witness)
        return True

    for ge in G.edges:
        add(ge.iota, ge.iota_map, {"op": "seed", "edge": ge.name, "end": "iota"})
        add(ge.tau, ge.tau_map, {"op": "seed", "edge": ge.name, "end": "tau"})
    counts = [sum(len(s) for s in store)]
    done_pairs, done_transfers = set(), set()
    verdict = "exceeded-budget"
    for _ in range(radius):
        grew = False
        for _sweep in range(depth):
            tasks, labels = [], []
            for v, s in enumerate(store):
                keys = list(s)
                for i, ka in enumerate(keys):
                    for kb in keys[i:]:
                        if (v, ka, kb) not in done_pairs:
                            done_pairs.add((v, ka, kb))
                            tasks.append((s[ka].rep.map, s[kb].rep.map))
                            labels.append((v, ka, kb))
            if not tasks:
                break
            added = False
            for (v, ka, kb), maps in zip(labels, parallel_map(_intersect_task, tasks, jobs)):
                for m in maps:
                    added |= add(v, m, {"op": "intersect", "of": [ka, kb]})
            grew |= added
            if not added:
                break
        tasks, labels = [], []
        for v, s in enumerate(store):
            for key, cls in list(s.items()):
                for ge, here, there, w, end in _ends_at(G, v):
                    tag = (v, key, ge.name, end)
                    if tag in done_transfers:
                        continue
                    done_transfers.add(tag)
                    tasks.append((cls.rep.map, here, there))
                    labels.append((w, key, ge.name, end))
        for (w, key, name, end), maps in zip(labels, parallel_map(_transfer_task, tasks, jobs)):
            for m in maps:
                grew |= add(w, m, {"op": "transfer", "from": key, "edge": name, "from_end": end})
        counts.append(sum(len(s) for s in store))
        if not grew:
            verdict = "finite"
            break
    classes = []
    for v, s in enumerate(store):
        reps = [s[k] for k in sorted(s)]
        order = containment_order([c.rep for c in reps])
        contains_smaller = {j for i, j in order}
        for i, c in enumerate(reps):
            c.lowest = i not in contains_smaller
        classes.extend(reps)
    return StatureResult(verdict, {"depth": depth, "radius": radius}, classes, counts)


# --- big-trees -------------------------------------------------------------

@dataclass
class BigTreeRecord:
    start_edge: str
    stabilizer: SubgroupRep
    status: str
    radius: int
    tree_edges: list
    tree_vertices: list

    def to_dict(self):
        return {
            "start_edge": self.start_edge,
            "stabilizer_key": self.stabilizer.key(),
            "stabilizer_rank": self.stabilizer.rank(),
            "status": self.status,
            "radius_explored": self.radius,
            "edge_count": len(self.tree_edges),
            "tree_edges": self.tree_edges,
            "tree_vertices": self.tree_vertices,
        }


def grow_big_tree(G, ge, radius):
    """Explore Fix(Stab(e)) from a lift of Γ-edge ``ge`` out to ``radius`` edges away.

    Returns the record and the Γ-edges met with stabilizer equal to the start's.
    """
    base = _core_rep(ge.iota_map)
    if base.is_trivial():
        return None, set()
    kcore = base.map            # core(K) -> X_iota
    # the start edge: K lifted to X_e by the core inclusion
    lift0 = core_of(identity_map(ge.space))[0]
    same_stab = {ge.name}
    tree_edges = [{"id": 0, "edge": ge.name, "from": 0, "to": 1, "depth": 0}]
    tree_vertices = [
        {"id": 0, "vertex": G.vertex_names[ge.iota], "key": conjugacy_key(kcore)},
        {"id": 1, "vertex": G.vertex_names[ge.tau], "key": conjugacy_key(compose(lift0, ge.tau_map))},
    ]
    # queue items: (tree vertex, Γ vertex, K -> X_v, incoming (edge name, end, lift vertex map), depth)
    queue = deque([
        (0, ge.iota, kcore, (ge.name, "iota", lift0.vertex_map), 0),
        (1, ge.tau, compose(lift0, ge.tau_map), (ge.name, "tau", lift0.vertex_map), 0),
    ])
    frontier_open = False
    while queue:
        tv, v, kmap, incoming, d = queue.popleft()
        for e2, here, there, w, end in _ends_at(G, v):
            for h in morphisms_between(kmap, here):
                if (e2.name, end, h.vertex_map) == incoming:
                    continue
                if d + 1 > radius:
                    frontier_open = True
                    continue
                if is_isomorphism(_onto_core(h, e2)):
                    same_stab.add(e2.name)
                nid = len(tree_vertices)
                new_map = compose(h, there)
                tree_vertices.append({"id": nid, "vertex": G.vertex_names[w],
                                      "key": conjugacy_key(new_map)})
                tree_edges.append({"id": len(tree_edges), "edge": e2.name, "from": tv, "to": nid,
                                   "depth": d + 1})
                other = "tau" if end == "iota" else "iota"
                queue.append((nid, w, new_map, (e2.name, other, h.vertex_map), d + 1))
    status = "frontier-open" if frontier_open else "maximal-certified"
    return BigTreeRecord(ge.name, base, status, radius, tree_edges, tree_vertices), same_stab


def _onto_core(h, ge):
    """``h`` viewed as a map onto the core of the edge space."""
    core, vs, es = core_of(identity_map(ge.space))
    vi = {v: i for i, v in enumerate(vs)}
    ei = {e: i for i, e in enumerate(es)}
    if not all(v in vi for v in h.vertex_map) or not all(e in ei for e, _ in h.edge_map):
        return h
    return CombinatorialMap(h.source, core.source, tuple(vi[v] for v in h.vertex_map),
                            tuple((ei[e], k) for e, k in h.edge_map), ())


def enumerate_big_trees(G, radius=3, class_budget=64):
    for X in G.vertex_spaces:
        _require_graph(X)
    records, covered = [], set()
    for ge in G.edges:
        if ge.name in covered:
            continue
        rec, same = grow_big_tree(G, ge, radius)
        if rec is None:
            continue
        covered |= same
        records.append(rec)
        if len(records) > class_budget:
            raise ClassBudgetExceeded("too many big-tree orbits", records=[r.to_dict() for r in records])
    return records
