"""Core graphs: Stallings folding, trimming, and canonical keys up to conjugacy."""

from __future__ import annotations

import json
import re
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Optional

from .complex_core import HEAD, TAIL, CubeComplex, induced_subcomplex
from .errors import MalformedInput
from .morphisms import CombinatorialMap, make_map, restrict

EMPTY_KEY = "[]"


def trim_indices(C, keep=()):
    """Vertices/edges surviving iterated removal of valence <= 1 vertices.

    Only meaningful for graphs. Vertices in ``keep`` are never removed.
    """
    alive_v = set(range(C.n_vertices))
    alive_e = set(range(len(C.edges)))
    deg = defaultdict(int)
    inc = defaultdict(list)
    for e, (t, h) in enumerate(C.edges):
        deg[t] += 1
        deg[h] += 1
        inc[t].append(e)
        inc[h].append(e)
    queue = deque(v for v in sorted(alive_v) if deg[v] <= 1 and v not in keep)
    while queue:
        v = queue.popleft()
        if v not in alive_v:
            continue
        alive_v.discard(v)
        for e in inc[v]:
            if e in alive_e:
                alive_e.discard(e)
                t, h = C.edges[e]
                for w in (t, h):
                    if w != v:
                        deg[w] -= 1
                        if w in alive_v and deg[w] <= 1 and w not in keep:
                            queue.append(w)
    return sorted(alive_v), sorted(alive_e)


def core_of(f, keep=()):
    """Restrict a graph immersion ``f`` to its core; returns (map, vertex ids, edge ids)."""
    C = f.source
    if C.squares:
        return f, list(range(C.n_vertices)), list(range(len(C.edges)))
    vs, es = trim_indices(C, keep)
    sub, vs, es, ss = induced_subcomplex(C, vs, es, [])
    return restrict(f, sub, vs, es, ss), vs, es


def has_cycle(C):
    """True iff some component of the graph ``C`` carries a cycle."""
    return bool(trim_indices(C)[1]) if not C.squares else True


# --- folding ---------------------------------------------------------------

def fold_graph(X, n_vertices, edges, vertex_image):
    """Stallings-fold a graph mapped to ``X``.

    ``edges`` are ``(u, v, xe, forward)``: the edge runs u -> v and maps to
    X-edge ``xe`` traversed forward or backward. Returns ``(C, f, vmap)``
    where ``vmap`` sends old vertices to folded ones.
    """
    parent = list(range(n_vertices))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    # normalise to X orientation: (tail, head, xe)
    live = []
    for u, v, xe, fwd in edges:
        live.append((u, v, xe) if fwd else (v, u, xe))
    changed = True
    while changed:
        changed = False
        seen = {}
        kept = []
        for t, h, xe in live:
            t, h = find(t), find(h)
            k_out, k_in = (t, xe, TAIL), (h, xe, HEAD)
            if k_out in seen or k_in in seen:
                # drop this edge and identify the far ends; later rounds
                # pick up any collision this creates
                ot, oh = seen[k_out] if k_out in seen else seen[k_in]
                a, b = (find(h), find(oh)) if k_out in seen else (find(t), find(ot))
                if a != b:
                    parent[max(a, b)] = min(a, b)
                    changed = True
                continue
            seen[k_out] = (t, h)
            seen[k_in] = (t, h)
            kept.append((t, h, xe))
        live = kept
    roots = sorted({find(v) for v in range(n_vertices)})
    rid = {r: i for i, r in enumerate(roots)}
    final = sorted({(rid[find(t)], rid[find(h)], xe) for t, h, xe in live})
    vimg = [None] * len(roots)
    for v in range(n_vertices):
        vimg[rid[find(v)]] = vertex_image[v]
    labels = tuple(X.label(xe) for _, _, xe in final)
    C = CubeComplex(len(roots), tuple((t, h) for t, h, _ in final), (), labels)
    f = make_map(C, X, vimg, [(xe, True) for _, _, xe in final], ())
    return C, f, [rid[find(v)] for v in range(n_vertices)]


def parse_word(X, word):
    """Parse ``"a b^-1 a"`` / ``"abA"`` (capital = inverse) into (edge, forward) steps."""
    by_label = {}
    for e in range(len(X.edges)):
        by_label.setdefault(X.label(e), e)
    if isinstance(word, (list, tuple)):
        return [(int(e), bool(fw)) for e, fw in word]
    text = word.replace("*", " ").strip()
    if " " in text:
        tokens = text.split()
    else:
        tokens = re.findall(r"[A-Za-z](?:\^-?\d+)?", text)
        if "".join(tokens) != text:
            raise MalformedInput(f"cannot parse word {word!r}")
    steps = []
    for tok in tokens:
        power = 1
        if "^" in tok:
            tok, p = tok.split("^", 1)
            power = int(p)
        fwd = True
        if tok not in by_label and tok.lower() in by_label and tok != tok.lower():
            tok, fwd = tok.lower(), False
        if tok not in by_label:
            raise MalformedInput(f"unknown edge label {tok!r} in word")
        if power < 0:
            fwd, power = not fwd, -power
        steps.extend([(by_label[tok], fwd)] * power)
    return steps


def path_word(f, start, end):
    """Label word of a shortest path from ``start`` to ``end`` in ``f.source``, read in the target."""
    X, C = f.target, f.source
    prev = {start: None}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        if v == end:
            break
        for e, (t, h) in enumerate(C.edges):
            for a, b, fwd in ((t, h, True), (h, t, False)):
                if a == v and b not in prev:
                    prev[b] = (v, e, fwd)
                    queue.append(b)
    if end not in prev:
        return None
    steps = []
    v = end
    while prev[v] is not None:
        u, e, fwd = prev[v]
        te, keep = f.edge_map[e]
        label = X.label(te)
        steps.append(label if fwd == keep else f"{label}^-1")
        v = u
    return " ".join(reversed(steps))


@dataclass
class SubgroupRep:
    """A based immersion into a graph, representing a subgroup of its π1."""

    map: CombinatorialMap
    basepoint: Optional[int] = 0

    @property
    def complex(self):
        return self.map.source

    def is_trivial(self):
        return not has_cycle(self.map.source)

    def unpointed(self):
        return SubgroupRep(core_of(self.map)[0], None)

    def key(self):
        return conjugacy_key(self.map)

    def rank(self):
        C = core_of(self.map)[0].source
        return len(C.edges) - C.n_vertices + 1 if C.n_vertices else 0


def rep_from_words(X, words, base=0):
    """Folded core of the subgroup generated by closed paths at ``base``."""
    nv, edges, vimg = 1, [], [base]
    for w in words:
        steps = parse_word(X, w)
        cur, xv = 0, base
        for i, (e, fwd) in enumerate(steps):
            t, h = X.edges[e]
            if (t if fwd else h) != xv:
                raise MalformedInput(f"word {w!r} is not a path in the complex")
            xv = h if fwd else t
            if i == len(steps) - 1:
                if xv != base:
                    raise MalformedInput(f"word {w!r} is not closed")
                nxt = 0
            else:
                nxt = nv
                nv += 1
                vimg.append(xv)
            edges.append((cur, nxt, e, fwd))
            cur = nxt
    C, f, vmap = fold_graph(X, nv, edges, vimg)
    return SubgroupRep(f, vmap[0])


# --- canonical keys --------------------------------------------------------

def _traversal(f, start, ordered):
    """Relabel cells by BFS from ``start``; link order is fixed by the images."""
    Y = f.source
    order = {start: 0}
    eorder = {}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for lv in ordered[v]:
            e, end = lv
            if e not in eorder:
                eorder[e] = len(eorder)
            w = Y.edges[e][1 - end]
            if w not in order:
                order[w] = len(order)
                queue.append(w)
    return order, eorder


def _serialise(f, order, eorder, vertex_labels=None):
    Y = f.source
    verts = [None] * len(order)
    for v, i in order.items():
        verts[i] = f.vertex_map[v] if vertex_labels is None else (f.vertex_map[v], vertex_labels[v])
    edges = [None] * len(eorder)
    for e, i in eorder.items():
        t, h = Y.edges[e]
        xe, keep = f.edge_map[e]
        edges[i] = (order[t], order[h], xe) if keep else (order[h], order[t], xe)
    squares = sorted(
        (f.square_map[s][0], tuple(sorted(eorder[e] for e, _ in sq)))
        for s, sq in enumerate(Y.squares)
    )
    return (tuple(verts), tuple(edges), tuple(squares))


def canonical_form(f, start=None, vertex_labels=None):
    """Minimal serialisation of a connected immersion over all start vertices.

    Two locally injective maps from connected complexes get equal forms
    iff they are isomorphic over the target. With ``start`` fixed the
    form is a based invariant instead. ``vertex_labels`` adds per-vertex
    data that isomorphisms must also respect.
    """
    Y = f.source
    if Y.n_vertices == 0:
        return ()
    yends, _ = Y.incidence()
    ordered = {v: sorted(yends.get(v, []), key=f.link_image) for v in range(Y.n_vertices)}
    starts = [start] if start is not None else range(Y.n_vertices)
    best = None
    for s in starts:
        form = _serialise(f, *_traversal(f, s, ordered), vertex_labels)
        if best is None or form < best:
            best = form
    return best


def form_to_key(form):
    return json.dumps(form, separators=(",", ":"))


def conjugacy_key(f):
    """Canonical string of the unpointed core; the trivial subgroup gets ``EMPTY_KEY``."""
    core, _, _ = core_of(f)
    if core.source.n_vertices == 0:
        return EMPTY_KEY
    return form_to_key(canonical_form(core))


def iso_key(f):
    """Canonical string of a connected map up to isomorphism over the target."""
    return form_to_key(canonical_form(f))
