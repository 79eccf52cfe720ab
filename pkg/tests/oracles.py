"""Independent reference implementations used to cross-check the engines.

Nothing here calls into cubetop's algorithms; the oracles only read the
plain data of complexes and maps (vertex counts, edge tuples, squares,
vertex_map and edge_map) and recompute answers from the definitions.
"""

import itertools
import math
from collections import defaultdict

import networkx as nx
from networkx.algorithms.isomorphism import categorical_multiedge_match, categorical_node_match

TAIL, HEAD = 0, 1


# --- links and the flag condition -----------------------------------------

def _corners(X):
    """(vertex, link vertex, link vertex) for every corner of every square."""
    out = []
    for sq in X.squares:
        for k in range(4):
            (ep, fp), (ec, fc) = sq[k - 1], sq[k]
            arrive = (ep, HEAD if fp else TAIL)
            leave = (ec, TAIL if fc else HEAD)
            v = X.edges[ec][0] if fc else X.edges[ec][1]
            out.append((v, arrive, leave))
    return out


def npc_oracle(X):
    """Set of (vertex, kind) failures by brute-force enumeration of link simplices."""
    links = defaultdict(list)
    verts = defaultdict(set)
    for e, (t, h) in enumerate(X.edges):
        verts[t].add((e, TAIL))
        verts[h].add((e, HEAD))
    for v, a, b in _corners(X):
        links[v].append((a, b))
    bad = set()
    for v in range(X.n_vertices):
        seen = defaultdict(int)
        for a, b in links[v]:
            if a == b:
                bad.add((v, "non_simplicial"))
            seen[frozenset((a, b))] += 1
        if any(c > 1 for c in seen.values()):
            bad.add((v, "non_simplicial"))
        adjacent = {p for p in seen if len(p) == 2}
        # squares contribute no 2-simplices, so any pairwise adjacent triple is empty
        for tri in itertools.combinations(sorted(verts[v]), 3):
            if all(frozenset(p) in adjacent for p in itertools.combinations(tri, 2)):
                bad.add((v, "non_flag"))
                break
    return bad


# --- wall pathologies -------------------------------------------------------

def wall_oracle(X):
    """Walls and pathology kinds from the two-sheeted edge graph.

    Node (e, b) asserts "the tail of e lies on side b"; opposite sides of a
    square force these assertions together.  A wall is one-sided exactly when
    some (e, 0) and (e, 1) end up in one component.
    """
    H = nx.Graph()
    for e in range(len(X.edges)):
        H.add_nodes_from([(e, 0), (e, 1)])
    for sq in X.squares:
        for i, j in ((0, 2), (1, 3)):
            (e0, o0), (e2, o2) = sq[i], sq[j]
            flip = 0 if o0 != o2 else 1
            for b in (0, 1):
                H.add_edge((e0, b), (e2, b ^ flip))
    comp = {}
    for cid, nodes in enumerate(nx.connected_components(H)):
        for n in nodes:
            comp[n] = cid
    groups = defaultdict(set)
    for e in range(len(X.edges)):
        groups[frozenset((comp[(e, 0)], comp[(e, 1)]))].add(e)
    walls = sorted((sorted(es) for es in groups.values()), key=lambda es: es[0])
    wall_of = {e: w for w, es in enumerate(walls) for e in es}
    two_sided = [comp[(es[0], 0)] != comp[(es[0], 1)] for es in walls]
    tail_side = {}
    for w, es in enumerate(walls):
        if two_sided[w]:
            ref = comp[(es[0], 0)]
            for e in es:
                tail_side[e] = 0 if comp[(e, 0)] == ref else 1
    kinds = set()
    if not all(two_sided):
        kinds.add("one_sided")
    for sq in X.squares:
        if wall_of[sq[0][0]] == wall_of[sq[1][0]]:
            kinds.add("self_intersection")
    corner_set = {(v, frozenset((a, b))) for v, a, b in _corners(X)}
    crossing = {frozenset((wall_of[sq[0][0]], wall_of[sq[1][0]])) for sq in X.squares}
    at = defaultdict(list)
    for e, (t, h) in enumerate(X.edges):
        at[t].append((e, TAIL))
        at[h].append((e, HEAD))
    for v, ends in at.items():
        for a, b in itertools.combinations(ends, 2):
            if a[0] == b[0] or (v, frozenset((a, b))) in corner_set:
                continue
            wa, wb = wall_of[a[0]], wall_of[b[0]]
            if wa == wb:
                if not two_sided[wa] or tail_side[a[0]] ^ a[1] == tail_side[b[0]] ^ b[1]:
                    kinds.add("self_osculation")
            elif frozenset((wa, wb)) in crossing:
                kinds.add("inter_osculation")
    return walls, kinds


# --- labelled graphs over a base graph --------------------------------------

class LGraph:
    """Vertices carry an image vertex, edges carry (tail, head, label)."""

    def __init__(self, img, edges, base=None):
        self.img = list(img)
        self.edges = list(edges)
        self.base = base

    @classmethod
    def from_map(cls, f):
        edges = []
        for e, (t, h) in enumerate(f.source.edges):
            lab, keep = f.edge_map[e]
            edges.append((t, h, lab) if keep else (h, t, lab))
        return cls(f.vertex_map, edges)

    def nx(self):
        G = nx.MultiDiGraph()
        for v, x in enumerate(self.img):
            G.add_node(v, img=x)
        for t, h, lab in self.edges:
            G.add_edge(t, h, label=lab)
        return G


def fold(g):
    parent = list(range(len(g.img)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    edges = set(g.edges)
    while True:
        out, inc = {}, {}
        merge = None
        for t, h, lab in edges:
            for table, key, other in ((out, (t, lab), h), (inc, (h, lab), t)):
                if key in table and table[key] != other:
                    merge = (table[key], other)
                    break
                table[key] = other
            if merge:
                break
        if not merge:
            break
        a, b = merge
        parent[find(b)] = find(a)
        edges = {(find(t), find(h), lab) for t, h, lab in edges}
    roots = sorted({find(v) for v in range(len(g.img))})
    idx = {r: i for i, r in enumerate(roots)}
    base = idx[find(g.base)] if g.base is not None else None
    return LGraph([g.img[r] for r in roots],
                  sorted((idx[t], idx[h], lab) for t, h, lab in edges), base)


def trim(g):
    """Prune hanging trees, keeping the basepoint if there is one."""
    alive = set(range(len(g.img)))
    edges = list(g.edges)
    while True:
        deg = defaultdict(int)
        for t, h, _ in edges:
            deg[t] += 1
            deg[h] += 1
        drop = {v for v in alive if deg[v] <= 1 and v != g.base}
        if not drop:
            break
        alive -= drop
        edges = [x for x in edges if x[0] in alive and x[1] in alive]
    order = sorted(alive)
    idx = {v: i for i, v in enumerate(order)}
    base = idx.get(g.base) if g.base is not None else None
    return LGraph([g.img[v] for v in order], [(idx[t], idx[h], l) for t, h, l in edges], base)


def product_components(A, B):
    """Connected components of the fibre product, each as (LGraph, vertex pairs)."""
    pairs = [(a, b) for a in range(len(A.img)) for b in range(len(B.img)) if A.img[a] == B.img[b]]
    edges = [((ta, tb), (ha, hb), la) for ta, ha, la in A.edges for tb, hb, lb in B.edges
             if la == lb]
    G = nx.MultiDiGraph()
    G.add_nodes_from(pairs)
    for t, h, lab in edges:
        G.add_edge(t, h, label=lab)
    out = []
    for nodes in sorted(nx.weakly_connected_components(G), key=min):
        order = sorted(nodes)
        idx = {p: i for i, p in enumerate(order)}
        es = [(idx[t], idx[h], d["label"]) for t, h, d in G.subgraph(nodes).edges(data=True)]
        out.append((LGraph([A.img[p[0]] for p in order], es), order))
    return out


def has_cycle(g):
    return len(g.edges) >= len(g.img) and len(g.img) > 0


def same_class(g, h):
    if len(g.img) != len(h.img) or len(g.edges) != len(h.edges):
        return False
    return nx.is_isomorphic(g.nx(), h.nx(), node_match=categorical_node_match("img", None),
                            edge_match=categorical_multiedge_match("label", None))


# --- words in the free group on the rose -------------------------------------

def reduce_word(w):
    out = []
    for ch in w:
        if out and out[-1] == ch.swapcase():
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def inverse(w):
    return "".join(ch.swapcase() for ch in reversed(w))


def words_graph(gens):
    """Folded based graph over the rose (a = edge 0, b = edge 1) for a list of words."""
    img, edges = [0], []
    for w in gens:
        w = reduce_word(w)
        if not w:
            continue
        cur = 0
        for i, ch in enumerate(w):
            nxt = 0 if i == len(w) - 1 else len(img)
            if nxt:
                img.append(0)
            lab = "ab".index(ch.lower())
            edges.append((cur, nxt, lab) if ch.islower() else (nxt, cur, lab))
            cur = nxt
    return trim(fold(LGraph(img, edges, 0)))


def reads_to_base(g, w):
    v = g.base
    for ch in w:
        lab = "ab".index(ch.lower())
        step = [h for t, h, l in g.edges if t == v and l == lab] if ch.islower() \
            else [t for t, h, l in g.edges if h == v and l == lab]
        if not step:
            return False
        v = step[0]
    return v == g.base


def reduced_words(length):
    out = [""]
    frontier = [""]
    for _ in range(length):
        frontier = [w + ch for w in frontier for ch in "aAbB" if not w or w[-1] != ch.swapcase()]
        out.extend(frontier)
    return out


def height_oracle(gens, word_length=3, cap=4):
    """Largest set of distinct cosets gH (g of bounded length) whose conjugates meet in an infinite group."""
    H = words_graph(gens)
    reps = []
    for g in reduced_words(word_length):
        if not any(reads_to_base(H, reduce_word(inverse(r) + g)) for r in reps):
            reps.append(g)
    conj = {g: words_graph([g + w + inverse(g) for w in gens]) for g in reps}

    def meet(a, b):
        for comp, pairs in product_components(a, b):
            if (a.base, b.base) in pairs:
                comp.base = pairs.index((a.base, b.base))
                return trim(comp)
        return None

    best = 1 if has_cycle(H) else 0

    def grow(cur, chosen, start):
        nonlocal best
        best = max(best, len(chosen))
        if len(chosen) == cap:
            return
        for k in range(start, len(reps)):
            nxt = meet(cur, conj[reps[k]])
            if nxt is not None and has_cycle(nxt):
                grow(nxt, chosen + [reps[k]], k + 1)

    if best:
        grow(conj[""], [""], 1)
    return best


# --- stature ------------------------------------------------------------------

def stature_oracle(G, depth, radius):
    """Replay the round schedule with networkx isomorphism as class identity.

    Returns (finite, counts, classes) where classes[v] lists LGraph cores.
    """
    store = [[] for _ in G.vertex_names]

    def add(v, g):
        g = trim(LGraph(g.img, g.edges))
        if not has_cycle(g) or any(same_class(g, h) for h in store[v]):
            return False
        store[v].append(g)
        return True

    ends = defaultdict(list)
    for ge in G.edges:
        ends[ge.iota].append((ge.iota_map, ge.tau_map, ge.tau))
        ends[ge.tau].append((ge.tau_map, ge.iota_map, ge.iota))
    for ge in G.edges:
        add(ge.iota, LGraph.from_map(ge.iota_map))
        add(ge.tau, LGraph.from_map(ge.tau_map))
    counts = [sum(map(len, store))]
    done_pairs, done_moves = set(), set()
    for _ in range(radius):
        grew = False
        for _sweep in range(depth):
            todo = [(v, i, j) for v, s in enumerate(store) for i in range(len(s))
                    for j in range(i, len(s)) if (v, i, j) not in done_pairs]
            if not todo:
                break
            done_pairs.update(todo)
            added = False
            for v, i, j in todo:
                for comp, _ in product_components(store[v][i], store[v][j]):
                    added |= add(v, comp)
            grew |= added
            if not added:
                break
        todo = [(v, i, k) for v, s in enumerate(store) for i in range(len(s))
                for k in range(len(ends[v])) if (v, i, k) not in done_moves]
        done_moves.update(todo)
        for v, i, k in todo:
            here, there, w = ends[v][k]
            for g in _transfer(store[v][i], here, there):
                grew |= add(w, g)
        counts.append(sum(map(len, store)))
        if not grew:
            return True, counts, store
    return False, counts, store


def _transfer(C, here, there):
    """Push the intersections of C with an edge group's image across the edge."""
    E = here.source
    over = []
    for e, (t, h) in enumerate(E.edges):
        lab, keep = here.edge_map[e]
        over.append(((t, h) if keep else (h, t), lab, e, keep))
    out = []
    img = here.vertex_map
    pairs = [(c, y) for c in range(len(C.img)) for y in range(E.n_vertices) if C.img[c] == img[y]]
    G = nx.MultiDiGraph()
    G.add_nodes_from(pairs)
    for ct, ch, lab in C.edges:
        for (yt, yh), lab2, e, keep in over:
            if lab == lab2:
                G.add_edge((ct, yt), (ch, yh), e=e, keep=keep)
    for nodes in sorted(nx.weakly_connected_components(G), key=min):
        order = sorted(nodes)
        idx = {p: i for i, p in enumerate(order)}
        edges = []
        for a, b, d in G.subgraph(nodes).edges(data=True):
            lab, keep2 = there.edge_map[d["e"]]
            src, dst = idx[a], idx[b]
            edges.append((src, dst, lab) if d["keep"] == keep2 else (dst, src, lab))
        g = trim(LGraph([there.vertex_map[p[1]] for p in order], edges))
        if has_cycle(g):
            out.append(g)
    return out


# --- depth on the circle --------------------------------------------------------

def circle_depth_oracle(indices):
    """Longest strict chain in the lcm-closure of subgroups nZ of Z."""
    closed = set(indices)
    while True:
        more = {math.lcm(a, b) for a in closed for b in closed} - closed
        if not more:
            break
        closed |= more
    ordered = sorted(closed)
    best = {}
    for n in ordered:
        best[n] = 1 + max((best[m] for m in ordered if m < n and n % m == 0), default=0)
    return max(best.values(), default=0)


# --- coset enumeration ------------------------------------------------------------

def coset_action(gens):
    """Permutation action of a and b on the cosets of a finite-index subgroup of F(a, b)."""
    from sympy.combinatorics.fp_groups import FpGroup
    from sympy.combinatorics.free_groups import free_group

    Fg, a, b = free_group("a b")
    letters = {"a": a, "A": a**-1, "b": b, "B": b**-1}
    words = []
    for w in gens:
        elt = Fg.identity
        for ch in w:
            elt = elt * letters[ch]
        words.append(elt)
    table = FpGroup(Fg, []).coset_enumeration(words, max_cosets=4096)
    table.compress()
    table.standardize()
    return [row[0] for row in table.table], [row[2] for row in table.table]


def diagonal_orbits(act1, act2):
    """Orbit sizes of the diagonal action on pairs of cosets, sorted."""
    n1, n2 = len(act1[0]), len(act2[0])
    G = nx.Graph()
    G.add_nodes_from(itertools.product(range(n1), range(n2)))
    for g in (0, 1):
        for x, y in itertools.product(range(n1), range(n2)):
            G.add_edge((x, y), (act1[g][x], act2[g][y]))
    return sorted(len(c) for c in nx.connected_components(G))


def base_orbit_size(act1, act2):
    """Size of the diagonal orbit of the pair of trivial cosets: the index of H ∩ K."""
    seen, stack = {(0, 0)}, [(0, 0)]
    inverse_acts = [[{v: i for i, v in enumerate(p)} for p in act] for act in (act1, act2)]
    while stack:
        x, y = stack.pop()
        for g in (0, 1):
            for nxt in ((act1[g][x], act2[g][y]),
                        (inverse_acts[0][g][x], inverse_acts[1][g][y])):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return len(seen)
