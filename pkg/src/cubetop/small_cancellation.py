"""Cubical presentations: pieces, systoles, C'(alpha), liftable shells, Helly checks."""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .complex_core import DEFAULT_CELL_CAP, universal_cover_ball
from .errors import BoundedModeInconclusive, HypothesisFailure, NotLocalIsometry
from .fiber_product import fiber_product, simply_connected
from .morphisms import check_local_isometry, is_injective

DEFAULT_ALPHA = Fraction(1, 24)
PROFILES = {"c24": Fraction(1, 24), "c12": Fraction(1, 12), "subcones": Fraction(1, 3)}


@dataclass
class CubicalPresentation:
    base: object
    cones: list
    grades: list = None

    def __post_init__(self):
        if self.grades is None:
            self.grades = [1] * len(self.cones)
        for i, c in enumerate(self.cones):
            rep = check_local_isometry(c)
            if not rep.passed:
                raise NotLocalIsometry(f"cone {i} is not a local isometry", cone=i, witness=rep.failures[0])

    def lower(self, i):
        return [j for j, g in enumerate(self.grades) if g < self.grades[i]]


def _diameter(K):
    adj = K.neighbours()
    best = 0
    for s in range(K.n_vertices):
        dist = {s: 0}
        q = deque([s])
        while q:
            v = q.popleft()
            for w in adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    q.append(w)
        best = max(best, max(dist.values()))
    return best


def _fmt(d):
    return "inf" if d is None else d


@dataclass
class Piece:
    kind: str
    host: int
    other: Optional[int]
    vertices: list
    diameter: Optional[int]        # None means unbounded
    bounded: bool = False          # measured in a ball or an over-estimate

    def to_dict(self):
        out = {"kind": self.kind, "host": self.host, "vertices": self.vertices,
               "diameter": _fmt(self.diameter), "bounded": self.bounded}
        if self.other is not None:
            out["other"] = self.other
        return out


def _lower_cones_trivial(P, i):
    """True when every lower-grade cone component over ``Y_i`` is simply connected."""
    y = P.cones[i]
    for j in P.lower(i):
        for c in fiber_product(y, P.cones[j]):
            if c.essential:
                return False
    return True


def cone_pieces(P, i):
    """Components of ``Y_j ⊗ Y_i`` for every j, minus those where a projection is an isomorphism."""
    out = []
    flag = not _lower_cones_trivial(P, i)
    for j, yj in enumerate(P.cones):
        for c in fiber_product(yj, P.cones[i]):
            if any(c.projection_iso):
                continue
            diam = None if c.essential else _diameter(c.complex)
            out.append(Piece("cone", i, j, [list(p) for p in c.vertex_pairs], diam, flag))
    return out


def wall_pieces(P, i, radius=4, cap=DEFAULT_CELL_CAP):
    """Intersections of ``Ỹ_i`` with carriers of hyperplanes that miss it."""
    f = P.cones[i]
    Y, X = f.source, f.target
    xends, _ = X.incidence()
    yends, _ = Y.incidence()
    out = []
    if not X.squares:
        # hyperplanes of a tree are edge midpoints: each piece is one vertex
        for y in range(Y.n_vertices):
            image = {f.link_image(lv) for lv in yends.get(y, [])}
            if any(lv not in image for lv in xends.get(f.vertex_map[y], [])):
                out.append(Piece("wall", i, None, [y], 0))
        return out
    return _square_wall_pieces(P, i, radius, cap)


def _square_wall_pieces(P, i, radius, cap):
    f = P.cones[i]
    Y, X = f.source, f.target
    xends, _ = X.incidence()
    corner = {}
    for s in range(len(X.squares)):
        for k in range(4):
            a, b = X.corner_pair(s, k)
            corner[(a, b)] = (s, k)
            corner[(b, a)] = (s, k)
    out, seen = [], set()
    for y in range(Y.n_vertices):
        ball = universal_cover_ball(Y, y, radius, cap=cap)
        B = ball.complex
        bends, _ = B.incidence()

        def xlink(lv):
            e, end = lv
            return f.link_image((ball.edge_image[e], end))

        root = ball.root
        image_root = {xlink(lv) for lv in bends.get(root, [])}
        for lam in xends.get(f.vertex_map[y], []):
            if lam in image_root:
                continue
            key = (y, lam)
            if key in seen:
                continue
            # grow the piece: states (ball vertex, outside link vertex)
            start = (root, lam)
            states = {start}
            queue = deque([start])
            truncated = False
            while queue:
                p, mu = queue.popleft()
                if ball.boundary_vertex(p):
                    truncated = True
                    continue
                for lv in bends.get(p, []):
                    nu = xlink(lv)
                    hit = corner.get((mu, nu))
                    if hit is None:
                        continue
                    s, k = hit
                    q = B.other_endpoint(lv)
                    # step along nu; the carrier edge at q is the side of s parallel to mu
                    sq = X.squares[s]
                    a, _ = X.corner_pair(s, k)
                    if mu == a:
                        far_side = sq[(k + 1) % 4]
                        far = (far_side[0], 0 if far_side[1] else 1)
                    else:
                        far_side = sq[(k - 2) % 4]
                        far = (far_side[0], 1 if far_side[1] else 0)
                    nxt = (q, far)
                    if nxt not in states:
                        states.add(nxt)
                        queue.append(nxt)
            verts = sorted({p for p, _ in states})
            seen.update((ball.vertex_image[p], mu) for p, mu in states)
            sub_adj = {}
            vs = set(verts)
            for e, (t, h) in enumerate(B.edges):
                if t in vs and h in vs:
                    sub_adj.setdefault(t, set()).add(h)
                    sub_adj.setdefault(h, set()).add(t)
            diam = 0
            for s0 in verts:
                dist = {s0: 0}
                dq = deque([s0])
                while dq:
                    v = dq.popleft()
                    for w in sub_adj.get(v, ()):
                        if w not in dist:
                            dist[w] = dist[v] + 1
                            dq.append(w)
                diam = max(diam, max(dist.values()))
            out.append(Piece("wall", i, None, sorted({ball.vertex_image[p] for p in verts}),
                             None if truncated else diam, truncated))
    return out


def enumerate_pieces(P, i, radius=4):
    return cone_pieces(P, i) + wall_pieces(P, i, radius)


# --- systoles ----------------------------------------------------------------

@dataclass
class SystoleResult:
    value: Optional[int]      # None = no essential loop (infinite)
    exact: bool
    bound: Optional[int] = None
    note: str = ""

    def exceeds(self, length):
        """Certified that no essential loop has length <= ``length``."""
        if self.value is None and self.exact:
            return True
        if self.value is not None:
            return self.value > length
        return self.bound is not None and self.bound >= length

    def to_dict(self):
        if self.value is None and not self.exact:
            v = f">{self.bound}"
        else:
            v = _fmt(self.value)
        return {"systole": v, "exact": self.exact, "note": self.note}


def _girth(Y):
    """Shortest cycle length of a graph, None for forests."""
    best = None
    adj = {}
    for e, (t, h) in enumerate(Y.edges):
        if t == h:
            return 1
        adj.setdefault(t, []).append((h, e))
        adj.setdefault(h, []).append((t, e))
    for s in range(Y.n_vertices):
        dist, via = {s: 0}, {s: None}
        q = deque([s])
        while q:
            v = q.popleft()
            for w, e in adj.get(v, []):
                if e == via[v]:
                    continue
                if w in dist:
                    cyc = dist[v] + dist[w] + 1
                    if best is None or cyc < best:
                        best = cyc
                else:
                    dist[w] = dist[v] + 1
                    via[w] = e
                    q.append(w)
    return best


def _is_cycle_graph(Y):
    return (not Y.squares and Y.n_vertices > 0 and len(Y.edges) == Y.n_vertices
            and all(len(n) <= 2 for n in _degrees(Y).values()) and Y.is_connected())


def _degrees(Y):
    out = {v: [] for v in range(Y.n_vertices)}
    for e, (t, h) in enumerate(Y.edges):
        out[t].append(e)
        out[h].append(e)
    return out


def _ball_systole(Y, L, cap):
    """Shortest distance from a lift of a vertex to another lift of it, within radius L."""
    best = None
    for y in range(Y.n_vertices):
        ball = universal_cover_ball(Y, y, L, cap=cap)
        for p in range(ball.complex.n_vertices):
            if ball.vertex_image[p] == y and ball.distance[p] > 0:
                d = ball.distance[p]
                if best is None or d < best:
                    best = d
    return best


def systole(P, i, ball=4, cap=DEFAULT_CELL_CAP):
    f = P.cones[i]
    Y = f.source
    lower_essential = []
    for j in P.lower(i):
        for c in fiber_product(f, P.cones[j]):
            if c.essential:
                lower_essential.append(c)
    if not Y.squares:
        if not lower_essential:
            g = _girth(Y)
            return SystoleResult(g, True, note="no essential lower cones")
        if _is_cycle_graph(Y):
            # π1 Y = Z; each lower component kills its image subgroup d·Z
            g = 0
            for c in lower_essential:
                deg = c.complex.n_vertices // Y.n_vertices
                g = math.gcd(g, deg)
            if g == 1:
                return SystoleResult(None, True, note="lower cones kill π1")
            return SystoleResult(Y.n_vertices, True, note=f"quotient Z/{g}")
        raise BoundedModeInconclusive("systole relative to essential lower cones on a non-cyclic graph",
                                      cone=i)
    if lower_essential:
        raise BoundedModeInconclusive("systole relative to essential lower cones on a square complex",
                                      cone=i)
    if simply_connected(Y, cap):
        return SystoleResult(None, True, note="cone is simply connected")
    best = _ball_systole(Y, ball, cap)
    if best is None:
        return SystoleResult(None, False, bound=ball, note="bounded search")
    return SystoleResult(best, True, note="ball search")


# --- C'(alpha) ---------------------------------------------------------------

@dataclass
class SCReport:
    verdict: str
    alpha: Fraction
    per_cone: list
    witness: Optional[dict] = None
    note: str = ""

    def to_dict(self):
        out = {"verdict": self.verdict, "alpha": f"{self.alpha.numerator}/{self.alpha.denominator}",
               "per_cone": self.per_cone}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.note:
            out["note"] = self.note
        return out


def check_small_cancellation(P, alpha=DEFAULT_ALPHA, radius=4, ball=4):
    alpha = Fraction(alpha)
    per_cone, verdict, witness = [], "pass", None
    all_alpha = True
    for i in range(len(P.cones)):
        pieces = enumerate_pieces(P, i, radius)
        unbounded = [p for p in pieces if p.diameter is None]
        d = max((p.diameter for p in pieces if p.diameter is not None), default=0)
        worst = max((p for p in pieces if p.diameter is not None), key=lambda p: p.diameter, default=None)
        row = {"cone": i, "max_piece_diameter": "inf" if unbounded else d, "piece_count": len(pieces)}
        try:
            sys = systole(P, i, ball)
        except BoundedModeInconclusive as exc:
            sys = None
            row["systole"] = "inconclusive"
            row["reason"] = str(exc)
        if sys is not None:
            row.update(sys.to_dict())
        if unbounded:
            row["status"] = "fail"
            w = unbounded[0]
            if verdict != "fail":
                verdict, witness = "fail", {"cone": i, "piece": w.to_dict(), "reason": "unbounded piece"}
            all_alpha = False
        elif sys is None:
            row["status"] = "inconclusive"
            if verdict == "pass":
                verdict = "inconclusive"
            all_alpha = False
        elif sys.value is None and sys.exact:
            row["status"] = "pass"
        elif sys.value is not None:
            ok = d < alpha * sys.value
            row["status"] = "pass" if ok else "fail"
            if d > 0:
                all_alpha = False
            if not ok and verdict != "fail":
                verdict = "fail"
                witness = {"cone": i, "piece": worst.to_dict() if worst else None,
                           "systole": sys.value}
        else:
            # systole beyond the search bound: enough when bound >= d / alpha
            if sys.exceeds(math.ceil(d / alpha)):
                row["status"] = "pass"
            else:
                row["status"] = "inconclusive"
                if verdict == "pass":
                    verdict = "inconclusive"
            all_alpha = False
        per_cone.append(row)
    note = "passes all α" if verdict == "pass" and all_alpha else ""
    return SCReport(verdict, alpha, per_cone, witness, note)


# --- liftable shells ---------------------------------------------------------

@dataclass
class ShellsReport:
    passed: Optional[bool]
    components: list

    def to_dict(self):
        return {"verdict": {True: "pass", False: "fail", None: "inconclusive"}[self.passed],
                "components": self.components}


def check_liftable_shells(A, P, radius=4, ball=4):
    sc = check_small_cancellation(P, DEFAULT_ALPHA, radius, ball)
    if sc.verdict != "pass":
        raise HypothesisFailure("presentation is not C'(1/24)", report=sc.to_dict())
    rows, passed = [], True
    for i, y in enumerate(P.cones):
        sys = systole(P, i, ball)
        for n, c in enumerate(fiber_product(A, y)):
            row = {"cone": i, "component": n, "vertices": [list(p) for p in c.vertex_pairs]}
            if c.projection_iso[1]:
                row["case"] = "isomorphic"
                rows.append(row)
                continue
            diam = _diameter(c.complex)
            row["diameter"] = diam
            half_ok = sys.value is None and sys.exact or (sys.value is not None and 2 * diam <= sys.value)
            if not c.essential:
                trivial = True
            elif not P.lower(i):
                trivial = False
            else:
                trivial = None
            if half_ok and trivial:
                row["case"] = "small_and_simply_connected"
            elif trivial is None and half_ok:
                row["case"] = "inconclusive"
                if passed:
                    passed = None
            else:
                row["case"] = "violation"
                row["reason"] = "essential" if trivial is False else "too large"
                passed = False
            rows.append(row)
    return ShellsReport(passed, rows)


# --- Helly / well-embedded cones ---------------------------------------------

@dataclass
class HellyReport:
    conditions: dict
    failures: list

    @property
    def passed(self):
        return not self.failures

    def to_dict(self):
        return {"passed": self.passed, "conditions": self.conditions, "failures": self.failures}


def _image(f):
    return set(f.vertex_map), {e for e, _ in f.edge_map}


def _connected(X, vs, es):
    if not vs:
        return True
    parent = {v: v for v in vs}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in es:
        t, h = X.edges[e]
        parent[find(t)] = find(h)
    return len({find(v) for v in vs}) == 1


def check_helly(cones):
    X = cones[0].target if cones else None
    failures = []
    for i, f in enumerate(cones):
        if not is_injective(f):
            seen = {}
            for v, x in enumerate(f.vertex_map):
                if x in seen:
                    failures.append({"condition": 1, "cone": i, "vertices": [seen[x], v], "image": x})
                    break
                seen[x] = v
            else:
                failures.append({"condition": 1, "cone": i, "cells": "edges or squares collide"})
    images = [_image(f) for f in cones]
    for i, j in itertools.combinations(range(len(cones)), 2):
        vs = images[i][0] & images[j][0]
        es = images[i][1] & images[j][1]
        if vs and not _connected(X, vs, es):
            failures.append({"condition": 2, "cones": [i, j], "intersection_vertices": sorted(vs),
                             "intersection_edges": sorted(es)})
    for i, j, k in itertools.combinations(range(len(cones)), 3):
        a, b, c = images[i][0], images[j][0], images[k][0]
        if a & b and b & c and a & c and not (a & b & c):
            failures.append({"condition": 3, "cones": [i, j, k],
                             "pairwise": [sorted(a & b), sorted(b & c), sorted(a & c)]})
    conditions = {str(n): ("fail" if any(f["condition"] == n for f in failures) else "pass")
                  for n in (1, 2, 3)}
    return HellyReport(conditions, failures)
