"""The JSON input format: one document, typed blocks, cross-references by string id."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .complex_core import from_dict, validate_complex
from .cores import rep_from_words
from .errors import MalformedInput, UnknownCell
from .graph_of_complexes import GogEdge, GraphOfComplexes, validate_gog
from .morphisms import CoverSpec, build_cover, identity_map, make_map
from .small_cancellation import CubicalPresentation

BLOCKS = ("complex", "map", "cover", "gog", "presentation", "family")
SCHEMA = 1


@dataclass
class Document:
    raw: dict
    _built: dict = field(default_factory=dict)

    # lookups -----------------------------------------------------------

    def ids(self, block):
        return list(self.raw.get(block, {}))

    def pick(self, block, wanted=None):
        """The object with id ``wanted``, or the first one in the block."""
        entries = self.raw.get(block, {})
        if not entries:
            raise MalformedInput(f"document has no {block!r} block")
        key = wanted if wanted is not None else next(iter(entries))
        if key not in entries:
            raise MalformedInput(f"no {block} with id {key!r}", available=list(entries))
        return key, self.get(block, key)

    def get(self, block, key):
        if (block, key) not in self._built:
            entries = self.raw.get(block, {})
            if key not in entries:
                raise MalformedInput(f"unknown {block} reference {key!r}")
            builder = getattr(self, f"_build_{block}")
            self._built[(block, key)] = builder(key, entries[key])
        return self._built[(block, key)]

    def complex(self, key):
        return self.get("complex", key)

    def map(self, key):
        return self.get("map", key)

    # builders ----------------------------------------------------------

    def _build_complex(self, key, raw):
        try:
            return validate_complex(from_dict(raw))
        except MalformedInput as exc:
            raise MalformedInput(f"complex {key!r}: {exc}", **exc.details) from exc

    def _build_map(self, key, raw):
        if not isinstance(raw, dict):
            raise MalformedInput(f"map {key!r} must be an object")
        if "cover" in raw:
            return self.get("cover", raw["cover"])[1]
        target = self.complex(_need(raw, "target", key))
        if "words" in raw:
            return rep_from_words(target, raw["words"], int(raw.get("basepoint", 0))).map
        source = self.complex(_need(raw, "source", key))
        vertices = [int(v) for v in _need(raw, "vertices", key)]
        try:
            edges = [(int(e), bool(o)) for e, o in _need(raw, "edges", key)]
        except (TypeError, ValueError) as exc:
            raise MalformedInput(f"map {key!r}: edges must be [edge, orientation] pairs") from exc
        if len(vertices) != source.n_vertices or len(edges) != len(source.edges):
            raise MalformedInput(f"map {key!r} does not assign every source cell")
        for v in vertices:
            if not 0 <= v < target.n_vertices:
                raise UnknownCell(f"map {key!r} sends a vertex to {v}", cell=["vertex", v])
        for e, _ in edges:
            if not 0 <= e < len(target.edges):
                raise UnknownCell(f"map {key!r} sends an edge to {e}", cell=["edge", e])
        return make_map(source, target, vertices, edges)

    def _build_cover(self, key, raw):
        base = self.complex(_need(raw, "base", key))
        spec = CoverSpec.from_cycles(base, int(_need(raw, "degree", key)), raw.get("perms", {}))
        return build_cover(spec)

    def _resolve_attachment(self, ref, space, target, key):
        _, mref = ref
        if mref in ("id", "identity"):
            if space != target:
                raise MalformedInput(f"gog {key!r}: identity attachment between different spaces")
            return identity_map(space)
        f = self.map(mref)
        if f.source != space or f.target != target:
            raise MalformedInput(f"gog {key!r}: map {mref!r} has the wrong source or target")
        return f

    def _build_gog(self, key, raw):
        vertices = _need(raw, "vertices", key)
        names = list(vertices)
        spaces = [self.complex(vertices[n]) for n in names]
        edges = []
        for name, e in raw.get("edges", {}).items():
            space = self.complex(_need(e, "space", name))
            ends = []
            for which in ("iota", "tau"):
                ref = _need(e, which, name)
                if ref[0] not in vertices:
                    raise MalformedInput(f"gog edge {name!r} names unknown vertex {ref[0]!r}")
                vi = names.index(ref[0])
                ends.append((vi, self._resolve_attachment(ref, space, spaces[vi], key)))
            edges.append(GogEdge(name, space, ends[0][0], ends[0][1], ends[1][0], ends[1][1]))
        return validate_gog(GraphOfComplexes(tuple(names), tuple(spaces), tuple(edges)))

    def _build_presentation(self, key, raw):
        base = self.complex(_need(raw, "base", key))
        cones, grades = [], []
        for c in _need(raw, "cones", key):
            ref = c if isinstance(c, str) else c["map"]
            f = self.map(ref)
            if f.target != base:
                raise MalformedInput(f"cone {ref!r} does not map to the base complex")
            cones.append(f)
            grades.append(1 if isinstance(c, str) else int(c.get("grade", 1)))
        return CubicalPresentation(base, cones, grades)

    def _build_family(self, key, raw):
        maps = [self.map(m) for m in _need(raw, "maps", key)]
        if len({f.target for f in maps}) > 1:
            raise MalformedInput(f"family {key!r} mixes targets")
        return maps


def _need(raw, name, key):
    if not isinstance(raw, dict) or name not in raw:
        raise MalformedInput(f"{key!r} is missing field {name!r}")
    return raw[name]


def parse_document(raw):
    if not isinstance(raw, dict):
        raise MalformedInput("document must be a JSON object")
    unknown = [k for k in raw if k not in BLOCKS and k != "schema"]
    if unknown:
        raise MalformedInput(f"unknown blocks {unknown}")
    return Document(raw)


def load_document(path):
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON in {path}: {exc}") from exc
    return parse_document(raw)


# --- canonical output ------------------------------------------------------

def _plain(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [_plain(v) for v in obj]
        return sorted(items, key=json.dumps) if isinstance(obj, (set, frozenset)) else items
    if isinstance(obj, float) and obj.is_integer():
        return int(obj)
    return obj


def canonical_json(obj):
    """Sorted keys, two-space indent, trailing newline: byte-stable output."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

