"""PD codes, arcs, Wirtinger presentations and quandle crossing relations.

PD convention: each crossing ``[a, b, c, d]`` lists its four edge labels
counterclockwise starting from the incoming under-strand, so the under
strand runs ``a -> c`` and the over strand joins ``b`` and ``d``.  The
over-strand direction is recovered by walking the knot.  A crossing is
positive when the over strand runs ``d -> b``.
"""
from __future__ import annotations

import ast
import json
from dataclasses import dataclass
from functools import cached_property

from .errors import EmptyDiagramError, MalformedPDError, OrientationError, UnknownKnotError

BUILTIN_PD = {
    "unknot": "[]",
    "trefoil": "[[1,4,2,5],[3,6,4,1],[5,2,6,3]]",
    "figure8": "[[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]]",
    "5_1": "[[2,8,3,7],[4,10,5,9],[6,2,7,1],[8,4,9,3],[10,6,1,5]]",
    "5_2": "[[1,5,2,4],[3,9,4,8],[5,1,6,10],[7,3,8,2],[9,7,10,6]]",
    "6_1": "[[1,7,2,6],[3,10,4,11],[5,3,6,2],[7,1,8,12],[9,4,10,5],[11,9,12,8]]",
}


@dataclass(frozen=True)
class KnotDiagram:
    """A knot diagram with arcs identified.

    ``arcs[k]`` lists the edge labels of arc ``k`` in the direction of
    travel; arc 0 contains the smallest edge label and the rest follow
    in traversal order.  The crossing-free unknot has a single empty arc.
    """

    crossings: tuple[tuple[int, int, int, int], ...]
    signs: tuple[int, ...]
    arcs: tuple[tuple[int, ...], ...]

    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    @property
    def n_arcs(self) -> int:
        return len(self.arcs)

    @cached_property
    def arc_of_edge(self) -> dict[int, int]:
        return {e: k for k, arc in enumerate(self.arcs) for e in arc}

    def to_json(self) -> dict:
        return {"crossings": [list(c) for c in self.crossings], "signs": list(self.signs)}


def serialize(d: KnotDiagram) -> str:
    return json.dumps([list(c) for c in d.crossings], separators=(",", ""))


def unknot() -> KnotDiagram:
    return KnotDiagram((), (), ((),))


def parse_pd(text: str) -> KnotDiagram:
    if not text or not text.strip():
        raise EmptyDiagramError("empty PD code")
    try:
        data = ast.literal_eval(text.strip())
    except (ValueError, SyntaxError) as exc:
        raise MalformedPDError(f"cannot parse PD code: {exc}") from exc
    if not isinstance(data, (list, tuple)):
        raise MalformedPDError("PD code must be a list of 4-tuples")
    if len(data) == 0:
        raise EmptyDiagramError("PD code has no crossings")
    crossings = []
    for c in data:
        if not isinstance(c, (list, tuple)) or len(c) != 4:
            raise MalformedPDError(f"crossing {c!r} is not a 4-tuple")
        if not all(isinstance(e, int) and not isinstance(e, bool) and e > 0 for e in c):
            raise MalformedPDError(f"crossing {c!r} must hold positive integers")
        crossings.append(tuple(c))
    return _build(tuple(crossings))


def _build(crossings) -> KnotDiagram:
    slots: dict[int, list[tuple[int, int]]] = {}
    for ci, c in enumerate(crossings):
        for pos, e in enumerate(c):
            slots.setdefault(e, []).append((ci, pos))
    for e, occ in slots.items():
        if len(occ) != 2:
            raise MalformedPDError(f"edge label {e} appears {len(occ)} times, expected 2")

    n = len(crossings)
    over_entry = [None] * n
    # walk from the outgoing under-strand of crossing 0
    start = (0, 2)
    exit_slot = start
    edges = []
    breaks = []  # indices into edges after which an under-crossing ends an arc
    while True:
        e = crossings[exit_slot[0]][exit_slot[1]]
        edges.append(e)
        a, b = slots[e]
        entry = b if a == exit_slot else a
        ci, pos = entry
        if pos == 2:
            raise OrientationError(f"edge {e} enters crossing {ci} through its outgoing under-strand")
        if pos == 0:
            breaks.append(len(edges))
            exit_slot = (ci, 2)
        else:
            if over_entry[ci] is not None:
                raise OrientationError(f"over-strand of crossing {ci} traversed twice")
            over_entry[ci] = pos
            exit_slot = (ci, 4 - pos)
        if exit_slot == start:
            break
        if len(edges) > 2 * n:
            raise OrientationError("walk does not close up")

    if len(edges) != 2 * n or any(p is None for p in over_entry):
        raise MalformedPDError("PD code has more than one component; links are not supported")

    signs = tuple(1 if p == 3 else -1 for p in over_entry)

    arcs, lo = [], 0
    for hi in breaks:
        arcs.append(tuple(edges[lo:hi]))
        lo = hi
    first = min(range(len(arcs)), key=lambda k: min(arcs[k]))
    arcs = arcs[first:] + arcs[:first]
    return KnotDiagram(tuple(crossings), signs, tuple(arcs))


def builtin(name: str) -> KnotDiagram:
    if name not in BUILTIN_PD:
        raise UnknownKnotError(f"unknown knot {name!r}; available: {', '.join(BUILTIN_PD)}")
    if name == "unknot":
        return unknot()
    return parse_pd(BUILTIN_PD[name])


@dataclass(frozen=True)
class Relation:
    """Crossing relation ``out = over^-sign * in * over^sign``."""

    in_arc: int
    over_arc: int
    out_arc: int
    sign: int


@dataclass(frozen=True)
class WirtingerPresentation:
    n_generators: int
    relations: tuple[Relation, ...]
    meridian_index: int = 0

    @property
    def generators(self) -> tuple[str, ...]:
        return tuple(f"x{k}" for k in range(self.n_generators))

    def abelianizes_to_z(self) -> bool:
        """All generators linked through in/out arcs of the relations."""
        parent = list(range(self.n_generators))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for rel in self.relations:
            parent[find(rel.in_arc)] = find(rel.out_arc)
        return len({find(k) for k in range(self.n_generators)}) == 1

    def __str__(self):
        words = []
        for rel in self.relations:
            o = f"x{rel.over_arc}"
            inv = "" if rel.sign < 0 else "^-1"
            fwd = "^-1" if rel.sign < 0 else ""
            words.append(f"x{rel.out_arc} = {o}{inv} x{rel.in_arc} {o}{fwd}")
        return "< " + ", ".join(self.generators) + " | " + "; ".join(words) + " >"


def _relations(d: KnotDiagram) -> tuple[Relation, ...]:
    arc = d.arc_of_edge
    return tuple(Relation(arc[c[0]], arc[c[1]], arc[c[2]], s) for c, s in zip(d.crossings, d.signs))


def wirtinger(d: KnotDiagram) -> WirtingerPresentation:
    return WirtingerPresentation(d.n_arcs, _relations(d), 0)


@dataclass(frozen=True)
class QuandleRelationSet:
    """Per crossing ``out = in ▷ over`` (sign +1) or ``out = S_over^-1(in)`` (sign -1)."""

    n_arcs: int
    triples: tuple[Relation, ...]


def quandle_relations(d: KnotDiagram) -> QuandleRelationSet:
    return QuandleRelationSet(d.n_arcs, _relations(d))


def resolve_knot(name: str | None = None, pd: str | None = None) -> tuple[str, KnotDiagram]:
    """Knot from a builtin name or PD text; returns ``(label, diagram)``."""
    if (name is None) == (pd is None):
        raise ValueError("give exactly one of a builtin name or a PD code")
    if name is not None:
        return name, builtin(name)
    return pd, parse_pd(pd)
