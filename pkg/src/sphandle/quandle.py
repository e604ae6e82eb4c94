"""Finite quandles given by Cayley tables, with exhaustive axiom checkers.

Elements are the integers ``0..n-1`` and ``table[x][y] = x ▷ y``.  All
checks are exhaustive; the quandles handled here are small test beds.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

from .errors import InvalidSizeError, MalformedInputError


class Quandle(Protocol):
    """Anything with a right-distributive operation and its right inverse."""

    def op(self, x, y): ...

    def op_inv(self, x, y): ...


@dataclass(frozen=True, eq=False)
class FiniteQuandle:
    table: np.ndarray
    _inverse: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        t = np.asarray(self.table)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] < 1:
            raise MalformedInputError(f"Cayley table must be a nonempty square array, got shape {t.shape}")
        if not np.issubdtype(t.dtype, np.integer):
            if not np.all(np.equal(np.mod(t, 1), 0)):
                raise MalformedInputError("Cayley table entries must be integers")
        t = t.astype(np.int64)
        n = t.shape[0]
        if t.min() < 0 or t.max() >= n:
            bad = tuple(int(i) for i in np.argwhere((t < 0) | (t >= n))[0])
            raise MalformedInputError(f"table entry at {bad} out of range 0..{n - 1}")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def n(self) -> int:
        return self.table.shape[0]

    def __eq__(self, other):
        return isinstance(other, FiniteQuandle) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())

    def op(self, x, y):
        return self.table[x, y]

    def op_inv(self, x, y):
        """The unique ``z`` with ``z ▷ y = x``; requires Q2."""
        if self._inverse is None:
            inv = np.full_like(self.table, -1)
            cols = np.arange(self.n)
            for y_ in range(self.n):
                inv[self.table[:, y_], y_] = cols
            if (inv < 0).any():
                raise MalformedInputError("right translations are not bijective (Q2 fails)")
            inv.setflags(write=False)
            object.__setattr__(self, "_inverse", inv)
        return self._inverse[x, y]

    def right_translation(self, y: int) -> tuple[int, ...]:
        """S_y as a permutation tuple ``x -> x ▷ y``."""
        return tuple(int(v) for v in self.table[:, y])

    def to_json(self) -> dict:
        return {"n": self.n, "table": self.table.tolist()}

    @classmethod
    def from_json(cls, data: dict | str) -> "FiniteQuandle":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            n = int(data["n"])
            table = data["table"]
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInputError(f"expected {{'n': int, 'table': [[int]]}}: {exc}") from exc
        arr = np.asarray(table)
        if arr.shape != (n, n):
            raise MalformedInputError(f"table shape {arr.shape} does not match n={n}")
        return cls(arr)


@dataclass(frozen=True)
class AxiomReport:
    q1_ok: bool
    q2_ok: bool
    q3_ok: bool
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.q1_ok and self.q2_ok and self.q3_ok

    def to_json(self) -> dict:
        return {
            "q1_ok": self.q1_ok,
            "q2_ok": self.q2_ok,
            "q3_ok": self.q3_ok,
            "violations": [{"axiom": a, "witness": list(w)} for a, w in self.violations],
        }


def check_axioms(q: FiniteQuandle, max_witnesses: int = 100) -> AxiomReport:
    """Exhaustively test Q1-Q3.

    Violations are ``(axiom, witness)`` pairs; witnesses are ``(x,)`` for
    Q1, ``(y,)`` for Q2 (the column that is not a permutation) and
    ``(x, y, z)`` for Q3.  At most ``max_witnesses`` are kept per axiom.
    """
    t = q.table
    n = q.n
    idx = np.arange(n)
    violations = []

    q1_bad = np.flatnonzero(t[idx, idx] != idx)
    violations += [("Q1", (int(x),)) for x in q1_bad[:max_witnesses]]

    q2_bad = [y for y in range(n) if len(np.unique(t[:, y])) != n]
    violations += [("Q2", (int(y),)) for y in q2_bad[:max_witnesses]]

    # lhs[x,y,z] = (x▷y)▷z, rhs[x,y,z] = (x▷z)▷(y▷z)
    lhs = t[t[:, :, None], idx[None, None, :]]
    rhs = t[t[:, None, :], t[None, :, :]]
    q3_bad = np.argwhere(lhs != rhs)
    violations += [("Q3", tuple(int(v) for v in w)) for w in q3_bad[:max_witnesses]]

    return AxiomReport(len(q1_bad) == 0, len(q2_bad) == 0, len(q3_bad) == 0, violations)


def _check_size(n: int) -> int:
    if int(n) != n or n < 1:
        raise InvalidSizeError(f"quandle size must be a positive integer, got {n!r}")
    return int(n)


def dihedral(n: int) -> FiniteQuandle:
    n = _check_size(n)
    x = np.arange(n)
    return FiniteQuandle((2 * x[None, :] - x[:, None]) % n)


def trivial(n: int) -> FiniteQuandle:
    n = _check_size(n)
    return FiniteQuandle(np.repeat(np.arange(n)[:, None], n, axis=1))


def conjugation_quandle(perms: Sequence[Sequence[int]]) -> FiniteQuandle:
    """Conjugation quandle ``x ▷ y = y^-1 x y`` on a conjugation-closed set of permutations.

    Permutations are tuples ``p`` with ``p[i]`` the image of ``i``;
    products compose left to right (``(ab)(i) = b(a(i))``).
    """
    elems = [tuple(p) for p in perms]
    index = {p: i for i, p in enumerate(elems)}
    if len(index) != len(elems):
        raise MalformedInputError("duplicate permutations")

    def mul(a, b):
        return tuple(b[a[i]] for i in range(len(a)))

    def inv(a):
        out = [0] * len(a)
        for i, v in enumerate(a):
            out[v] = i
        return tuple(out)

    n = len(elems)
    table = np.empty((n, n), dtype=np.int64)
    for i, x in enumerate(elems):
        for j, y in enumerate(elems):
            c = mul(mul(inv(y), x), y)
            if c not in index:
                raise MalformedInputError("set is not closed under conjugation")
            table[i, j] = index[c]
    return FiniteQuandle(table)


def is_involutory(q: FiniteQuandle) -> bool:
    t = q.table
    idx = np.arange(q.n)
    return bool(np.all(t[t, idx[None, :]] == idx[:, None]))


@dataclass(frozen=True)
class FiniteQuandleHom:
    source: FiniteQuandle
    target: FiniteQuandle
    map: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(v) for v in self.map)
        if len(m) != self.source.n:
            raise MalformedInputError(f"map has length {len(m)}, source has {self.source.n} elements")
        if any(v < 0 or v >= self.target.n for v in m):
            raise MalformedInputError("map value outside target")
        object.__setattr__(self, "map", m)


def check_hom(h: FiniteQuandleHom) -> tuple[bool, list[tuple[int, int]]]:
    """Return ``(ok, witnesses)`` where witnesses are pairs ``(x, y)`` with ``f(x▷y) != f(x)▷f(y)``."""
    f = np.asarray(h.map)
    lhs = f[h.source.table]
    rhs = h.target.table[f[:, None], f[None, :]]
    bad = [tuple(int(v) for v in w) for w in np.argwhere(lhs != rhs)]
    return not bad, bad


@dataclass(frozen=True)
class InnerGroup:
    order: int
    generators: tuple[tuple[int, ...], ...]
    elements: frozenset = field(repr=False)


def inner_automorphism_group(q: FiniteQuandle) -> InnerGroup:
    """Closure of the right translations S_y under composition (BFS)."""
    gens = tuple(dict.fromkeys(q.right_translation(y) for y in range(q.n)))
    identity = tuple(range(q.n))
    seen = {identity}
    queue = deque([identity])
    while queue:
        g = queue.popleft()
        for s in gens:
            h = tuple(s[i] for i in g)
            if h not in seen:
                seen.add(h)
                queue.append(h)
    return InnerGroup(len(seen), gens, frozenset(seen))


def image_is_trivial_subquandle(colors, q: FiniteQuandle) -> bool:
    c = np.unique(np.asarray(list(colors), dtype=np.int64))
    if c.size and (c.min() < 0 or c.max() >= q.n):
        raise MalformedInputError("color outside quandle")
    return bool(np.all(q.table[c[:, None], c[None, :]] == c[:, None]))
