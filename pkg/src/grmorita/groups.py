"""Finite grading groups given by multiplication tables."""

from __future__ import annotations

import itertools
import re
from functools import cached_property
from typing import Sequence

import numpy as np

__all__ = ["GroupError", "FiniteGroup", "cyclic", "symmetric3", "from_preset", "PRESETS"]


class GroupError(ValueError):
    pass


class FiniteGroup:
    """Group on ``{0, ..., n-1}`` with ``table[a][b] = a*b``.

    The table is validated on construction: closure, associativity, a two-sided
    identity and inverses.
    """

    def __init__(self, table: Sequence[Sequence[int]], names: Sequence[str] | None = None, label: str | None = None):
        t = np.array(table, dtype=np.int64)
        n = t.shape[0] if t.ndim == 2 else 0
        if t.ndim != 2 or t.shape != (n, n) or n == 0:
            raise GroupError("multiplication table must be a non-empty square array")
        if t.min() < 0 or t.max() >= n:
            raise GroupError("table entries must be element indices")
        # associativity: (ab)c == a(bc) for all triples
        lhs = t[t, :]  # lhs[a, b, c] = (a*b)*c
        rhs = t[:, t]  # rhs[a, b, c] = a*(b*c)
        bad = np.argwhere(lhs != rhs)
        if bad.size:
            a, b, c = (int(x) for x in bad[0])
            raise GroupError(f"table is not associative at ({a}, {b}, {c})")
        ident = [e for e in range(n) if (t[e] == np.arange(n)).all() and (t[:, e] == np.arange(n)).all()]
        if not ident:
            raise GroupError("table has no identity element")
        e = ident[0]
        inv = []
        for a in range(n):
            hits = np.flatnonzero(t[a] == e)
            if hits.size != 1 or t[hits[0], a] != e:
                raise GroupError(f"element {a} has no two-sided inverse")
            inv.append(int(hits[0]))
        t.setflags(write=False)
        self.table = t
        self.order = n
        self.identity = e
        self.inverses = tuple(inv)
        self.names = tuple(names) if names is not None else tuple(str(i) for i in range(n))
        if len(self.names) != n or len(set(self.names)) != n:
            raise GroupError("element names must be distinct, one per element")
        self.label = label

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return self.inverses[a]

    def prod(self, *elems: int) -> int:
        out = self.identity
        for g in elems:
            out = int(self.table[out, g])
        return out

    @property
    def elements(self) -> range:
        return range(self.order)

    def index(self, name) -> int:
        if isinstance(name, (int, np.integer)) and not isinstance(name, bool):
            if 0 <= int(name) < self.order:
                return int(name)
            raise GroupError(f"group element index {name} out of range")
        try:
            return self.names.index(str(name))
        except ValueError:
            raise GroupError(f"unknown group element {name!r}") from None

    @cached_property
    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteGroup) and np.array_equal(self.table, other.table) and self.names == other.names

    def __hash__(self) -> int:
        return hash((self.table.tobytes(), self.names))

    def __repr__(self) -> str:
        return f"FiniteGroup({self.label or self.order})"


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupError("cyclic group order must be positive")
    table = [[(a + b) % n for b in range(n)] for a in range(n)]
    return FiniteGroup(table, label=f"Z/{n}")


def symmetric3() -> FiniteGroup:
    perms = sorted(itertools.permutations(range(3)))
    idx = {q: i for i, q in enumerate(perms)}
    # (s*t)(x) = s(t(x))
    table = [[idx[tuple(s[t[x]] for x in range(3))] for t in perms] for s in perms]
    names = ["".join(str(v + 1) for v in q) for q in perms]
    return FiniteGroup(table, names=names, label="S3")


PRESETS = tuple([f"Z/{n}" for n in range(1, 7)] + ["S3"])


def from_preset(name: str) -> FiniteGroup:
    m = re.fullmatch(r"Z/(\d+)", name.strip())
    if m and 1 <= int(m.group(1)) <= 6:
        return cyclic(int(m.group(1)))
    if name.strip() == "S3":
        return symmetric3()
    raise GroupError(f"unknown group preset {name!r}; expected one of {', '.join(PRESETS)}")
