"""Group-graded rings and modules over F_p, given by structure constants.

Conventions
-----------
* Every basis vector is homogeneous; ``space.degrees[i]`` is its degree.
* A ring ``A`` stores ``table[i, j, :]`` = coordinates of ``b_i * b_j``.
  No identity element is assumed.
* A module stores, per side, an array ``action`` of shape ``(dim A, d, d)``
  where ``action[i]`` is the matrix (acting on column vectors) of
  ``m -> b_i m`` (left) or ``m -> m b_i`` (right).  A bimodule simply has
  both sides filled in; a module with neither side is a bare graded space.
* Left grading law: ``A_s M_t <= M_{st}``; right: ``M_t A_s <= M_{ts}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .groups import FiniteGroup
from .linalg import DimensionMismatch, Subspace, image, kernel, matmul, rank

__all__ = [
    "GradedSpace",
    "GradedRing",
    "GradedModule",
    "GradedLinearMap",
    "Violation",
    "ValidationReport",
    "InvalidSubmodule",
    "SubQuotient",
    "validate_ring",
    "validate_module",
    "is_idempotent",
    "ring_torsion",
    "module_torsion",
    "unital_part",
    "is_unital_module",
    "is_torsion_free",
    "suspension",
    "is_homogeneous",
    "is_stable",
    "submodule_and_quotient",
    "direct_sum",
    "zero_module",
]

SIDES = ("left", "right")


class InvalidSubmodule(ValueError):
    """Subspace is not a homogeneous, action-stable submodule."""


@dataclass(frozen=True, eq=False)
class GradedSpace:
    group: FiniteGroup
    p: int
    degrees: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        for d in self.degrees:
            if not 0 <= d < self.group.order:
                raise ValueError(f"degree {d} is not an element of {self.group!r}")

    @property
    def dim(self) -> int:
        return len(self.degrees)

    @cached_property
    def degree_array(self) -> np.ndarray:
        return np.array(self.degrees, dtype=np.int64)

    def component(self, sigma: int) -> tuple[int, ...]:
        return tuple(i for i, d in enumerate(self.degrees) if d == sigma)

    def degree_of(self, v) -> Optional[int]:
        """Degree of a nonzero homogeneous vector, else ``None``."""
        support = np.flatnonzero(np.asarray(v) % self.p)
        degs = {self.degrees[i] for i in support}
        return degs.pop() if len(degs) == 1 else None

    def with_degrees(self, degrees) -> "GradedSpace":
        return GradedSpace(self.group, self.p, tuple(degrees))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GradedSpace)
            and self.p == other.p
            and self.degrees == other.degrees
            and self.group == other.group
        )

    def __hash__(self) -> int:
        return hash((self.p, self.degrees))


def _freeze(a) -> np.ndarray:
    a = np.array(a, dtype=np.int64)
    a.setflags(write=False)
    return a


class GradedRing:
    """Graded associative F_p-algebra, possibly without identity."""

    def __init__(self, space: GradedSpace, table, names=None):
        n = space.dim
        t = np.zeros((n, n, n), dtype=np.int64) if n == 0 else np.array(table, dtype=np.int64).reshape(n, n, n)
        self.space = space
        self.table = _freeze(t % space.p)
        self.names = tuple(names) if names is not None else tuple(f"a{i}" for i in range(n))
        if len(self.names) != n:
            raise ValueError("one basis name per basis element is required")

    @property
    def p(self) -> int:
        return self.space.p

    @property
    def group(self) -> FiniteGroup:
        return self.space.group

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def degrees(self) -> tuple[int, ...]:
        return self.space.degrees

    def mul(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        return np.einsum("i,j,ijk->k", x, y, self.table) % self.p

    def left_matrix(self, x) -> np.ndarray:
        """Matrix of ``y -> x y``."""
        return np.einsum("i,ijk->kj", np.asarray(x, dtype=np.int64), self.table) % self.p

    def right_matrix(self, x) -> np.ndarray:
        """Matrix of ``y -> y x``."""
        return np.einsum("i,jik->kj", np.asarray(x, dtype=np.int64), self.table) % self.p

    def element(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[i] = 1
        return v

    @cached_property
    def left_regular(self) -> "GradedModule":
        return GradedModule(self.space, left=(self, self.table.transpose(0, 2, 1)), names=self.names)

    @cached_property
    def right_regular(self) -> "GradedModule":
        return GradedModule(self.space, right=(self, self.table.transpose(1, 2, 0)), names=self.names)

    @cached_property
    def regular_bimodule(self) -> "GradedModule":
        return GradedModule(
            self.space,
            left=(self, self.table.transpose(0, 2, 1)),
            right=(self, self.table.transpose(1, 2, 0)),
            names=self.names,
        )

    def span_of_products(self, xs: Subspace, ys: Subspace) -> Subspace:
        """``span{x y : x in xs, y in ys}``."""
        if xs.dim == 0 or ys.dim == 0:
            return Subspace.zero(self.dim, self.p)
        prods = np.einsum("ai,bj,ijk->abk", xs.basis, ys.basis, self.table).reshape(-1, self.dim)
        return Subspace(prods % self.p, self.p, self.dim)

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return (
            isinstance(other, GradedRing)
            and self.space == other.space
            and np.array_equal(self.table, other.table)
            and self.names == other.names
        )

    def __hash__(self) -> int:
        return hash((self.space, self.table.tobytes()))

    def __repr__(self) -> str:
        return f"GradedRing(dim={self.dim}, p={self.p}, group={self.group!r})"


class GradedModule:
    """Graded module with an optional left and an optional right ring action.

    A bimodule carries both; ``left_part()`` / ``right_part()`` forget one side.
    """

    def __init__(self, space: GradedSpace, left=None, right=None, names=None):
        self.space = space
        d = space.dim
        self._actions: dict[str, tuple[GradedRing, np.ndarray]] = {}
        for side, spec in (("left", left), ("right", right)):
            if spec is None:
                continue
            ring, action = spec
            if ring.p != space.p or ring.group != space.group:
                raise DimensionMismatch("ring and module must share field and grading group")
            act = np.zeros((ring.dim, d, d), dtype=np.int64) if ring.dim == 0 or d == 0 or action is None else np.array(action, dtype=np.int64).reshape(ring.dim, d, d)
            self._actions[side] = (ring, _freeze(act % space.p))
        self.names = tuple(names) if names is not None else tuple(f"m{i}" for i in range(d))
        if len(self.names) != d:
            raise ValueError("one basis name per basis element is required")

    # -- basic accessors -------------------------------------------------
    @property
    def p(self) -> int:
        return self.space.p

    @property
    def group(self) -> FiniteGroup:
        return self.space.group

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def degrees(self) -> tuple[int, ...]:
        return self.space.degrees

    @property
    def sides(self) -> tuple[str, ...]:
        return tuple(s for s in SIDES if s in self._actions)

    @property
    def side(self) -> str:
        s = self.sides
        return {("left",): "left", ("right",): "right", ("left", "right"): "bi"}.get(s, "none")

    def has(self, side: str) -> bool:
        return side in self._actions

    def ring(self, side: str) -> GradedRing:
        return self._actions[side][0]

    def action(self, side: str) -> np.ndarray:
        return self._actions[side][1]

    @property
    def left_ring(self) -> Optional[GradedRing]:
        return self._actions["left"][0] if "left" in self._actions else None

    @property
    def right_ring(self) -> Optional[GradedRing]:
        return self._actions["right"][0] if "right" in self._actions else None

    def resolve_side(self, side: Optional[str]) -> str:
        if side is None:
            if len(self.sides) != 1:
                raise ValueError(f"module has sides {self.sides}; pass side= explicitly")
            return self.sides[0]
        if side not in self._actions:
            raise ValueError(f"module has no {side} action")
        return side

    def act(self, side: str, x) -> np.ndarray:
        """Matrix of the action of the ring element with coordinates ``x``."""
        ring, act = self._actions[side]
        x = np.asarray(x, dtype=np.int64)
        if ring.dim == 0:
            return np.zeros((self.dim, self.dim), dtype=np.int64)
        return np.tensordot(x, act, axes=1) % self.p

    def left_part(self) -> "GradedModule":
        return GradedModule(self.space, left=self._actions["left"], names=self.names)

    def right_part(self) -> "GradedModule":
        return GradedModule(self.space, right=self._actions["right"], names=self.names)

    def part(self, side: str) -> "GradedModule":
        return self.left_part() if side == "left" else self.right_part()

    def with_space(self, space: GradedSpace, names=None) -> "GradedModule":
        return GradedModule(space, names=names if names is not None else self.names, **{s: self._actions[s] for s in self.sides})

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, GradedModule) or self.space != other.space or self.sides != other.sides:
            return False
        if self.names != other.names:
            return False
        for s in self.sides:
            r1, a1 = self._actions[s]
            r2, a2 = other._actions[s]
            if r1 != r2 or not np.array_equal(a1, a2):
                return False
        return True

    def __hash__(self) -> int:
        return hash((self.space, self.sides))

    def __repr__(self) -> str:
        return f"GradedModule(side={self.side}, dim={self.dim}, degrees={self.degrees})"


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple
    detail: str = ""


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, axiom: str, witness, detail: str = "") -> None:
        self.violations.append(Violation(axiom, tuple(int(w) for w in witness), detail))

    def extend(self, other: "ValidationReport") -> None:
        self.violations.extend(other.violations)

    def first(self) -> Optional[Violation]:
        return self.violations[0] if self.violations else None

    def __repr__(self) -> str:
        return "ValidationReport(ok)" if self.ok else f"ValidationReport({self.violations!r})"


def _first(mask: np.ndarray) -> Optional[tuple]:
    hits = np.argwhere(mask)
    return tuple(int(x) for x in hits[0]) if hits.size else None


def validate_ring(r: GradedRing) -> ValidationReport:
    """Grading compatibility and associativity on all basis pairs/triples."""
    rep = ValidationReport()
    n = r.dim
    if n == 0:
        return rep
    g = r.group.table
    deg = r.space.degree_array
    target = g[deg[:, None], deg[None, :]]  # deg(i)deg(j)
    wrong = (r.table != 0) & (deg[None, None, :] != target[:, :, None])
    w = _first(wrong)
    if w is not None:
        rep.add("grading", w[:2], f"b{w[0]}*b{w[1]} has a component outside degree {target[w[0], w[1]]}")
    lhs = np.einsum("ijl,lkm->ijkm", r.table, r.table) % r.p
    rhs = np.einsum("jkl,ilm->ijkm", r.table, r.table) % r.p
    w = _first((lhs != rhs).any(axis=3))
    if w is not None:
        rep.add("associativity", w, "(b_i b_j) b_k != b_i (b_j b_k)")
    return rep


def validate_module(m: GradedModule) -> ValidationReport:
    """Grading, action associativity and (for bimodules) left/right compatibility."""
    rep = ValidationReport()
    if m.dim == 0:
        return rep
    g = m.group.table
    dm = m.space.degree_array
    for side in m.sides:
        ring, act = m._actions[side]
        if ring.dim == 0:
            continue
        da = ring.space.degree_array
        if side == "left":
            target = g[da[:, None], dm[None, :]]  # (i, j) -> deg(a_i) deg(m_j)
        else:
            target = g[dm[None, :], da[:, None]]  # (i, j) -> deg(m_j) deg(a_i)
        # act[i, k, j] != 0 requires deg(m_k) == target[i, j]
        wrong = (act != 0) & (dm[None, :, None] != target[:, None, :])
        w = _first(wrong)
        if w is not None:
            rep.add(f"{side}-grading", (w[0], w[2]), f"action of a{w[0]} on m{w[2]} leaves degree {target[w[0], w[2]]}")
        combo = np.einsum("ijl,lxy->ijxy", ring.table, act) % m.p  # action of b_i b_j
        if side == "left":
            comp = np.einsum("ixz,jzy->ijxy", act, act) % m.p  # L_i L_j
        else:
            comp = np.einsum("jxz,izy->ijxy", act, act) % m.p  # R_j R_i
        w = _first((combo != comp).any(axis=2))
        if w is not None:
            rep.add(f"{side}-associativity", w, "action of a product differs from iterated action")
    if m.has("left") and m.has("right"):
        la, ra = m.action("left"), m.action("right")
        if la.shape[0] and ra.shape[0]:
            lr = np.einsum("ixz,jzy->ijxy", la, ra) % m.p
            rl = np.einsum("jxz,izy->ijxy", ra, la) % m.p
            w = _first((lr != rl).any(axis=2))
            if w is not None:
                rep.add("bimodule-compatibility", w, "(a m) b != a (m b)")
    return rep


# ---------------------------------------------------------------------------
# Torsion, unitality, idempotency


def _stacked(m: GradedModule, side: str) -> np.ndarray:
    act = m.action(side)
    return act.reshape(-1, m.dim)


def module_torsion(m: GradedModule, side: Optional[str] = None) -> Subspace:
    """``{x : A x = 0}`` (left) or ``{x : x A = 0}`` (right)."""
    side = m.resolve_side(side)
    if m.ring(side).dim == 0 or m.dim == 0:
        return Subspace.full(m.dim, m.p)
    return kernel(_stacked(m, side), m.p)


def unital_part(m: GradedModule, side: Optional[str] = None) -> Subspace:
    """``A M`` (left) or ``M A`` (right): the span of all basis actions."""
    side = m.resolve_side(side)
    act = m.action(side)
    if act.shape[0] == 0 or m.dim == 0:
        return Subspace.zero(m.dim, m.p)
    cols = np.concatenate(list(act), axis=1)
    return image(cols, m.p)


def is_unital_module(m: GradedModule, side: Optional[str] = None) -> bool:
    return unital_part(m, side).is_full()


def is_torsion_free(m: GradedModule, side: Optional[str] = None) -> bool:
    return module_torsion(m, side).is_zero()


def is_idempotent(r: GradedRing) -> bool:
    if r.dim == 0:
        return True
    return rank(r.table.reshape(-1, r.dim), r.p) == r.dim


def ring_torsion(r: GradedRing) -> tuple[Subspace, Subspace]:
    """``(l(A), r(A))`` with ``l(A) = {a : A a = 0}`` and ``r(A) = {a : a A = 0}``."""
    return module_torsion(r.left_regular, "left"), module_torsion(r.right_regular, "right")


# ---------------------------------------------------------------------------
# Suspension, subquotients, direct sums


def suspension(m: GradedModule, sigma: int) -> GradedModule:
    """Degree shift with ``M(sigma)_t = M_{t sigma}`` (left).

    Right modules use the mirror ``M(sigma)_t = M_{sigma t}``.  Bimodules are
    rejected because neither shift respects both gradings in general.
    """
    G = m.group
    inv = G.inv(sigma)
    if m.side == "bi":
        raise ValueError("suspension is defined for one-sided modules")
    if m.side == "right":
        degs = [G.mul(inv, d) for d in m.degrees]
    else:
        degs = [G.mul(d, inv) for d in m.degrees]
    return m.with_space(m.space.with_degrees(degs))


def is_homogeneous(s: Subspace, space: GradedSpace) -> bool:
    """A subspace is graded iff each of its RREF rows is homogeneous."""
    return all(space.degree_of(row) is not None for row in s.basis)


def is_stable(s: Subspace, m: GradedModule) -> bool:
    for side in m.sides:
        for t in m.action(side):
            if s.dim and s.reduce_many(matmul(t, s.basis.T, m.p).T).any():
                return False
    return True


def zero_module(like: GradedModule) -> GradedModule:
    space = GradedSpace(like.group, like.p, ())
    return GradedModule(space, names=(), **{s: (like.ring(s), None) for s in like.sides})


@dataclass
class SubQuotient:
    submodule: GradedModule
    quotient: GradedModule
    inclusion: "GradedLinearMap"
    projection: "GradedLinearMap"


def submodule_and_quotient(m: GradedModule, s: Subspace) -> SubQuotient:
    """Submodule on the RREF basis of ``s`` and the quotient on the complement coordinates."""
    if s.ambient_dim != m.dim or s.p != m.p:
        raise DimensionMismatch("subspace does not live in the module")
    if not is_homogeneous(s, m.space):
        raise InvalidSubmodule("subspace is not spanned by homogeneous vectors")
    if not is_stable(s, m):
        raise InvalidSubmodule("subspace is not stable under the ring action")
    p = m.p
    inc = s.basis.T.copy()  # d x k
    sub_deg = [m.space.degree_of(row) for row in s.basis]
    piv = list(s.pivots)
    sub_actions = {}
    for side in m.sides:
        ring, act = m._actions[side]
        # coordinates of members are their pivot entries
        sub_actions[side] = (ring, np.stack([matmul(t, inc, p)[piv, :] for t in act]) if ring.dim else None)
    sub_names = tuple(f"{m.names[c]}'" for c in piv)
    sub = GradedModule(m.space.with_degrees(sub_deg), names=sub_names, **sub_actions)

    proj = s.quotient_projection()
    lift = s.quotient_lift()
    free = s.complement_columns()
    q_actions = {}
    for side in m.sides:
        ring, act = m._actions[side]
        q_actions[side] = (ring, np.stack([matmul(matmul(proj, t, p), lift, p) for t in act]) if ring.dim else None)
    quo = GradedModule(m.space.with_degrees([m.degrees[c] for c in free]), names=tuple(f"[{m.names[c]}]" for c in free), **q_actions)
    side = "right" if m.side == "right" else "left"
    return SubQuotient(
        sub,
        quo,
        GradedLinearMap(sub, m, inc, side=side),
        GradedLinearMap(m, quo, proj, side=side),
    )


def direct_sum(m1: GradedModule, m2: GradedModule) -> tuple[GradedModule, "GradedLinearMap", "GradedLinearMap"]:
    if m1.sides != m2.sides or any(m1.ring(s) != m2.ring(s) for s in m1.sides):
        raise DimensionMismatch("direct summands must be modules over the same rings on the same sides")
    if m1.p != m2.p or m1.group != m2.group:
        raise DimensionMismatch("direct summands must share field and grading group")
    d1, d2 = m1.dim, m2.dim
    acts = {}
    for side in m1.sides:
        ring = m1.ring(side)
        a = np.zeros((ring.dim, d1 + d2, d1 + d2), dtype=np.int64)
        if ring.dim:
            a[:, :d1, :d1] = m1.action(side)
            a[:, d1:, d1:] = m2.action(side)
        acts[side] = (ring, a)
    space = m1.space.with_degrees(m1.degrees + m2.degrees)
    names = tuple(f"{x}@1" for x in m1.names) + tuple(f"{x}@2" for x in m2.names)
    s = GradedModule(space, names=names, **acts)
    side = "right" if m1.side == "right" else "left"
    i1 = np.zeros((d1 + d2, d1), dtype=np.int64)
    i1[:d1, :] = np.eye(d1, dtype=np.int64)
    i2 = np.zeros((d1 + d2, d2), dtype=np.int64)
    i2[d1:, :] = np.eye(d2, dtype=np.int64)
    return s, GradedLinearMap(m1, s, i1, side=side), GradedLinearMap(m2, s, i2, side=side)


# ---------------------------------------------------------------------------
# Graded linear maps


class GradedLinearMap:
    """Linear map ``source -> target`` with matrix of shape (target.dim, source.dim).

    ``degree`` follows the module side: a left map of degree s sends degree t
    to degree t*s, a right map sends t to s*t.
    """

    def __init__(self, source: GradedModule, target: GradedModule, matrix, degree: Optional[int] = None, side: str = "left"):
        self.source = source
        self.target = target
        mat = np.array(matrix, dtype=np.int64).reshape(target.dim, source.dim) % source.p
        mat.setflags(write=False)
        self.matrix = mat
        self.degree = source.group.identity if degree is None else int(degree)
        self.side = side

    @property
    def p(self) -> int:
        return self.source.p

    def __call__(self, v) -> np.ndarray:
        return matmul(self.matrix, np.asarray(v, dtype=np.int64), self.p)

    def kernel(self) -> Subspace:
        if self.target.dim == 0:
            return Subspace.full(self.source.dim, self.p)
        return kernel(self.matrix, self.p)

    def image(self) -> Subspace:
        if self.source.dim == 0:
            return Subspace.zero(self.target.dim, self.p)
        return image(self.matrix, self.p)

    def rank(self) -> int:
        return self.image().dim

    def is_injective(self) -> bool:
        return self.rank() == self.source.dim

    def is_surjective(self) -> bool:
        return self.rank() == self.target.dim

    def is_bijective(self) -> bool:
        return self.source.dim == self.target.dim and self.is_injective()

    def respects_degree(self) -> bool:
        G = self.source.group
        if self.side == "right":
            want = [G.mul(self.degree, d) for d in self.source.degrees]
        else:
            want = [G.mul(d, self.degree) for d in self.source.degrees]
        tdeg = self.target.space.degree_array
        for j, w in enumerate(want):
            col = np.flatnonzero(self.matrix[:, j])
            if col.size and (tdeg[col] != w).any():
                return False
        return True

    def is_linear(self, sides: Optional[tuple[str, ...]] = None) -> bool:
        """Commutes with every basis action on the requested (default: shared) sides."""
        if sides is None:
            sides = tuple(s for s in self.source.sides if self.target.has(s))
        p = self.p
        for side in sides:
            if self.source.ring(side) != self.target.ring(side):
                return False
            for ts, tt in zip(self.source.action(side), self.target.action(side)):
                if not np.array_equal(matmul(self.matrix, ts, p), matmul(tt, self.matrix, p)):
                    return False
        return True

    def then(self, after: "GradedLinearMap") -> "GradedLinearMap":
        """``after o self``."""
        G = self.source.group
        deg = G.mul(self.degree, after.degree) if self.side == "left" else G.mul(after.degree, self.degree)
        return GradedLinearMap(self.source, after.target, matmul(after.matrix, self.matrix, self.p), deg, self.side)

    def __repr__(self) -> str:
        return f"GradedLinearMap({self.source.dim}->{self.target.dim}, degree={self.degree}, side={self.side})"
