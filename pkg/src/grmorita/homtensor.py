"""Graded HOM spaces, END rings, traces, tensor products and the chi map.

A linear map ``f: M -> N`` is stored as a ``(dim N, dim M)`` matrix and, when
it has to live in a vector space, as its row-major flattening
``vec(F)[k * dim M + j] = F[k, j]``.

Degree conventions follow :class:`~grmorita.graded.GradedLinearMap`: a left
map of degree ``s`` sends ``M_t`` into ``N_{ts}``, a right map sends it into
``N_{st}``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graded import (
    GradedLinearMap,
    GradedModule,
    GradedRing,
    GradedSpace,
    submodule_and_quotient,
    suspension,
    module_torsion,
    unital_part,
)
from .linalg import CoordinateSystem, DimensionMismatch, Subspace, kernel, matmul, rank

__all__ = [
    "NotApplicable",
    "hom_constraints",
    "hom_component",
    "hom_all",
    "GradedHomSpace",
    "HomModule",
    "hom_module",
    "b_dot_hom",
    "hom_suspension_check",
    "trace_ideal",
    "generates",
    "is_two_sided_ideal",
    "TensorProduct",
    "tensor_over",
    "torsion_quotient",
    "chi_iso",
    "EndRing",
    "end_ring",
    "CanonicalMap",
    "canonical_map",
    "IsoResult",
    "find_isomorphism",
    "other_side",
]


class NotApplicable(ValueError):
    """Precondition of a construction does not hold."""


def other_side(side: str) -> str:
    return "right" if side == "left" else "left"


def _resolve_hom_side(M: GradedModule, N: GradedModule, side: Optional[str]) -> str:
    if side is not None:
        return side
    common = [s for s in ("left", "right") if M.has(s) and N.has(s)]
    if len(common) == 1:
        return common[0]
    if not common and not M.sides and not N.sides:
        return "left"
    raise ValueError(f"ambiguous HOM side for modules with sides {M.sides} / {N.sides}")


def _constraint_sides(M: GradedModule, N: GradedModule, side: str) -> tuple[str, ...]:
    sides = ("left", "right") if side == "both" else (side,)
    out = []
    for s in sides:
        if M.has(s) != N.has(s):
            raise DimensionMismatch(f"only one of the modules has a {s} action")
        if M.has(s):
            if M.ring(s) != N.ring(s):
                raise DimensionMismatch(f"{s} rings differ")
            out.append(s)
    return tuple(out)


def _allowed_cells(M: GradedModule, N: GradedModule, sigma: int, side: str) -> np.ndarray:
    """Boolean (dN, dM) mask of matrix entries compatible with degree ``sigma``."""
    G = M.group
    if side == "right":
        want = np.array([G.mul(sigma, d) for d in M.degrees], dtype=np.int64)
    else:
        want = np.array([G.mul(d, sigma) for d in M.degrees], dtype=np.int64)
    return N.space.degree_array[:, None] == want[None, :]


def hom_constraints(M: GradedModule, N: GradedModule, side: str) -> np.ndarray:
    """Stacked linear conditions on ``vec(F)`` for ``F`` to commute with the actions."""
    dM, dN, p = M.dim, N.dim, M.p
    rows = []
    for s in _constraint_sides(M, N, side):
        for am, an in zip(M.action(s), N.action(s)):
            # vec(F am) - vec(an F)
            rows.append((np.kron(np.eye(dN, dtype=np.int64), am.T) - np.kron(an, np.eye(dM, dtype=np.int64))) % p)
    if not rows:
        return np.zeros((0, dN * dM), dtype=np.int64)
    return np.concatenate(rows, axis=0)


def hom_component(M: GradedModule, N: GradedModule, sigma: int, side: Optional[str] = None, constraints=None) -> Subspace:
    """``HOM(M, N)_sigma`` as a canonical subspace of vectorised matrices."""
    side = _resolve_hom_side(M, N, side)
    if M.p != N.p or M.group != N.group:
        raise DimensionMismatch("modules over different fields or gradings")
    dM, dN, p = M.dim, N.dim, M.p
    n = dM * dN
    if n == 0:
        return Subspace.zero(0, p)
    grade_side = "right" if side == "right" else "left"
    cells = np.flatnonzero(_allowed_cells(M, N, sigma, grade_side).reshape(-1))
    if cells.size == 0:
        return Subspace.zero(n, p)
    C = hom_constraints(M, N, side) if constraints is None else constraints
    sub = C[:, cells]
    sub = sub[sub.any(axis=1)] if sub.size else sub
    if sub.shape[0] == 0:
        local = np.eye(cells.size, dtype=np.int64)
    else:
        local = kernel(sub, p).basis
    full = np.zeros((local.shape[0], n), dtype=np.int64)
    full[:, cells] = local
    return Subspace(full, p, n)


@dataclass
class GradedHomSpace:
    source: GradedModule
    target: GradedModule
    side: str
    components: dict[int, Subspace]

    @property
    def p(self) -> int:
        return self.source.p

    @property
    def dim(self) -> int:
        return sum(c.dim for c in self.components.values())

    def dims(self) -> dict[int, int]:
        return {s: c.dim for s, c in self.components.items()}

    def basis(self) -> tuple[np.ndarray, tuple[int, ...]]:
        """All component bases stacked in degree order, plus their degrees."""
        n = self.source.dim * self.target.dim
        rows, degs = [np.zeros((0, n), dtype=np.int64)], []
        for s in sorted(self.components):
            c = self.components[s]
            rows.append(c.basis)
            degs.extend([s] * c.dim)
        return np.concatenate(rows, axis=0), tuple(degs)

    def maps(self, sigma: int) -> list[GradedLinearMap]:
        grade_side = "right" if self.side == "right" else "left"
        return [
            GradedLinearMap(self.source, self.target, row.reshape(self.target.dim, self.source.dim), sigma, grade_side)
            for row in self.components[sigma].basis
        ]

    def total(self) -> Subspace:
        n = self.source.dim * self.target.dim
        out = Subspace.zero(n, self.p)
        for c in self.components.values():
            out = out + c
        return out

    def independent(self) -> bool:
        """Component bases are jointly independent, so the sum over degrees is direct."""
        return self.total().dim == self.dim


def hom_all(M: GradedModule, N: GradedModule, side: Optional[str] = None) -> GradedHomSpace:
    side = _resolve_hom_side(M, N, side)
    C = hom_constraints(M, N, side) if M.dim * N.dim else None
    comps = {s: hom_component(M, N, s, side, constraints=C) for s in M.group.elements}
    return GradedHomSpace(M, N, side, comps)


def hom_suspension_check(M: GradedModule, N: GradedModule, sigma: int, side: Optional[str] = None) -> bool:
    """``dim HOM(M,N)_s == dim Hom(M, N(s)) == dim Hom(M(s^-1), N)`` for one-sided modules."""
    side = _resolve_hom_side(M, N, side)
    e = M.group.identity
    a = hom_component(M, N, sigma, side).dim
    b = hom_component(M, suspension(N, sigma), e, side).dim
    c = hom_component(suspension(M, M.group.inv(sigma)), N, e, side).dim
    return a == b == c


# ---------------------------------------------------------------------------
# HOM as a module


class HomModule:
    """A graded subspace of ``HOM(M, N)`` together with its induced module structure.

    ``basis`` holds one vectorised map per row; ``module`` is the
    :class:`GradedModule` on those coordinates.
    """

    def __init__(self, source: GradedModule, target: GradedModule, side: str, basis: np.ndarray, module: GradedModule):
        self.source = source
        self.target = target
        self.side = side
        n = source.dim * target.dim
        b = np.asarray(basis, dtype=np.int64)
        self.basis = b.reshape(-1, n) if n else np.zeros((0, 0), dtype=np.int64)
        self.module = module
        self._cs = CoordinateSystem(self.basis.T, source.p)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def p(self) -> int:
        return self.source.p

    def matrix(self, coords) -> np.ndarray:
        """Matrix of the map with the given coordinates."""
        c = np.asarray(coords, dtype=np.int64).reshape(-1)
        if self.dim == 0:
            return np.zeros((self.target.dim, self.source.dim), dtype=np.int64)
        v = matmul(c.reshape(1, -1), self.basis, self.p).reshape(-1)
        return v.reshape(self.target.dim, self.source.dim)

    def basis_matrix(self, t: int) -> np.ndarray:
        return self.basis[t].reshape(self.target.dim, self.source.dim)

    def coords(self, F) -> Optional[np.ndarray]:
        return self._cs.coords(np.asarray(F, dtype=np.int64).reshape(-1))

    def coords_many(self, Fs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Coordinates for a stack of vectorised maps (one per row)."""
        n = self.source.dim * self.target.dim
        if n == 0:
            k = np.asarray(Fs).shape[0] if np.asarray(Fs).ndim >= 2 else 0
            return np.zeros((self.dim, k), dtype=np.int64), np.ones(k, dtype=bool)
        return self._cs.coords_many(np.asarray(Fs, dtype=np.int64).reshape(-1, self.source.dim * self.target.dim).T)

    def subspace(self) -> Subspace:
        return Subspace(self.basis, self.p, self.source.dim * self.target.dim)

    def submodule(self, s: Subspace) -> "HomModule":
        """Restrict to a submodule ``s`` given in this module's coordinates."""
        sq = submodule_and_quotient(self.module, s)
        new_basis = matmul(s.basis, self.basis, self.p) if s.dim else np.zeros((0, self.basis.shape[1]), dtype=np.int64)
        return HomModule(self.source, self.target, self.side, new_basis, sq.submodule)

    def __repr__(self) -> str:
        return f"HomModule(dim={self.dim}, side={self.side}, module={self.module!r})"


def _induced_action(hs: HomModule, ops: list[np.ndarray]) -> np.ndarray:
    """Express the linear operators ``ops`` on vec-space in ``hs`` coordinates."""
    out = []
    for op in ops:
        images = matmul(op, hs.basis.T, hs.p)  # columns = images of basis maps
        x, ok = hs._cs.coords_many(images)
        if not ok.all():
            raise ArithmeticError("HOM space is not stable under the induced action")
        out.append(x)
    return np.stack(out) if out else np.zeros((0, hs.dim, hs.dim), dtype=np.int64)


def _hom_operators(M: GradedModule, N: GradedModule, side: str) -> dict:
    """Operators on vec(F) for the residual actions on ``HOM(M, N)``.

    With ``side == "left"`` (left-linear maps): the right ring of ``M`` acts
    on the left by ``(b f)(x) = f(x b)`` and the right ring of ``N`` acts on
    the right by ``(f c)(x) = f(x) c``.  With ``side == "right"`` the mirror:
    ``(f c)(x) = f(c x)`` and ``(d f)(x) = d f(x)``.
    """
    dM, dN = M.dim, N.dim
    IM = np.eye(dM, dtype=np.int64)
    IN = np.eye(dN, dtype=np.int64)
    acts = {}
    o = other_side(side)
    if M.has(o):
        # F -> F T for T an action matrix on M
        ops = [np.kron(IN, t.T) for t in M.action(o)]
        acts[side] = (M.ring(o), ops)  # residual action sits on the same side
    if N.has(o):
        ops = [np.kron(t, IM) for t in N.action(o)]
        acts[o] = (N.ring(o), ops)
    return acts


def hom_module(M: GradedModule, N: GradedModule, side: Optional[str] = None) -> HomModule:
    """``HOM(M, N)`` over the common ``side``, as a module over the residual rings."""
    side = _resolve_hom_side(M, N, side)
    hs = hom_all(M, N, side)
    basis, degs = hs.basis()
    space = GradedSpace(M.group, M.p, degs)
    tmp = HomModule(M, N, side, basis, GradedModule(space))
    actions = {}
    for s, (ring, ops) in _hom_operators(M, N, side).items():
        actions[s] = (ring, _induced_action(tmp, ops))
    names = tuple(f"f{t}" for t in range(len(degs)))
    return HomModule(M, N, side, basis, GradedModule(space, names=names, **actions))


def b_dot_hom(M: GradedModule, N: GradedModule, side: Optional[str] = None) -> HomModule:
    """``B . HOM_A(M, N)`` (left) or ``HOM_A(M, N) . B`` (right), with ``B`` the other ring of ``M``."""
    h = hom_module(M, N, side)
    if not h.module.has(h.side):
        raise NotApplicable("source module carries no second ring action")
    return h.submodule(unital_part(h.module, h.side))


def trace_ideal(M: GradedModule, N: GradedModule, side: Optional[str] = None) -> Subspace:
    """Sum of images of all graded homomorphisms ``M -> N``."""
    hs = hom_all(M, N, side)
    basis, _ = hs.basis()
    if basis.shape[0] == 0 or M.dim == 0:
        return Subspace.zero(N.dim, N.p)
    cols = basis.reshape(-1, N.dim, M.dim).transpose(1, 0, 2).reshape(N.dim, -1)
    return Subspace(cols.T, N.p, N.dim)


def generates(P: GradedModule, M: GradedModule, side: Optional[str] = None) -> bool:
    return trace_ideal(P, M, side).is_full()


def is_two_sided_ideal(ring: GradedRing, s: Subspace) -> bool:
    bi = ring.regular_bimodule
    for side in ("left", "right"):
        for t in bi.action(side):
            if s.dim and s.reduce_many(matmul(t, s.basis.T, ring.p).T).any():
                return False
    return True


# ---------------------------------------------------------------------------
# Tensor products


@dataclass
class TensorProduct:
    left: GradedModule
    right: GradedModule
    scalar: GradedModule  # the full scalar tensor space with outer actions
    relations: Subspace
    module: GradedModule  # the quotient
    proj: np.ndarray
    lift: np.ndarray

    @property
    def dim(self) -> int:
        return self.module.dim

    @property
    def p(self) -> int:
        return self.module.p

    def scalar_vec(self, m, n) -> np.ndarray:
        return np.kron(np.asarray(m, dtype=np.int64), np.asarray(n, dtype=np.int64)) % self.p

    def pure(self, m, n) -> np.ndarray:
        """Coordinates of ``m (x) n`` in the quotient."""
        return matmul(self.proj, self.scalar_vec(m, n), self.p)

    def pure_basis(self, i: int, j: int) -> np.ndarray:
        return self.proj[:, i * self.right.dim + j].copy()

    def factor(self, bilinear: np.ndarray) -> Optional[np.ndarray]:
        """Matrix of the linear map induced by a bilinear table ``T[i, j, :]``.

        Returns ``None`` when the table is not balanced.
        """
        T = np.asarray(bilinear, dtype=np.int64)
        dm, dn = self.left.dim, self.right.dim
        out = T.shape[2] if T.ndim == 3 else 0
        flat = T.reshape(dm * dn, out).T % self.p  # out x (dm*dn)
        if self.relations.dim and matmul(flat, self.relations.basis.T, self.p).any():
            return None
        return matmul(flat, self.lift, self.p)


def tensor_over(M: GradedModule, N: GradedModule) -> TensorProduct:
    """``M (x)_B N`` for a right ``B``-module ``M`` and a left ``B``-module ``N``.

    Outer actions (left ring of ``M``, right ring of ``N``) are carried over.
    """
    if not (M.has("right") and N.has("left")):
        raise DimensionMismatch("tensor_over needs a right module and a left module")
    if M.ring("right") != N.ring("left"):
        raise DimensionMismatch("middle rings differ")
    if M.p != N.p or M.group != N.group:
        raise DimensionMismatch("modules over different fields or gradings")
    p, G = M.p, M.group
    dm, dn = M.dim, N.dim
    Im = np.eye(dm, dtype=np.int64)
    In = np.eye(dn, dtype=np.int64)
    degs = [G.mul(a, b) for a in M.degrees for b in N.degrees]
    space = GradedSpace(G, p, degs)
    acts = {}
    if M.has("left"):
        acts["left"] = (M.ring("left"), np.stack([np.kron(t, In) for t in M.action("left")]) if M.ring("left").dim else None)
    if N.has("right"):
        acts["right"] = (N.ring("right"), np.stack([np.kron(Im, t) for t in N.action("right")]) if N.ring("right").dim else None)
    names = tuple(f"{a}*{b}" for a in M.names for b in N.names)
    scalar = GradedModule(space, names=names, **acts)
    rel_cols = [(np.kron(r, In) - np.kron(Im, l)) % p for r, l in zip(M.action("right"), N.action("left"))]
    if rel_cols and dm * dn:
        relations = Subspace(np.concatenate(rel_cols, axis=1).T, p, dm * dn)
    else:
        relations = Subspace.zero(dm * dn, p)
    sq = submodule_and_quotient(scalar, relations)
    return TensorProduct(M, N, scalar, relations, sq.quotient, relations.quotient_projection(), relations.quotient_lift())


def torsion_quotient(M: GradedModule, side: Optional[str] = None):
    """``M / t(M)`` with its projection; see :func:`submodule_and_quotient`."""
    return submodule_and_quotient(M, module_torsion(M, side))


# ---------------------------------------------------------------------------
# chi


def chi_iso(M: GradedModule, strict: bool = True) -> tuple[GradedLinearMap, HomModule]:
    """``m -> (a -> a m)`` from ``M`` into ``A . HOM_A(A, M)``.

    With ``strict`` the map must be bijective, otherwise :class:`NotApplicable`
    is raised; without it the (possibly degenerate) map is returned as is,
    landing in the whole of ``HOM_A(A, M)`` when the unital part is too small.
    """
    A = M.ring("left")
    target = b_dot_hom(A.regular_bimodule, M.left_part(), "left")
    d = M.dim
    act = M.action("left")
    # F[:, i] = a_i m_j ; F has shape (dM, dA)
    images = [act[:, :, j].T if A.dim else np.zeros((d, 0), dtype=np.int64) for j in range(d)]
    cols = [target.coords(F) for F in images]
    if any(c is None for c in cols):
        if strict:
            raise NotApplicable("image of chi leaves the unital part of HOM")
        target = hom_module(A.regular_bimodule, M.left_part(), "left")
        cols = [target.coords(F) for F in images]
    mat = np.stack(cols, axis=1) if cols else np.zeros((target.dim, 0), dtype=np.int64)
    f = GradedLinearMap(M, target.module, mat, side="left")
    if strict and not f.is_bijective():
        raise NotApplicable("chi is not bijective: module is not unital and torsion-free")
    return f, target


# ---------------------------------------------------------------------------
# END rings


@dataclass
class EndRing:
    """``END(M)`` on the HOM basis, with the product written for maps acting opposite the scalars.

    Left modules: ``f * g`` means "first f, then g" (matrix ``G F``); right
    modules: ``f * g = f o g`` (matrix ``F G``).  Either way
    ``deg(f * g) = deg(f) deg(g)``.
    """

    module: GradedModule
    side: str
    hom: HomModule
    ring: GradedRing

    def element_matrix(self, coords) -> np.ndarray:
        return self.hom.matrix(coords)

    def coords(self, F) -> Optional[np.ndarray]:
        return self.hom.coords(F)


def end_ring(M: GradedModule, side: Optional[str] = None) -> EndRing:
    side = _resolve_hom_side(M, M, side)
    h = hom_module(M, M, side)
    k, p = h.dim, M.p
    mats = [h.basis_matrix(t) for t in range(k)]
    table = np.zeros((k, k, k), dtype=np.int64)
    for i, j in itertools.product(range(k), repeat=2):
        prod = matmul(mats[j], mats[i], p) if side != "right" else matmul(mats[i], mats[j], p)
        c = h.coords(prod)
        if c is None:
            raise ArithmeticError("HOM basis is not closed under composition")
        table[i, j] = c
    ring = GradedRing(h.module.space, table, names=tuple(f"f{t}" for t in range(k)))
    return EndRing(M, side, h, ring)


@dataclass
class CanonicalMap:
    """Linear map ``ring -> END`` (columns are coordinates of images of ring basis elements)."""

    ring: GradedRing
    end: EndRing
    matrix: np.ndarray

    @property
    def p(self) -> int:
        return self.ring.p

    def kernel(self) -> Subspace:
        if self.end.ring.dim == 0:
            return Subspace.full(self.ring.dim, self.p)
        return kernel(self.matrix, self.p)

    def image(self) -> Subspace:
        return Subspace(self.matrix.T, self.p, self.end.ring.dim)

    def is_graded(self) -> bool:
        deg_end = self.end.ring.space.degree_array
        for j, d in enumerate(self.ring.degrees):
            nz = np.flatnonzero(self.matrix[:, j])
            if nz.size and (deg_end[nz] != d).any():
                return False
        return True

    def is_ring_morphism(self) -> bool:
        if self.ring.dim == 0:
            return True
        p = self.p
        lhs = matmul(self.matrix, self.ring.table.reshape(-1, self.ring.dim).T, p)  # image of b_i b_j
        rhs = np.einsum("xi,yj,xyk->kij", self.matrix, self.matrix, self.end.ring.table).reshape(self.end.ring.dim, -1) % p
        return bool(np.array_equal(lhs, rhs))


def canonical_map(ring: GradedRing, M: GradedModule, end: Optional[EndRing] = None) -> CanonicalMap:
    """Send ``a`` to the operator of ``a`` on the action side of ``M`` opposite the END side.

    For a ``(B, A)``-bimodule ``Q`` and ``END(_B Q)`` this is ``a -> (q -> q a)``;
    for ``END(Q_A)`` it is ``b -> (q -> b q)``.
    """
    if end is None:
        raise ValueError("pass the END ring the map should land in")
    act_side = other_side(end.side)
    if not M.has(act_side) or M.ring(act_side) != ring:
        raise DimensionMismatch("ring does not act on the module on the expected side")
    cols = []
    for t in M.action(act_side):
        c = end.coords(t)
        if c is None:
            raise ArithmeticError("ring element does not act by an endomorphism")
        cols.append(c)
    mat = np.stack(cols, axis=1) if cols else np.zeros((end.ring.dim, 0), dtype=np.int64)
    return CanonicalMap(ring, end, mat % ring.p)


# ---------------------------------------------------------------------------
# Isomorphism search


@dataclass
class IsoResult:
    decided: bool
    isomorphic: bool
    matrix: Optional[np.ndarray] = None

    def __bool__(self) -> bool:
        return self.isomorphic


def find_isomorphism(M: GradedModule, N: GradedModule, side: Optional[str] = None, budget: int = 4096, rng=None) -> IsoResult:
    """Look for an invertible degree-e intertwiner ``M -> N``.

    Exhaustive over the intertwiner space when it has at most ``budget``
    elements, randomised otherwise (undecided if nothing is found).
    """
    if M.sides != N.sides:
        return IsoResult(True, False)
    if M.dim != N.dim:
        return IsoResult(True, False)
    if M.dim == 0:
        return IsoResult(True, True, np.zeros((0, 0), dtype=np.int64))
    if side is None:
        side = {"bi": "both", "none": "left"}.get(M.side, M.side)
    if sorted(M.degrees) != sorted(N.degrees):
        return IsoResult(True, False)
    comp = hom_component(M, N, M.group.identity, side)
    k, p, d = comp.dim, M.p, M.dim
    if k == 0:
        return IsoResult(True, False)
    def attempt(c):
        F = matmul(np.asarray(c, dtype=np.int64).reshape(1, -1), comp.basis, p).reshape(d, d)
        return F if rank(F, p) == d else None

    if k == 1:
        F = attempt([1])
        return IsoResult(True, F is not None, F)
    if p ** k <= budget:
        for c in itertools.product(range(p), repeat=k):
            F = attempt(c)
            if F is not None:
                return IsoResult(True, True, F)
        return IsoResult(True, False)
    rng = np.random.default_rng(0) if rng is None else rng
    for _ in range(budget):
        F = attempt(rng.integers(0, p, size=k))
        if F is not None:
            return IsoResult(True, True, F)
    return IsoResult(False, False)
