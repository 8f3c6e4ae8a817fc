"""Named instances and random generators.

Most instances are built from matrix units.  Take ``N = n + m`` points with
degrees ``g_0..g_{N-1}`` and a transitive relation ``R`` on them.  The span
of ``{e_ij : (i, j) in R}`` is then a graded algebra with
``deg(e_ij) = g_i g_j^{-1}``.  Cutting the points into the first ``n`` and
the last ``m`` gives ``A``, ``B``, ``P = e_A R e_B`` and ``Q = e_B R e_A``,
and matrix multiplication supplies every action and both pairings.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .context import MoritaContext, diagonal_context
from .graded import (
    GradedModule,
    GradedRing,
    GradedSpace,
    direct_sum,
    is_idempotent,
    submodule_and_quotient,
    suspension,
)
from .groups import FiniteGroup, cyclic, symmetric3
from .linalg import Subspace

__all__ = [
    "full_relation",
    "transitive_closure",
    "is_transitive",
    "matrix_unit_ring",
    "matrix_unit_context",
    "natural_module",
    "group_algebra",
    "matrix_subalgebra",
    "named_contexts",
    "named_context",
    "E3_NAMES",
    "random_relation",
    "random_matrix_unit_ring",
    "random_idempotent_ring",
    "random_module",
    "random_module_pair",
    "random_context",
]


def full_relation(points: Iterable[int]) -> frozenset:
    pts = list(points)
    return frozenset(itertools.product(pts, pts))


def transitive_closure(rel: Iterable[tuple[int, int]]) -> frozenset:
    r = set(rel)
    while True:
        extra = {(i, l) for (i, j) in r for (k, l) in r if j == k} - r
        if not extra:
            return frozenset(r)
        r |= extra


def is_transitive(rel) -> bool:
    r = set(rel)
    return all((i, l) in r for (i, j) in r for (k, l) in r if j == k)


def _unit_degrees(pairs, pt_deg, G: FiniteGroup):
    return [G.mul(pt_deg[i], G.inv(pt_deg[j])) for i, j in pairs]


def _mult(L, R, Res) -> np.ndarray:
    """``T[x, y, k] = 1`` iff ``e_{L[x]} e_{R[y]} = e_{Res[k]}``."""
    idx = {u: k for k, u in enumerate(Res)}
    T = np.zeros((len(L), len(R), len(Res)), dtype=np.int64)
    for x, (i, j) in enumerate(L):
        for y, (k, l) in enumerate(R):
            if j == k:
                if (i, l) not in idx:
                    raise ValueError(f"relation is not transitive at ({i},{j}),({k},{l})")
                T[x, y, idx[(i, l)]] = 1
    return T


def _names(pairs) -> tuple[str, ...]:
    return tuple(f"e{i + 1}{j + 1}" if max(i, j) < 9 else f"e{i + 1}_{j + 1}" for i, j in pairs)


def matrix_unit_ring(points: Sequence[int], rel, pt_deg: Sequence[int], group: FiniteGroup, p: int) -> GradedRing:
    pts = set(points)
    pairs = sorted(u for u in rel if u[0] in pts and u[1] in pts)
    space = GradedSpace(group, p, _unit_degrees(pairs, pt_deg, group))
    return GradedRing(space, _mult(pairs, pairs, pairs), names=_names(pairs))


def matrix_unit_context(n: int, m: int, rel, pt_deg: Sequence[int], group: FiniteGroup, p: int, name: Optional[str] = None) -> MoritaContext:
    rel = frozenset(rel)
    if not is_transitive(rel):
        raise ValueError("relation must be transitive")
    N = n + m
    if len(pt_deg) != N:
        raise ValueError("one degree per point is required")
    side_a, side_b = range(n), range(n, N)
    blk = lambda I, J: sorted(u for u in rel if u[0] in I and u[1] in J)  # noqa: E731
    AA, BB, PP, QQ = blk(side_a, side_a), blk(side_b, side_b), blk(side_a, side_b), blk(side_b, side_a)
    G = group
    A = GradedRing(GradedSpace(G, p, _unit_degrees(AA, pt_deg, G)), _mult(AA, AA, AA), names=_names(AA))
    B = GradedRing(GradedSpace(G, p, _unit_degrees(BB, pt_deg, G)), _mult(BB, BB, BB), names=_names(BB))

    def bimodule(XX, left_ring, LL, right_ring, RR):
        space = GradedSpace(G, p, _unit_degrees(XX, pt_deg, G))
        left = _mult(LL, XX, XX).transpose(0, 2, 1)
        right = _mult(XX, RR, XX).transpose(1, 2, 0)
        return GradedModule(space, left=(left_ring, left), right=(right_ring, right), names=_names(XX))

    P = bimodule(PP, A, AA, B, BB)
    Q = bimodule(QQ, B, BB, A, AA)
    return MoritaContext(A, B, P, Q, _mult(PP, QQ, AA), _mult(QQ, PP, BB), name=name)


def natural_module(ring_points: Sequence[int], rel, pt_deg, group: FiniteGroup, p: int, ring: Optional[GradedRing] = None) -> GradedModule:
    """Column vectors ``e_i`` (``i`` in the points) with ``e_ij e_j = e_i``."""
    pts = list(ring_points)
    ring = ring if ring is not None else matrix_unit_ring(pts, rel, pt_deg, group, p)
    pairs = sorted(u for u in rel if u[0] in set(pts) and u[1] in set(pts))
    pos = {x: k for k, x in enumerate(pts)}
    act = np.zeros((len(pairs), len(pts), len(pts)), dtype=np.int64)
    for t, (i, j) in enumerate(pairs):
        act[t, pos[i], pos[j]] = 1
    space = GradedSpace(group, p, [pt_deg[x] for x in pts])
    return GradedModule(space, left=(ring, act), names=tuple(f"v{x + 1}" for x in pts))


def matrix_subalgebra(mats: Sequence[np.ndarray], pt_deg: Sequence[int], group: FiniteGroup, p: int, names=None) -> GradedRing:
    """Subalgebra of ``M_n`` with the given (homogeneous, independent) basis matrices.

    Grading comes from point degrees: entry ``(i, j)`` has degree ``g_i g_j^{-1}``.
    """
    from .linalg import CoordinateSystem

    mats = [np.asarray(m, dtype=np.int64) % p for m in mats]
    n = mats[0].shape[0]
    degs = []
    for m in mats:
        ds = {group.mul(pt_deg[i], group.inv(pt_deg[j])) for i, j in zip(*np.nonzero(m))}
        if len(ds) != 1:
            raise ValueError("basis matrices must be homogeneous and nonzero")
        degs.append(ds.pop())
    cs = CoordinateSystem(np.stack([m.reshape(-1) for m in mats], axis=1), p)
    d = len(mats)
    table = np.zeros((d, d, d), dtype=np.int64)
    for i, j in itertools.product(range(d), repeat=2):
        x = cs.coords(((mats[i] @ mats[j]) % p).reshape(-1))
        if x is None:
            raise ValueError("span is not closed under multiplication")
        table[i, j] = x
    return GradedRing(GradedSpace(group, p, degs), table, names=names)


def _e4_ring() -> GradedRing:
    """span{e13, e21, e22 + e33, e23}: idempotent, torsion-free, but ``A (x)_A A -> A`` has a kernel."""
    E = lambda i, j: np.eye(3, dtype=np.int64)[:, [i]] @ np.eye(3, dtype=np.int64)[[j], :]  # noqa: E731
    mats = [E(0, 2), E(1, 0), E(1, 1) + E(2, 2), E(1, 2)]
    return matrix_subalgebra(mats, (1, 0, 0), cyclic(2), 2, names=("e13", "e21", "e22+e33", "e23"))


def group_algebra(group: FiniteGroup, p: int) -> GradedRing:
    """``F_p[G]`` graded by ``deg(g) = g``."""
    n = group.order
    t = np.zeros((n, n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            t[a, b, group.mul(a, b)] = 1
    return GradedRing(GradedSpace(group, p, tuple(range(n))), t, names=tuple(f"[{x}]" for x in group.names))


# ---------------------------------------------------------------------------
# Named corpus


def _corner_left(k: int):
    """``e_11 M_k``: relation {(0, j)}."""
    return frozenset((0, j) for j in range(k))


def _corner_right(k: int):
    return frozenset((j, 0) for j in range(k))


def _diag(rel, pts, pt_deg, group, p, name):
    A = matrix_unit_ring(pts, rel, pt_deg, group, p)
    return diagonal_context(A, name=name)


def _builders() -> dict[str, Callable[[], MoritaContext]]:
    z2, z3 = cyclic(2), cyclic(3)
    s3 = symmetric3()
    full3 = full_relation(range(3))
    cols = frozenset({(0, 0), (1, 0), (0, 2), (1, 2), (2, 0), (2, 2)})
    rows = frozenset({(0, 0), (0, 1), (2, 0), (2, 1), (0, 2), (2, 2)})
    big = frozenset({(0, 0), (0, 1), (2, 0), (2, 1)})
    block = full_relation([0, 1, 3]) | full_relation([2, 4])
    return {
        "E1": lambda: matrix_unit_context(2, 1, full3, (0, 1, 0), z2, 2, "E1"),
        "E1-p3": lambda: matrix_unit_context(2, 1, full3, (0, 1, 0), z2, 3, "E1-p3"),
        "M2-F2-Z3": lambda: matrix_unit_context(2, 1, full3, (0, 1, 2), z3, 2, "M2-F2-Z3"),
        "M2-F2-S3": lambda: matrix_unit_context(2, 1, full3, (0, 3, 1), s3, 2, "M2-F2-S3"),
        "F2-M2": lambda: matrix_unit_context(1, 2, full3, (0, 0, 1), z2, 2, "F2-M2"),
        "block": lambda: matrix_unit_context(3, 2, block, (0, 1, 0, 0, 1), z2, 2, "block"),
        "E3-corner": lambda: _diag(_corner_left(2), [0, 1], (0, 1), z2, 2, "E3-corner"),
        "E3-corner-op": lambda: _diag(_corner_right(2), [0, 1], (0, 1), z2, 2, "E3-corner-op"),
        "E3-corner3": lambda: _diag(_corner_left(3), [0, 1, 2], (0, 1, 2), z3, 2, "E3-corner3"),
        "E3-corner-p3": lambda: _diag(_corner_left(2), [0, 1], (0, 0), cyclic(1), 3, "E3-corner-p3"),
        "E3-four": lambda: _diag(big, [0, 1, 2], (0, 1, 1), z2, 2, "E3-four"),
        "E4": lambda: diagonal_context(_e4_ring(), name="E4"),
        "E3-columns": lambda: matrix_unit_context(2, 1, cols, (0, 1, 0), z2, 2, "E3-columns"),
        "E3-rows": lambda: matrix_unit_context(2, 1, rows, (0, 1, 0), z2, 2, "E3-rows"),
    }


E3_NAMES = ("E3-corner", "E3-corner-op", "E3-corner3", "E3-corner-p3", "E3-four", "E3-columns", "E3-rows")


def named_context(name: str) -> MoritaContext:
    try:
        return _builders()[name]()
    except KeyError:
        raise KeyError(f"unknown corpus instance {name!r}") from None


def named_contexts() -> dict[str, MoritaContext]:
    return {k: f() for k, f in _builders().items()}


# ---------------------------------------------------------------------------
# Random generators


def random_relation(N: int, rng: np.random.Generator, density: float = 0.4, reflexive: float = 0.7) -> frozenset:
    pairs = [(i, j) for i in range(N) for j in range(N) if rng.random() < (reflexive if i == j else density)]
    return transitive_closure(pairs)


def random_matrix_unit_ring(N: int, group: FiniteGroup, p: int, rng: np.random.Generator):
    rel = random_relation(N, rng)
    pt_deg = [int(rng.integers(0, group.order)) for _ in range(N)]
    return matrix_unit_ring(range(N), rel, pt_deg, group, p), rel, pt_deg


def random_idempotent_ring(max_dim: int, group: FiniteGroup, p: int, rng: np.random.Generator, tries: int = 200):
    """Idempotent matrix-unit ring (or a group algebra) of dimension ``<= max_dim``."""
    for _ in range(tries):
        N = int(rng.integers(1, 4))
        ring, rel, deg = random_matrix_unit_ring(N, group, p, rng)
        if 0 < ring.dim <= max_dim and is_idempotent(ring):
            return ring, rel, deg
    return group_algebra(group, p), None, None


def _closed_sets(rel, pts) -> list[frozenset]:
    """Point sets ``S`` with ``j in S, (i, j) in R => i in S``: coordinate submodules of the natural module."""
    out = []
    for r in range(len(pts) + 1):
        for S in itertools.combinations(pts, r):
            s = set(S)
            if all(i in s for (i, j) in rel if j in s and i in pts):
                out.append(frozenset(S))
    return out


def random_module(ring: GradedRing, rel, pt_deg, rng: np.random.Generator, max_dim: int = 5) -> GradedModule:
    """A random graded left module of dimension ``1..max_dim``.

    Built from the natural and regular modules by coordinate subquotients,
    suspensions, direct sums and zero-action summands.
    """
    G, p = ring.group, ring.p
    choices = []
    if rel is not None:
        N = len(pt_deg)
        pts = list(range(N))
        nat = natural_module(pts, rel, pt_deg, G, p, ring=ring)
        choices.append(nat)
        for S in _closed_sets(rel, pts):
            if 0 < len(S) < N:
                v = [np.eye(N, dtype=np.int64)[i] for i in sorted(S)]
                sq = submodule_and_quotient(nat, Subspace.span(v, p, N))
                choices += [sq.submodule, sq.quotient]
    choices.append(ring.left_regular)
    pool = [m for m in choices if 0 < m.dim <= max_dim]
    M = pool[int(rng.integers(0, len(pool)))] if pool else None
    roll = rng.random()
    if M is None or roll < 0.15:
        d = int(rng.integers(1, max_dim + 1))
        space = GradedSpace(G, p, [int(rng.integers(0, G.order)) for _ in range(d)])
        Z = GradedModule(space, left=(ring, None))
        M = Z if M is None or M.dim + d > max_dim else direct_sum(M, Z)[0]
    elif roll < 0.35 and pool:
        M2 = pool[int(rng.integers(0, len(pool)))]
        if M.dim + M2.dim <= max_dim:
            M = direct_sum(M, M2)[0]
    s = int(rng.integers(0, G.order))
    return suspension(M, s) if s != G.identity else M


def random_module_pair(group: FiniteGroup, p: int, rng: np.random.Generator, max_product: int = 9):
    """Ring and two left modules over it with ``dim M * dim N <= max_product``."""
    while True:
        ring, rel, deg = random_matrix_unit_ring(int(rng.integers(1, 4)), group, p, rng)
        if ring.dim == 0:
            continue
        M = random_module(ring, rel, deg, rng, max_dim=max_product)
        cap = max_product // M.dim
        if cap < 1:
            continue
        N = random_module(ring, rel, deg, rng, max_dim=cap)
        if M.dim * N.dim <= max_product:
            return ring, M, N


def random_context(n: int, m: int, group: FiniteGroup, p: int, rng: np.random.Generator) -> MoritaContext:
    """Matrix-unit context on a random transitive relation over ``n + m`` points."""
    rel = random_relation(n + m, rng)
    pt_deg = [int(rng.integers(0, group.order)) for _ in range(n + m)]
    return matrix_unit_context(n, m, rel, pt_deg, group, p)
