"""Submodule and ideal lattices, and their transport along a Morita context.

Lattices are enumerated as sets of canonical :class:`Subspace` objects.
Small modules (``dim <= 6`` and ``p <= 3``) are enumerated exhaustively as
sums of cyclic submodules generated by homogeneous vectors; larger ones get a
generated sublattice built from random homogeneous generators, flagged
incomplete.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .context import (
    MoritaContext,
    _ev_images,
    _left,
    functor_hom,
    functor_tensor,
    inverse_tensor,
    traces_surjective,
)
from .graded import GradedModule, GradedRing, ring_torsion
from .linalg import Subspace, kernel, matmul
from .report import Checks

__all__ = [
    "EXHAUSTIVE_MAX_DIM",
    "EXHAUSTIVE_MAX_P",
    "SubmoduleLattice",
    "IdealLattice",
    "exhaustive_regime",
    "homogeneous_count",
    "enumerate_submodules",
    "enumerate_ideals",
    "inclusion_matrix",
    "lambda_map",
    "lambda_inverse",
    "lambda_iso",
    "ideal_maps",
    "ideal_lattice_iso",
    "is_graded_simple",
    "is_graded_semisimple",
    "annihilator",
    "is_faithful",
    "preservation_suite",
    "torsion_free_rings",
]

EXHAUSTIVE_MAX_DIM = 6
EXHAUSTIVE_MAX_P = 3
DEFAULT_BUDGET = 4096
GENERATED_BUDGET = 256


def exhaustive_regime(dim: int, p: int) -> bool:
    return dim <= EXHAUSTIVE_MAX_DIM and p <= EXHAUSTIVE_MAX_P


def _homogeneous_vectors(degrees: Sequence[int], p: int, rng=None, count: Optional[int] = None):
    """Nonzero homogeneous vectors with leading coefficient 1.

    All of them when ``count`` is None, else ``count`` random ones.
    """
    n = len(degrees)
    comps: dict[int, list[int]] = {}
    for i, d in enumerate(degrees):
        comps.setdefault(d, []).append(i)
    if count is None:
        for idx in comps.values():
            for coeffs in itertools.product(range(p), repeat=len(idx)):
                nz = [c for c in coeffs if c]
                if not nz or nz[0] != 1:
                    continue
                v = np.zeros(n, dtype=np.int64)
                v[idx] = coeffs
                yield v
        return
    keys = sorted(comps)
    for _ in range(count):
        idx = comps[keys[int(rng.integers(0, len(keys)))]]
        v = np.zeros(n, dtype=np.int64)
        v[idx] = rng.integers(0, p, size=len(idx))
        if v.any():
            yield v


def _span_of_images(ops: Sequence[np.ndarray], vecs: np.ndarray, p: int, n: int) -> Subspace:
    """``span{T v : T in ops, v in vecs}`` (vecs as rows)."""
    if len(ops) == 0 or vecs.shape[0] == 0:
        return Subspace.zero(n, p)
    rows = np.concatenate([matmul(vecs, np.asarray(T).T, p) for T in ops])
    return Subspace(rows, p, n)


@dataclass
class _Closure:
    """Sum/meet closure of a set of generators, capped by ``budget`` elements."""

    n: int
    p: int
    unital: object  # Subspace -> Subspace
    elements: set = field(default_factory=set)
    budget_hit: bool = False

    def run(self, gens: list[Subspace], budget: int, meets: bool) -> None:
        zero = Subspace.zero(self.n, self.p)
        self.elements = {zero}
        frontier = [zero]
        gens = sorted(set(gens), key=lambda s: (s.dim, s.basis.tobytes()))
        while frontier:
            new: list[Subspace] = []
            for x in frontier:
                cands = [x + g for g in gens]
                if meets:
                    cands += [self.unital(x & y) for y in list(self.elements)]
                for y in cands:
                    if y not in self.elements:
                        if len(self.elements) >= budget:
                            self.budget_hit = True
                            return
                        self.elements.add(y)
                        new.append(y)
            frontier = new


def _point_mask(s: Subspace) -> int:
    """Bitmask of all vectors in ``s``, indexed by their base-``p`` encoding."""
    p, k = s.p, s.dim
    if k == 0:
        return 1
    coeffs = np.array(list(itertools.product(range(p), repeat=k)), dtype=np.int64)
    pts = coeffs @ s.basis % p
    idx = pts @ (p ** np.arange(s.ambient_dim, dtype=np.int64))
    return sum(1 << int(i) for i in np.unique(idx))


def inclusion_matrix(elements: Sequence[Subspace]) -> np.ndarray:
    """``out[a, b]`` is True when ``elements[a]`` is contained in ``elements[b]``."""
    k = len(elements)
    out = np.zeros((k, k), dtype=bool)
    if k == 0:
        return out
    n, p = elements[0].ambient_dim, elements[0].p
    if p ** n <= 1 << 16:
        masks = [_point_mask(s) for s in elements]
        for a, ma in enumerate(masks):
            for b, mb in enumerate(masks):
                out[a, b] = not (ma & ~mb)
    else:
        for a, b in itertools.product(range(k), repeat=2):
            out[a, b] = elements[b].contains(elements[a])
    return out


def _order_witness(src: Sequence[Subspace], dst: Sequence[Subspace]) -> Optional[tuple[int, int]]:
    bad = np.argwhere(inclusion_matrix(src) != inclusion_matrix(dst))
    return None if bad.size == 0 else (int(bad[0, 0]), int(bad[0, 1]))


def _sorted(elements) -> list[Subspace]:
    return sorted(elements, key=lambda s: (s.dim, s.basis.tobytes()))


@dataclass
class SubmoduleLattice:
    """Graded unital submodules of ``module`` (on ``side``) ordered by inclusion."""

    module: GradedModule
    side: str
    elements: list[Subspace]
    complete: bool
    budget_hit: bool = False

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, s: Subspace) -> bool:
        return s in set(self.elements)

    @property
    def bottom(self) -> Subspace:
        return Subspace.zero(self.module.dim, self.module.p)

    @property
    def top(self) -> Subspace:
        return _unital_of(self.module, self.side, Subspace.full(self.module.dim, self.module.p))

    def index(self, s: Subspace) -> int:
        return self.elements.index(s)

    def atoms(self) -> list[Subspace]:
        nz = [s for s in self.elements if s.dim]
        return [s for s in nz if not any(t != s and s.contains(t) for t in nz)]


def _unital_of(M: GradedModule, side: str, s: Subspace) -> Subspace:
    return _span_of_images(M.action(side), s.basis, M.p, M.dim)


def homogeneous_count(degrees: Sequence[int], p: int) -> int:
    """Number of homogeneous vectors (zero included once per component)."""
    comps: dict[int, int] = {}
    for d in degrees:
        comps[d] = comps.get(d, 0) + 1
    return sum(p ** k for k in comps.values())


def enumerate_submodules(M: GradedModule, budget: Optional[int] = None, side: Optional[str] = None, rng=None,
                         generators: int = 24, exhaustive: Optional[bool] = None) -> SubmoduleLattice:
    """All graded unital submodules when small, else a flagged generated sublattice.

    A unital submodule ``K = A K`` is the sum of the cyclic submodules ``A v``
    over a homogeneous basis of ``K``, so sums of homogeneous cyclics exhaust
    the lattice. Non-unital sums (possible only over non-idempotent rings) are
    discarded. ``exhaustive`` overrides the size-based choice of mode.
    """
    side = M.resolve_side(side) if M.side != "bi" else (side or "left")
    p, n = M.p, M.dim
    ops = M.action(side)
    if exhaustive is None:
        exhaustive = exhaustive_regime(n, p)
    if budget is None:
        budget = DEFAULT_BUDGET if exhaustive else GENERATED_BUDGET
    if exhaustive:
        vecs = list(_homogeneous_vectors(M.degrees, p))
    else:
        rng = np.random.default_rng(0) if rng is None else rng
        vecs = list(_homogeneous_vectors(M.degrees, p, rng=rng, count=generators))
    gens = [_span_of_images(ops, v[None, :], p, n) for v in vecs]
    cl = _Closure(n, p, lambda s: _unital_of(M, side, s))
    cl.run(gens, budget, meets=not exhaustive)
    elems = [s for s in cl.elements if _unital_of(M, side, s) == s]
    return SubmoduleLattice(M, side, _sorted(elems), exhaustive and not cl.budget_hit, cl.budget_hit)


@dataclass
class IdealLattice:
    """Graded two-sided ideals ``I`` with ``A I = I A = I``."""

    ring: GradedRing
    elements: list[Subspace]
    complete: bool
    budget_hit: bool = False

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, s: Subspace) -> bool:
        return s in set(self.elements)


def _two_sided(ring: GradedRing, vecs: np.ndarray) -> Subspace:
    """``span{a_i v a_j}`` for the rows ``v`` of ``vecs``."""
    p, n = ring.p, ring.dim
    if n == 0 or vecs.shape[0] == 0:
        return Subspace.zero(n, p)
    t = ring.table
    # x_j v = sum_a v_a t[a, j]; then a_i (v a_j)
    va = np.einsum("va,ajk->vjk", vecs, t) % p
    aiva = np.einsum("vjk,ikl->vijl", va, t) % p
    return Subspace(aiva.reshape(-1, n), p, n)


def _unital_ideal(ring: GradedRing, s: Subspace) -> Subspace:
    return _two_sided(ring, s.basis)


def enumerate_ideals(ring: GradedRing, budget: Optional[int] = None, rng=None, generators: int = 24) -> IdealLattice:
    """The unital ideal lattice ``T_A``, as sums of ``A v A`` for homogeneous ``v``."""
    p, n = ring.p, ring.dim
    exhaustive = exhaustive_regime(n, p)
    if budget is None:
        budget = DEFAULT_BUDGET if exhaustive else GENERATED_BUDGET
    if exhaustive:
        vecs = list(_homogeneous_vectors(ring.degrees, p))
    else:
        rng = np.random.default_rng(0) if rng is None else rng
        vecs = list(_homogeneous_vectors(ring.degrees, p, rng=rng, count=generators))
    gens = [_two_sided(ring, v[None, :]) for v in vecs]
    cl = _Closure(n, p, lambda s: _unital_ideal(ring, s))
    cl.run(gens, budget, meets=not exhaustive)
    elems = [s for s in cl.elements if _unital_ideal(ring, s) == s]
    return IdealLattice(ring, _sorted(elems), exhaustive and not cl.budget_hit, cl.budget_hit)


# ---------------------------------------------------------------------------
# Lambda_M


def lambda_map(F, K: Subspace, dQ: int) -> Subspace:
    """Image of ``F(K) -> F(M)``: the span of ``[q_i (x) k]`` for ``k`` in ``K``."""
    dM = K.ambient_dim
    p = F.module.p
    if K.dim == 0 or dQ == 0 or F.dim == 0:
        return Subspace.zero(F.dim, p)
    rows = []
    for i in range(dQ):
        vec = np.zeros((K.dim, dQ * dM), dtype=np.int64)
        vec[:, i * dM:(i + 1) * dM] = K.basis
        rows.append(matmul(vec, F.proj.T, p))
    return Subspace(np.concatenate(rows), p, F.dim)


def lambda_inverse(c: MoritaContext, M: GradedModule, F, N: Subspace) -> Subspace:
    """Image of ``P (x) N -> M``, ``p (x) [q (x) m] -> <p, q> m``."""
    M = _left(M)
    p, dM = M.p, M.dim
    if N.dim == 0 or dM == 0 or c.P.dim == 0:
        return Subspace.zero(dM, p)
    E = _ev_images(c.mu, M)  # (dP, dQ, dM, dM)
    scal = matmul(N.basis, F.lift.T, p)  # rows in Q (x) M scalar coords
    dP, dQ = E.shape[0], E.shape[1]
    E2 = E.reshape(dP, dQ * dM, dM)
    rows = np.einsum("ns,asx->anx", scal, E2) % p
    return Subspace(rows.reshape(-1, dM), p, dM)


def lambda_iso(c: MoritaContext, M: GradedModule, lattice: Optional[SubmoduleLattice] = None,
               budget: Optional[int] = None) -> Checks:
    """``K -> Im F(i_K)`` is an order bijection onto the lattice of ``F(M)``."""
    M = _left(M)
    ch = Checks("lambda")
    lat = enumerate_submodules(M, budget, "left") if lattice is None else lattice
    F = functor_tensor(c, M)
    # F(M) may exceed the size regime while its generators are still few enough to list
    full = lat.complete and homogeneous_count(F.module.degrees, F.module.p) <= DEFAULT_BUDGET
    latF = enumerate_submodules(F.module, budget, "left", exhaustive=True if full else None)
    dQ = c.Q.dim
    images = [lambda_map(F, K, dQ) for K in lat.elements]
    ch.record("zero", images[0].dim == 0 if images else True, "Lambda(0) is not 0")
    top = lat.top
    ch.record("top", lambda_map(F, top, dQ) == Subspace.full(F.dim, F.module.p), "Lambda(AM) is not F(M)")
    targets = set(latF.elements)
    bad = [i for i, s in enumerate(images) if s not in targets]
    ch.record("lands-in-lattice", not bad, "image is not a unital graded submodule", bad[:1])
    ch.record("injective", len(set(images)) == len(images), "two submodules share an image")
    if lat.complete and latF.complete:
        ch.record("surjective", set(images) == targets, f"{len(set(images))} images for {len(targets)} submodules of F(M)")
    else:
        ch.record("surjective", None, "lattice enumeration incomplete")
    order_bad = _order_witness(lat.elements, images)
    ch.record("order", order_bad is None, "inclusion not preserved or reflected", order_bad)
    back_bad = [i for i, (K, L) in enumerate(zip(lat.elements, images)) if lambda_inverse(c, M, F, L) != K]
    ch.record("inverse-left", not back_bad, "G(Lambda(K)) does not return K", back_bad[:1])
    fwd_bad = [i for i, N in enumerate(latF.elements) if lambda_map(F, lambda_inverse(c, M, F, N), dQ) != N]
    ch.record("inverse-right", not fwd_bad, "Lambda(G(N)) does not return N", fwd_bad[:1])
    return ch


# ---------------------------------------------------------------------------
# Ideal lattices


def _module_products(X: GradedModule, side: str, xs: Subspace, ring_elems: Subspace) -> Subspace:
    """``span{x a}`` (side right) or ``span{a x}`` (side left) inside ``X``."""
    p, n = X.p, X.dim
    if xs.dim == 0 or ring_elems.dim == 0:
        return Subspace.zero(n, p)
    act = X.action(side)  # (dR, n, n)
    ops = np.einsum("ri,ixy->rxy", ring_elems.basis, act) % p
    return _span_of_images(list(ops), xs.basis, p, n)


def _pairing_span(table: np.ndarray, xs: Subspace, ys: Subspace, dim: int, p: int) -> Subspace:
    if xs.dim == 0 or ys.dim == 0:
        return Subspace.zero(dim, p)
    vals = np.einsum("ai,bj,ijk->abk", xs.basis, ys.basis, table) % p
    return Subspace(vals.reshape(-1, dim), p, dim)


def ideal_maps(c: MoritaContext):
    """The two maps ``I -> [QI, P]`` and ``J -> <PJ, Q>`` on subspaces."""
    p = c.p
    fullP, fullQ = Subspace.full(c.P.dim, p), Subspace.full(c.Q.dim, p)

    def to_b(I: Subspace) -> Subspace:
        QI = _module_products(c.Q, "right", fullQ, I)
        return _pairing_span(c.nu, QI, fullP, c.B.dim, p)

    def to_a(J: Subspace) -> Subspace:
        PJ = _module_products(c.P, "right", fullP, J)
        return _pairing_span(c.mu, PJ, fullQ, c.A.dim, p)

    return to_b, to_a


def ideal_lattice_iso(c: MoritaContext, budget: Optional[int] = None) -> Checks:
    """``T_A`` and ``T_B`` correspond under ``I -> [QI, P]``, ``J -> <PJ, Q>``."""
    ch = Checks("ideals")
    TA, TB = enumerate_ideals(c.A, budget), enumerate_ideals(c.B, budget)
    to_b, to_a = ideal_maps(c)
    imgs = [to_b(I) for I in TA.elements]
    back = [to_a(J) for J in TB.elements]
    sB, sA = set(TB.elements), set(TA.elements)
    ch.record("sizes", len(TA) == len(TB), f"|T_A| = {len(TA)}, |T_B| = {len(TB)}")
    bad = [i for i, J in enumerate(imgs) if J not in sB]
    ch.record("A->B-lands", not bad, "[QI, P] is not a unital ideal", bad[:1])
    bad = [i for i, I in enumerate(back) if I not in sA]
    ch.record("B->A-lands", not bad, "<PJ, Q> is not a unital ideal", bad[:1])
    bad = [i for i, (I, J) in enumerate(zip(TA.elements, imgs)) if to_a(J) != I]
    ch.record("roundtrip-A", not bad, "<P[QI,P], Q> differs from I", bad[:1])
    bad = [i for i, (J, I) in enumerate(zip(TB.elements, back)) if to_b(I) != J]
    ch.record("roundtrip-B", not bad, "[Q<PJ,Q>, P] differs from J", bad[:1])
    order_bad = _order_witness(TA.elements, imgs)
    ch.record("order", order_bad is None, "inclusion not preserved or reflected", order_bad)
    if not (TA.complete and TB.complete):
        ch.record("complete", None, "ideal enumeration incomplete")
    return ch


# ---------------------------------------------------------------------------
# Simplicity, semisimplicity, faithfulness


def is_graded_simple(M: GradedModule, lattice: Optional[SubmoduleLattice] = None) -> Optional[bool]:
    """True/False in the exhaustive regime, None (undecided) outside it."""
    lat = enumerate_submodules(M) if lattice is None else lattice
    if not lat.complete:
        return None
    return M.dim > 0 and len(lat) == 2 and lat.top.is_full()


def is_graded_semisimple(M: GradedModule, lattice: Optional[SubmoduleLattice] = None) -> Optional[bool]:
    """Every element of the lattice has a complement ``K + K' = M``, ``K & K' = 0``."""
    lat = enumerate_submodules(M) if lattice is None else lattice
    if not lat.complete:
        return None
    if not lat.top.is_full():
        return False
    by_dim: dict[int, list[Subspace]] = {}
    for L in lat.elements:
        by_dim.setdefault(L.dim, []).append(L)
    # K + L = M with dim K + dim L = dim M forces K & L = 0
    return all(any((K + L).dim == M.dim for L in by_dim.get(M.dim - K.dim, ())) for K in lat.elements)


def annihilator(M: GradedModule, side: str = "left") -> Subspace:
    """Unital closure ``A I A`` of ``I = {a : a M = 0}``."""
    ring = M.ring(side)
    p = M.p
    act = M.action(side)
    if ring.dim == 0:
        return Subspace.zero(0, p)
    if M.dim == 0:
        raw = Subspace.full(ring.dim, p)
    else:
        raw = kernel(act.reshape(ring.dim, -1).T, p)
    return _unital_ideal(ring, raw)


def is_faithful(M: GradedModule, side: str = "left") -> bool:
    return annihilator(M, side).dim == 0


def _hom_as_module(H) -> GradedModule:
    return H.module.left_part() if H.module.side == "bi" else H.module


def preservation_suite(c: MoritaContext, probes_a: Sequence[tuple[str, GradedModule]],
                       probes_b: Sequence[tuple[str, GradedModule]] = (), budget: Optional[int] = None) -> Checks:
    """Simple, semisimple and faithful modules go to modules of the same kind, in both directions."""
    ch = Checks("preserve")
    sa, sb = traces_surjective(c)
    if not (sa and sb):
        ch.skip("all", "trace maps are not surjective")
        return ch
    runs = [("A", p, lambda M: functor_tensor(c, M).module, lambda M: functor_hom(c, M)) for p in probes_a]
    runs += [("B", p, lambda L: inverse_tensor(c, L).module, None) for p in probes_b]
    for side_label, (label, M), F, Fh in runs:
        M = _left(M)
        FM = F(M)
        key = f"{side_label}:{label}"
        if exhaustive_regime(M.dim, M.p) and exhaustive_regime(FM.dim, FM.p):
            lat, latF = enumerate_submodules(M, budget), enumerate_submodules(FM, budget)
        else:
            lat = latF = None
        for prop, test in (("simple", is_graded_simple), ("semisimple", is_graded_semisimple)):
            s1 = None if lat is None else test(M, lat)
            s2 = None if latF is None else test(FM, latF)
            if s1 is None or s2 is None:
                ch.skip(f"{key}:{prop}", "outside the exhaustive regime")
            else:
                ch.record(f"{key}:{prop}", s1 == s2, f"{prop}(M)={s1}, {prop}(F(M))={s2}")
        if Fh is not None:
            H = _hom_as_module(Fh(M))
            f1 = is_faithful(M)
            ok = (not f1) or is_faithful(H)
            ch.record(f"{key}:faithful", ok, "faithful M with non-faithful B.HOM(P, M)")
        else:
            f1 = is_faithful(M)
            ch.record(f"{key}:faithful", (not f1) or is_faithful(FM), "faithful L with non-faithful G(L)")
    return ch


def torsion_free_rings(c: MoritaContext) -> bool:
    return all(s.dim == 0 for r in (c.A, c.B) for s in ring_torsion(r))

