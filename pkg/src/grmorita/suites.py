"""Check suites over a loaded instance, and the report they produce.

Every check gets a stable dotted id ``<object>.<family>.<detail>``; reports
sort checks by id so the machine form does not depend on scheduling.
"""

from __future__ import annotations

import json
import re
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import context as ctx
from .graded import (
    GradedModule,
    is_torsion_free,
    is_unital_module,
    module_torsion,
    submodule_and_quotient,
    validate_module,
    validate_ring,
)
from .homtensor import NotApplicable, chi_iso, generates, hom_all, hom_suspension_check
from .io import Instance
from .lattice import enumerate_ideals, exhaustive_regime, ideal_lattice_iso, lambda_iso, preservation_suite, torsion_free_rings
from .report import FAIL, PASS, SKIPPED, UNDECIDED, Check, Checks

__all__ = ["SUITES", "CheckReport", "run_suite", "explain", "EXPLANATIONS", "exit_code"]

SUITES = ("axioms", "context", "equivalence", "lattice", "all")


@dataclass
class CheckReport:
    suite: str
    seed: int
    budget: Optional[int]
    objects: list[str]
    checks: list[Check]
    wall_time: float = 0.0
    notes: dict = field(default_factory=dict)

    def counts(self) -> dict[str, int]:
        out = {s: 0 for s in (PASS, FAIL, SKIPPED, UNDECIDED)}
        for c in self.checks:
            out[c.status] += 1
        return out

    @property
    def exit_code(self) -> int:
        n = self.counts()
        if n[FAIL]:
            return 1
        if n[UNDECIDED]:
            return 3
        return 0

    def machine(self) -> str:
        """Deterministic JSON: no timing, sorted keys."""
        doc = {
            "suite": self.suite,
            "seed": self.seed,
            "budget": self.budget,
            "objects": self.objects,
            "counts": self.counts(),
            "notes": self.notes,
            "checks": [c.to_dict() for c in self.checks],
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"

    def text(self) -> str:
        lines = []
        for c in self.checks:
            line = f"{c.status.upper():9} {c.id}"
            if c.detail:
                line += f"  -- {c.detail}"
            if c.witness is not None:
                line += f"  witness={list(c.witness)}"
            lines.append(line)
        n = self.counts()
        lines.append(
            f"suite {self.suite}: {n[PASS]} passed, {n[FAIL]} failed, {n[SKIPPED]} skipped, "
            f"{n[UNDECIDED]} undecided in {self.wall_time:.2f}s"
        )
        return "\n".join(lines) + "\n"


def exit_code(report: CheckReport) -> int:
    return report.exit_code


# ---------------------------------------------------------------------------
# Axioms: rings and modules in the instance


_RING_AXIOMS = ("grading", "associativity")


def _axiom_checks(ch: Checks, names: tuple[str, ...], rep) -> None:
    found: dict[str, object] = {}
    for v in rep.violations:
        found.setdefault(v.axiom, v)
    for a in list(names) + sorted(set(found) - set(names)):
        v = found.get(a)
        ch.record(a, v is None, getattr(v, "detail", ""), getattr(v, "witness", None))


def _module_axiom_names(M: GradedModule) -> tuple[str, ...]:
    out = []
    for s in M.sides:
        out += [f"{s}-grading", f"{s}-associativity"]
    if M.side == "bi":
        out.append("bimodule-compatibility")
    return tuple(out)


def _one_sided(inst: Instance) -> list[tuple[str, GradedModule]]:
    out = []
    for name, M in inst.modules.items():
        for s in M.sides:
            out.append((f"{name}[{s}]", M.part(s)))
    for name, r in inst.rings.items():
        out.append((f"{name}[left]", r.left_regular))
    return out


def axioms_suite(inst: Instance, rng, budget) -> Checks:
    out = Checks()
    for name, r in inst.rings.items():
        ch = Checks(f"ring.{name}")
        _axiom_checks(ch, _RING_AXIOMS, validate_ring(r))
        out.extend(ch)
    for name, M in inst.modules.items():
        ch = Checks(f"module.{name}")
        _axiom_checks(ch, _module_axiom_names(M), validate_module(M))
        for s in M.sides:
            tq = submodule_and_quotient(M.part(s), module_torsion(M, s)).quotient
            ch.record(f"torsion-quotient-{s}", is_torsion_free(tq, s), "t(M/t(M)) is not zero")
        out.extend(ch)
    one = _one_sided(inst)
    for name, M in one:
        ch = Checks(f"module.{name}")
        if M.side == "left" and is_unital_module(M, "left") and is_torsion_free(M, "left"):
            try:
                chi_iso(M)
                ch.record("chi-iso", True)
            except NotApplicable as e:
                ch.record("chi-iso", False, str(e))
        out.extend(ch)
    for (n1, M), (n2, N) in ((a, b) for a in one for b in one):
        if M.side != N.side or M.ring(M.side) != N.ring(N.side):
            continue
        ch = Checks(f"hom.{n1},{n2}")
        hs = hom_all(M, N, M.side)
        ch.record("independent", hs.independent(), "components of distinct degrees intersect")
        G = M.group
        bad = [s for s in G.elements if not hom_suspension_check(M, N, s, M.side)]
        ch.record("suspension", not bad, "HOM(M, N(s)) and HOM(M, N) shifted by s differ", bad[:1])
        out.extend(ch)
    return out


# ---------------------------------------------------------------------------
# Context-level suites


def _prefixed(prefix: str, checks) -> list[Check]:
    return [Check(f"{prefix}.{c.id}", c.status, c.detail, c.witness) for c in checks]


_CONTEXT_AXIOMS = (
    tuple(f"{r}:{a}" for r in "AB" for a in ("grading", "associativity", "idempotent"))
    + tuple(
        f"{m}:{a}"
        for m in "PQ"
        for a in ("left-grading", "left-associativity", "right-grading", "right-associativity",
                  "bimodule-compatibility", "unital-left", "unital-right")
    )
    + ("mu-balanced", "nu-balanced", "mu-left-linear", "mu-right-linear", "nu-left-linear",
       "nu-right-linear", "mu-degree", "nu-degree", "associativity-P", "associativity-Q")
)


def _status(c) -> tuple[bool, bool, bool]:
    """(axioms ok, traces surjective, rings torsion-free)."""
    rep = ctx.validate_context(c)
    sa, sb = rep.traces
    return rep.ok, sa and sb, torsion_free_rings(c)


def context_suite(c, rng, budget, notes=None) -> Checks:
    out = Checks()
    rep = ctx.validate_context(c)
    ch = Checks("axioms")
    _axiom_checks(ch, _CONTEXT_AXIOMS, rep.report)
    out.extend(ch)
    ch = Checks("traces")
    sa, sb = rep.traces
    ch.record("mu-onto", sa, "<P, Q> is not all of A")
    ch.record("nu-onto", sb, "[Q, P] is not all of B")
    out.extend(ch)
    if not rep.ok:
        out.skip("theorems", "context axioms fail")
        return out
    try:
        ka, kb = ctx.kernels_are_torsion(c)
        out.record("kernels.mu-torsion", ka, "ker(P (x) Q -> A) is not torsion")
        out.record("kernels.nu-torsion", kb, "ker(Q (x) P -> B) is not torsion")
    except NotApplicable as e:
        out.record("kernels.balanced", False, str(e))
    if not (sa and sb):
        out.skip("theorems", "trace maps are not surjective")
        return out
    ch = Checks("generators")
    for label, X, T, side in (
        ("_AP", c.P, c.A.left_regular, "left"),
        ("P_B", c.P, c.B.right_regular, "right"),
        ("_BQ", c.Q, c.B.left_regular, "left"),
        ("Q_A", c.Q, c.A.right_regular, "right"),
    ):
        ch.record(label, generates(X.part(side), T, side), "trace ideal is not the whole ring")
    out.extend(ch)
    bimods_tf = all(is_torsion_free(m, s) for m in (c.P, c.Q) for s in ("left", "right"))
    if bimods_tf:
        nd = ctx.is_nondegenerate(c)
        for k, s in nd.pairings.items():
            out.record(f"nondegenerate.{k}", s.is_zero(), f"{s.dim}-dimensional kernel")
    else:
        out.skip("nondegenerate", "bimodules have torsion")
    for pm in ctx.psi_maps(c).values():
        out.extend(_prefixed("psi", pm.checks))
    out.extend(ctx.end_isos(c))
    tr, r1, r2 = ctx.tensor_rings(c)
    out.extend(tr)
    for label, X, Y, pairing in (("PxQ", c.P, c.Q, c.mu), ("QxP", c.Q, c.P, c.nu)):
        ok, k, tp = ctx._pairing_kernel_torsion(X, Y, pairing)
        if module_torsion(tp.module, "left").dim == 0:
            out.record(f"tensor-rings.{label}:injective", k.dim == 0, f"{k.dim}-dimensional kernel")
        else:
            out.skip(f"tensor-rings.{label}:injective", "tensor product has torsion; isomorphism holds modulo torsion")
    return out


def _probes(c, rng):
    pa = ctx.probe_modules(c.A, [("P", c.P)], rng)
    pb = ctx.probe_modules(c.B, [("Q", c.Q)], rng)
    return pa, pb


def equivalence_suite(c, rng, budget, notes=None) -> Checks:
    out = Checks()
    ok, surj, _ = _status(c)
    if not (ok and surj):
        out.skip("equivalence", "needs a valid context with surjective traces")
        return out
    pa, pb = _probes(c, rng)
    if notes is not None:
        notes["probes"] = [len(pa), len(pb)]
    out.extend(ctx.equivalence_roundtrip(c, pa, pb, rng))
    for label, M in pa:
        out.extend(_prefixed(f"eta.A:{label}", ctx.eta_map(c, M).checks))
        out.extend(_prefixed(f"phi.A:{label}", ctx.phi_map(c, M).checks))
    return out


def lattice_suite(c, rng, budget, notes=None) -> Checks:
    out = Checks()
    ok, surj, tf = _status(c)
    if not (ok and surj):
        out.skip("lattice", "needs a valid context with surjective traces")
        return out
    if tf:
        out.extend(ideal_lattice_iso(c, budget))
        if notes is not None:
            notes["ideals"] = [len(enumerate_ideals(c.A, budget)), len(enumerate_ideals(c.B, budget))]
    else:
        out.skip("ideals", "rings have torsion")
    pa, pb = _probes(c, rng)
    for label, M in pa:
        if exhaustive_regime(M.dim, M.p):
            out.extend(_prefixed(f"lambda.A:{label}", lambda_iso(c, M, budget=budget)))
    out.extend(preservation_suite(c, pa, pb, budget))
    return out


_CONTEXT_SUITES: dict[str, Callable] = {
    "context": context_suite,
    "equivalence": equivalence_suite,
    "lattice": lattice_suite,
}


def _rng(seed: int, *keys: str) -> np.random.Generator:
    return np.random.default_rng([seed] + [zlib.crc32(k.encode()) for k in keys])


def run_suite(name: str, inst: Instance, seed: int = 0, budget: Optional[int] = None, jobs: int = 1) -> CheckReport:
    """Run ``name`` on every object of ``inst``; ``all`` runs every suite."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    start = time.perf_counter()
    parts = [s for s in SUITES[:-1] if name in (s, "all")]
    tasks: list[tuple[str, Callable[[], Checks]]] = []
    notes: dict = {}
    if "axioms" in parts:
        tasks.append(("axioms", lambda: axioms_suite(inst, _rng(seed, "axioms"), budget)))
    for cname, c in inst.contexts.items():
        notes[cname] = {}
        for s in parts:
            if s == "axioms":
                continue
            fn = _CONTEXT_SUITES[s]
            tasks.append((f"{cname}.{s}", lambda c=c, cname=cname, s=s, fn=fn: fn(c, _rng(seed, cname, s), budget, notes[cname])))
    if jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(lambda t: t[1](), tasks))
    else:
        results = [t[1]() for t in tasks]
    checks: list[Check] = []
    for (label, _), res in zip(tasks, results):
        prefix = label.split(".")[0] if label != "axioms" else "instance"
        checks += _prefixed(prefix, res)
    checks.sort(key=lambda c: c.id)
    ids = [c.id for c in checks]
    if len(ids) != len(set(ids)):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        raise RuntimeError(f"duplicate check ids: {dup[:3]}")
    objects = sorted(inst.contexts) if inst.contexts else sorted(inst.rings) + sorted(inst.modules)
    return CheckReport(name, seed, budget, objects, checks, time.perf_counter() - start, notes)


# ---------------------------------------------------------------------------
# explain


EXPLANATIONS: list[tuple[str, str]] = [
    (r"grading$", "Structure constants respect degrees: A_s A_t lies in A_st, and A_s M_t lies in M_st for each action."),
    (r"associativity-P$", "Mixed associativity on P: p' [q, p] = <p', q> p for all p, p' in P and q in Q."),
    (r"associativity-Q$", "Mixed associativity on Q: q' <p, q> = [q', p] q for all q, q' in Q and p in P."),
    (r"associativity$", "The product (or action) is associative on basis triples."),
    (r"bimodule-compatibility$", "Left and right actions commute: (a m) b = a (m b)."),
    (r"idempotent$", "The ring is idempotent: products span the whole ring."),
    (r"unital-(left|right)$", "The bimodule is unital on that side: the ring times the module is the whole module."),
    (r"-balanced$", "The pairing is balanced over the middle ring, so it factors through the tensor product."),
    (r"-(left|right)-linear$", "The pairing is linear for the outer ring actions."),
    (r"-degree$", "The pairing has degree e: deg <p, q> = deg p deg q."),
    (r"traces\.", "The trace map is onto: the pairing values span the ring."),
    (r"kernels\.", "The kernels of P (x)_B Q -> A and Q (x)_A P -> B are annihilated by the rings on both sides."),
    (r"generators\.", "With surjective traces each of _AP, P_B, _BQ, Q_A generates its module category: the trace ideal is the whole ring."),
    (r"nondegenerate(\.|$)", "With surjective traces and torsion-free bimodules all four pairings are faithful."),
    (r"psi\.", "q -> <-, q> (and its three siblings) is a graded isomorphism Q -> B.HOM_A(P, A) modulo the expected torsion kernel."),
    (r"end\.", "The canonical map A -> END(_BQ) (and its siblings) is a graded ring map with kernel l(A) or r(A) and image the unital part of END."),
    (r"tensor-rings\.", "P (x)_B Q and Q (x)_A P are graded rings, and the pairings are onto ring maps whose kernels are torsion."),
    (r":delta$", "delta: [q (x) u] -> (p -> <p, q> u) is a natural graded isomorphism (Q (x)_A U)/t_B -> B.HOM_A(P, U)."),
    (r":GF~id$", "The evaluation P (x)_B F(M) -> M is an isomorphism modulo torsion, so G F is naturally the identity."),
    (r":FG~id$", "The evaluation Q (x)_A G(L) -> L is an isomorphism modulo torsion, so F G is naturally the identity."),
    (r":gamma$", "gamma is a degree-e B-linear epimorphism whose kernel is the torsion part."),
    (r":graded$", "The functors commute with suspension: F(M(s)) = F(M)(s)."),
    (r"P'=G\(B\)", "Rebuilding P as G(B) gives a module isomorphic to P modulo torsion."),
    (r"Q'=F\(A\)", "Rebuilding Q as F(A) gives a module isomorphic to Q modulo torsion."),
    (r"eta\.", "eta: B.HOM_A(P, A) (x)_A U -> B.HOM_A(P, U) is natural and an isomorphism after removing torsion."),
    (r"phi\.", "phi: P (x)_B B.HOM_A(P, K) -> A.HOM_A(A, K), p (x) f -> (x -> f(x p)), is an isomorphism modulo torsion."),
    (r"ideals(\.|$)", "Unital graded ideals correspond: I -> [QI, P] and J -> <PJ, Q> are inverse order isomorphisms T_A <-> T_B."),
    (r"lambda\.", "Lambda_M: K -> Im F(K -> M) is an order isomorphism from unital graded submodules of M to those of F(M)."),
    (r"preserve\..*:simple$", "Graded simple modules correspond to graded simple modules."),
    (r"preserve\..*:semisimple$", "Graded semisimple modules correspond to graded semisimple modules."),
    (r"preserve\..*:faithful$", "A faithful module (annihilator with unital closure zero) goes to a faithful module."),
    (r"\.(theorems|equivalence|lattice|all)$", "Placeholder for a group of checks whose hypotheses do not hold for this object."),
    (r"torsion-quotient", "M/t(M) is torsion-free."),
    (r"chi-iso$", "For unital torsion-free M, m -> (a -> a m) is an isomorphism M -> A.HOM_A(A, M)."),
    (r"\.independent$", "Homogeneous components of HOM of different degrees are independent: HOM is their direct sum."),
    (r"\.suspension$", "HOM_A(M, N(s))_t equals HOM_A(M, N)_{ts} for every s and t."),
]


def explain(check_id: str) -> Optional[str]:
    for pat, text in EXPLANATIONS:
        if re.search(pat, check_id):
            return text
    return None
