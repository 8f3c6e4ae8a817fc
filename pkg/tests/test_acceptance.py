"""Acceptance criteria, one test each; every test prints a ``criterion N: PASS/FAIL`` line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or ``python3 tests/test_acceptance.py``.
"""

import json
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from grmorita import instances
from grmorita.cli import main
from grmorita.context import (
    context_from_bimodule,
    delta_natural_iso,
    end_isos,
    equivalence_roundtrip,
    probe_modules,
    traces_surjective,
    validate_context,
)
from grmorita.corpus import E3_NAMES, named_context, named_contexts, random_idempotent_ring, random_module, random_module_pair
from grmorita.graded import module_torsion, ring_torsion, submodule_and_quotient
from grmorita.groups import cyclic
from grmorita.homtensor import hom_all, hom_component, hom_suspension_check
from grmorita.io import dumps_instance, instance_from_contexts, load_instance, loads_instance
from grmorita.lattice import exhaustive_regime, ideal_lattice_iso, lambda_iso, preservation_suite, torsion_free_rings
from grmorita.suites import run_suite

sys.path.insert(0, str(Path(__file__).parent))
import oracle  # noqa: E402


RESULTS: dict[int, str] = {}


def report(n: int, ok: bool, detail: str = "") -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else "")
    print(line)
    RESULTS[n] = line
    assert ok, line


def random_pairs(count: int, seed: int, max_product: int = 9):
    rng = np.random.default_rng(seed)
    for k in range(count):
        G = (cyclic(2), cyclic(3))[k % 2]
        yield random_module_pair(G, 2, rng, max_product=max_product)


def test_criterion_1_golden_e1(capsys):
    t0 = time.perf_counter()
    code = main(["check", "all", str(instances.path("e1.ctx")), "--format", "machine"])
    elapsed = time.perf_counter() - t0
    rep = json.loads(capsys.readouterr().out)
    ids = [c["id"] for c in rep["checks"]]
    passed = {c["id"] for c in rep["checks"] if c["status"] == "pass"}
    needed = ("E1.axioms.", "E1.traces.", "E1.nondegenerate.", "E1.psi.", "E1.roundtrip.", "E1.end.",
              "E1.tensor-rings.", "E1.ideals.")
    covered = all(any(i.startswith(pre) and i in passed for i in ids) for pre in needed)
    delta = any(i.endswith(":delta") for i in passed)
    notes = rep["notes"]["E1"]
    ok = code == 0 and covered and delta and notes["probes"][0] >= 10 and notes["ideals"] == [2, 2] and elapsed < 10
    report(1, ok, f"exit {code}, {notes['probes'][0]} probes, ideals {notes['ideals']}, {elapsed:.1f}s")


def test_criterion_2_hom_oracle():
    t0 = time.perf_counter()
    bad = 0
    for _, M, N in random_pairs(200, 2024):
        H = hom_all(M, N)
        for s in M.group.elements:
            got = oracle.span_set(H.components[s].basis.tolist(), 2, M.dim * N.dim)
            bad += got != frozenset(oracle.hom_maps(M, N, s))
    elapsed = time.perf_counter() - t0
    report(2, bad == 0 and elapsed < 60, f"{bad} mismatches, {elapsed:.1f}s")


def test_criterion_3_suspension_identities():
    bad = 0
    for _, M, N in random_pairs(200, 77, max_product=16):
        H = hom_all(M, N)
        bad += not H.independent()
        bad += not all(hom_suspension_check(M, N, s) for s in M.group.elements)
    report(3, bad == 0, f"{bad} failures")


def test_criterion_4_torsion_quotient():
    rng = np.random.default_rng(404)
    bad = 0
    for k in range(200):
        G, p = ((cyclic(2), 2), (cyclic(3), 2), (cyclic(2), 3), (cyclic(1), 5))[k % 4]
        ring, rel, deg = random_idempotent_ring(5, G, p, rng)
        M = random_module(ring, rel, deg, rng, max_dim=5)
        q = submodule_and_quotient(M, module_torsion(M)).quotient
        bad += not module_torsion(q).is_zero()
    report(4, bad == 0, f"{bad} failures")


def test_criterion_5_torsion_rings():
    bad = []
    with_torsion = 0
    for name in E3_NAMES:
        c = named_context(name)
        with_torsion += not torsion_free_rings(c)
        if not validate_context(c).report.ok:
            bad.append(f"{name}:valid")
        ch = end_isos(c)
        if not ch.ok:
            bad.append(f"{name}:end")
        for label, M in probe_modules(c.A, [("P", c.P)], cap=8):
            d = delta_natural_iso(c, M)
            if not (d.checks.ok and d.map.is_bijective()):
                bad.append(f"{name}:{label}:delta")
    report(5, not bad and with_torsion >= 5, f"{with_torsion} contexts with ring torsion, failures {bad[:3]}")


def test_criterion_6_lattice_roundtrips():
    bad = []
    used = 0
    for name, c in named_contexts().items():
        if not (all(traces_surjective(c)) and torsion_free_rings(c)):
            continue
        used += 1
        if not ideal_lattice_iso(c).ok:
            bad.append(f"{name}:ideals")
        for label, M in probe_modules(c.A, [("P", c.P)]):
            if exhaustive_regime(M.dim, M.p) and not lambda_iso(c, M).ok:
                bad.append(f"{name}:{label}")
    report(6, not bad and used > 0, f"{used} contexts, failures {bad[:3]}")


def test_criterion_7_characterization():
    e1 = named_context("E1")
    res = context_from_bimodule(e1.A, e1.B, e1.P)
    c = res.context
    ok = res.failed is None and c is not None and validate_context(c).report.ok and all(traces_surjective(c))
    if ok:
        pa = probe_modules(c.A, [("P", c.P)])
        pb = probe_modules(c.B, [("Q", c.Q)])
        ok = len(pa) >= 10 and equivalence_roundtrip(c, pa, pb).ok
    report(7, ok)


def test_criterion_8_preservation():
    bad = []
    for name, c in named_contexts().items():
        pa = probe_modules(c.A, [("P", c.P)])
        pb = probe_modules(c.B, [("Q", c.Q)])
        ch = preservation_suite(c, pa, pb)
        bad += [f"{name}:{x.id}" for x in ch.items if x.status == "fail"]
    report(8, not bad, f"failures {bad[:3]}")


def test_criterion_9_determinism_and_serialization():
    bad = []
    for path in sorted(instances.DIR.glob("*.ctx")):
        if path.name == "nonassociative.ctx":
            continue
        inst = load_instance(path)
        text = path.read_text(encoding="utf-8")
        if loads_instance(dumps_instance(inst)) != inst:
            bad.append(f"{path.name}:roundtrip")
        if inst.contexts and dumps_instance(inst) != text:
            bad.append(f"{path.name}:text")
        a = run_suite("all", inst, seed=9, jobs=1).machine()
        b = run_suite("all", inst, seed=9, jobs=3).machine()
        if a != b:
            bad.append(f"{path.name}:report")
    for name, c in named_contexts().items():
        inst = instance_from_contexts({name: c})
        if loads_instance(dumps_instance(inst)) != inst:
            bad.append(f"{name}:corpus-roundtrip")
    report(9, not bad, f"failures {bad[:3]}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
