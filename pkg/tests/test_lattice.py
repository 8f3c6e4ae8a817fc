import numpy as np
import pytest

from grmorita.context import functor_tensor, probe_modules, traces_surjective
from grmorita.corpus import named_context, named_contexts, random_idempotent_ring, random_module
from grmorita.graded import GradedModule, GradedSpace, direct_sum
from grmorita.groups import cyclic
from grmorita.lattice import (
    annihilator,
    enumerate_ideals,
    enumerate_submodules,
    exhaustive_regime,
    ideal_lattice_iso,
    ideal_maps,
    is_faithful,
    is_graded_semisimple,
    is_graded_simple,
    lambda_iso,
    lambda_map,
    preservation_suite,
    torsion_free_rings,
)
from grmorita.linalg import Subspace

from grmorita.report import FAIL

import oracle


def probes(c, cap=6):
    return probe_modules(c.A, [("P", c.P)], cap=cap)


@pytest.fixture(scope="module")
def e1():
    return named_context("E1")


def element_sets(lat):
    return {oracle.subspace_set(s) for s in lat.elements}


def checks_ok(ch):
    return [i for i in ch.items if i.status == FAIL]


# -- submodule lattices ---------------------------------------------------------


def test_simple_module_lattice(e1):
    lat = enumerate_submodules(e1.P.left_part())
    assert lat.complete and len(lat) == 2
    assert is_graded_simple(e1.P.left_part()) is True


def test_double_of_simple_has_p_plus_three_elements(e1):
    P = e1.P.left_part()
    PP, _, _ = direct_sum(P, P)
    lat = enumerate_submodules(PP)
    assert len(lat) == e1.p + 3
    assert is_graded_semisimple(PP) is True
    assert is_graded_simple(PP) is False


def test_zero_module_lattice(e1):
    Z = GradedModule(GradedSpace(e1.A.group, e1.p, ()), left=(e1.A, None))
    lat = enumerate_submodules(Z)
    assert len(lat) == 1 and lat.complete
    assert is_graded_simple(Z) is False


def test_lattice_matches_oracle_on_corpus_probes():
    checked = 0
    for c in named_contexts().values():
        for _, M in probes(c):
            M = M.left_part() if M.side == "bi" else M
            if M.dim > 4 or M.side != "left":
                continue
            lat = enumerate_submodules(M)
            assert lat.complete
            assert element_sets(lat) == oracle.submodule_lattice(M, "left")
            checked += 1
    assert checked >= 10


def test_lattice_matches_oracle_on_random_modules():
    rng = np.random.default_rng(11)
    for G, p in ((cyclic(2), 2), (cyclic(3), 2), (cyclic(1), 3)):
        for _ in range(8):
            ring, rel, deg = random_idempotent_ring(4, G, p, rng)
            M = random_module(ring, rel, deg, rng, max_dim=4)
            assert element_sets(enumerate_submodules(M)) == oracle.submodule_lattice(M, "left")


def test_generated_mode_outside_regime(e1):
    big = e1.A.regular_bimodule.left_part()
    for _ in range(2):
        big, _, _ = direct_sum(big, e1.P.left_part())
    assert not exhaustive_regime(big.dim, big.p)
    lat = enumerate_submodules(big)
    assert lat.complete is False
    assert is_graded_simple(big, lat) is None
    assert is_graded_semisimple(big, lat) is None
    for s in lat.elements:
        assert oracle.is_stable_set(oracle.subspace_set(s), [t.tolist() for t in big.action("left")], big.p)


# -- lambda --------------------------------------------------------------------


def test_lambda_endpoints(e1):
    M = e1.A.regular_bimodule.left_part()
    F = functor_tensor(e1, M)
    zero = Subspace.zero(M.dim, M.p)
    assert lambda_map(F, zero, e1.Q.dim).dim == 0
    assert lambda_map(F, Subspace.full(M.dim, M.p), e1.Q.dim).is_full()


def test_lambda_bijective_on_regular_module(e1):
    M = e1.A.regular_bimodule.left_part()
    ch = lambda_iso(e1, M)
    assert ch.ok, ch.failures
    F = functor_tensor(e1, M)
    assert F.dim == e1.Q.dim
    assert len(enumerate_submodules(F.module)) == len(enumerate_submodules(M))


def test_lambda_preserves_chains(e1):
    M = e1.A.regular_bimodule.left_part()
    lat = enumerate_submodules(M)
    F = functor_tensor(e1, M)
    imgs = {K: lambda_map(F, K, e1.Q.dim) for K in lat.elements}
    for K in lat.elements:
        for L in lat.elements:
            assert K.contains(L) == imgs[K].contains(imgs[L])


def test_lambda_over_corpus_probes():
    for name, c in named_contexts().items():
        if not (all(traces_surjective(c)) and torsion_free_rings(c)):
            continue
        for label, M in probes(c, 4):
            M = M.left_part() if M.side == "bi" else M
            if M.side != "left" or not exhaustive_regime(M.dim, M.p):
                continue
            ch = lambda_iso(c, M)
            assert not checks_ok(ch), (name, label, ch.failures)


# -- ideals --------------------------------------------------------------------


def test_e1_ideal_lattices(e1):
    TA, TB = enumerate_ideals(e1.A), enumerate_ideals(e1.B)
    assert len(TA) == len(TB) == 2
    to_b, to_a = ideal_maps(e1)
    assert to_b(Subspace.full(e1.A.dim, e1.p)).is_full()
    assert to_a(Subspace.zero(e1.B.dim, e1.p)).dim == 0
    assert ideal_lattice_iso(e1).ok


def test_block_ideal_lattices():
    c = named_context("block")
    TA, TB = enumerate_ideals(c.A), enumerate_ideals(c.B)
    assert len(TA) == len(TB) == 4
    assert ideal_lattice_iso(c).ok


def test_ideal_lattice_matches_oracle(e1):
    for ring in (e1.A, e1.B, named_context("block").A, named_context("E3-four").A):
        left = oracle.submodule_lattice(ring.regular_bimodule.left_part(), "left")
        right = oracle.submodule_lattice(ring.regular_bimodule.right_part(), "right")
        assert element_sets(enumerate_ideals(ring)) == left & right


def test_ideal_isos_over_corpus():
    for name, c in named_contexts().items():
        if all(traces_surjective(c)) and torsion_free_rings(c):
            assert ideal_lattice_iso(c).ok, (name, ideal_lattice_iso(c).failures)


# -- annihilators and preservation -----------------------------------------------


def test_annihilator_is_unital_ideal(e1):
    M = e1.P.left_part()
    assert annihilator(M).dim == 0 and is_faithful(M)
    Z = GradedModule(GradedSpace(e1.A.group, e1.p, ()), left=(e1.A, None))
    ann = annihilator(Z)
    assert ann.is_full() and not is_faithful(Z)


def test_annihilator_matches_oracle():
    rng = np.random.default_rng(5)
    for _ in range(20):
        ring, rel, deg = random_idempotent_ring(4, cyclic(2), 2, rng)
        M = random_module(ring, rel, deg, rng, max_dim=4)
        act = [t.tolist() for t in M.action("left")]
        raw = [v for v in oracle.vectors(ring.dim, 2)
               if all(not any(oracle.apply(sum(c * np.array(t) for c, t in zip(v, act)) % 2, m, 2))
                      for m in oracle.vectors(M.dim, 2))]
        reg = ring.regular_bimodule
        ideal = oracle.products_set(
            oracle.products_set(frozenset(raw), [t.tolist() for t in reg.action("left")], 2, ring.dim),
            [t.tolist() for t in reg.action("right")], 2, ring.dim)
        assert oracle.subspace_set(annihilator(M)) == ideal


def test_preservation_e1_column(e1):
    P = e1.P.left_part()
    F = functor_tensor(e1, P)
    assert F.dim == 1
    assert is_graded_simple(F.module) is True
    ch = preservation_suite(e1, [("P", P)])
    assert ch.ok, ch.failures
    assert any(i.status == "pass" for i in ch.items if i.id.endswith("faithful"))


def test_preservation_zero_module_vacuous(e1):
    Z = GradedModule(GradedSpace(e1.A.group, e1.p, ()), left=(e1.A, None))
    ch = preservation_suite(e1, [("0", Z)])
    assert ch.ok


def test_preservation_over_corpus():
    for name, c in named_contexts().items():
        pa = probes(c, 4)
        ch = preservation_suite(c, pa)
        assert not checks_ok(ch), (name, ch.failures)
