import itertools

import numpy as np
import pytest

from grmorita.context import (
    MoritaContext,
    _pairing_kernel_torsion,
    context_from_bimodule,
    delta_natural_iso,
    diagonal_context,
    end_isos,
    equivalence_roundtrip,
    eta_map,
    functor_hom,
    functor_tensor,
    gamma_map,
    inverse_tensor,
    is_nondegenerate,
    kernels_are_torsion,
    phi_map,
    probe_modules,
    psi_maps,
    tensor_rings,
    traces_surjective,
    validate_context,
)
from grmorita.corpus import E3_NAMES, named_context, named_contexts, random_context, random_module
from grmorita.graded import (
    GradedModule,
    GradedRing,
    GradedSpace,
    direct_sum,
    is_torsion_free,
    is_unital_module,
    module_torsion,
    ring_torsion,
    submodule_and_quotient,
)
from grmorita.groups import cyclic
from grmorita.homtensor import NotApplicable, find_isomorphism
from grmorita.linalg import matmul

CORPUS = named_contexts()


@pytest.fixture(scope="module")
def e1():
    return named_context("E1")


def zero_left(ring):
    return GradedModule(GradedSpace(ring.group, ring.p, ()), left=(ring, None))


def zero_bimodule(left, right):
    return GradedModule(GradedSpace(left.group, left.p, ()), left=(left, None), right=(right, None))


def axioms(c):
    return {v.axiom for v in validate_context(c).report.violations}


# -- brute-force axiom checker ------------------------------------------------------


def _vec_mul(table, x, y, p):
    n = len(x)
    out = [0] * table.shape[2]
    for i in range(n):
        if x[i]:
            for j in range(len(y)):
                if y[j]:
                    for k in range(table.shape[2]):
                        out[k] += x[i] * y[j] * int(table[i, j, k])
    return [v % p for v in out]


def _act(action, a, m, p, side):
    """a . m (left) or m . a (right) for coordinate lists."""
    d = len(m)
    out = [0] * d
    for i, ai in enumerate(a):
        if ai:
            for j, mj in enumerate(m):
                if mj:
                    for k in range(d):
                        out[k] += ai * mj * int(action[i][k][j])
    return [v % p for v in out]


def brute_context_ok(c) -> bool:
    """Every context law multiplied out on basis elements with Python integers."""
    p, G = c.p, c.group
    A, B, P, Q = c.A, c.B, c.P, c.Q
    e = np.eye
    basis = lambda n: [list(map(int, r)) for r in e(n, dtype=np.int64)]  # noqa: E731
    bA, bB, bP, bQ = basis(A.dim), basis(B.dim), basis(P.dim), basis(Q.dim)
    mu = lambda x, y: _vec_mul(c.mu, x, y, p)  # noqa: E731
    nu = lambda y, x: _vec_mul(c.nu, y, x, p)  # noqa: E731
    LP, RP, LQ, RQ = P.action("left"), P.action("right"), Q.action("left"), Q.action("right")
    mA = lambda x, y: _vec_mul(A.table, x, y, p)  # noqa: E731
    mB = lambda x, y: _vec_mul(B.table, x, y, p)  # noqa: E731
    for x, y in itertools.product(bP, bQ):
        for b in bB:
            if mu(_act(RP, b, x, p, "r"), y) != mu(x, _act(LQ, b, y, p, "l")):
                return False
        for a in bA:
            if mu(_act(LP, a, x, p, "l"), y) != mA(a, mu(x, y)):
                return False
            if mu(x, _act(RQ, a, y, p, "r")) != mA(mu(x, y), a):
                return False
        i, j = x.index(1), y.index(1)
        for k, v in enumerate(mu(x, y)):
            if v and A.degrees[k] != G.mul(P.degrees[i], Q.degrees[j]):
                return False
    for y, x in itertools.product(bQ, bP):
        for a in bA:
            if nu(_act(RQ, a, y, p, "r"), x) != nu(y, _act(LP, a, x, p, "l")):
                return False
        for b in bB:
            if nu(_act(LQ, b, y, p, "l"), x) != mB(b, nu(y, x)):
                return False
            if nu(y, _act(RP, b, x, p, "r")) != mB(nu(y, x), b):
                return False
        j, i = y.index(1), x.index(1)
        for k, v in enumerate(nu(y, x)):
            if v and B.degrees[k] != G.mul(Q.degrees[j], P.degrees[i]):
                return False
    for x1, y, x2 in itertools.product(bP, bQ, bP):
        if _act(RP, nu(y, x2), x1, p, "r") != _act(LP, mu(x1, y), x2, p, "l"):
            return False
    for y1, x, y2 in itertools.product(bQ, bP, bQ):
        if _act(RQ, mu(x, y2), y1, p, "r") != _act(LQ, nu(y1, x), y2, p, "l"):
            return False
    return True


def _structures_ok(c):
    from grmorita.graded import is_idempotent, validate_module, validate_ring

    return (
        all(validate_ring(r).ok and is_idempotent(r) for r in (c.A, c.B))
        and all(validate_module(m).ok and is_unital_module(m, s) for m in (c.P, c.Q) for s in ("left", "right"))
    )


def test_validate_context_matches_brute_checker():
    rng = np.random.default_rng(17)
    seen = {"valid": 0, "invalid": 0}
    cases = [c for c in CORPUS.values() if max(c.A.dim, c.B.dim, c.P.dim, c.Q.dim) <= 4]
    for _ in range(120):
        G = cyclic(int(rng.integers(1, 3)))
        c = random_context(int(rng.integers(1, 3)), int(rng.integers(1, 3)), G, 2, rng)
        if max(c.A.dim, c.B.dim, c.P.dim, c.Q.dim) <= 4:
            cases.append(c)
    out = []
    for c in cases:
        out.append(c)
        if c.mu.size:
            mu = c.mu.copy()
            flip = tuple(int(rng.integers(0, s)) for s in mu.shape)
            mu[flip] = (mu[flip] + 1) % c.p
            out.append(c.with_pairings(mu=mu))
        out.append(c.with_pairings(nu=np.zeros_like(c.nu)))
    for c in out:
        expected = _structures_ok(c) and brute_context_ok(c)
        assert validate_context(c).ok == expected, c
        seen["valid" if expected else "invalid"] += 1
    assert seen["valid"] >= 20 and seen["invalid"] >= 20


# -- validate_context examples --------------------------------------------------------


def test_e1_valid(e1):
    rep = validate_context(e1)
    assert rep.ok and rep.traces == (True, True)
    assert e1.A.dim == 4 and e1.B.dim == 1 and e1.P.degrees == (0, 1) and e1.Q.degrees == (0, 1)


def test_e1_zero_nu_breaks_associativity(e1):
    rep = validate_context(e1.with_pairings(nu=np.zeros_like(e1.nu)))
    found = {v.axiom: v.witness for v in rep.report.violations}
    assert "associativity-P" in found and "associativity-Q" in found
    a, b, cc = found["associativity-P"]
    # witness (p_a, q_b, p_c): p_a [q_b, p_c] = 0 but <p_a, q_b> p_c is not
    op = np.einsum("k,kxy->xy", e1.mu[a, b], e1.P.action("left")) % 2
    assert op[:, cc].any()


def test_e1_degree_flip(e1):
    Q2 = e1.Q.with_space(e1.Q.space.with_degrees((0, 0)))
    c = MoritaContext(e1.A, e1.B, e1.P, Q2, e1.mu, e1.nu)
    assert "mu-degree" in axioms(c)


# -- traces, nondegeneracy, kernels ----------------------------------------------------------


def test_traces_examples(e1):
    assert traces_surjective(e1) == (True, True)
    assert traces_surjective(e1.with_pairings(mu=np.zeros_like(e1.mu)))[0] is False
    Q0 = zero_bimodule(e1.B, e1.A)
    c = MoritaContext(e1.A, e1.B, e1.P, Q0, np.zeros((2, 0, 4)), np.zeros((0, 2, 1)))
    assert traces_surjective(c) == (False, False)


def test_nondegenerate_examples(e1):
    assert is_nondegenerate(e1).ok
    c = named_context("E3-corner")
    nd = is_nondegenerate(c)
    assert not nd.ok and not all(nd.torsion.values())
    z = e1.with_pairings(mu=np.zeros_like(e1.mu), nu=np.zeros_like(e1.nu))
    nd = is_nondegenerate(z)
    assert all(s.is_full() for s in nd.pairings.values())


def test_nondegenerate_implied_on_torsion_free_corpus():
    hits = 0
    for name, c in CORPUS.items():
        tf = all(s.is_zero() for s in ring_torsion(c.A) + ring_torsion(c.B))
        bis = all(is_torsion_free(m, s) for m in (c.P, c.Q) for s in ("left", "right"))
        if all(traces_surjective(c)) and tf and bis:
            assert is_nondegenerate(c).ok, name
            hits += 1
    assert hits >= 4


def test_kernels_e1(e1):
    assert kernels_are_torsion(e1) == (True, True)
    _, k, tp = _pairing_kernel_torsion(e1.P, e1.Q, e1.mu)
    assert k.dim == 0 and tp.dim == 4
    _, k, tp = _pairing_kernel_torsion(e1.Q, e1.P, e1.nu)
    assert k.dim == 0 and tp.dim == 1


def test_kernel_nonzero_e4():
    c = named_context("E4")
    assert validate_context(c).ok and all(traces_surjective(c))
    _, k, tp = _pairing_kernel_torsion(c.P, c.Q, c.mu)
    assert k.dim >= 1
    for side in ("left", "right"):
        for t in tp.module.action(side):
            assert not matmul(t, k.basis.T, c.p).any()
    assert kernels_are_torsion(c) == (True, True)


# -- psi ------------------------------------------------------------------------------------------


def test_psi_e1(e1):
    pm = psi_maps(e1)["psi"]
    assert pm.checks.ok
    assert pm.map.is_bijective() and pm.map.matrix.shape == (2, 2)


def test_psi_kernel_is_torsion_on_corpus():
    for name in E3_NAMES:
        c = named_context(name)
        for pm in psi_maps(c).values():
            assert pm.checks.ok, (name, pm.name, [x.id for x in pm.checks.failures])
        pm = psi_maps(c)["psi"]
        assert pm.map.kernel() == module_torsion(c.Q, "left")


def test_psi_zero_q(e1):
    P0, Q0 = zero_bimodule(e1.A, e1.B), zero_bimodule(e1.B, e1.A)
    c = MoritaContext(e1.A, e1.B, P0, Q0, np.zeros((0, 0, 4)), np.zeros((0, 0, 1)))
    pm = psi_maps(c)["psi"]
    assert pm.map.matrix.size == 0 and pm.target.dim == 0
    assert pm.map.is_surjective() and pm.checks.ok


# -- functors -------------------------------------------------------------------------------------------


def test_functor_hom_examples(e1):
    H = functor_hom(e1, e1.A.regular_bimodule)
    assert find_isomorphism(H.module, e1.Q.left_part()).isomorphic
    assert functor_hom(e1, zero_left(e1.A)).dim == 0
    P = e1.P.left_part()
    s, _, _ = direct_sum(P, e1.A.left_regular)
    assert functor_hom(e1, s).dim == functor_hom(e1, P).dim + functor_hom(e1, e1.A.left_regular).dim


def test_functor_tensor_examples(e1):
    assert functor_tensor(e1, e1.P.left_part()).dim == 1
    assert functor_tensor(e1, zero_left(e1.A)).dim == 0
    F = functor_tensor(e1, e1.A.regular_bimodule)
    assert find_isomorphism(F.module.left_part() if F.module.side == "bi" else F.module, e1.Q.left_part()).isomorphic


def test_delta_examples(e1):
    d = delta_natural_iso(e1, e1.A.left_regular, others=[e1.P.left_part()])
    assert d.checks.ok and d.map.is_bijective() and d.map.matrix.shape == (2, 2)
    d = delta_natural_iso(e1, zero_left(e1.A))
    assert d.map.is_bijective()


def test_delta_bijective_over_torsion_rings():
    for name in E3_NAMES:
        c = named_context(name)
        for label, M in probe_modules(c.A, [("P", c.P)], cap=6):
            d = delta_natural_iso(c, M)
            assert d.checks.ok, (name, label, [x.id for x in d.checks.failures])


def test_phi_examples(e1):
    f = phi_map(e1, e1.A.left_regular)
    assert f.checks.ok and f.map.is_surjective() and f.map.kernel().is_zero()
    f = phi_map(e1, zero_left(e1.A))
    assert f.map.matrix.size == 0


def test_phi_kernel_is_torsion_with_torsion_tensor():
    c = named_context("E3-corner")
    for _, K in probe_modules(c.A, [("P", c.P)], cap=4):
        f = phi_map(c, K)
        assert f.checks.ok


def test_gamma_examples(e1):
    g = gamma_map(e1, e1.B.left_regular)
    assert g.checks.ok and g.map.is_surjective()
    g = gamma_map(e1, zero_left(e1.B))
    assert g.map.matrix.size == 0


def test_gamma_on_random_b_modules():
    c = named_context("block")
    rng = np.random.default_rng(8)
    for _ in range(5):
        L = random_module(c.B, None, None, rng, max_dim=4)
        g = gamma_map(c, L)
        assert g.checks.ok, [x.id for x in g.checks.failures]


def test_eta_examples(e1):
    n = eta_map(e1, e1.A.left_regular)
    assert n.checks.ok and n.map.is_surjective()
    with pytest.raises(NotApplicable):
        eta_map(e1, GradedModule(GradedSpace(e1.group, 2, (0,)), left=(e1.A, None)))


def test_eta_removes_torsion():
    c = named_context("E3-rows")
    # left regular module of a ring with left torsion
    U = c.A.left_regular
    if is_unital_module(U) and not module_torsion(U).is_zero():
        assert eta_map(c, U).checks.ok
    for name in E3_NAMES:
        c = named_context(name)
        U = c.P.left_part()
        assert eta_map(c, U).checks.ok, name


# -- round trips ------------------------------------------------------------------------------------------


def test_roundtrip_e1(e1):
    pa = probe_modules(e1.A, [("P", e1.P)])
    pb = probe_modules(e1.B, [("Q", e1.Q)])
    assert len(pa) >= 10
    ch = equivalence_roundtrip(e1, pa, pb)
    assert ch.ok, [x.id for x in ch.failures]


def test_roundtrip_trivial_testset(e1):
    assert equivalence_roundtrip(e1, [], []).ok


def test_roundtrip_random_e1_modules(e1):
    rng = np.random.default_rng(31)
    from grmorita.corpus import full_relation

    got = []
    while len(got) < 10:
        M = random_module(e1.A, full_relation([0, 1]), (0, 1), rng, max_dim=4)
        M = submodule_and_quotient(M, module_torsion(M)).quotient
        if M.dim and is_unital_module(M):
            got.append((f"r{len(got)}", M))
    assert equivalence_roundtrip(e1, got, [], rng).ok


def test_end_isos_examples(e1):
    assert end_isos(e1).ok
    for name in E3_NAMES:
        ch = end_isos(named_context(name))
        assert ch.ok, (name, [x.id for x in ch.failures])


def test_end_isos_zero_ring():
    z = GradedRing(GradedSpace(cyclic(1), 2, ()), np.zeros((0, 0, 0)))
    c = diagonal_context(z)
    assert validate_context(c).ok
    assert end_isos(c).ok


# -- construction from a bimodule ----------------------------------------------------------------------


def test_context_from_e1_bimodule(e1):
    res = context_from_bimodule(e1.A, e1.B, e1.P)
    assert res.failed is None and res.checks.ok
    c = res.context
    assert validate_context(c).ok and all(traces_surjective(c))
    assert find_isomorphism(c.Q, e1.Q).isomorphic


def test_context_from_zero_bimodule(e1):
    P0 = zero_bimodule(e1.A, e1.B)
    res = context_from_bimodule(e1.A, e1.B, P0)
    assert res.context is None and res.failed == "generator"


def test_context_from_regular_bimodule():
    A = named_context("E1").A
    res = context_from_bimodule(A, A, A.regular_bimodule)
    assert res.context is not None and all(traces_surjective(res.context))


def test_context_from_bimodule_rejects_bad_inputs():
    c = named_context("E3-corner")
    with pytest.raises(ValueError):
        context_from_bimodule(c.A, c.B, c.P)


# -- tensor rings ---------------------------------------------------------------------------------------------


def test_tensor_rings_e1(e1):
    ch, r1, r2 = tensor_rings(e1)
    assert ch.ok and r1.dim == 4 and r2.dim == 1
    assert r1.degrees == tuple(sorted(e1.A.degrees)) or sorted(r1.degrees) == sorted(e1.A.degrees)


def test_tensor_ring_zero_nu(e1):
    z = e1.with_pairings(nu=np.zeros_like(e1.nu))
    ch, r1, _ = tensor_rings(z)
    assert not r1.table.any()
    assert all(x.ok for x in ch.items if x.id.endswith("ring-axioms"))


def test_tensor_rings_on_corpus():
    for name, c in CORPUS.items():
        ch, _, _ = tensor_rings(c)
        assert ch.ok, (name, [x.id for x in ch.failures])


def test_inverse_tensor_of_b_is_p(e1):
    G = inverse_tensor(e1, e1.B.regular_bimodule)
    assert G.dim == 2
