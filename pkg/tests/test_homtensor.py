import numpy as np
import pytest

from grmorita.corpus import (
    full_relation,
    matrix_subalgebra,
    matrix_unit_ring,
    named_context,
    random_module_pair,
)
from grmorita.graded import (
    GradedModule,
    GradedRing,
    GradedSpace,
    direct_sum,
    is_torsion_free,
    module_torsion,
    suspension,
    unital_part,
    validate_module,
    validate_ring,
)
from grmorita.groups import cyclic
from grmorita.homtensor import (
    NotApplicable,
    b_dot_hom,
    canonical_map,
    chi_iso,
    end_ring,
    find_isomorphism,
    generates,
    hom_all,
    hom_component,
    hom_module,
    hom_suspension_check,
    is_two_sided_ideal,
    tensor_over,
    torsion_quotient,
    trace_ideal,
)
from grmorita.linalg import DimensionMismatch, matmul, rank

import oracle

Z1, Z2, Z3 = cyclic(1), cyclic(2), cyclic(3)


def unit(i, j, n=2):
    m = np.zeros((n, n), dtype=np.int64)
    m[i, j] = 1
    return m


def m2():
    return matrix_unit_ring([0, 1], full_relation([0, 1]), (0, 1), Z2, 2)


def columns(ring, degrees=(0, 1)):
    mats = [unit(0, 0), unit(0, 1), unit(1, 0), unit(1, 1)]
    return GradedModule(GradedSpace(ring.group, ring.p, degrees), left=(ring, np.stack(mats)))


def f2():
    return GradedRing(GradedSpace(Z1, 2, (0,)), [[[1]]])


@pytest.fixture(scope="module")
def e1():
    return named_context("E1")


def comp_set(M, N, sigma, side="left"):
    return oracle.span_set(hom_component(M, N, sigma, side).basis.tolist(), M.p, M.dim * N.dim)


# -- HOM ------------------------------------------------------------------------


def test_hom_of_field():
    F = f2().left_regular
    assert hom_component(F, F, 0).dim == 1


def test_hom_columns_schur():
    A = m2()
    M = columns(A)
    assert hom_component(M, M, 0).dim == 1
    assert hom_component(M, M, 1).dim == 0
    for s in (0, 1):
        assert comp_set(M, M, s) == frozenset(oracle.hom_maps(M, M, s))


# Brute force over all 2^16 F_2-linear maps of M_2(F_2): the A-linear ones are
# right multiplications, a 4-dimensional space.
HOM_AA_TOTAL = 4


def test_hom_regular_m2():
    A = m2().left_regular
    hs = hom_all(A, A)
    assert hs.dim == HOM_AA_TOTAL
    assert oracle.all_maps_count(A, A) == 2 ** HOM_AA_TOTAL
    assert hs.dims() == {0: 2, 1: 2}
    assert hs.independent()


def test_hom_into_zero_module():
    A = m2()
    zero = GradedModule(GradedSpace(Z2, 2, ()), left=(A, None))
    hs = hom_all(columns(A), zero)
    assert hs.dim == 0


def test_hom_ring_mismatch():
    with pytest.raises(DimensionMismatch):
        hom_all(columns(m2()), GradedModule(GradedSpace(Z2, 2, (0,)), left=(GradedRing(GradedSpace(Z2, 2, (0,)), [[[1]]]), np.ones((1, 1, 1)))))


def test_hom_suspension_e1(e1):
    for M in (e1.P.left_part(), e1.A.left_regular):
        for N in (e1.P.left_part(), e1.A.left_regular):
            for s in range(2):
                assert hom_suspension_check(M, N, s)


def test_hom_suspension_identity_dims():
    A = m2()
    M = columns(A)
    N = direct_sum(columns(A), columns(A, (1, 0)))[0]
    for s in range(2):
        a = hom_component(M, N, s).dim
        assert a == hom_component(M, suspension(N, s), 0).dim == hom_component(suspension(M, s), N, 0).dim


def test_hom_suspension_random_z3():
    rng = np.random.default_rng(23)
    for _ in range(50):
        _, M, N = random_module_pair(Z3, 2, rng)
        for s in range(3):
            assert hom_suspension_check(M, N, s)


def test_hom_solver_matches_enumeration_sample():
    rng = np.random.default_rng(9)
    for G in (Z2, Z3):
        for _ in range(15):
            _, M, N = random_module_pair(G, 2, rng, max_product=6)
            for s in G.elements:
                assert comp_set(M, N, s) == frozenset(oracle.hom_maps(M, N, s))


def test_right_module_hom_against_enumeration(e1):
    Q = e1.Q.right_part()
    A = e1.A.right_regular
    for s in range(2):
        assert comp_set(Q, A, s, "right") == frozenset(oracle.hom_maps(Q, A, s, "right"))


# -- HOM as a module ------------------------------------------------------------------


def test_hom_as_module_e1(e1):
    h = hom_module(e1.P, e1.A.left_regular, "left")
    assert h.dim == 2
    assert validate_module(h.module).ok
    assert h.module.has("left") and h.module.ring("left") == e1.B
    # B = F_2 acts by scalars
    assert (h.module.action("left")[0] == np.eye(2)).all()


def test_b_dot_hom_e1_is_full(e1):
    full = hom_module(e1.P, e1.A.left_regular, "left")
    bh = b_dot_hom(e1.P, e1.A.left_regular, "left")
    assert bh.dim == 2 and bh.subspace() == full.subspace()


def test_b_dot_hom_over_zero_product_ring():
    A = m2()
    null = GradedRing(GradedSpace(Z2, 2, (0,)), [[[0]]])
    mats = np.stack([unit(0, 0), unit(0, 1), unit(1, 0), unit(1, 1)])
    P = GradedModule(GradedSpace(Z2, 2, (0, 1)), left=(A, mats), right=(null, np.zeros((1, 2, 2))))
    assert validate_module(P).ok
    assert hom_module(P, A.left_regular, "left").dim == 2
    assert b_dot_hom(P, A.left_regular, "left").dim == 0


def test_b_dot_hom_is_torsion_free_on_corpus():
    for name in ("E1", "E3-corner", "E3-corner-op", "E3-four", "block", "E4"):
        c = named_context(name)
        for X, T in ((c.P, c.A.left_regular), (c.P, c.A.regular_bimodule), (c.Q, c.B.regular_bimodule)):
            h = b_dot_hom(X, T, "left")
            assert module_torsion(h.module, "left").is_zero(), name


def test_trace_ideal_examples(e1):
    A = m2()
    M = columns(A)
    assert trace_ideal(M, M).is_full()
    assert trace_ideal(e1.P.left_part(), e1.A.left_regular).is_full()
    assert generates(e1.P.left_part(), e1.A.left_regular)
    Z = GradedModule(GradedSpace(Z2, 2, (0,)), left=(A, None))
    assert trace_ideal(Z, M).is_zero()
    zero = GradedModule(GradedSpace(Z2, 2, ()), left=(A, None))
    assert not generates(zero, M)
    assert generates(M, M)


def test_trace_in_ring_is_two_sided_ideal():
    rng = np.random.default_rng(4)
    for _ in range(40):
        ring, M, _ = random_module_pair(Z2, 2, rng)
        t = trace_ideal(M, ring.left_regular)
        assert is_two_sided_ideal(ring, t)


# -- tensor products ------------------------------------------------------------------


def test_tensor_dims_e1(e1):
    qp = tensor_over(e1.Q, e1.P)
    pq = tensor_over(e1.P, e1.Q)
    assert qp.scalar.dim == 4 and qp.relations.dim == 3 and qp.dim == 1
    assert pq.dim == 4 and pq.relations.dim == 0


def test_tensor_with_unital_ring(e1):
    t = tensor_over(e1.P, e1.B.regular_bimodule)
    assert t.dim == e1.P.dim
    f = t.factor(np.stack([np.eye(2, dtype=np.int64)[i].reshape(1, 2) for i in range(2)]).reshape(2, 1, 2))
    assert f is not None and rank(f, 2) == 2


def test_tensor_relations_match_enumeration():
    for name in ("E1", "E3-corner", "E3-rows", "E4"):
        c = named_context(name)
        for M, N in ((c.Q, c.P), (c.P, c.Q)):
            if M.dim * N.dim <= 6:
                t = tensor_over(M, N)
                assert oracle.subspace_set(t.relations) == oracle.tensor_relations(M, N), name


def test_tensor_factor_rejects_unbalanced(e1):
    t = tensor_over(e1.Q, e1.P)
    bad = np.zeros((2, 2, 1), dtype=np.int64)
    bad[0, 0, 0] = 1
    assert t.factor(bad) is None
    assert t.factor(e1.nu) is not None


def test_tensor_middle_mismatch(e1):
    with pytest.raises(DimensionMismatch):
        tensor_over(e1.P, e1.P)


# -- torsion quotient, chi, END -------------------------------------------------------------


def test_torsion_quotient_examples():
    A = m2()
    sq = torsion_quotient(columns(A))
    assert sq.projection.is_bijective()
    Z = GradedModule(GradedSpace(Z2, 2, (0, 1)), left=(A, None))
    assert torsion_quotient(Z).quotient.dim == 0
    corner = matrix_subalgebra([unit(0, 0), unit(0, 1)], (0, 0), Z1, 2)
    R = corner.right_regular
    sq = torsion_quotient(R, "right")
    assert sq.quotient.dim == 1 < R.dim
    assert is_torsion_free(sq.quotient, "right")


def test_chi_examples(e1):
    f, target = chi_iso(f2().left_regular)
    assert f.is_bijective() and target.dim == 1
    f, target = chi_iso(e1.P.left_part())
    assert f.matrix.shape == (2, 2) and f.rank() == 2
    assert f.respects_degree() and f.is_linear()


def test_chi_not_applicable():
    corner = matrix_subalgebra([unit(0, 0), unit(0, 1)], (0, 0), Z1, 2)
    M = GradedModule(GradedSpace(Z1, 2, (0, 0)), left=(corner, np.stack([unit(0, 0), unit(0, 1)])))
    with pytest.raises(NotApplicable):
        chi_iso(M)
    f, target = chi_iso(M, strict=False)
    # M is torsion-free but AM is a line, so chi leaves A.HOM_A(A, M)
    unital = b_dot_hom(corner.regular_bimodule, M, "left")
    assert unital.dim < target.dim
    assert f.is_injective()


def test_chi_naturality():
    A = m2()
    mods = [columns(A), A.left_regular, direct_sum(columns(A), columns(A, (1, 0)))[0]]
    rng = np.random.default_rng(2)
    done = 0
    while done < 20:
        M, N = (mods[int(i)] for i in rng.integers(0, len(mods), size=2))
        hs = hom_all(M, N)
        basis, _ = hs.basis()
        if basis.shape[0] == 0:
            continue
        coef = rng.integers(0, 2, size=(1, basis.shape[0]))
        F = matmul(coef, basis, 2).reshape(N.dim, M.dim)
        chiM, hM = chi_iso(M)
        chiN, hN = chi_iso(N)
        for j in range(M.dim):
            g = hM.matrix(chiM.matrix[:, j])  # a -> a m_j
            lhs = hN.coords(matmul(F, g, 2))  # f o chi_M(m_j)
            rhs = matmul(chiN.matrix, F[:, j].reshape(-1, 1), 2).reshape(-1)  # chi_N(f m_j)
            assert lhs is not None and (lhs == rhs).all()
        done += 1


def test_end_examples(e1):
    E = end_ring(f2().left_regular)
    assert E.ring.dim == 1
    E = end_ring(e1.Q, "left")
    assert E.ring.dim == 4
    assert validate_ring(E.ring).ok
    cm = canonical_map(e1.A, e1.Q, E)
    assert cm.kernel().is_zero()
    assert cm.is_ring_morphism() and cm.is_graded()
    assert cm.image() == unital_part(E.hom.module, "left")


def test_end_rings_associative_on_corpus():
    for name in ("E3-corner", "E3-four", "block", "M2-F2-S3"):
        c = named_context(name)
        for M, side in ((c.P, "left"), (c.P, "right"), (c.Q, "left"), (c.Q, "right")):
            assert validate_ring(end_ring(M, side).ring).ok, name


def test_find_isomorphism(e1):
    P = e1.P.left_part()
    res = find_isomorphism(P, columns(e1.A))
    assert res.decided and res.isomorphic
    other = find_isomorphism(P, columns(e1.A, (1, 0)))
    assert other.decided and not other.isomorphic
