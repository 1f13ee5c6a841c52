import numpy as np
import pytest

from qgalois import errors, fqgroup, morita
from qgalois import examples as ex


@pytest.mark.parametrize("name,order,abelian", [("Z4", 4, True), ("S3", 6, False), ("Z2xZ3", 6, True),
                                                ("S3xZ2", 12, False)])
def test_group_tables_are_groups(name, order, abelian):
    t = ex.group_table(name)
    fqgroup.check_group_table(t)
    assert t.shape == (order, order)
    assert np.array_equal(t, t.T) == abelian


def test_symmetric_table_composes_permutations():
    t = ex.symmetric_table(3)
    assert np.array_equal(t[0], np.arange(6))
    # the three transpositions have order two
    assert sorted(g for g in range(6) if t[g, g] == 0) == [0, 1, 2, 5]


def test_unknown_group_name():
    with pytest.raises(errors.InputError):
        ex.group("Q8")


@pytest.mark.parametrize("name,n", [("Z2", 2), ("Z3", 3), ("S3", 6)])
def test_crossed_product_is_a_full_matrix_algebra(name, n):
    # the Heisenberg double of C(G) acts irreducibly on C(G)
    b = ex.crossed_product(ex.group(name))
    assert list(b.A.blocks) == [n]
    assert b.fixed1.dim == b.fixed2.dim == n


def test_heisenberg_cocycle_values():
    s = ex.heisenberg_cocycle(3)
    a, b = np.divmod(np.arange(9), 3)
    for g in range(9):
        for h in range(9):
            assert s.values[g, h] == pytest.approx(np.exp(2j * np.pi * b[g] * a[h] / 3))
    assert s.residual < 1e-12


def test_twisted_operators_multiply_by_the_cocycle():
    s = ex.heisenberg_cocycle(2)
    P = ex.twisted_operators(s)
    t = s.table
    for g in range(4):
        for h in range(4):
            assert np.allclose(P[g] @ P[h], s.values[g, h] * P[t[g, h]])


def test_twisted_group_algebra_blocks():
    T, _ = ex.twisted_group_algebra(ex.heisenberg_cocycle(2))
    assert list(T.blocks) == [2]  # Pauli matrices span Mat_2
    T3, _ = ex.twisted_group_algebra(ex.heisenberg_cocycle(3))
    assert list(T3.blocks) == [3]
    flat, _ = ex.twisted_group_algebra(ex.trivial_cocycle(ex.group_table("Z2xZ2")))
    assert list(flat.blocks) == [1, 1, 1, 1]


def test_invalid_cocycles():
    t = ex.cyclic_table(3)
    with pytest.raises(errors.CocycleInvalid, match="unimodular"):
        ex.two_cocycle(t, 2 * np.ones((3, 3)))
    bad = np.ones((3, 3), dtype=complex)
    bad[1, 1] = 1j  # sigma(1,1) sigma(2,2) != sigma(1,2) sigma(1,0)
    with pytest.raises(errors.CocycleInvalid, match="cocycle identity"):
        ex.two_cocycle(t, bad)
    with pytest.raises(errors.CocycleInvalid, match="normalized"):
        ex.two_cocycle(t, -np.ones((3, 3)))
    with pytest.raises(errors.CocycleInvalid):
        ex.two_cocycle(t, np.ones((2, 2)))


def test_projective_fixed_algebras(pauli):
    assert pauli.A.dim == 16
    assert pauli.fixed1.dim == pauli.fixed2.dim == 4
    assert list(pauli.fixed1.algebra.blocks) == [2]


def test_corpus_is_mixed_and_named():
    corpus = ex.coaction_corpus()
    names = [e.name for e in corpus]
    assert len(corpus) >= 10 and len(set(names)) == len(names)
    assert {e.free for e in corpus} == {True, False}


def test_inner_and_permutation_coactions(groups):
    c = ex.inner_coaction(groups["Z3"], [np.eye(2)] * 3)
    assert c.fixed_basis.shape[1] == 4
    # Z3 rotating three points has no fixed functions but constants
    p = ex.permutation_coaction(groups["Z3"], ex.cyclic_table(3))
    assert p.fixed_basis.shape[1] == 1


@pytest.mark.parametrize("name", ["Z2", "Z3"])
def test_crossed_product_composed_with_its_dual(name):
    # A box_{G^} B with A, B full matrix algebras of size n: dimension n^4 / n
    b1 = ex.crossed_product(ex.group(name))
    b2 = ex.crossed_product(b1.G2)
    ct = morita.cotensor(b1, b2)
    n = b1.G1.dim
    assert ct.bi.A.dim == n ** 3
    assert morita.mkey_report(ct.bi, with_exchange=False).verdict
