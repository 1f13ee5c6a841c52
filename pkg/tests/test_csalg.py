import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgalois import csalg, errors, fqgroup
from qgalois import examples as ex


def change_basis(A, T):
    """Same algebra on the basis ``y_i = sum_a T[a, i] x_a``."""
    Ti = np.linalg.inv(T)
    mult = np.einsum("ai,bj,abc,kc->ijk", T, T, A.mult, Ti, optimize=True)
    star = Ti @ A.star_matrix @ np.conj(T)
    unit = Ti @ A.unit
    return csalg.from_structure_constants(mult, star, unit, seed=3)


@pytest.mark.parametrize("sizes", [[1], [2], [3], [1, 2], [2, 1, 3], [1, 1, 1, 1]])
def test_wedderburn_recovers_block_sizes(sizes):
    A = csalg.multimatrix_algebra(sizes)
    assert sorted(A.blocks) == sorted(sizes)
    assert A.wedderburn.residual < 1e-9


def test_wedderburn_survives_random_basis_change(rng):
    A = csalg.multimatrix_algebra([1, 2])
    T = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    B = change_basis(A, T)
    assert sorted(B.blocks) == [1, 2]
    a, b = rng.normal(size=5) + 0j, rng.normal(size=5) + 0j
    W = B.wedderburn
    lhs = W.to_blocks(B.mul(a, b))
    rhs = [x @ y for x, y in zip(W.to_blocks(a), W.to_blocks(b))]
    assert all(np.allclose(l, r) for l, r in zip(lhs, rhs))
    assert np.allclose(W.from_blocks(W.to_blocks(a)), a)
    # the block map is a *-map
    assert all(np.allclose(x, y.conj().T) for x, y in zip(W.to_blocks(B.star(a)), W.to_blocks(a)))


def test_group_algebra_of_s3_has_character_table_blocks():
    # C[S3] = C + C + Mat_2 (two linear characters, one 2-dim irrep)
    G = fqgroup.build_group_algebra(ex.symmetric_table(3))
    assert sorted(G.H.blocks) == [1, 1, 2]


def test_center_dimension_counts_blocks():
    A = csalg.multimatrix_algebra([1, 2, 2])
    assert A.center().shape[1] == 3


def test_axiom_violations_are_reported():
    A = csalg.matrix_algebra(2)
    bad = np.array(A.mult)
    bad[0, 1, 1] += 0.5
    with pytest.raises(errors.NotAssociative):
        csalg.from_structure_constants(bad, A.star_matrix, A.unit)
    with pytest.raises(errors.NoUnit):
        csalg.from_structure_constants(A.mult, A.star_matrix, 2 * np.asarray(A.unit))
    with pytest.raises(errors.NotInvolutive):
        csalg.from_structure_constants(A.mult, np.eye(4), A.unit)  # identity is not (xy)* = y*x*
    with pytest.raises(errors.DimensionMismatch):
        csalg.from_structure_constants(A.mult, np.eye(3), A.unit)


def test_tensor_and_opposite():
    A = csalg.tensor_product(csalg.matrix_algebra(2), csalg.diagonal_algebra(2))
    assert sorted(A.blocks) == [2, 2]
    Aop = csalg.opposite_algebra(csalg.matrix_algebra(2))
    e01, e10 = Aop.basis(1), Aop.basis(2)
    # in the opposite algebra e01 . e10 = e10 e01 = e11
    assert np.allclose(Aop.mul(e01, e10), Aop.basis(3))


def test_subalgebra_and_commutant():
    A = csalg.matrix_algebra(2)
    diag = np.stack([A.basis(0), A.basis(3)], axis=1)
    D = csalg.subalgebra(A, diag)
    assert D.dim == 2 and sorted(D.algebra.blocks) == [1, 1]
    comm = A.commutant_in(diag)
    assert comm.shape[1] == 2
    assert np.allclose(comm @ (comm.conj().T @ diag), diag)
    with pytest.raises(errors.NotSubalgebra):
        csalg.subalgebra(A, np.stack([A.basis(0), A.basis(1)], axis=1))  # no unit


def test_functional_flags():
    A = csalg.diagonal_algebra(3)
    assert csalg.check_functional(A, [0.2, 0.3, 0.5]).faithful
    f = csalg.check_functional(A, [0.5, 0.5, 0.0])
    assert f.positive and not f.faithful
    assert not csalg.check_functional(A, [1.0, -0.5, 0.5]).positive
    assert not csalg.check_functional(A, [1.0, 1j, 0.5]).hermitian


def test_dual_basis_pairs_to_identity_for_non_tracial_state():
    A = csalg.matrix_algebra(2)
    c = np.array([[0.6, 0.1 + 0.2j], [0.1 - 0.2j, 0.4]])
    phi = c.T.ravel()  # Tr(. c)
    d = csalg.dual_basis(A, phi)
    # phi(x_i x^j) = delta_ij, checked straight from the product
    pair = np.array([[np.dot(phi, A.mul(A.basis(i), d.dual[:, j])) for j in range(4)] for i in range(4)])
    assert np.allclose(pair, np.eye(4))
    fr = csalg.frobenius_report(A, phi)
    # m^*(1) = sum x^i (x) x_i
    assert np.allclose(fr.coproduct_unit, np.linalg.inv(csalg.pairing_matrix(A, phi)))


def test_singular_pairing():
    A = csalg.diagonal_algebra(2)
    with pytest.raises(errors.SingularPairing):
        csalg.dual_basis(A, [1.0, 0.0])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_normalized_trace_is_a_q_system_with_scalar_n_squared(n):
    A = csalg.matrix_algebra(n)
    fr = csalg.frobenius_report(A, A.regular_trace())
    assert fr.frobenius_residual < 1e-12
    assert fr.q_scalar == pytest.approx(n * n, abs=1e-12)
    assert fr.crosscheck_residual < 1e-12


def test_twisted_trace_on_mat2_has_scalar_trace_of_inverse():
    # phi = Tr(. c), Tr c = 1: m m^* = Tr(c^-1) id, here 1/0.7 + 1/0.3
    A = csalg.matrix_algebra(2)
    c = np.diag([0.7, 0.3])
    fr = csalg.frobenius_report(A, c.T.ravel())
    assert fr.q_scalar == pytest.approx(1 / 0.7 + 1 / 0.3, abs=1e-12)


def test_non_tracial_state_on_c2_is_not_a_q_system():
    A = csalg.diagonal_algebra(2)
    fr = csalg.frobenius_report(A, [0.3, 0.7])
    assert fr.q_scalar is None
    assert fr.frobenius_residual < 1e-12
    # m m^* is diagonal with entries 1/0.3, 1/0.7
    assert np.allclose(np.diag(fr.mm_star), [1 / 0.3, 1 / 0.7])


def test_not_faithful_rejected():
    with pytest.raises(errors.NotFaithful):
        csalg.frobenius_report(csalg.diagonal_algebra(2), [1.0, 0.0])


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000), sizes=st.sampled_from([[1, 1], [2], [1, 2], [3]]))
def test_frobenius_residual_small_for_random_faithful_states(seed, sizes):
    A = csalg.multimatrix_algebra(sizes)
    rng = np.random.default_rng(seed)
    blocks = []
    for n in sizes:
        z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        blocks.append(z @ z.conj().T + 0.2 * np.eye(n))
    total = sum(np.trace(b).real for b in blocks)
    phi = np.concatenate([(b.T / total).ravel() for b in blocks])
    fr = csalg.frobenius_report(A, phi)
    assert fr.frobenius_residual < 1e-9
    assert fr.crosscheck_residual < 1e-9


def test_module_unitarity_detects_non_star_representations(rng):
    A = csalg.matrix_algebra(2)
    phi = A.regular_trace()
    f = csalg.check_functional(A, phi)
    # identity representation of Mat_2 on C^2: pi(e_ij) = e_ij
    rep = np.array([np.eye(2)[:, [i]] @ np.eye(2)[[j], :] for i in range(2) for j in range(2)], dtype=complex)
    assert csalg.module_unitarity_residual(A, f, rep) < 1e-12
    # conjugating by a unitary keeps it a *-representation
    q, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    assert csalg.module_unitarity_residual(A, f, q @ rep @ q.conj().T) < 1e-12
    # a non-unitary similarity does not
    s = np.array([[1.0, 0.8], [0.0, 1.0]])
    assert csalg.module_unitarity_residual(A, f, s @ rep @ np.linalg.inv(s)) > 1e-2


def test_kms_for_twisted_trace():
    A = csalg.matrix_algebra(2)
    c = np.array([[0.6, 0.1j], [-0.1j, 0.4]])
    phi = c.T.ravel()
    good = np.kron(c, np.linalg.inv(c).T)
    assert csalg.kms_residual(A, phi, good) < 1e-12
    assert csalg.kms_residual(A, phi, np.eye(4)) > 1e-3  # phi is not a trace
