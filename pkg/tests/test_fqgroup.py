import numpy as np
import pytest

from qgalois import errors, fqgroup
from qgalois import examples as ex


@pytest.mark.parametrize("name,order", [("Z2", 2), ("Z3", 3), ("S3", 6), ("Z2xZ2", 4)])
def test_haar_on_function_algebra_is_uniform(name, order):
    G = ex.group(name)
    assert np.allclose(G.haar.coeffs, np.full(order, 1 / order))
    assert G.haar.faithful and G.is_kac


def test_haar_on_group_algebra_is_delta_at_identity():
    G = fqgroup.build_group_algebra(ex.symmetric_table(3))
    expected = np.zeros(6)
    expected[0] = 1.0
    assert np.allclose(G.haar.coeffs, expected)
    # computed again from the invariance system alone
    assert np.allclose(fqgroup.haar_state_vector(G.H, G.comul), expected)


def test_haar_is_invariant(groups):
    G = groups["S3"]
    d = G.dim
    h = np.asarray(G.haar.coeffs)
    D = G.comul3()
    left = np.einsum("a,abk->bk", h, D)
    right = np.einsum("b,abk->ak", h, D)
    target = np.outer(G.H.unit, h)
    assert np.allclose(left, target) and np.allclose(right, target)
    assert d == 6


@pytest.mark.parametrize("name,dims", [("Z3", [1, 1, 1]), ("S3", [1, 1, 2]), ("Z2xZ2", [1, 1, 1, 1])])
def test_irreps_match_character_theory(name, dims):
    G = ex.group(name)
    U = G.irreps
    assert [u.dim for u in U] == dims
    assert sum(u.dim ** 2 for u in U) == G.dim
    # trivial representation first among the 1-dimensional ones
    assert np.allclose(U[0].character(), G.H.unit)


def test_characters_are_orthonormal_for_haar(groups):
    G = groups["S3"]
    H = G.H
    h = np.asarray(G.haar.coeffs)
    chars = [U.character() for U in G.irreps]
    gram = np.array([[h @ H.mul(H.star(a), b) for b in chars] for a in chars])
    assert np.allclose(gram, np.eye(len(chars)))


def test_tensor_representation_character_is_product(groups):
    G = groups["S3"]
    U = G.irreps[2]
    W = fqgroup.tensor_representation(U, U)
    ch = np.einsum("rri->i", W)
    assert np.allclose(ch, G.H.mul(U.character(), U.character()))
    m, u = fqgroup.corep_residuals(G, W)
    assert max(m, u) < 1e-9


def test_conjugate_representation_character(groups):
    G = groups["S3"]
    U = G.irreps[2]
    Ub = fqgroup.conjugate_representation(U)
    # Kac case: character of the conjugate is the adjoint character
    assert np.allclose(Ub.character(), G.H.star(U.character()))
    assert Ub.dim_q == pytest.approx(2.0)


def test_standard_solution_with_nontrivial_rho():
    # representation-level mode: rho = diag(2, 1/2)
    rho = np.diag([2.0, 0.5])
    s = fqgroup.standard_solution(rho)
    assert s.conjugate_residual < 1e-12
    assert s.dim_q == pytest.approx(2.5)
    assert s.norm_R_sq == pytest.approx(2.5)  # Tr(rho^-1)
    assert s.norm_Rbar_sq == pytest.approx(2.5)  # Tr(rho)
    xi = np.array([1.0, 0.0])
    assert np.allclose(s.slice_R(xi), s.R[:, 0])
    assert np.allclose(s.slice_Rbar(xi), s.Rbar[0])


def test_standard_solution_rejects_non_positive_rho():
    with pytest.raises(errors.RhoNotPositive):
        fqgroup.standard_solution(np.diag([1.0, -1.0]))


def test_standard_solution_of_irrep_has_dim_q_equal_dimension(groups):
    U = groups["S3"].irreps[2]
    s = fqgroup.standard_solution(U)
    assert s.dim_q == pytest.approx(2.0) and s.conjugate_residual < 1e-12


def test_dual_of_dual_is_the_original(groups):
    for G in groups.values():
        assert fqgroup.double_dual_residual(G) < 1e-9
    D = fqgroup.dual_quantum_group(groups["S3"])
    assert sorted(D.H.blocks) == [1, 1, 2]


def test_peter_weyl_projections(groups):
    G = groups["S3"]
    ps = [fqgroup.isotypic_projection(G, i) for i in range(len(G.irreps))]
    assert np.allclose(sum(ps), np.eye(G.dim))
    assert all(np.allclose(p @ p, p) for p in ps)
    assert [int(round(np.trace(p).real)) for p in ps] == [1, 1, 4]


def test_not_a_group():
    with pytest.raises(errors.NotAGroup):
        fqgroup.check_group_table([[0, 1], [0, 1]])
    with pytest.raises(errors.NotAGroup):
        fqgroup.check_group_table([[0, 1, 2], [1, 2, 0]])


def test_broken_antipode_and_coproduct(groups):
    G = groups["S3"]
    with pytest.raises(errors.AntipodeError):
        fqgroup.validate_hopf(G.H, G.comul, G.counit, np.eye(6))
    with pytest.raises(errors.HopfError):
        fqgroup.validate_hopf(G.H, G.comul, 2 * np.asarray(G.counit), G.antipode)
    comul = np.array(G.comul)
    comul[:, [1, 2]] = comul[:, [2, 1]]
    with pytest.raises(errors.HopfError):
        fqgroup.validate_hopf(G.H, comul, G.counit, G.antipode)


def test_rho_must_be_the_counit(groups):
    G = groups["Z2"]
    with pytest.raises(errors.RhoInconsistent):
        fqgroup.validate_hopf(G.H, G.comul, G.counit, G.antipode, rho=np.array([2.0, 0.5]))
