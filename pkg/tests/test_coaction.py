import numpy as np
import pytest

from qgalois import coaction as co
from qgalois import csalg, errors
from qgalois import examples as ex


def test_translation_is_ergodic_and_free(groups):
    for G in groups.values():
        for side in ("left", "right"):
            c = co.comultiplication_coaction(G, side)
            assert c.fixed_basis.shape[1] == 1
            assert co.is_free_galois(c).free


def test_trivial_coaction_fixes_everything(groups):
    A = csalg.matrix_algebra(2)
    c = co.trivial_coaction(A, groups["Z3"], "left")
    assert c.fixed_basis.shape[1] == 4
    assert not co.is_free_galois(c).free


def test_fixed_points_of_permutation_action_are_orbit_functions(groups):
    # Z2 swapping two of three points: orbits {0, 1}, {2}
    c = ex.permutation_coaction(groups["Z2"], [[0, 1, 2], [1, 0, 2]])
    F = c.fixed_basis
    assert F.shape[1] == 2
    orbit = np.array([1.0, 1.0, 0.0])
    assert np.allclose(F @ (F.conj().T @ orbit), orbit)


def test_expectation_is_an_idempotent_onto_fixed_points(groups):
    c = ex.inner_coaction(groups["Z2"], [np.eye(2), np.diag([1.0, -1.0])])
    E = np.asarray(c.expectation)
    assert np.allclose(E @ E, E)
    assert np.linalg.matrix_rank(E) == 2  # diagonal matrices
    img = E @ np.arange(4.0)
    assert np.allclose(c.apply(img), np.kron(img, c.G.H.unit))


def test_validation_catches_broken_coactions(groups):
    G = groups["Z2"]
    A = csalg.diagonal_algebra(2)
    good = co.comultiplication_coaction(G, "right").map
    with pytest.raises(errors.CoactionNotHomomorphism):
        co.validate_coaction(A, G, "right", 2 * np.asarray(good))
    # a unital *-map which is not multiplicative
    bad = np.array(good)
    bad[:, 0] = 0.5 * (np.asarray(good)[:, 0] + np.asarray(good)[:, 1])
    bad[:, 1] = 0.5 * (np.asarray(good)[:, 0] + np.asarray(good)[:, 1])
    with pytest.raises(errors.CoactionError):
        co.validate_coaction(A, G, "right", bad)
    with pytest.raises(errors.DimensionMismatch):
        co.validate_coaction(A, G, "right", np.eye(3))
    with pytest.raises(errors.SchemaError):
        co.validate_coaction(A, G, "middle", good)


def test_mis_sided_translation_fails_coaction_law(groups):
    # flip . Delta is a right coaction of the co-opposite group, not of C(S3)
    G = groups["S3"]
    d = G.dim
    flip = np.eye(d * d).reshape(d, d, d, d).transpose(1, 0, 2, 3).reshape(d * d, d * d)
    with pytest.raises(errors.CoactionLawError):
        co.validate_coaction(G.H, G, "right", flip @ np.asarray(G.comul))


@pytest.mark.parametrize("entry", ex.coaction_corpus(), ids=lambda e: e.name)
def test_corpus_freeness(entry):
    o = co.freeness_oracles(entry.coaction)
    assert o.galois_free == entry.free
    assert o.agree
    if entry.free:
        assert all(i.surjective and i.inequality_ok for i in o.imprimitivity)


def test_galois_rank_counts(groups):
    c = co.comultiplication_coaction(groups["S3"], "left")
    g = co.is_free_galois(c)
    assert g.rank == g.expected_rank == 36


def test_spectral_subspaces_of_translation_follow_peter_weyl(groups):
    G = groups["S3"]
    c = co.comultiplication_coaction(G, "right")
    for k, U in enumerate(G.irreps):
        s = co.spectral_subspace(c, k)
        assert s.defect < 1e-9
        # (H_U (x) C(G))^G has dimension dim U
        F = co.invariant_vectors(c, np.asarray(U.coeffs))
        assert F.shape[1] == U.dim


def test_localized_defect_matches_saturation_oracle():
    # Z4 acting on Mat_2 by Ad diag(1, i^g): A_chi is spanned by matrix units of
    # the right weight, and the localized map at chi is onto iff A A_chi = A
    Z4 = ex.group("Z4")
    c = ex.inner_coaction(Z4, [np.diag([1.0, 1j ** g]) for g in range(4)])
    A = c.A
    for k, U in enumerate(Z4.irreps):
        chi = U.character()  # values on the group elements
        units = [A.basis(i) for i in range(4)
                 if np.allclose(c.apply(A.basis(i)), np.kron(A.basis(i), chi))]
        span = [A.mul(a, u) for a in np.eye(4) for u in units]
        saturated = bool(units) and np.linalg.matrix_rank(np.array(span)) == 4
        assert (co.spectral_subspace(c, k).defect < 1e-9) == saturated


def test_canonical_state_of_translation_is_haar(groups):
    for G in groups.values():
        for side in ("left", "right"):
            s = co.canonical_state(co.comultiplication_coaction(G, side))
            assert np.allclose(s.coeffs, G.haar.coeffs)
            assert s.dim_q == pytest.approx(G.dim)
            assert s.q_scalar == pytest.approx(G.dim)


def test_canonical_state_on_graded_mat2_is_normalized_trace(groups):
    c = ex.inner_coaction(groups["Z2"], [np.eye(2), np.diag([1.0, -1.0])])
    s = co.canonical_state(c)
    assert np.allclose(s.coeffs, [0.5, 0, 0, 0.5])
    assert s.q_scalar == pytest.approx(4.0)
    assert co.kms_residual(c, s.coeffs) < 1e-12


def test_canonical_state_is_the_only_invariant_q_system(groups):
    # every state on C^2 is invariant for the trivial coaction; only the trace has q = dim_q
    c = co.trivial_coaction(csalg.diagonal_algebra(2), groups["Z2"], "left")
    assert co.invariant_functionals(c).shape[1] == 2
    s = co.canonical_state(c)
    assert np.allclose(s.coeffs, [0.5, 0.5])
    perturbed = csalg.frobenius_report(c.A, [0.4, 0.6])
    assert perturbed.q_scalar is None


def test_side_conversion_round_trip(groups):
    c = co.comultiplication_coaction(groups["S3"], "left")
    r = co.convert_side(c)
    assert r.side == "right"
    back = co.convert_side(r)
    assert back.side == "left"
    assert np.allclose(back.map, c.map)
    assert r.fixed_basis.shape[1] == c.fixed_basis.shape[1]


def test_restriction_to_fixed_points_is_trivial(crossed):
    b = crossed["Z3"]
    r = co.restrict(b.left, b.left.fixed_subalgebra)
    assert r.fixed_basis.shape[1] == r.A.dim


def test_restriction_to_non_invariant_subalgebra_fails(groups):
    c = co.comultiplication_coaction(groups["Z2"], "right")
    sub = csalg.subalgebra(c.A, np.eye(2))
    assert co.restrict(c, sub).fixed_basis.shape[1] == 1
    A = csalg.matrix_algebra(2)
    c2 = ex.inner_coaction(groups["Z2"], [np.eye(2), np.array([[0.0, 1.0], [1.0, 0.0]])])
    diag = csalg.subalgebra(A, np.stack([A.basis(0), A.basis(3)], axis=1))
    assert co.restrict(c2, diag).A.dim == 2  # swapping the diagonal leaves it invariant
    upper = csalg.subalgebra(A, np.stack([A.basis(0) + A.basis(3), A.basis(1) + A.basis(2)], axis=1))
    c3 = ex.inner_coaction(groups["Z2"], [np.eye(2), np.diag([1.0, -1.0])])
    assert co.restrict(c3, upper).fixed_basis.shape[1] == 1
    with pytest.raises(errors.NotInvariant):
        twisted = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)
        c4 = ex.inner_coaction(groups["Z2"], [np.eye(2), twisted])
        co.restrict(c4, diag)


def test_freeness_passes_to_larger_invariant_algebra(crossed):
    # the right coaction is free on A^{G1}, hence on A
    b = crossed["S3"]
    assert co.is_free_galois(b.action_on_fixed1).free
    assert co.is_free_galois(b.right).free
