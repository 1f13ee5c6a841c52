"""Coactions of finite quantum groups on finite-dimensional C*-algebras.

A left coaction is a ``(dH*dA, dA)`` matrix with rows in the Kronecker
basis of H (x) A; a right coaction is ``(dA*dH, dA)`` with rows in A (x) H.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import csalg, errors, fqgroup
from ._linalg import DEFAULT_TOL, max_abs, null_space, rank
from .csalg import _frozen

SIDES = ("left", "right")


@dataclass(frozen=True, eq=False)
class CoAction:
    A: csalg.CStarAlgebra
    G: fqgroup.FiniteQuantumGroup
    side: str
    map: np.ndarray
    residuals: dict
    label: str = ""

    @property
    def tol(self):
        return self.A.tol

    def tensor(self):
        """``alpha`` as ``[h, a', a]`` (left) or ``[a', h, a]`` (right)."""
        dA, dH = self.A.dim, self.G.dim
        shape = (dH, dA, dA) if self.side == "left" else (dA, dH, dA)
        return np.asarray(self.map).reshape(shape)

    def apply(self, a):
        return self.map @ a

    def one_tensor(self):
        """The map ``a -> 1 (x) a`` (left) or ``a -> a (x) 1`` (right)."""
        u = self.G.H.unit[:, None]
        eye = np.eye(self.A.dim)
        return np.kron(u, eye) if self.side == "left" else np.kron(eye, u)

    @cached_property
    def fixed_basis(self):
        """Orthonormal basis (columns) of the fixed point algebra."""
        return null_space(np.asarray(self.map) - self.one_tensor(), self.tol)

    @cached_property
    def expectation(self):
        """``E = (h (x) id) alpha`` (left) or ``(id (x) h) alpha`` (right)."""
        h = self.G.haar.coeffs[None, :]
        eye = np.eye(self.A.dim)
        slice_ = np.kron(h, eye) if self.side == "left" else np.kron(eye, h)
        return slice_ @ self.map

    @cached_property
    def fixed_subalgebra(self):
        return csalg.subalgebra(self.A, self.fixed_basis)

    def pi(self, omega):
        """``pi_alpha(omega) = (omega (x) id) alpha`` (left) or ``(id (x) omega) alpha`` (right)."""
        omega = np.asarray(omega)[None, :]
        eye = np.eye(self.A.dim)
        slice_ = np.kron(omega, eye) if self.side == "left" else np.kron(eye, omega)
        return slice_ @ self.map


def _hom_residual(P, cX, cY, csrc):
    """Multiplicativity residual of ``x_i -> P[i]`` into X (x) Y, with ``P[i]`` a
    ``(dX, dY)`` matrix; loops over ``i`` to bound memory."""
    d = P.shape[0]
    flat = P.reshape(d, -1)
    worst = 0.0
    for i in range(d):
        t = np.tensordot(P[i], cX, axes=([0], [0]))  # (y, x', k)
        u = np.tensordot(t, cY, axes=([0], [0]))  # (x', k, y', l)
        prod = np.tensordot(P, u, axes=([1, 2], [0, 2]))  # (j, k, l)
        lhs = (csrc[i] @ flat).reshape(prod.shape)
        worst = max(worst, max_abs(prod - lhs))
    return worst


def validate_coaction(A, G, side, alpha, tol=None, label=""):
    tol = A.tol if tol is None else tol
    if side not in SIDES:
        raise errors.SchemaError("side is 'left' or 'right'", detail=repr(side))
    dA, dH = A.dim, G.dim
    alpha = np.asarray(alpha, dtype=complex)
    if alpha.shape != (dA * dH, dA):
        raise errors.DimensionMismatch("coaction shape", detail=f"{alpha.shape} vs {(dA * dH, dA)}")
    H = G.H
    eyeA, eyeH = np.eye(dA), np.eye(dH)
    scale = max(1.0, max_abs(alpha))
    res = {}

    if side == "left":
        one = np.kron(H.unit, A.unit)
        star2 = np.kron(H.star_matrix, A.star_matrix)
        P = alpha.T.reshape(dA, dH, dA)
        cX, cY = np.asarray(H.mult), np.asarray(A.mult)
    else:
        one = np.kron(A.unit, H.unit)
        star2 = np.kron(A.star_matrix, H.star_matrix)
        P = alpha.T.reshape(dA, dA, dH)
        cX, cY = np.asarray(A.mult), np.asarray(H.mult)

    r = max_abs(alpha @ A.unit - one)
    res["unital"] = r
    if r > tol * scale:
        raise errors.CoactionNotHomomorphism("alpha(1) = 1 (x) 1", r)
    r = max_abs(alpha @ A.star_matrix - star2 @ np.conj(alpha))
    res["star"] = r
    if r > tol * scale:
        raise errors.CoactionNotHomomorphism("alpha(x*) = alpha(x)*", r)
    r = _hom_residual(P, cX, cY, np.asarray(A.mult))
    res["multiplicative"] = r
    if r > tol * scale * scale * max(1.0, max_abs(A.mult)):
        raise errors.CoactionNotHomomorphism("alpha(xy) = alpha(x) alpha(y)", r)
    rk = rank(alpha, tol)
    res["rank"] = rk
    if rk < dA:
        raise errors.NotInjective("alpha injective", detail=f"rank {rk} < {dA}")

    comul = np.asarray(G.comul)
    if side == "left":
        r = max_abs(np.kron(comul, eyeA) @ alpha - np.kron(eyeH, alpha) @ alpha)
    else:
        r = max_abs(np.kron(alpha, eyeH) @ alpha - np.kron(eyeA, comul) @ alpha)
    res["coaction_law"] = r
    if r > tol * scale * scale * max(1.0, max_abs(comul)):
        raise errors.CoactionLawError("coaction law", r)

    eps = G.counit[None, :]
    slice_ = np.kron(eps, eyeA) if side == "left" else np.kron(eyeA, eps)
    r = max_abs(slice_ @ alpha - eyeA)
    res["counit"] = r
    if r > tol * scale:
        raise errors.CoactionCounitError("(eps (x) id) alpha = id", r)

    # (C(G) (x) 1) alpha(A) spans C(G) (x) A (Podles density)
    res["density_rank"] = _density_rank(A, G, side, alpha, tol)
    if res["density_rank"] < dA * dH:
        raise errors.CoactionError("(C(G) (x) 1) alpha(A) spans C(G) (x) A",
                                   detail=f"rank {res['density_rank']} < {dA * dH}")
    return CoAction(A, G, side, _frozen(alpha), res, label)


def _density_rank(A, G, side, alpha, tol):
    dA, dH = A.dim, G.dim
    cH = np.asarray(G.H.mult)
    if side == "left":
        t = alpha.reshape(dH, dA, dA)  # [h, a', a]
        # (x_g (x) 1) alpha(x_a) = sum c[g, h, k] alpha[h, a', a] at (k, a')
        m = np.einsum("ghk,hpa->kpga", cH, t).reshape(dH * dA, dH * dA)
    else:
        t = alpha.reshape(dA, dH, dA)  # [a', h, a]
        m = np.einsum("hgk,pha->pkga", cH, t).reshape(dA * dH, dH * dA)  # alpha(a)(1 (x) x_g)
    return rank(m, tol)


def trivial_coaction(A, G, side="left"):
    u = G.H.unit[:, None]
    eye = np.eye(A.dim)
    alpha = np.kron(u, eye) if side == "left" else np.kron(eye, u)
    return validate_coaction(A, G, side, alpha, label="trivial")


def comultiplication_coaction(G, side="left"):
    """``alpha = Delta`` on H, as a left or right coaction."""
    return validate_coaction(G.H, G, side, G.comul, label="translation")


def restrict(c, sub, label=None):
    """Restriction to an invariant unital *-subalgebra (``csalg.Subalgebra``)."""
    v = np.asarray(sub.embedding)
    eyeH = np.eye(c.G.dim)
    image = np.asarray(c.map) @ v
    if c.side == "left":
        proj = np.kron(eyeH, v.conj().T)
        back = np.kron(eyeH, v)
    else:
        proj = np.kron(v.conj().T, eyeH)
        back = np.kron(v, eyeH)
    coords = proj @ image
    r = max_abs(back @ coords - image)
    if r > c.tol * max(1.0, max_abs(image)) * 10:
        raise errors.NotInvariant("subalgebra invariant under the coaction", r)
    return validate_coaction(sub.algebra, c.G, c.side, coords, c.tol, label if label is not None else c.label)


# ---------------------------------------------------------------------------
# freeness


@dataclass(frozen=True)
class GaloisRank:
    free: bool
    rank: int
    expected_rank: int


def galois_matrix(c):
    """``a (x) b -> alpha(a)(1 (x) b)`` (left) or ``alpha(a)(b (x) 1)`` (right)."""
    dA, dH = c.A.dim, c.G.dim
    cA = np.asarray(c.A.mult)
    t = c.tensor()
    if c.side == "left":
        g = np.einsum("hli,ljk->hkij", t, cA, optimize=True)
        return g.reshape(dH * dA, dA * dA)
    g = np.einsum("lhi,ljk->khij", t, cA, optimize=True)
    return g.reshape(dA * dH, dA * dA)


def is_free_galois(c):
    expected = c.A.dim * c.G.dim
    r = rank(galois_matrix(c), c.tol)
    return GaloisRank(r == expected, r, expected)


def _functional_gram(A, phi):
    return np.asarray(A.star_products) @ phi


def _orthonormalizer(gram, tol):
    """Columns spanning the quotient by the null space, orthonormal for ``gram``."""
    gram = (gram + gram.conj().T) / 2
    if gram.shape[0] == 0:
        return np.zeros((0, 0))
    w, v = np.linalg.eigh(gram)
    keep = w > tol * max(1.0, w[-1] if w.size else 0.0)
    return v[:, keep] / np.sqrt(w[keep])


def _unitarity_defect(m, tol):
    """``max(||M*M - 1||, ||MM* - 1||)`` for a matrix between orthonormal coordinates."""
    if m.size == 0:
        return 0.0 if m.shape[0] == m.shape[1] else 1.0
    a = np.linalg.norm(m.conj().T @ m - np.eye(m.shape[1]), 2)
    b = np.linalg.norm(m @ m.conj().T - np.eye(m.shape[0]), 2)
    return float(max(a, b))


@dataclass(frozen=True, eq=False)
class SpectralSubspace:
    irrep: int
    basis: np.ndarray
    domain_dim: int
    target_dim: int
    defect: float

    @property
    def dim(self):
        return self.basis.shape[1]

    def to_dict(self):
        return {"irrep": self.irrep, "dim": self.dim, "domain_dim": self.domain_dim,
                "target_dim": self.target_dim, "defect": self.defect}


def _triple_functional(A, phi):
    """``T[j, m, l] = phi(x_j^* x_m x_l)``."""
    return np.einsum("jmp,pl->jml", np.asarray(A.star_products), np.asarray(A.mult) @ phi, optimize=True)


def spectral_subspace(c, index, phi=None):
    """``A_U`` for the irrep ``c.G.irreps[index]`` and the unitarity defect of the
    localized Galois map ``A_U (x)_B A -> C[G]_U (x) A``."""
    A, G = c.A, c.G
    dA, dH = A.dim, G.dim
    phi = A.regular_trace() if phi is None else np.asarray(phi)
    proj = fqgroup.isotypic_projection(G, index)
    eyeA, eyeH = np.eye(dA), np.eye(dH)
    comp = np.kron(eyeH - proj, eyeA) if c.side == "left" else np.kron(eyeA, eyeH - proj)
    basis = null_space(comp @ np.asarray(c.map), c.tol)
    m = basis.shape[1]

    pw, owner = fqgroup.peter_weyl_basis(G)
    q = pw[:, owner == index]  # coefficients of U
    nq = q.shape[1]
    if m == 0:
        # zero domain cannot cover the nonzero target
        return SpectralSubspace(index, _frozen(basis), 0, nq * dA, 1.0)
    # Galois map on A_U (x) A, expressed in C[G]_U (x) A (resp. A (x) C[G]_U) coordinates
    gam = galois_matrix(c).reshape(-1, dA, dA)  # (target, i, j)
    gam = np.tensordot(gam, basis, axes=([1], [0]))  # (target, j, p)
    gam = gam.transpose(0, 2, 1).reshape(-1, m * dA)  # columns (p, j)
    qinv = np.linalg.pinv(q)
    to_coords = np.kron(qinv, eyeA) if c.side == "left" else np.kron(eyeA, qinv)
    coords = to_coords @ gam
    back = np.kron(q, eyeA) if c.side == "left" else np.kron(eyeA, q)
    leak = max_abs(back @ coords - gam)

    E = c.expectation
    # domain Gram: phi(x_j^* E(a_p^* a_q) x_l)
    apaq = np.einsum("ap,bq,abk->pqk", A.star_matrix @ np.conj(basis), basis, A.mult, optimize=True)
    e = apaq @ E.T
    trip = _triple_functional(A, phi)
    gd = np.einsum("pqm,jml->pjql", e, trip, optimize=True).reshape(m * dA, m * dA)
    gh = np.asarray(G.H.star_products) @ G.haar.coeffs
    gq = q.conj().T @ gh @ q
    gphi = _functional_gram(A, phi)
    gt = np.kron(gq, gphi) if c.side == "left" else np.kron(gphi, gq)

    wd = _orthonormalizer(gd, c.tol)
    wt = csalg.hermitian_sqrt(gt)
    mt = wt @ coords @ wd
    defect = _unitarity_defect(mt, c.tol)
    defect = max(defect, leak)
    return SpectralSubspace(index, _frozen(basis), wd.shape[1], nq * dA, defect)


# spectral functor -----------------------------------------------------------


def invariant_vectors(c, coeffs):
    """Basis of ``(H_W (x) A)^G`` for the corepresentation with matrix coefficients
    ``coeffs[k, s]``; vectors indexed ``(k, a)``."""
    A, H = c.A, c.G.H
    dA, dH = A.dim, H.dim
    n = coeffs.shape[0]
    alpha = np.asarray(c.map)
    eyeA = np.eye(dA)
    lt = np.asarray(H.mult).transpose(0, 2, 1)
    blocks = [[None] * n for _ in range(n)]
    one = c.one_tensor()
    for s in range(n):
        for k in range(n):
            if c.side == "left":
                w = H.star(coeffs[k, s])
                blk = np.kron(np.tensordot(w, lt, axes=1), eyeA) @ alpha
            else:
                blk = np.kron(eyeA, np.tensordot(coeffs[s, k], lt, axes=1)) @ alpha
            if k == s:
                blk = blk - one
            blocks[s][k] = blk
    return null_space(np.block(blocks), c.tol)


def _module_gram(A, X, n, phi):
    """``phi(sum_k a_k^* a'_k)`` for columns of ``X`` indexed ``(k, a)``."""
    g = _functional_gram(A, phi)
    Xr = X.reshape(n, A.dim, -1)
    return np.einsum("kap,ab,kbq->pq", np.conj(Xr), g, Xr, optimize=True)


@dataclass(frozen=True)
class SpectralFunctorDefect:
    irreps: tuple
    dims: tuple  # dim F(U), dim F(V), dim F(U (x) V)
    isometry_defect: float
    coker_dim: int

    @property
    def unitary(self):
        return self.coker_dim == 0

    def to_dict(self):
        return {"irreps": list(self.irreps), "dims": list(self.dims),
                "isometry_defect": self.isometry_defect, "coker_dim": self.coker_dim}


def spectral_functor_defect(c, i, j, phi=None, cache=None):
    """Isometry defect and cokernel of ``F_2: F(U) (x)_B F(V) -> F(U (x) V)``
    (``x_13 y_23``; for right coactions ``X_23 Y_13`` into ``F(V (x) U)``)."""
    A = c.A
    dA = A.dim
    phi = A.regular_trace() if phi is None else np.asarray(phi)
    reps = c.G.irreps
    U, V = reps[i], reps[j]
    cache = {} if cache is None else cache

    def F(idx):
        if idx not in cache:
            cache[idx] = invariant_vectors(c, np.asarray(reps[idx].coeffs))
        return cache[idx]

    X, Y = F(i), F(j)
    n, m = U.dim, V.dim
    if c.side == "left":
        W = fqgroup.tensor_representation(U, V)
    else:
        W = fqgroup.tensor_representation(V, U)
    Z = invariant_vectors(c, W)
    px, py = X.shape[1], Y.shape[1]
    Xr = X.reshape(n, dA, px)
    Yr = Y.reshape(m, dA, py)
    cA = np.asarray(A.mult)
    # products a_k b_l for every pair of basis vectors
    prod = np.einsum("kax,lby,abc->klcxy", Xr, Yr, cA, optimize=True)
    if c.side == "right":
        prod = prod.transpose(1, 0, 2, 3, 4)
    img = prod.reshape(n * m * dA, px * py)

    # interior tensor product Gram: phi(sum_l b_l^* <x, x'>_A b'_l)
    xs = np.einsum("pa,kax->kpx", A.star_matrix, np.conj(Xr))  # coefficient vectors of a_k^*
    inner_x = np.einsum("kpx,kqz,pqm->xzm", xs, Xr, cA, optimize=True)  # <x, x'>_A
    trip = _triple_functional(A, phi)
    my = np.einsum("ljy,lkw,jmk->ywm", np.conj(Yr), Yr, trip, optimize=True)
    gd = np.einsum("xzm,ywm->xyzw", inner_x, my, optimize=True).reshape(px * py, px * py)

    nw = W.shape[0]
    gz = _module_gram(A, Z, nw, phi)
    zo = Z @ csalg.hermitian_sqrt(gz, inverse=True)  # orthonormal basis of F(W)
    gfull = np.kron(np.eye(nw), _functional_gram(A, phi))
    coords = zo.conj().T @ gfull @ img
    leak = max_abs(zo @ coords - img)
    wd = _orthonormalizer(gd, c.tol)
    mt = coords @ wd
    iso = float(np.linalg.norm(mt.conj().T @ mt - np.eye(mt.shape[1]), 2)) if mt.size else 0.0
    r = rank(mt, c.tol) if mt.size else 0
    return SpectralFunctorDefect((i, j), (px, py, Z.shape[1]), max(iso, leak), Z.shape[1] - r)


@dataclass(frozen=True)
class Imprimitivity:
    irrep: int
    dim_F: int
    rank: int
    expected_rank: int
    inequality_ok: bool

    @property
    def surjective(self):
        return self.rank == self.expected_rank


def imprimitivity_check(c, index, cache=None):
    """``F(U) (x)_B A -> H_U (x) A, x (x) b -> x b`` is onto, and
    ``dim F(U) * dim A >= dim H_U * dim A^G``."""
    A = c.A
    dA = A.dim
    U = c.G.irreps[index]
    X = invariant_vectors(c, np.asarray(U.coeffs)) if cache is None or index not in cache else cache[index]
    n, p = U.dim, X.shape[1]
    Xr = X.reshape(n, dA, p)
    img = np.einsum("kax,abc->kcxb", Xr, A.mult, optimize=True).reshape(n * dA, p * dA)
    r = rank(img, c.tol) if img.size else 0
    ineq = p * dA >= n * c.fixed_basis.shape[1]
    return Imprimitivity(index, p, r, n * dA, bool(ineq))


@dataclass(frozen=True, eq=False)
class FreenessOracles:
    galois: GaloisRank
    localized: tuple
    spectral: tuple
    imprimitivity: tuple

    @property
    def galois_free(self):
        return self.galois.free

    @property
    def localized_free(self):
        return all(s.defect <= 1e-6 for s in self.localized)

    @property
    def spectral_free(self):
        return all(s.coker_dim == 0 and s.isometry_defect <= 1e-6 for s in self.spectral)

    @property
    def agree(self):
        return self.galois_free == self.localized_free == self.spectral_free


def freeness_oracles(c):
    n = len(c.G.irreps)
    cache = {}
    loc = tuple(spectral_subspace(c, k) for k in range(n))
    spec = tuple(spectral_functor_defect(c, i, j, cache=cache) for i in range(n) for j in range(n))
    imp = tuple(imprimitivity_check(c, k, cache) for k in range(n))
    return FreenessOracles(is_free_galois(c), loc, spec, imp)


# ---------------------------------------------------------------------------
# side conversion, canonical state, KMS


def convert_side(c):
    """Left coaction on A -> right coaction ``(id (x) R)(alpha(a)_21)`` on A^op,
    and back (``(R (x) id)(beta(a)_21)`` on the opposite of a right one)."""
    Aop = csalg.opposite_algebra(c.A)
    R = np.asarray(c.G.unitary_antipode)
    t = c.tensor()
    dA, dH = c.A.dim, c.G.dim
    if c.side == "left":
        new = np.einsum("hpi,gh->pgi", t, R).reshape(dA * dH, dA)
        return validate_coaction(Aop, c.G, "right", new, c.tol, c.label)
    new = np.einsum("phi,gh->gpi", t, R).reshape(dH * dA, dA)
    return validate_coaction(Aop, c.G, "left", new, c.tol, c.label)


def _as_right(c):
    return c if c.side == "right" else convert_side(c)


def rho_matrix(c):
    """``pi_alpha(rho)`` on A."""
    return c.pi(c.G.rho)


def invariance_matrix(c):
    """Rows vanish exactly on invariant functionals:
    ``(phi (x) id) alpha = phi(.) 1`` (right) / ``(id (x) phi) alpha = phi(.) 1`` (left)."""
    dA, dH = c.A.dim, c.G.dim
    t = c.tensor()
    u = c.G.H.unit
    if c.side == "right":
        lhs = t.transpose(1, 2, 0)  # [h, a, a']
    else:
        lhs = t.transpose(0, 2, 1)  # [h, a, a']
    rhs = np.einsum("h,ab->hab", u, np.eye(dA))
    return (lhs - rhs).reshape(dH * dA, dA)


def invariant_functionals(c):
    """Basis (columns) of the invariant linear functionals."""
    return null_space(invariance_matrix(c), c.tol)


@dataclass(frozen=True, eq=False)
class CanonicalState:
    functional: csalg.Functional
    dim_q: float
    invariance_residual: float
    frobenius: csalg.FrobeniusReport

    @property
    def coeffs(self):
        return self.functional.coeffs

    @property
    def q_scalar(self):
        return self.frobenius.q_scalar


def canonical_state(c):
    """``phi(a) = Tr(lambda(a) pi_alpha(rho)) / dim_q A``, certified."""
    r = _as_right(c)
    P = rho_matrix(r)
    dq = np.trace(P)
    cA = np.asarray(r.A.mult)
    phi = np.einsum("ijk,jk->i", cA, P) / dq  # Tr(L(x_i) P) = sum c[i,j,k] P[j,k]
    f = csalg.check_functional(c.A, phi)
    inv = max_abs(invariance_matrix(c) @ phi)
    if inv > c.tol * 10:
        raise errors.NotInvariant("(phi (x) id) alpha = phi(.) 1", inv)
    if not f.faithful:
        raise errors.NotInvariant("canonical state faithful and positive", f.min_eigenvalue)
    fr = csalg.frobenius_report(c.A, f)
    dim_q = float(dq.real)
    if fr.q_scalar is None or abs(fr.q_scalar - dim_q) > c.tol * max(1.0, dim_q) * 10:
        raise errors.QScalarFailed("m m^* = dim_q(A) id", None if fr.q_scalar is None else abs(fr.q_scalar - dim_q))
    return CanonicalState(f, dim_q, inv, fr)


def kms_residual(c, phi):
    """``max |phi(x_i x_j) - phi(x_j (rho |> x_i))|`` with ``rho |> a = pi_alpha(rho) a``."""
    return csalg.kms_residual(c.A, phi, rho_matrix(c))
