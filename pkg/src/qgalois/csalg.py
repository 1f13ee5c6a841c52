"""Finite-dimensional C*-algebras given by structure constants.

An algebra is stored on a fixed basis ``x_0, ..., x_{d-1}``:

* ``mult[i, j, k]`` is the coefficient of ``x_k`` in ``x_i x_j``;
* ``star_matrix[:, i]`` is the coefficient vector of ``x_i^*`` (the
  involution of a general element ``a`` is ``star_matrix @ conj(a)``);
* ``unit`` is the coefficient vector of ``1``.

Elements are plain complex coefficient vectors.  Tensor products use the
lexicographic Kronecker ordering, ``x_i (x) y_j`` sitting at ``i * dim_B + j``.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import errors
from ._linalg import (CLUSTER_GAP, DEFAULT_TOL, cluster_sorted, hermitian_sqrt,
                      max_abs, null_space)

MAX_WEDDERBURN_ATTEMPTS = 8


def _frozen(a, dtype=complex):
    a = np.array(a, dtype=dtype)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Wedderburn:
    """Explicit *-isomorphism onto a multimatrix algebra.

    ``units[:, p]`` is the matrix unit ``e^k_{rs}`` with ``p`` running over
    blocks ``k`` and then row-major over ``(r, s)``; ``coords`` is the inverse
    change of basis.
    """

    blocks: tuple
    units: np.ndarray
    coords: np.ndarray
    central_projections: np.ndarray
    residual: float
    seed: int
    attempts: int

    def to_blocks(self, a):
        v = self.coords @ np.asarray(a, dtype=complex)
        out, p = [], 0
        for n in self.blocks:
            out.append(v[p:p + n * n].reshape(n, n))
            p += n * n
        return out

    def from_blocks(self, mats):
        return self.units @ np.concatenate([np.asarray(m, dtype=complex).ravel() for m in mats])


@dataclass(frozen=True, eq=False)
class CStarAlgebra:
    dim: int
    labels: tuple
    mult: np.ndarray
    star_matrix: np.ndarray
    unit: np.ndarray
    wedderburn: Wedderburn
    tol: float = DEFAULT_TOL

    @property
    def blocks(self):
        return self.wedderburn.blocks

    def basis(self, i):
        e = np.zeros(self.dim, dtype=complex)
        e[i] = 1.0
        return e

    def one(self):
        return np.array(self.unit)

    def mul(self, a, b):
        return np.einsum("i,j,ijk->k", a, b, self.mult)

    def star(self, a):
        return self.star_matrix @ np.conj(a)

    def left(self, a):
        """Matrix of left multiplication by ``a``."""
        return np.einsum("i,ijk->kj", a, self.mult)

    def right(self, a):
        return np.einsum("j,ijk->ki", a, self.mult)

    @cached_property
    def star_products(self):
        """``star_products[i, j] = x_i^* x_j``."""
        return np.einsum("pi,pjk->ijk", self.star_matrix, self.mult)

    @cached_property
    def regular_trace_vector(self):
        return np.einsum("ikk->i", self.mult)

    def regular_trace(self):
        """Coefficients of ``a -> Tr(lambda(a)) / dim``, a faithful tracial state."""
        return self.regular_trace_vector / self.dim

    def commutant_in(self, elements, within=None, tol=None):
        """Orthonormal basis of ``{y in span(within) : [y, e] = 0 for e in elements}``."""
        tol = self.tol if tol is None else tol
        within = np.eye(self.dim, dtype=complex) if within is None else within
        rows = []
        for e in np.atleast_2d(np.asarray(elements).T).T.T:
            rows.append((self.right(e) - self.left(e)) @ within)
        coeff = null_space(np.vstack(rows), tol) if rows else np.eye(within.shape[1])
        return within @ coeff

    def center(self, tol=None):
        tol = self.tol if tol is None else tol
        return _center(self.mult, tol)


def _center(mult, tol):
    d = mult.shape[0]
    # z x_j - x_j z = sum_i z_i (c[i,j,:] - c[j,i,:])
    k = (mult - mult.transpose(1, 0, 2)).transpose(1, 2, 0).reshape(d * d, d)
    return null_space(k, tol)


# ---------------------------------------------------------------------------
# construction and validation


def from_structure_constants(mult, star, unit, labels=None, tol=DEFAULT_TOL, seed=0):
    mult = np.asarray(mult, dtype=complex)
    star = np.asarray(star, dtype=complex)
    unit = np.asarray(unit, dtype=complex)
    if mult.ndim != 3 or len(set(mult.shape)) != 1:
        raise errors.DimensionMismatch("mult must be a cubic rank-3 tensor", detail=str(mult.shape))
    d = mult.shape[0]
    if star.shape != (d, d) or unit.shape != (d,):
        raise errors.DimensionMismatch("star/unit shapes", detail=f"{star.shape}, {unit.shape}, dim {d}")
    if labels is None:
        labels = tuple(f"x{i}" for i in range(d))
    if len(labels) != d:
        raise errors.DimensionMismatch("labels length", detail=f"{len(labels)} != {d}")
    scale = max(1.0, max_abs(mult))

    res = associativity_residual(mult)
    if res > tol * scale:
        raise errors.NotAssociative("sum_m c_ijm c_mkl = sum_m c_jkm c_iml", res)

    left_unit = np.einsum("i,ijk->jk", unit, mult)
    right_unit = np.einsum("j,ijk->ik", unit, mult)
    eye = np.eye(d)
    res = max(max_abs(left_unit - eye), max_abs(right_unit - eye))
    if res > tol * scale:
        raise errors.NoUnit("1 x = x = x 1", res)

    res = max_abs(star @ np.conj(star) - eye)
    if res > tol * scale:
        raise errors.NotInvolutive("(x*)* = x", res)
    lhs = np.einsum("kp,ijp->ijk", star, np.conj(mult))
    rhs = np.einsum("pj,qi,pqk->ijk", star, star, mult, optimize=True)
    res = max_abs(lhs - rhs)
    if res > tol * scale:
        raise errors.NotInvolutive("(xy)* = y* x*", res)
    res = max_abs(star @ np.conj(unit) - unit)
    if res > tol * scale:
        raise errors.NotInvolutive("1* = 1", res)

    w = _wedderburn(mult, star, unit, tol, seed)
    return CStarAlgebra(d, tuple(labels), _frozen(mult), _frozen(star), _frozen(unit), w, tol)


def associativity_residual(mult):
    d = mult.shape[0]
    flat = mult.reshape(d * d, d)
    worst = 0.0
    for i in range(d):
        lhs = np.tensordot(mult[i], mult, axes=(1, 0))  # (j, k, l)
        rhs = (flat @ mult[i]).reshape(d, d, d)  # sum_m c[j,k,m] c[i,m,l]
        worst = max(worst, max_abs(lhs - rhs))
    return worst


def _wedderburn(mult, star, unit, tol, seed, max_attempts=MAX_WEDDERBURN_ATTEMPTS):
    d = mult.shape[0]
    tr = np.einsum("ikk->i", mult)
    gram = star.T @ (mult @ tr)  # Tr lambda(x_i^* x_j)
    gram = (gram + gram.conj().T) / 2
    ev = np.linalg.eigvalsh(gram)
    if ev[0] <= tol * max(1.0, ev[-1]):
        raise errors.NotSemisimple("regular trace form positive definite", float(ev[0]),
                                   detail="trace form degenerate or indefinite")
    w = hermitian_sqrt(gram)
    winv = hermitian_sqrt(gram, inverse=True)
    lt = mult.transpose(0, 2, 1)  # lt[i] = matrix of left multiplication by x_i
    center = _center(mult, tol)
    r = center.shape[1]

    def L(a):
        return np.tensordot(a, lt, axes=1)

    def mul(a, b):
        return L(a) @ b

    def st(a):
        return star @ np.conj(a)

    def ip(a, b):
        return np.vdot(a, gram @ b)

    def hermitian_tilde(a):
        m = w @ L(a) @ winv
        return (m + m.conj().T) / 2

    rng = np.random.default_rng(seed)
    last = None
    for attempt in range(1, max_attempts + 1):
        # central projections
        z = center @ (rng.normal(size=r) + 1j * rng.normal(size=r))
        z = (z + st(z)) / 2
        vals, vecs = np.linalg.eigh(hermitian_tilde(z))
        spread = max(abs(vals[0]), abs(vals[-1]), 1e-300)
        groups = cluster_sorted(vals / spread, CLUSTER_GAP)
        if len(groups) != r:
            last = "central element with degenerate spectrum"
            continue
        blocks = []
        ok = True
        for g in groups:
            n = int(round(np.sqrt(len(g))))
            if n * n != len(g):
                ok = False
                break
            vk = vecs[:, g]
            ek = winv @ (vk @ (vk.conj().T @ (w @ unit)))
            blocks.append((n, ek, vk))
        if not ok:
            last = "isotypic block of non-square dimension"
            continue
        blocks.sort(key=lambda b: (b[0],) + tuple(np.round(np.concatenate([b[1].real, b[1].imag]), 6)))

        units = []
        for n, ek, vk in blocks:
            if n == 1:
                units.append(ek)
                continue
            b = rng.normal(size=d) + 1j * rng.normal(size=d)
            a = mul(mul(ek, b), ek)
            a = (a + st(a)) / 2
            m = vk.conj().T @ hermitian_tilde(a) @ vk
            mvals, mvecs = np.linalg.eigh((m + m.conj().T) / 2)
            mspread = max(abs(mvals[0]), abs(mvals[-1]), 1e-300)
            sub = cluster_sorted(mvals / mspread, CLUSTER_GAP)
            if len(sub) != n or any(len(s) != n for s in sub):
                ok = False
                break
            projs = []
            for s in sub:
                u = vk @ mvecs[:, s]
                projs.append(winv @ (u @ (u.conj().T @ (w @ ek))))
            p1 = projs[0]
            b = rng.normal(size=d) + 1j * rng.normal(size=d)
            col = [p1]
            for pr in projs[1:]:
                v = mul(mul(pr, b), p1)
                t = ip(p1, mul(st(v), v)) / ip(p1, p1)
                if abs(t) < 1e-8:
                    ok = False
                    break
                col.append(v / np.sqrt(t.real))
            if not ok:
                break
            row = [st(e) for e in col]
            for rr in range(n):
                for ss in range(n):
                    units.append(mul(col[rr], row[ss]))
        if not ok:
            last = "minimal projections could not be separated"
            continue
        e = np.array(units).T
        if e.shape != (d, d):
            last = "matrix units do not span the algebra"
            continue
        try:
            coords = np.linalg.inv(e)
        except np.linalg.LinAlgError:
            last = "matrix units linearly dependent"
            continue
        sizes = tuple(b[0] for b in blocks)
        res = _wedderburn_residual(mult, star, unit, e, coords, sizes)
        if res <= tol * max(1.0, max_abs(mult)) * 10:
            cps = np.array([b[1] for b in blocks]).T
            return Wedderburn(sizes, _frozen(e), _frozen(coords), _frozen(cps), res, seed, attempt)
        last = f"isomorphism residual {res:.3e}"
    raise errors.NotSemisimple("Wedderburn decomposition", detail=last)


def _model_mult(sizes):
    d = sum(n * n for n in sizes)
    c = np.zeros((d, d, d))
    off = 0
    for n in sizes:
        for r in range(n):
            for s in range(n):
                for u in range(n):
                    c[off + r * n + s, off + s * n + u, off + r * n + u] = 1.0
        off += n * n
    return c


def _model_star(sizes):
    d = sum(n * n for n in sizes)
    s = np.zeros((d, d))
    off = 0
    for n in sizes:
        for r in range(n):
            for t in range(n):
                s[off + t * n + r, off + r * n + t] = 1.0
        off += n * n
    return s


def _wedderburn_residual(mult, star, unit, e, coords, sizes):
    # transport structure constants to the matrix-unit basis and compare
    c2 = np.einsum("pa,qb,pqk,ck->abc", e, e, mult, coords, optimize=True)
    res = max_abs(c2 - _model_mult(sizes))
    s2 = coords @ star @ np.conj(e)
    res = max(res, max_abs(s2 - _model_star(sizes)))
    u2 = coords @ unit
    model_unit = np.concatenate([np.eye(n).ravel() for n in sizes])
    return max(res, max_abs(u2 - model_unit))


def wedderburn_decompose(A, seed=None, tol=None):
    """Recompute the block decomposition of ``A`` (optionally with another seed)."""
    seed = A.wedderburn.seed if seed is None else seed
    tol = A.tol if tol is None else tol
    return _wedderburn(np.asarray(A.mult), np.asarray(A.star_matrix), np.asarray(A.unit), tol, seed)


# ---------------------------------------------------------------------------
# standard algebras


def matrix_algebra(n, tol=DEFAULT_TOL):
    """``Mat_n`` on the matrix units ``e_ij`` (index ``i*n + j``)."""
    c = _model_mult([n])
    s = _model_star([n])
    u = np.eye(n).ravel()
    labels = [f"e{i}{j}" for i in range(n) for j in range(n)]
    return from_structure_constants(c, s, u, labels, tol)


def multimatrix_algebra(sizes, tol=DEFAULT_TOL):
    c = _model_mult(sizes)
    s = _model_star(sizes)
    u = np.concatenate([np.eye(n).ravel() for n in sizes])
    labels = [f"e{k}_{i}{j}" for k, n in enumerate(sizes) for i in range(n) for j in range(n)]
    return from_structure_constants(c, s, u, labels, tol)


def diagonal_algebra(n, tol=DEFAULT_TOL):
    """``C^n`` with pointwise product on the minimal idempotents."""
    return multimatrix_algebra([1] * n, tol)


def tensor_product(A, B):
    c = np.einsum("ijk,abc->iajbkc", A.mult, B.mult).reshape(A.dim * B.dim, A.dim * B.dim, A.dim * B.dim)
    s = np.kron(A.star_matrix, B.star_matrix)
    u = np.kron(A.unit, B.unit)
    labels = [f"{a}*{b}" for a in A.labels for b in B.labels]
    return from_structure_constants(c, s, u, labels, min(A.tol, B.tol), A.wedderburn.seed)


def opposite_algebra(A):
    c = np.asarray(A.mult).transpose(1, 0, 2)
    return from_structure_constants(c, A.star_matrix, A.unit, A.labels, A.tol, A.wedderburn.seed)


@dataclass(frozen=True, eq=False)
class Subalgebra:
    """A unital *-subalgebra, stored intrinsically plus its embedding.

    ``embedding`` has orthonormal columns, so ``coords(a) = embedding^H a``.
    """

    algebra: CStarAlgebra
    embedding: np.ndarray
    parent: CStarAlgebra

    @property
    def dim(self):
        return self.algebra.dim

    def embed(self, coords):
        return self.embedding @ coords

    def coords(self, a):
        return self.embedding.conj().T @ a


def subalgebra(A, vectors, tol=None, seed=None):
    """Intrinsic structure of the span of ``vectors`` (columns), which must be
    a unital *-subalgebra of ``A``."""
    tol = A.tol if tol is None else tol
    seed = A.wedderburn.seed if seed is None else seed
    q, rr = np.linalg.qr(np.asarray(vectors, dtype=complex))
    keep = np.abs(np.diag(rr)) > tol * max(1.0, max_abs(rr))
    v = q[:, keep]
    k = v.shape[1]
    prods = np.einsum("ai,bj,abc->cij", v, v, A.mult, optimize=True).reshape(A.dim, k * k)
    coeff = v.conj().T @ prods
    res = max_abs(v @ coeff - prods)
    stars = A.star_matrix @ np.conj(v)
    scoeff = v.conj().T @ stars
    res = max(res, max_abs(v @ scoeff - stars))
    ucoeff = v.conj().T @ A.unit
    res = max(res, max_abs(v @ ucoeff - A.unit))
    if res > tol * max(1.0, max_abs(A.mult)) * 10:
        raise errors.NotSubalgebra("span closed under product, star and containing 1", res)
    mult = coeff.reshape(k, k, k).transpose(1, 2, 0)
    B = from_structure_constants(mult, scoeff, ucoeff, None, tol, seed)
    return Subalgebra(B, _frozen(v), A)


# ---------------------------------------------------------------------------
# functionals


@dataclass(frozen=True, eq=False)
class Functional:
    algebra: CStarAlgebra
    coeffs: np.ndarray
    hermitian: bool
    positive: bool
    faithful: bool
    gram_eigenvalues: np.ndarray

    def __call__(self, a):
        return complex(np.dot(self.coeffs, a))

    @property
    def min_eigenvalue(self):
        return float(self.gram_eigenvalues[0])

    def gram(self):
        return np.asarray(self.algebra.star_products) @ self.coeffs


def check_functional(A, coeffs, tol=None):
    tol = A.tol if tol is None else tol
    phi = np.asarray(coeffs, dtype=complex)
    if phi.shape != (A.dim,):
        raise errors.DimensionMismatch("functional length", detail=f"{phi.shape} vs {A.dim}")
    herm = max_abs(A.star_matrix.T @ phi - np.conj(phi)) <= tol * max(1.0, max_abs(phi))
    g = np.asarray(A.star_products) @ phi
    ev = np.linalg.eigvalsh((g + g.conj().T) / 2)
    scale = max(1.0, max_abs(ev))
    gh = max_abs(g - g.conj().T) <= tol * scale
    positive = bool(herm and gh and ev[0] >= -tol * scale)
    faithful = bool(positive and ev[0] > tol * scale)
    return Functional(A, _frozen(phi), bool(herm), positive, faithful, _frozen(ev, float))


@dataclass(frozen=True, eq=False)
class DualBasisPair:
    """Columns of ``basis`` are ``x_i``, columns of ``dual`` are ``x^i``."""

    basis: np.ndarray
    dual: np.ndarray
    functional: Functional
    residual: float


def pairing_matrix(A, phi):
    coeffs = phi.coeffs if isinstance(phi, Functional) else np.asarray(phi)
    return np.asarray(A.mult) @ coeffs  # phi(x_i x_j)


def dual_basis(A, phi, tol=None):
    tol = A.tol if tol is None else tol
    if not isinstance(phi, Functional):
        phi = check_functional(A, phi, tol)
    m = pairing_matrix(A, phi)
    s = np.linalg.svd(m, compute_uv=False)
    if s[-1] <= tol * s[0]:
        raise errors.SingularPairing("phi(x_i x_j) invertible", float(s[-1]),
                                     detail="pairing singular although the functional was flagged faithful"
                                     if phi.faithful else "functional is not faithful")
    dual = np.linalg.inv(m)  # column j is x^j, since phi(x_i x^j) = (M M^{-1})_{ij}
    res = max_abs(m @ dual - np.eye(A.dim))
    return DualBasisPair(_frozen(np.eye(A.dim)), _frozen(dual), phi, res)


@dataclass(frozen=True, eq=False)
class FrobeniusReport:
    frobenius_residual: float
    q_scalar: object  # float or None
    coproduct_unit: np.ndarray  # m^*(1) as a (dim, dim) array
    crosscheck_residual: float
    mm_star: np.ndarray

    def to_dict(self):
        return {
            "frobenius_residual": self.frobenius_residual,
            "q_scalar": self.q_scalar,
            "crosscheck_residual": self.crosscheck_residual,
        }


def coproduct_adjoint(A, phi):
    """``m^*`` with respect to ``(x, y) = phi(y^* x)``, as ``ms[i, j, k]``
    (coefficient of ``x_i (x) x_j`` in ``m^*(x_k)``)."""
    g = phi.gram()
    ginv = np.linalg.inv(g)
    x = np.conj(np.asarray(A.mult)) @ g
    return np.einsum("ia,jb,abk->ijk", ginv, ginv, x, optimize=True)


def frobenius_report(A, phi, tol=None):
    tol = A.tol if tol is None else tol
    if not isinstance(phi, Functional):
        phi = check_functional(A, phi, tol)
    if not phi.faithful:
        raise errors.NotFaithful("faithful positive functional required", phi.min_eigenvalue)
    c = np.asarray(A.mult)
    d = A.dim
    ms = coproduct_adjoint(A, phi)
    m_unit = np.tensordot(ms, A.unit, axes=1)
    minv = np.linalg.inv(pairing_matrix(A, phi))
    # sum_i y x^i (x) x_i for every basis y, against the adjoint
    via_dual = np.einsum("kap,aq->pqk", c, minv)
    cross = max(max_abs(m_unit - minv), max_abs(via_dual - ms))

    worst = 0.0
    ms_flat = ms.reshape(d * d, d)
    for a in range(d):
        ab = (ms_flat @ c[a].T).reshape(d, d, d)  # (p, q, b): m^*(x_a x_b)
        left = (c[a].T @ ms.reshape(d, d * d)).reshape(d, d, d)  # (x_a (x) 1) m^*(x_b)
        right = (ms[:, :, a] @ c.reshape(d, d * d)).reshape(d, d, d).transpose(0, 2, 1)  # m^*(x_a) (1 (x) x_b)
        worst = max(worst, max_abs(ab - left), max_abs(ab - right))

    mm = c.reshape(d * d, d).T @ ms_flat
    lam = np.trace(mm) / d
    q = None
    if max_abs(mm - lam * np.eye(d)) <= tol * max(1.0, abs(lam)) and abs(lam.imag) <= tol * max(1.0, abs(lam)):
        q = float(lam.real)
    return FrobeniusReport(worst, q, m_unit, cross, mm)


def module_unitarity_residual(A, phi, rep):
    """Residual of ``m_X = (v^* m (x) i)(i (x) m_X^*)`` for the left module
    ``X = C^p`` given by ``rep[i] = pi(x_i)``; zero iff ``pi`` is *-preserving."""
    rep = np.asarray(rep, dtype=complex)
    g = phi.gram()
    ginv = np.linalg.inv(g)
    # m_X^H[(a, x), y] = conj(rep[a][y, x]); adjoint is (G^{-1} (x) 1) m_X^H
    mxs = np.einsum("ia,ayx->ixy", ginv, np.conj(rep))
    pair = pairing_matrix(A, phi)
    rhs = np.einsum("ai,ixy->xay", pair, mxs)
    lhs = rep.transpose(1, 0, 2)
    return max_abs(lhs - rhs)


def kms_residual(A, phi, modular):
    """``max |phi(x_i x_j) - phi(x_j modular(x_i))|`` for a linear map
    ``modular`` (the analytic continuation ``beta_{-i}``) given as a matrix."""
    coeffs = phi.coeffs if isinstance(phi, Functional) else np.asarray(phi)
    p = np.asarray(A.mult) @ coeffs
    p2 = (p @ np.asarray(modular)).T
    return max_abs(p - p2)
