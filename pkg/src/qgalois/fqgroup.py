"""Finite quantum groups as finite-dimensional Hopf *-algebras.

A ``FiniteQuantumGroup`` lives on a ``CStarAlgebra`` H playing the role of
the function algebra.  Maps are dense matrices on coefficient vectors:

* ``comul`` has shape ``(d*d, d)``: column ``k`` is ``Delta(x_k)`` in the
  Kronecker basis of H (x) H;
* ``counit`` is the row vector ``eps(x_k)``;
* ``antipode`` is ``S`` as a ``(d, d)`` matrix;
* ``rho`` is the Woronowicz character stored as a functional on H (its
  value on matrix coefficients gives ``pi_U(rho)``).
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import csalg, errors
from ._linalg import DEFAULT_TOL, hermitian_sqrt, max_abs, null_space
from .csalg import _frozen


@dataclass(frozen=True, eq=False)
class FiniteQuantumGroup:
    H: csalg.CStarAlgebra
    comul: np.ndarray
    counit: np.ndarray
    antipode: np.ndarray
    unitary_antipode: np.ndarray
    haar: csalg.Functional
    rho: np.ndarray
    residuals: dict
    name: str = ""

    @property
    def dim(self):
        return self.H.dim

    @property
    def tol(self):
        return self.H.tol

    def comul3(self):
        """``Delta`` as a ``(d, d, d)`` tensor ``[a, b, k]``."""
        d = self.dim
        return np.asarray(self.comul).reshape(d, d, d)

    @cached_property
    def irreps(self):
        return irreps(self)

    @cached_property
    def is_kac(self):
        return max_abs(self.rho - self.counit) <= self.tol


@dataclass(frozen=True, eq=False)
class UnitaryRepresentation:
    """``U = sum_{rs} e_rs (x) u_rs`` with ``coeffs[r, s]`` the vector of ``u_rs``."""

    hopf: FiniteQuantumGroup
    dim: int
    coeffs: np.ndarray
    rho_matrix: np.ndarray
    label: str = ""

    def entry(self, r, s):
        return np.asarray(self.coeffs[r, s])

    def character(self):
        return np.einsum("rri->i", self.coeffs)

    @property
    def dim_q(self):
        return float(np.trace(self.rho_matrix).real)


# ---------------------------------------------------------------------------
# validation


def _mult_matrix(H):
    d = H.dim
    return np.asarray(H.mult).reshape(d * d, d).T  # m: H(x)H -> H


def _check_comul(H, comul, tol):
    d = H.dim
    c = np.asarray(H.mult)
    scale = max(1.0, max_abs(comul))
    res = max_abs(comul @ H.unit - np.kron(H.unit, H.unit))
    if res > tol * scale:
        raise errors.ComultiplicationError("Delta(1) = 1 (x) 1", res)
    res = max_abs(comul @ H.star_matrix - np.kron(H.star_matrix, H.star_matrix) @ np.conj(comul))
    if res > tol * scale:
        raise errors.ComultiplicationError("Delta(x*) = Delta(x)*", res)
    dm = np.asarray(comul).T.reshape(d, d, d)  # dm[i] = Delta(x_i) as a (d, d) matrix
    worst = 0.0
    for i in range(d):
        # Delta(x_i) Delta(x_j) for all j, computed in H (x) H
        t = np.einsum("ab,ajk->bjk", dm[i], c)  # (b, j', k)
        prod = np.einsum("bak,jae,bel->jkl", t, dm, c, optimize=True)
        lhs = np.einsum("jm,mkl->jkl", c[i], dm)
        worst = max(worst, max_abs(prod - lhs))
    if worst > tol * scale * scale:
        raise errors.ComultiplicationError("Delta(xy) = Delta(x) Delta(y)", worst)
    return worst


def validate_hopf(H, comul, counit, antipode, haar=None, rho=None, tol=None, name=""):
    """Certify the Hopf *-algebra axioms and fill in the Haar state, rho and R."""
    tol = H.tol if tol is None else tol
    d = H.dim
    comul = np.asarray(comul, dtype=complex)
    counit = np.asarray(counit, dtype=complex)
    antipode = np.asarray(antipode, dtype=complex)
    if comul.shape != (d * d, d) or counit.shape != (d,) or antipode.shape != (d, d):
        raise errors.DimensionMismatch("Hopf data shapes",
                                       detail=f"comul {comul.shape}, counit {counit.shape}, antipode {antipode.shape}, dim {d}")
    res = {}
    res["comultiplication"] = _check_comul(H, comul, tol)
    eye = np.eye(d)
    scale = max(1.0, max_abs(comul))

    r = max_abs(np.kron(comul, eye) @ comul - np.kron(eye, comul) @ comul)
    res["coassociativity"] = r
    if r > tol * scale * scale:
        raise errors.CoassociativityError("(Delta (x) id) Delta = (id (x) Delta) Delta", r)

    r = max(max_abs(np.kron(counit, eye) @ comul - eye), max_abs(np.kron(eye, counit) @ comul - eye))
    res["counit"] = r
    if r > tol * scale:
        raise errors.CounitError("(eps (x) id) Delta = id = (id (x) eps) Delta", r)

    m = _mult_matrix(H)
    target = np.outer(H.unit, counit)
    r = max(max_abs(m @ np.kron(antipode, eye) @ comul - target),
            max_abs(m @ np.kron(eye, antipode) @ comul - target))
    res["antipode"] = r
    if r > tol * scale * max(1.0, max_abs(antipode)):
        raise errors.AntipodeError("m(S (x) id)Delta = eps(.)1 = m(id (x) S)Delta", r)

    h = haar_state_vector(H, comul, tol)
    if haar is not None:
        haar = np.asarray(haar, dtype=complex)
        r = max_abs(haar - h)
        if r > tol * 10:
            raise errors.HaarError("supplied Haar state is the invariant state", r)
    hf = csalg.check_functional(H, h, tol)
    if not hf.faithful:
        raise errors.HaarError("Haar state faithful", hf.min_eigenvalue)
    res["haar_invariance"] = _haar_residual(H, comul, h)

    rho = counit.copy() if rho is None else np.asarray(rho, dtype=complex)
    if rho.shape != (d,):
        raise errors.DimensionMismatch("rho length", detail=f"{rho.shape} vs {d}")

    unitary = antipode  # R = S once rho = 1 is certified below
    r = max(max_abs(unitary @ unitary - eye),
            max_abs(unitary @ H.star_matrix - H.star_matrix @ np.conj(unitary)))
    c = np.asarray(H.mult)
    anti = np.einsum("ijk,lk->ijl", c, unitary) - np.einsum("pj,qi,pqk->ijk", unitary, unitary, c, optimize=True)
    r = max(r, max_abs(anti))
    res["unitary_antipode"] = r
    if r > tol * max(1.0, max_abs(unitary)) ** 2:
        raise errors.AntipodeError("R involutive, *-preserving and antimultiplicative", r)

    G = FiniteQuantumGroup(H, _frozen(comul), _frozen(counit), _frozen(antipode), _frozen(unitary),
                           hf, _frozen(rho), res, name)
    _check_rho(G, tol)
    return G


def _check_rho(G, tol):
    worst_balance = 0.0
    for U in G.irreps:
        ev = np.linalg.eigvalsh((U.rho_matrix + U.rho_matrix.conj().T) / 2)
        if ev[0] <= tol or max_abs(U.rho_matrix - U.rho_matrix.conj().T) > tol * max(1.0, ev[-1]):
            raise errors.RhoNotPositive("pi_U(rho) positive invertible", float(ev[0]), detail=U.label)
        bal = abs(np.sum(ev) - np.sum(1.0 / ev))
        worst_balance = max(worst_balance, bal)
        if bal > tol * max(1.0, np.sum(ev)):
            raise errors.RhoInconsistent("Tr pi_U(rho) = Tr pi_U(rho^-1)", bal, detail=U.label)
    # S^2 = id on a finite-dimensional Hopf C*-algebra forces rho = 1
    r = max_abs(G.rho - G.counit)
    if r > tol:
        raise errors.RhoInconsistent("rho = 1 (forced by S^2 = id in finite dimension)", r)
    G.residuals["rho_balance"] = worst_balance


def _haar_system(H, comul):
    d = H.dim
    dm = comul.reshape(d, d, d)  # [a, b, k]
    eye = np.eye(d)
    left = dm.transpose(1, 2, 0) - np.einsum("b,ak->bka", H.unit, eye)  # (h (x) id)Delta(x_k) = h(x_k) 1
    right = dm.transpose(0, 2, 1) - np.einsum("a,bk->akb", H.unit, eye)  # (id (x) h)Delta(x_k) = h(x_k) 1
    return np.vstack([left.reshape(d * d, d), right.reshape(d * d, d)])


def _haar_residual(H, comul, h):
    return max_abs(_haar_system(H, np.asarray(comul)) @ h)


def haar_state_vector(H, comul, tol=DEFAULT_TOL):
    ns = null_space(_haar_system(H, np.asarray(comul)), tol)
    if ns.shape[1] != 1:
        raise errors.NonUniqueInvariantState("(h (x) id)Delta = h(.)1 = (id (x) h)Delta has a unique solution",
                                             detail=f"solution space dimension {ns.shape[1]}")
    v = ns[:, 0]
    norm = v @ H.unit
    if abs(norm) <= tol:
        raise errors.HaarError("h(1) != 0", abs(norm))
    return v / norm


def haar_state(G_or_H, comul=None, tol=None):
    """The Haar state as a ``Functional``; accepts a quantum group or raw (H, comul)."""
    if isinstance(G_or_H, FiniteQuantumGroup):
        H, comul = G_or_H.H, G_or_H.comul
    else:
        H = G_or_H
    tol = H.tol if tol is None else tol
    return csalg.check_functional(H, haar_state_vector(H, comul, tol), tol)


# ---------------------------------------------------------------------------
# builders


def check_group_table(table):
    t = np.asarray(table)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise errors.NotAGroup("square multiplication table", detail=str(t.shape))
    n = t.shape[0]
    if t.min() < 0 or t.max() >= n:
        raise errors.NotAGroup("table entries are element indices", detail=f"range [{t.min()}, {t.max()}]")
    idx = np.arange(n)
    es = [e for e in range(n) if np.array_equal(t[e], idx) and np.array_equal(t[:, e], idx)]
    if not es:
        raise errors.NotAGroup("identity element exists")
    e = es[0]
    inv = np.full(n, -1)
    for g in range(n):
        hits = np.where(t[g] == e)[0]
        if len(hits) != 1 or t[hits[0], g] != e:
            raise errors.NotAGroup("inverses exist", detail=f"element {g}")
        inv[g] = hits[0]
    bad = np.argwhere(t[t[:, :, None], idx[None, None, :]] != t[idx[:, None, None], t[None, :, :]])
    if bad.size:
        g, h, k = bad[0]
        raise errors.NotAGroup("associativity", detail=f"({g}{h}){k} != {g}({h}{k})")
    return t, e, inv


def build_function_algebra(table, tol=DEFAULT_TOL, name="C(G)"):
    t, e, inv = check_group_table(table)
    n = t.shape[0]
    H = csalg.from_structure_constants(
        np.einsum("ij,jk->ijk", np.eye(n), np.eye(n)), np.eye(n), np.ones(n),
        [f"d{g}" for g in range(n)], tol)
    comul = np.zeros((n * n, n))
    for h in range(n):
        for g in range(n):
            comul[h * n + t[inv[h], g], g] = 1.0
    counit = np.zeros(n)
    counit[e] = 1.0
    S = np.zeros((n, n))
    S[inv, np.arange(n)] = 1.0
    return validate_hopf(H, comul, counit, S, haar=np.full(n, 1.0 / n), tol=tol, name=name)


def build_group_algebra(table, tol=DEFAULT_TOL, name="C[G]"):
    t, e, inv = check_group_table(table)
    n = t.shape[0]
    mult = np.zeros((n, n, n))
    for g in range(n):
        for h in range(n):
            mult[g, h, t[g, h]] = 1.0
    star = np.zeros((n, n))
    star[inv, np.arange(n)] = 1.0
    unit = np.zeros(n)
    unit[e] = 1.0
    H = csalg.from_structure_constants(mult, star, unit, [f"u{g}" for g in range(n)], tol)
    comul = np.zeros((n * n, n))
    for g in range(n):
        comul[g * n + g, g] = 1.0
    return validate_hopf(H, comul, np.ones(n), star.copy(), haar=unit, tol=tol, name=name)


def _dual_algebra(G):
    d = G.dim
    H = G.H
    mult = np.asarray(G.comul).reshape(d, d, d)  # f^a f^b = (f^a (x) f^b) Delta
    star = (np.conj(H.star_matrix) @ G.antipode).T  # f^*(x) = conj(f(S(x)^*))
    labels = [f"f({lab})" for lab in H.labels]
    return csalg.from_structure_constants(mult, star, G.counit, labels, G.tol, H.wedderburn.seed)


def dual_quantum_group(G, name=None):
    """Hopf data on the dual space, on the basis ``f^k`` dual to ``x_k``."""
    d = G.dim
    H = G.H
    D = _dual_algebra(G)
    comul = np.asarray(H.mult).reshape(d * d, d)
    dual_name = name if name is not None else f"dual({G.name})"
    return validate_hopf(D, comul, H.unit, np.asarray(G.antipode).T, tol=G.tol, name=dual_name)


def double_dual_residual(G):
    """Residual of the canonical identification of ``G`` with its double dual."""
    DD = dual_quantum_group(dual_quantum_group(G))
    pairs = [(G.H.mult, DD.H.mult), (G.H.star_matrix, DD.H.star_matrix), (G.H.unit, DD.H.unit),
             (G.comul, DD.comul), (G.counit, DD.counit), (G.antipode, DD.antipode)]
    return max(max_abs(np.asarray(a) - np.asarray(b)) for a, b in pairs)


# ---------------------------------------------------------------------------
# representations


def corep_residuals(G, coeffs):
    """(multiplicativity, unitarity) residuals of the matrix ``U = [u_rs]``."""
    n = coeffs.shape[0]
    H = G.H
    mult = 0.0
    for r in range(n):
        for s in range(n):
            lhs = G.comul @ coeffs[r, s]
            rhs = sum(np.kron(coeffs[r, t], coeffs[t, s]) for t in range(n))
            mult = max(mult, max_abs(lhs - rhs))
    stars = np.einsum("pq,rsq->rsp", H.star_matrix, np.conj(coeffs))
    uni = 0.0
    for r in range(n):
        for s in range(n):
            a = sum(H.mul(stars[t, r], coeffs[t, s]) for t in range(n))  # (U*U)_rs
            b = sum(H.mul(coeffs[r, t], stars[s, t]) for t in range(n))  # (UU*)_rs
            target = H.unit * (r == s)
            uni = max(uni, max_abs(a - target), max_abs(b - target))
    return mult, uni


def irreps(G):
    """One unitary irrep per block of the dual algebra, sorted by dimension then
    by the rounded character."""
    W = _dual_algebra(G).wedderburn
    out = []
    off = 0
    for n in W.blocks:
        coeffs = np.asarray(W.coords[off:off + n * n, :]).reshape(n, n, G.dim)
        off += n * n
        out.append(coeffs)

    def key(cf):
        ch = np.einsum("rri->i", cf)
        trivial = cf.shape[0] == 1 and max_abs(ch - G.H.unit) <= G.tol * 100
        return (cf.shape[0], not trivial) + tuple(np.round(np.concatenate([ch.real, ch.imag]), 6))

    out.sort(key=key)
    reps = []
    for idx, cf in enumerate(out):
        m, u = corep_residuals(G, cf)
        if max(m, u) > G.tol * 100:
            raise errors.HopfError("irreducible corepresentation is unitary and multiplicative", max(m, u),
                                   detail=f"block {idx}")
        rho_m = np.einsum("rsi,i->rs", cf, G.rho)
        reps.append(UnitaryRepresentation(G, cf.shape[0], _frozen(cf), _frozen(rho_m), f"U{idx}"))
    total = sum(U.dim ** 2 for U in reps)
    if total != G.dim:
        raise errors.HopfError("sum of squared irrep dimensions equals dim H", abs(total - G.dim))
    return tuple(reps)


def conjugate_representation(U):
    """``U-bar = (j(rho)^{1/2} (x) 1) U^c (j(rho)^{-1/2} (x) 1)`` with ``U^c_ab = u_ab^*``."""
    H = U.hopf.H
    uc = np.einsum("pq,rsq->rsp", H.star_matrix, np.conj(U.coeffs))
    rho = np.asarray(U.rho_matrix)
    _require_positive(rho)
    j = rho.T
    a = hermitian_sqrt(j)
    b = hermitian_sqrt(j, inverse=True)
    ub = np.einsum("ac,cdi,db->abi", a, uc, b)
    m, u = corep_residuals(U.hopf, ub)
    if max(m, u) > U.hopf.tol * 100:
        raise errors.HopfError("conjugate representation is a unitary corepresentation", max(m, u))
    return UnitaryRepresentation(U.hopf, U.dim, _frozen(ub), _frozen(np.linalg.inv(rho).T), U.label + "bar")


def _require_positive(rho, tol=DEFAULT_TOL):
    rho = np.asarray(rho, dtype=complex)
    herm = max_abs(rho - rho.conj().T)
    ev = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    if herm > tol * max(1.0, max_abs(rho)) or ev[0] <= tol:
        raise errors.RhoNotPositive("rho positive invertible", float(ev[0]) if herm <= tol else herm)
    return rho


@dataclass(frozen=True, eq=False)
class StandardSolution:
    """``R[a, b]`` is the coefficient of ``xi-bar_a (x) xi_b``; ``Rbar[a, b]`` of ``xi_a (x) xi-bar_b``."""

    R: np.ndarray
    Rbar: np.ndarray
    dim_q: float
    conjugate_residual: float
    norm_R_sq: float
    norm_Rbar_sq: float

    def slice_R(self, xi):
        """``(id (x) xi^*) R(1)`` as a vector in the conjugate space."""
        return self.R @ np.conj(xi)

    def slice_Rbar(self, xi):
        """``(xi^* (x) id) Rbar(1)``."""
        return np.conj(xi) @ self.Rbar


def standard_solution(U_or_rho):
    """Standard solution of the conjugate equations.  Accepts a representation
    or, in pure linear-algebra mode, a bare positive matrix ``rho``."""
    rho = U_or_rho.rho_matrix if isinstance(U_or_rho, UnitaryRepresentation) else U_or_rho
    rho = _require_positive(rho)
    n = rho.shape[0]
    R = hermitian_sqrt(rho, inverse=True).T
    Rbar = hermitian_sqrt(rho)
    r, rb = R.ravel(), Rbar.ravel()
    eye = np.eye(n)
    first = np.kron(r.conj()[None, :], eye) @ np.kron(eye, rb[:, None])  # (R* (x) id)(id (x) Rbar)
    second = np.kron(rb.conj()[None, :], eye) @ np.kron(eye, r[:, None])  # (Rbar* (x) id)(id (x) R)
    res = max(max_abs(first - eye), max_abs(second - eye))
    return StandardSolution(_frozen(R), _frozen(Rbar), float(np.trace(rho).real), res,
                            float(np.vdot(r, r).real), float(np.vdot(rb, rb).real))


def quantum_dimension(U):
    return float(np.trace(U.rho_matrix).real)


def peter_weyl_basis(G):
    """Columns are all matrix coefficients ``u^U_rs``; ``owner[p]`` is the irrep index of column ``p``."""
    cols, owner = [], []
    for idx, U in enumerate(G.irreps):
        for r in range(U.dim):
            for s in range(U.dim):
                cols.append(U.coeffs[r, s])
                owner.append(idx)
    return np.array(cols).T, np.array(owner)


def isotypic_projection(G, index):
    """Projection of H onto ``C[G]_U`` along the other isotypic components."""
    basis, owner = peter_weyl_basis(G)
    return basis @ np.diag((owner == index).astype(float)) @ np.linalg.inv(basis)


def tensor_representation(U, V):
    """Coefficients of ``U_13 V_23``: entry ``((k, l), (s, t))`` is ``u_ks v_lt``."""
    H = U.hopf.H
    n, m = U.dim, V.dim
    c = np.asarray(H.mult)
    w = np.einsum("ksi,ltj,ijx->klstx", U.coeffs, V.coeffs, c, optimize=True)
    return w.reshape(n * m, n * m, H.dim)
