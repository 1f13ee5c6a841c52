"""Worked examples: group tables, crossed products, twisted algebras from
2-cocycles, and a corpus of coactions with known freeness."""

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from . import coaction as co
from . import csalg, errors, fqgroup, morita
from ._linalg import DEFAULT_TOL, max_abs


# ---------------------------------------------------------------------------
# group tables


def cyclic_table(n):
    g = np.arange(n)
    return (g[:, None] + g[None, :]) % n


def symmetric_table(n=3):
    """Table of ``S_n`` with ``(g h)(i) = g(h(i))``; element 0 is the identity."""
    perms = list(permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    return np.array([[index[tuple(g[h[i]] for i in range(n))] for h in perms] for g in perms])


def direct_product_table(t1, t2):
    """Table of ``G_1 x G_2`` with ``(a, b)`` at index ``a * |G_2| + b``."""
    t1, t2 = np.asarray(t1), np.asarray(t2)
    n2 = t2.shape[0]
    return (t1[:, None, :, None] * n2 + t2[None, :, None, :]).reshape(t1.shape[0] * n2, -1)


def group(name, tol=DEFAULT_TOL):
    """``C(G)`` by short name: ``Z<n>``, ``S3`` or ``Z<n>xZ<m>``."""
    return fqgroup.build_function_algebra(group_table(name), tol, name=f"C({name})")


def group_table(name):
    if "x" in name:
        parts = name.split("x")
        t = group_table(parts[0])
        for p in parts[1:]:
            t = direct_product_table(t, group_table(p))
        return t
    if name.startswith("Z"):
        return cyclic_table(int(name[1:]))
    if name.startswith("S"):
        return symmetric_table(int(name[1:]))
    raise errors.InputError("known group name", detail=name)


# ---------------------------------------------------------------------------
# crossed products


def unit_biaction(G):
    """``C(G)``-style unit object: ``Delta`` as both a left and a right coaction."""
    left = co.comultiplication_coaction(G, "left")
    right = co.comultiplication_coaction(G, "right")
    return morita.validate_biaction(G.H, left, right, label=f"unit({G.name})")


def left_translation_as_right(G):
    """``(id (x) S) flip Delta``: translation on the same side as ``Delta``,
    written as a right coaction."""
    d = G.dim
    flip = np.eye(d * d).reshape(d, d, d, d).transpose(1, 0, 2, 3).reshape(d * d, d * d)
    m = np.kron(np.eye(d), np.asarray(G.antipode)) @ flip @ np.asarray(G.comul)
    return co.validate_coaction(G.H, G, "right", m, label="translation-as-right")


def crossed_product(G, tol=None):
    """``H # H^`` with ``Delta (x) id`` (left, G) and ``id (x) Delta^`` (right, dual).

    Product ``(x (x) f)(y (x) g) = x (f_(1) |> y) (x) f_(2) g`` with
    ``f |> y = y_(1) f(y_(2))``."""
    tol = G.tol if tol is None else tol
    Gd = fqgroup.dual_quantum_group(G)
    H, D = G.H, Gd.H
    d = G.dim
    cH = np.asarray(H.mult)
    Dl = np.asarray(G.comul).reshape(d, d, d)  # Delta[(r, p), c]
    cD = np.asarray(D.mult)  # f^q f^d = sum Delta[(q, d), k] f^k
    # struct[a, b, c, e, k, l] for (x_a f^b)(x_c f^e) = sum x_k f^l
    t = np.einsum("pqb,rpc,ark,qel->abcekl", np.asarray(Gd.comul).reshape(d, d, d), Dl, cH, cD,
                  optimize=True)
    mult = t.reshape(d * d, d * d, d * d)
    unit = np.kron(H.unit, D.unit)
    # (x (x) f)^* = (1 (x) f^*)(x^* (x) 1)
    ones = np.kron(H.unit[:, None], np.asarray(D.star_matrix))  # columns 1 (x) (f^b)^*
    xs = np.kron(np.asarray(H.star_matrix), D.unit[:, None])  # columns x_a^* (x) 1
    star = np.einsum("ib,ja,ijk->kab", ones, xs, mult, optimize=True).reshape(d * d, d * d)
    labels = [f"{a}#{b}" for a in H.labels for b in D.labels]
    A = csalg.from_structure_constants(mult, star, unit, labels, tol)
    a1 = np.kron(np.asarray(G.comul), np.eye(d))
    a2 = np.kron(np.eye(d), np.asarray(Gd.comul))
    left = co.validate_coaction(A, G, "left", a1, tol, "translation (x) id")
    right = co.validate_coaction(A, Gd, "right", a2, tol, "id (x) dual translation")
    return morita.validate_biaction(A, left, right, tol, f"crossed({G.name})")


# ---------------------------------------------------------------------------
# 2-cocycles


@dataclass(frozen=True, eq=False)
class TwoCocycle:
    table: np.ndarray
    values: np.ndarray  # sigma(g, h)
    residual: float
    name: str = ""


def two_cocycle(table, values, tol=DEFAULT_TOL, name=""):
    t, e, _ = fqgroup.check_group_table(table)
    s = np.asarray(values, dtype=complex)
    n = t.shape[0]
    if s.shape != (n, n):
        raise errors.CocycleInvalid("sigma is a |G| x |G| array", detail=str(s.shape))
    r_mod = max_abs(np.abs(s) - 1.0)
    # sigma(g, h) sigma(gh, k) = sigma(h, k) sigma(g, hk)
    lhs = s[:, :, None] * s[t[:, :, None], np.arange(n)[None, None, :]]
    rhs = s[None, :, :] * s[np.arange(n)[:, None, None], t[None, :, :]]
    r_cyc = max_abs(lhs - rhs)
    r_norm = max(max_abs(s[e, :] - 1.0), max_abs(s[:, e] - 1.0))
    r = max(r_mod, r_cyc, r_norm)
    if r > tol * 10:
        which = "unimodular" if r_mod == r else ("cocycle identity" if r_cyc == r else "normalized")
        raise errors.CocycleInvalid(f"sigma {which}", r)
    return TwoCocycle(t, csalg._frozen(s), r, name)


def heisenberg_cocycle(n):
    """``sigma((a, b), (c, d)) = exp(2 pi i b c / n)`` on ``Z_n x Z_n``,
    element ``(a, b)`` at index ``a * n + b``."""
    t = direct_product_table(cyclic_table(n), cyclic_table(n))
    a, b = np.divmod(np.arange(n * n), n)
    s = np.exp(2j * np.pi * np.outer(b, a) / n)
    return two_cocycle(t, s, name=f"heisenberg({n})")


def trivial_cocycle(table):
    n = np.asarray(table).shape[0]
    return two_cocycle(table, np.ones((n, n)), name="trivial")


def twisted_operators(sigma):
    """``pi(g) e_h = sigma(g, h) e_{gh}`` as matrices ``(n, n, n)``."""
    t, s = sigma.table, np.asarray(sigma.values)
    n = t.shape[0]
    P = np.zeros((n, n, n), dtype=complex)
    for g in range(n):
        P[g, t[g], np.arange(n)] = s[g]
    return P


def twisted_group_algebra(sigma, tol=DEFAULT_TOL):
    """``span pi(G)`` with basis ``pi(g)``; returns the algebra and the matrices."""
    P = twisted_operators(sigma)
    n = P.shape[0]
    flat = P.reshape(n, n * n)
    # the pi(g) have disjoint supports and norm^2 n, so coordinates are inner products

    def coords(M):
        return flat.conj() @ M.reshape(-1) / n

    mult = np.array([[coords(P[g] @ P[h]) for h in range(n)] for g in range(n)])
    star = np.array([coords(P[g].conj().T) for g in range(n)]).T
    unit = coords(np.eye(n))
    T = csalg.from_structure_constants(mult, star, unit, [f"pi{g}" for g in range(n)], tol)
    return T, P


def projective_cocycle_algebra(sigma, tol=DEFAULT_TOL):
    """``C(G) (x) span pi(G)`` with left translation on ``C(G)`` (left
    coaction) and ``delta_x (x) t -> sum_g delta_{x g^-1} (x) Ad pi(g)(t) (x) delta_g``."""
    t = sigma.table
    n = t.shape[0]
    G = fqgroup.build_function_algebra(t, tol, name="C(G)")
    T, P = twisted_group_algebra(sigma, tol)
    A = csalg.tensor_product(G.H, T)
    a1 = np.kron(np.asarray(G.comul), np.eye(n))
    _, _, inv = fqgroup.check_group_table(t)
    flat = P.reshape(n, n * n)
    ad = np.zeros((n, n, n), dtype=complex)  # ad[g][:, k] = coords of pi(g) pi(k) pi(g)^*
    for g in range(n):
        for k in range(n):
            ad[g][:, k] = flat.conj() @ (P[g] @ P[k] @ P[g].conj().T).reshape(-1) / n
    a2 = np.zeros((n * n * n, n * n), dtype=complex)  # rows (x', k', g), cols (x, k)
    for x in range(n):
        for g in range(n):
            xp = t[x, inv[g]]
            for k in range(n):
                a2[(xp * n + np.arange(n)) * n + g, x * n + k] = ad[g][:, k]
    left = co.validate_coaction(A, G, "left", a1, tol, "left translation")
    right = co.validate_coaction(A, G, "right", a2, tol, "translation (x) Ad pi")
    return morita.validate_biaction(A, left, right, tol, f"projective({sigma.name})")


# ---------------------------------------------------------------------------
# non-free coactions


def inner_coaction(G, unitaries, tol=None):
    """Right coaction ``a -> sum_g u_g a u_g^* (x) delta_g`` of ``C(G)`` on
    ``Mat_m`` for a unitary representation ``g -> u_g`` of the group."""
    u = np.asarray(unitaries, dtype=complex)
    n, m = u.shape[0], u.shape[1]
    A = csalg.matrix_algebra(m)
    out = np.zeros((m * m * n, m * m), dtype=complex)
    for g in range(n):
        # vec(u X u^*) row-major = kron(u, conj(u)) vec(X)
        out[np.arange(m * m) * n + g, :] = np.kron(u[g], u[g].conj())
    return co.validate_coaction(A, G, "right", out, tol, "inner")


def permutation_coaction(G, action, tol=None):
    """Right coaction on ``C(X)`` from a left action ``g . x = action[g, x]``:
    ``f -> sum_g f(g . -) (x) delta_g``."""
    act = np.asarray(action)
    n, m = act.shape
    A = csalg.diagonal_algebra(m)
    out = np.zeros((m * n, m))
    for g in range(n):
        for x in range(m):
            # delta_y(g . x) = 1 iff y = g . x
            out[x * n + g, act[g, x]] = 1.0
    return co.validate_coaction(A, G, "right", out, tol, "permutation")


# ---------------------------------------------------------------------------
# corpus


@dataclass(frozen=True, eq=False)
class CorpusEntry:
    name: str
    coaction: co.CoAction
    free: bool  # expected, from the construction


def coaction_corpus():
    """Coactions with known freeness; free ones include translations and
    crossed products, non-free ones have fixed points or missing spectrum."""
    Z2, Z3, Z4, S3 = group("Z2"), group("Z3"), group("Z4"), group("S3")
    cS3 = fqgroup.build_group_algebra(symmetric_table(3))
    out = [
        CorpusEntry("translation C(Z2) left", co.comultiplication_coaction(Z2, "left"), True),
        CorpusEntry("translation C(Z3) right", co.comultiplication_coaction(Z3, "right"), True),
        CorpusEntry("translation C(S3) left", co.comultiplication_coaction(S3, "left"), True),
        CorpusEntry("translation C(S3) right", co.comultiplication_coaction(S3, "right"), True),
        CorpusEntry("comultiplication C[S3]", co.comultiplication_coaction(cS3, "left"), True),
        CorpusEntry("trivial on C^2", co.trivial_coaction(csalg.diagonal_algebra(2), Z2, "left"), False),
        CorpusEntry("trivial on Mat_2", co.trivial_coaction(csalg.matrix_algebra(2), Z2, "right"), False),
        CorpusEntry("Z2 grading of Mat_2", inner_coaction(Z2, [np.eye(2), np.diag([1.0, -1.0])]), True),
        CorpusEntry("Z4 half spectrum on Mat_2",
                    inner_coaction(Z4, [np.diag([1.0, 1j ** g]) for g in range(4)]), False),
        CorpusEntry("Z2 with a fixed point on C^3",
                    permutation_coaction(Z2, [[0, 1, 2], [1, 0, 2]]), False),
        CorpusEntry("crossed product Z3 left", crossed_product(Z3).left, True),
        CorpusEntry("crossed product S3 right", crossed_product(S3).right, True),
        CorpusEntry("heisenberg(2) right", projective_cocycle_algebra(heisenberg_cocycle(2)).right, True),
    ]
    return out
