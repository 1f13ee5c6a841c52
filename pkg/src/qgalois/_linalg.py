import numpy as np

DEFAULT_TOL = 1e-9
# eigenvalue clustering gap used by the Wedderburn decomposition
CLUSTER_GAP = 1e-6


def singular_values(m):
    m = np.atleast_2d(m)
    if m.size == 0:
        return np.zeros(0)
    return np.linalg.svd(m, compute_uv=False)


def rank(m, tol=DEFAULT_TOL):
    """Numerical rank with threshold tol * (largest singular value)."""
    s = singular_values(m)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def null_space(m, tol=DEFAULT_TOL, scale=None):
    """Orthonormal basis (columns) of the kernel of ``m``.

    Singular values below ``tol * scale`` count as zero; ``scale`` defaults to
    the largest singular value (floored at 1 so that tiny matrices are not
    treated as rank deficient noise).
    """
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    n = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(n, dtype=complex)
    if m.shape[0] > n:
        # tall: same right singular vectors as the triangular factor
        m = np.linalg.qr(m, mode="r")
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    if scale is None:
        scale = max(s[0] if s.size else 0.0, 1.0)
    r = int(np.sum(s > tol * scale))
    return vh[r:].conj().T


def range_basis(m, tol=DEFAULT_TOL):
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    r = int(np.sum(s > tol * s[0]))
    return u[:, :r]


def cluster_sorted(values, gap=CLUSTER_GAP):
    """Split sorted real values into runs separated by more than ``gap``."""
    groups = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] > gap:
            groups.append(list(range(start, i)))
            start = i
    return groups


def hermitian_sqrt(g, inverse=False):
    w, v = np.linalg.eigh((g + g.conj().T) / 2)
    w = np.clip(w, 0.0, None)
    d = 1.0 / np.sqrt(w) if inverse else np.sqrt(w)
    return (v * d) @ v.conj().T


def max_abs(x):
    x = np.asarray(x)
    return float(np.max(np.abs(x))) if x.size else 0.0
