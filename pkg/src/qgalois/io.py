"""JSON input and output.

Complex numbers are ``[re, im]`` pairs, indices are 0-based and sparse
tensors are coordinate lists:

* algebra: ``{"dim", "labels", "mult": [[i, j, k, re, im], ...], "star":
  dense matrix of pairs, "unit": vector of pairs}``;
* Hopf algebra: algebra fields plus ``"comul": [[i, j, k, re, im], ...]``
  (coefficient of ``x_i (x) x_j`` in ``Delta(x_k)``), ``"counit"``,
  ``"antipode"`` (dense), optional ``"haar"``, ``"rho"``, ``"name"``; or a
  group ``{"order", "table"}`` giving ``C(G)`` (``"kind": "group_algebra"``
  gives ``C[G]``);
* coaction: ``{"algebra", "hopf", "side", "map": [[row, col, re, im], ...]}``
  where ``algebra`` and ``hopf`` are paths (relative to the file) or inline
  objects;
* bi-action bundle: ``{"algebra", "hopf1", "hopf2", "left", "right"}`` with
  ``left``/``right`` sparse maps.
"""

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import coaction as co
from . import csalg, errors, fqgroup, morita
from ._linalg import DEFAULT_TOL

SPARSE_EPS = 1e-15


# ---------------------------------------------------------------------------
# reading


@dataclass(frozen=True)
class Source:
    """Where a JSON object came from, for error messages and relative paths."""

    path: object = None

    @property
    def base(self):
        return Path(self.path).parent if self.path else Path(".")

    def where(self, key=None):
        loc = str(self.path) if self.path else "<inline>"
        return f"{loc}: {key}" if key else loc


def read_json(path):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise errors.ParseError("readable input file", detail=f"{p}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise errors.ParseError("well-formed JSON", detail=f"{p}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _field(obj, key, src):
    if not isinstance(obj, dict):
        raise errors.SchemaError("JSON object", detail=src.where())
    if key not in obj:
        raise errors.SchemaError(f"field '{key}' present", detail=src.where())
    return obj[key]


def _complex(x, src, key):
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    raise errors.SchemaError("complex number as [re, im]", detail=src.where(key))


def _vector(x, n, src, key):
    if not isinstance(x, list) or len(x) != n:
        raise errors.SchemaError(f"vector of length {n}", detail=src.where(key))
    return np.array([_complex(v, src, key) for v in x])


def _dense(x, shape, src, key):
    if not isinstance(x, list) or len(x) != shape[0]:
        raise errors.SchemaError(f"{shape[0]} x {shape[1]} matrix", detail=src.where(key))
    return np.array([_vector(row, shape[1], src, key) for row in x])


def _sparse(entries, shape, src, key):
    """Coordinate list ``[idx..., re, im]`` into a dense array of ``shape``."""
    out = np.zeros(shape, dtype=complex)
    if not isinstance(entries, list):
        raise errors.SchemaError("coordinate list", detail=src.where(key))
    k = len(shape)
    for n, e in enumerate(entries):
        if not isinstance(e, list) or len(e) != k + 2:
            raise errors.SchemaError(f"entry [{'i, ' * k}re, im]", detail=src.where(f"{key}[{n}]"))
        idx = e[:k]
        if not all(isinstance(i, int) and 0 <= i < s for i, s in zip(idx, shape)):
            raise errors.SchemaError(f"indices within {shape}", detail=src.where(f"{key}[{n}]"))
        out[tuple(idx)] += _complex(e[k:], src, key)
    return out


def algebra_from_dict(obj, src=Source(), tol=DEFAULT_TOL, seed=0):
    d = _field(obj, "dim", src)
    if not isinstance(d, int) or d < 1:
        raise errors.SchemaError("positive integer dim", detail=src.where("dim"))
    labels = obj.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != d):
        raise errors.SchemaError(f"{d} labels", detail=src.where("labels"))
    mult = _sparse(_field(obj, "mult", src), (d, d, d), src, "mult")
    star = _dense(_field(obj, "star", src), (d, d), src, "star")
    unit = _vector(_field(obj, "unit", src), d, src, "unit")
    return csalg.from_structure_constants(mult, star, unit, labels, tol, seed)


def hopf_from_dict(obj, src=Source(), tol=DEFAULT_TOL, seed=0):
    if isinstance(obj, dict) and "table" in obj:
        table = obj["table"]
        order = obj.get("order", len(table) if isinstance(table, list) else None)
        try:
            t = np.array(table, dtype=int)
        except (TypeError, ValueError) as exc:
            raise errors.SchemaError("integer table", detail=src.where("table")) from exc
        if t.shape != (order, order):
            raise errors.SchemaError(f"{order} x {order} table", detail=src.where("table"))
        name = obj.get("name", "")
        if obj.get("kind", "function_algebra") == "group_algebra":
            return fqgroup.build_group_algebra(t, tol, name=name or "C[G]")
        return fqgroup.build_function_algebra(t, tol, name=name or "C(G)")
    H = algebra_from_dict(obj, src, tol, seed)
    d = H.dim
    comul = _sparse(_field(obj, "comul", src), (d, d, d), src, "comul").reshape(d * d, d)
    counit = _vector(_field(obj, "counit", src), d, src, "counit")
    antipode = _dense(_field(obj, "antipode", src), (d, d), src, "antipode")
    haar = _vector(obj["haar"], d, src, "haar") if obj.get("haar") is not None else None
    rho = _vector(obj["rho"], d, src, "rho") if obj.get("rho") is not None else None
    return fqgroup.validate_hopf(H, comul, counit, antipode, haar, rho, tol, obj.get("name", ""))


def _resolve(ref, src, loader, tol, seed):
    if isinstance(ref, str):
        path = src.base / ref
        return loader(read_json(path), Source(path), tol, seed)
    return loader(ref, src, tol, seed)


def coaction_from_dict(obj, src=Source(), tol=DEFAULT_TOL, seed=0):
    A = _resolve(_field(obj, "algebra", src), src, algebra_from_dict, tol, seed)
    G = _resolve(_field(obj, "hopf", src), src, hopf_from_dict, tol, seed)
    side = _field(obj, "side", src)
    if side not in co.SIDES:
        raise errors.SchemaError("side is 'left' or 'right'", detail=src.where("side"))
    m = _sparse(_field(obj, "map", src), (A.dim * G.dim, A.dim), src, "map")
    return co.validate_coaction(A, G, side, m, tol, obj.get("label", ""))


def biaction_from_dict(obj, src=Source(), tol=DEFAULT_TOL, seed=0):
    A = _resolve(_field(obj, "algebra", src), src, algebra_from_dict, tol, seed)
    G1 = _resolve(_field(obj, "hopf1", src), src, hopf_from_dict, tol, seed)
    G2 = _resolve(_field(obj, "hopf2", src), src, hopf_from_dict, tol, seed)
    m1 = _sparse(_field(obj, "left", src), (A.dim * G1.dim, A.dim), src, "left")
    m2 = _sparse(_field(obj, "right", src), (A.dim * G2.dim, A.dim), src, "right")
    left = co.validate_coaction(A, G1, "left", m1, tol, "left")
    right = co.validate_coaction(A, G2, "right", m2, tol, "right")
    return morita.validate_biaction(A, left, right, tol, obj.get("label", ""))


def load(path, kind, tol=DEFAULT_TOL, seed=0):
    """Read and validate ``kind`` in ``algebra``, ``hopf``, ``coaction``, ``biaction``."""
    loaders = {"algebra": algebra_from_dict, "hopf": hopf_from_dict,
               "coaction": coaction_from_dict, "biaction": biaction_from_dict}
    return loaders[kind](read_json(path), Source(path), tol, seed)


def vectors_from_dict(obj, dim, src=Source()):
    """``{"vectors": [[pair, ...], ...]}``: a list of elements, one per entry."""
    vs = _field(obj, "vectors", src)
    if not isinstance(vs, list) or not vs:
        raise errors.SchemaError("non-empty list of vectors", detail=src.where("vectors"))
    return np.stack([_vector(v, dim, src, "vectors") for v in vs], axis=1)


# ---------------------------------------------------------------------------
# writing


def _pair(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _sparse_list(a):
    a = np.asarray(a)
    idx = np.argwhere(np.abs(a) > SPARSE_EPS)
    return [[int(i) for i in ix] + _pair(a[tuple(ix)]) for ix in idx]


def algebra_to_dict(A):
    return {
        "dim": A.dim,
        "labels": list(A.labels),
        "mult": _sparse_list(A.mult),
        "star": [[_pair(z) for z in row] for row in np.asarray(A.star_matrix)],
        "unit": [_pair(z) for z in A.unit],
    }


def hopf_to_dict(G):
    d = G.dim
    out = algebra_to_dict(G.H)
    out.update({
        "name": G.name,
        "comul": _sparse_list(np.asarray(G.comul).reshape(d, d, d)),
        "counit": [_pair(z) for z in G.counit],
        "antipode": [[_pair(z) for z in row] for row in np.asarray(G.antipode)],
        "haar": [_pair(z) for z in G.haar.coeffs],
    })
    return out


def coaction_to_dict(c):
    return {"algebra": algebra_to_dict(c.A), "hopf": hopf_to_dict(c.G), "side": c.side,
            "map": _sparse_list(c.map), "label": c.label}


def biaction_to_dict(b):
    return {"label": b.label, "algebra": algebra_to_dict(b.A), "hopf1": hopf_to_dict(b.G1),
            "hopf2": hopf_to_dict(b.G2), "left": _sparse_list(b.left.map),
            "right": _sparse_list(b.right.map)}


def cocycle_to_dict(s):
    return {"name": s.name, "order": int(s.table.shape[0]), "table": s.table.tolist(),
            "values": [[_pair(z) for z in row] for row in np.asarray(s.values)],
            "residual": s.residual}


def jsonable(x):
    """Plain JSON types; complex numbers become ``[re, im]``, non-finite floats strings."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        f = float(x)
        return f if math.isfinite(f) else str(f)
    if isinstance(x, (complex, np.complexfloating)):
        return _pair(x)
    return x


def dumps(obj):
    return json.dumps(jsonable(obj), indent=2, sort_keys=True)
