"""JSON operator spec files.

A spec is ``{"N", "S", "M", "h", "vertices", "terms"}``; each term is
``{"alpha": [axes], "i": cell, "j": cell, "matrix": M x M of [re, im]}``
with 1-based axes and 0-based cells.  Repeated terms add up.
"""

import json
import os
import tempfile

import numpy as np

from . import subsets
from .algebra import AlgebraElement, PartitionGeometry, RefinedGridFunction
from .errors import GeometryError

SPEC_FIELDS = {"N", "S", "M", "h", "vertices", "terms"}
TERM_FIELDS = {"alpha", "i", "j", "matrix"}


class SpecError(ValueError):
    """Malformed or invalid input document."""


def cpair(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def parse_complex(v, where):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if (
        isinstance(v, list)
        and len(v) == 2
        and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in v)
    ):
        z = complex(v[0], v[1])
        if not np.isfinite(z):
            raise SpecError(f"{where}: non-finite number")
        return z
    raise SpecError(f"{where}: expected [re, im], got {v!r}")


def dumps(doc):
    """Canonical text: sorted keys, shortest round-trip floats, newline-terminated."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def loads(text, source="<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def load_path(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), str(path))


def write_atomic(path, text):
    path = os.fspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)), prefix=".opcalc-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _int(doc, key, where, minimum=1):
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
        raise SpecError(f"{where}.{key}: expected an integer >= {minimum}, got {v!r}")
    return v


def element_from_json(doc, source="spec"):
    if not isinstance(doc, dict):
        raise SpecError(f"{source}: top level must be an object")
    unknown = set(doc) - SPEC_FIELDS
    if unknown:
        raise SpecError(f"{source}: unknown fields {sorted(unknown)}")
    missing = SPEC_FIELDS - set(doc)
    if missing:
        raise SpecError(f"{source}: missing fields {sorted(missing)}")
    N = _int(doc, "N", source)
    S = _int(doc, "S", source)
    M = _int(doc, "M", source)
    h = doc["h"]
    if not isinstance(h, (int, float)) or isinstance(h, bool):
        raise SpecError(f"{source}.h: expected a number")
    verts = doc["vertices"]
    if not isinstance(verts, list) or len(verts) != S:
        raise SpecError(f"{source}.vertices: expected {S} vertices")
    for k, v in enumerate(verts):
        if not isinstance(v, list) or len(v) != N or not all(
            isinstance(t, (int, float)) and not isinstance(t, bool) for t in v
        ):
            raise SpecError(f"{source}.vertices[{k}]: expected {N} numbers")
    try:
        geom = PartitionGeometry(verts, h, M=M)
    except GeometryError as exc:
        raise SpecError(f"{source}: {exc}") from None
    terms = doc["terms"]
    if not isinstance(terms, list):
        raise SpecError(f"{source}.terms: expected a list")
    coeffs = np.zeros((geom.n_subsets, geom.side, geom.side), dtype=complex)
    for t, term in enumerate(terms):
        where = f"{source}.terms[{t}]"
        if not isinstance(term, dict):
            raise SpecError(f"{where}: expected an object")
        if set(term) != TERM_FIELDS:
            raise SpecError(f"{where}: fields must be exactly {sorted(TERM_FIELDS)}")
        axes = term["alpha"]
        if not isinstance(axes, list) or len(set(axes)) != len(axes) or not all(
            isinstance(n, int) and not isinstance(n, bool) and 1 <= n <= N for n in axes
        ):
            raise SpecError(f"{where}.alpha: expected distinct axes in 1..{N}")
        i = _int(term, "i", where, 0)
        j = _int(term, "j", where, 0)
        if i >= S or j >= S:
            raise SpecError(f"{where}: cell index out of range for S={S}")
        mat = term["matrix"]
        if not isinstance(mat, list) or len(mat) != M or not all(
            isinstance(r, list) and len(r) == M for r in mat
        ):
            raise SpecError(f"{where}.matrix: expected {M}x{M} entries")
        block = np.array(
            [[parse_complex(v, f"{where}.matrix[{r}][{c}]") for c, v in enumerate(row)] for r, row in enumerate(mat)]
        )
        a = subsets.as_mask(axes, N)
        coeffs[a, i * M:(i + 1) * M, j * M:(j + 1) * M] += block
    return AlgebraElement(geom, coeffs)


def element_to_json(X):
    g = X.geometry
    M = g.M
    A5 = X.coeffs.reshape(g.n_subsets, g.S, M, g.S, M)
    terms = []
    for a in range(g.n_subsets):
        for i, j in zip(*np.nonzero(np.abs(A5[a]).sum(axis=(1, 3)))):
            block = A5[a, i, :, j, :]
            terms.append(
                {
                    "alpha": subsets.axes(a),
                    "i": int(i),
                    "j": int(j),
                    "matrix": [[cpair(z) for z in row] for row in block],
                }
            )
    return {
        "N": g.N,
        "S": g.S,
        "M": g.M,
        "h": g.h,
        "vertices": [[float(t) for t in v] for v in g.vertices],
        "terms": terms,
    }


def grid_function_from_json(doc, geom, q=None, source="rhs"):
    """``{"values": [[re, im], ...]}``, optionally with ``"q"``."""
    if not isinstance(doc, dict) or "values" not in doc or set(doc) - {"values", "q"}:
        raise SpecError(f"{source}: expected an object with 'values' (and optional 'q')")
    vals = doc["values"]
    if not isinstance(vals, list):
        raise SpecError(f"{source}.values: expected a list")
    values = np.array([parse_complex(v, f"{source}.values[{k}]") for k, v in enumerate(vals)], dtype=complex)
    q_doc = doc.get("q")
    if q is None:
        q = q_doc
    elif q_doc is not None and q_doc != q:
        raise SpecError(f"{source}: q={q_doc} in file conflicts with requested q={q}")
    if q is None:
        per = values.size / geom.side
        q = round(per ** (1.0 / geom.N))
    try:
        return RefinedGridFunction(geom, int(q), values)
    except (GeometryError, ValueError) as exc:
        raise SpecError(f"{source}: {exc}") from None


def grid_function_to_json(u):
    return {"q": u.q, "values": [cpair(z) for z in u.values]}
