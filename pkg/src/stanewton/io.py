"""JSON formats for polynomials and decompositions."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, STAError
from .manifold import Decomposition
from .poly import COMPLEX, REAL, HomPoly, dim_space, entries_to_poly, monomial_index, monomials


class InputError(STAError):
    """Malformed input file."""


def _num(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _complex(obj, where: str) -> complex:
    try:
        return complex(float(obj.get("re", 0.0)), float(obj.get("im", 0.0)))
    except (AttributeError, TypeError, ValueError) as exc:
        raise InputError(f"{where}: expected an object with numeric 're'/'im'") from exc


def poly_to_json(P: HomPoly) -> dict:
    coeffs = [
        {"alpha": [int(a) for a in alpha], **_num(c)}
        for alpha, c in zip(monomials(P.n, P.d), P.coef)
        if c != 0
    ]
    return {"n": P.n, "d": P.d, "field": P.field, "coeffs": coeffs}


def poly_from_json(obj) -> HomPoly:
    """Canonical ``coeffs`` form, or dense tensor ``entries`` (1-based)."""
    if not isinstance(obj, dict):
        raise InputError("polynomial JSON must be an object")
    try:
        n, d = int(obj["n"]), int(obj["d"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError("polynomial JSON needs integer 'n' and 'd'") from exc
    field = obj.get("field")
    if field not in (None, REAL, COMPLEX):
        raise InputError(f"unknown field {field!r}")
    if "entries" in obj:
        try:
            entries = [(list(e["index"]), _complex(e, f"entries[{k}]"))
                       for k, e in enumerate(obj["entries"])]
        except (KeyError, TypeError) as exc:
            raise InputError("each entry needs an 'index' list") from exc
        return entries_to_poly(n, d, entries, field=field)
    if "coeffs" not in obj:
        raise InputError("polynomial JSON needs 'coeffs' or 'entries'")
    idx = monomial_index(n, d)
    c = np.zeros(dim_space(n, d), dtype=complex)
    seen = set()
    for k, item in enumerate(obj["coeffs"]):
        alpha = tuple(int(a) for a in item.get("alpha", ()))
        if alpha not in idx:
            raise DimensionMismatch(f"coeffs[{k}]: exponent {alpha} is not of degree {d} in {n} variables")
        if alpha in seen:
            raise InputError(f"coeffs[{k}]: duplicate exponent {alpha}")
        seen.add(alpha)
        c[idx[alpha]] = _complex(item, f"coeffs[{k}]")
    if field is None:
        field = REAL if np.all(c.imag == 0) else COMPLEX
    return HomPoly(n, d, field, c)


def decomposition_to_json(p: Decomposition) -> dict:
    return {
        "r": p.r,
        "n": p.n,
        "d": p.d,
        "field": p.field,
        "weights": [float(w) for w in p.W],
        "vectors": [[_num(z) for z in p.V[:, i]] for i in range(p.r)],
    }


def decomposition_from_json(obj) -> Decomposition:
    try:
        W = np.asarray(obj["weights"], dtype=float)
        V = np.array([[_complex(z, f"vectors[{i}]") for z in col]
                      for i, col in enumerate(obj["vectors"])]).T
        return Decomposition(W, V, int(obj["d"]), obj.get("field", COMPLEX))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed decomposition JSON: {exc}") from exc


def read_json(path) -> object:
    """Parse a JSON file; syntax errors carry the line and column."""
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def load_poly(path) -> HomPoly:
    return poly_from_json(read_json(path))


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text
