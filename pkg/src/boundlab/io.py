"""JSON forms of states, operators, verdicts and witnesses.

Floats are written with Python's shortest round-trip repr, so every value
survives a write/read cycle exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .bell import BellBasis, SimplexState
from .errors import InputError
from .linalg import DenseState, HermitianOperator


def _pairs(a: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(a, dtype=np.complex128).ravel()]


def _unpairs(entries, D: int) -> np.ndarray:
    try:
        a = np.array([complex(re, im) for re, im in entries])
    except (TypeError, ValueError) as exc:
        raise InputError(f"entries must be [re, im] pairs: {exc}") from None
    if a.size != D * D:
        raise InputError(f"expected {D * D} entries, got {a.size}")
    return a.reshape(D, D)


def dense_to_json(rho: HermitianOperator, kind: str = "dense") -> dict:
    return {"kind": kind, "dims": list(rho.dims), "entries": _pairs(rho.entries)}


def simplex_to_json(s: SimplexState) -> dict:
    return {"kind": "simplex", "d": s.d, "basis": s.basis.to_json(),
            "coeffs": [float(x) for x in s.coeffs.ravel()]}


def state_to_json(state) -> dict:
    return simplex_to_json(state) if isinstance(state, SimplexState) else dense_to_json(state)


def _basis_from_json(d: int, obj) -> BellBasis:
    if obj in (None, "standard"):
        return BellBasis.standard(d)
    if isinstance(obj, dict) and "alpha" in obj:
        alpha = np.array([[complex(re, im) for re, im in row] for row in obj["alpha"]])
        return BellBasis(d, alpha)
    raise InputError("basis must be 'standard' or {'alpha': ...}")


def state_from_json(obj):
    """Parse a DenseState or SimplexState object."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InputError("state JSON must be an object with a 'kind' field")
    kind = obj["kind"]
    if kind == "dense":
        dims = [int(x) for x in obj.get("dims", [])]
        if not dims:
            raise InputError("dense state needs dims")
        D = int(np.prod(dims))
        return DenseState(tuple(dims), _unpairs(obj.get("entries", []), D))
    if kind == "simplex":
        d = int(obj["d"])
        coeffs = np.asarray(obj["coeffs"], dtype=float)
        if coeffs.size != d * d:
            raise InputError("simplex coeffs must have d*d entries")
        return SimplexState(_basis_from_json(d, obj.get("basis")), coeffs.reshape(d, d))
    if kind == "operator":
        dims = [int(x) for x in obj["dims"]]
        return HermitianOperator(tuple(dims), _unpairs(obj["entries"], int(np.prod(dims))))
    raise InputError(f"unknown kind {kind!r}")


def read_state(path) -> object:
    p = Path(path)
    try:
        obj = json.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from None
    if isinstance(obj, dict) and "result" in obj and isinstance(obj["result"], dict) and "state" in obj["result"]:
        obj = obj["result"]["state"]
    return state_from_json(obj)


def witness_to_json(W) -> dict:
    out = {"kind": W.kind, "params": W.params, "is_witness": W.is_witness,
           "operator": dense_to_json(W.operator, "operator")}
    if W.bounds is not None:
        out["bounds"] = {"L": W.bounds[0], "U": W.bounds[1], "provenance": W.provenance}
    return out


def to_jsonable(x):
    """Recursively convert numpy scalars/arrays for json.dumps."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (np.floating, float)):
        v = float(x)
        if not np.isfinite(v):
            return repr(v)
        return v
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=False)


def fmt_csv(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "%.15g" % v
    return str(v)
