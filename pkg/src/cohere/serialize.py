"""JSON file formats for states, channels, reports and plans.

Complex numbers are ``[re, im]`` pairs and matrices are row-major nested
lists. Writers clean values below ``1e-15`` to zero so that output is stable
across platforms.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .channels import Channel, KrausChannel, SchurMap
from .numerics import DEFAULT_TOL, Tolerance
from .states import DensityMatrix, PureState

_CLEAN = 1e-15


def _real(x: float) -> float:
    x = float(x)
    return 0.0 if abs(x) < _CLEAN else x


def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [_real(z.real), _real(z.imag)]


def complex_from_json(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if not (isinstance(v, list) and len(v) == 2):
        raise ValueError(f"complex number must be [re, im], got {v!r}")
    return complex(float(v[0]), float(v[1]))


def vector_to_json(v) -> list:
    return [complex_to_json(z) for z in np.asarray(v).reshape(-1)]


def vector_from_json(rows) -> np.ndarray:
    return np.array([complex_from_json(z) for z in rows], dtype=complex)


def matrix_to_json(m) -> list:
    return [vector_to_json(row) for row in np.asarray(m)]


def matrix_from_json(rows) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise ValueError("matrix must be a non-empty list of rows")
    mat = [vector_from_json(r) for r in rows]
    if len({r.size for r in mat}) != 1:
        raise ValueError("matrix rows differ in length")
    return np.array(mat)


def _check_dim(obj: dict, n: int):
    if "dim" in obj and int(obj["dim"]) != n:
        raise ValueError(f"declared dim {obj['dim']} does not match data ({n})")


def state_to_json(state) -> dict:
    if isinstance(state, PureState):
        return {"dim": state.dim, "psi": vector_to_json(state.amplitudes)}
    if isinstance(state, DensityMatrix):
        return {"dim": state.dim, "rho": matrix_to_json(state.mat)}
    raise TypeError(f"not a state: {type(state).__name__}")


def state_from_json(obj: dict, tol: Tolerance = DEFAULT_TOL) -> PureState | DensityMatrix:
    if "psi" in obj:
        psi = vector_from_json(obj["psi"])
        _check_dim(obj, psi.size)
        return PureState(psi, tol)
    if "rho" in obj:
        rho = matrix_from_json(obj["rho"])
        _check_dim(obj, rho.shape[0])
        return DensityMatrix(rho, tol)
    raise ValueError("state file needs a 'psi' or 'rho' entry")


def channel_to_json(ch: Channel) -> dict:
    if isinstance(ch, SchurMap):
        return {"dim": ch.dim, "schur": matrix_to_json(ch.a)}
    return {"dim": ch.dim, "kraus": [matrix_to_json(k) for k in ch.kraus], "tp": bool(ch.tp)}


def channel_from_json(obj: dict, tol: Tolerance = DEFAULT_TOL) -> Channel:
    if "schur" in obj:
        a = matrix_from_json(obj["schur"])
        _check_dim(obj, a.shape[0])
        return SchurMap(a, tol)
    if "kraus" in obj:
        ops = tuple(matrix_from_json(k) for k in obj["kraus"])
        _check_dim(obj, ops[0].shape[0])
        return KrausChannel(ops, tp=bool(obj.get("tp", True)), tol=tol)
    raise ValueError("channel file needs a 'kraus' or 'schur' entry")


def plain(x):
    """Recursively convert numpy values and library objects to JSON-ready data."""
    if isinstance(x, (PureState, DensityMatrix)):
        return state_to_json(x)
    if isinstance(x, (KrausChannel, SchurMap)):
        return channel_to_json(x)
    if isinstance(x, dict):
        return {str(k): plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return matrix_to_json(x) if x.ndim == 2 else vector_to_json(x)
        return plain(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return complex_to_json(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return _real(x)
    if hasattr(x, "value") and isinstance(x.value, str):
        return x.value
    return x


def plan_to_json(plan) -> dict:
    return {
        "verdict": plan.verdict.value,
        "probability": _real(plan.probability),
        "family": plan.family,
        "certificate": plan.certificate,
        "channel": None if plan.channel is None else channel_to_json(plan.channel),
        "details": plain(plan.details),
    }


def decomposition_to_json(dec, a) -> dict:
    if dec is None:
        return {"success": False, "reason": "no mixture of diagonal unitaries found within the term and restart budget"}
    return {
        "success": True,
        "terms": len(dec),
        "weights": [_real(w) for w in dec.weights],
        "vectors": [vector_to_json(v) for v in dec.vectors],
        "residual": float(dec.residual(a)),
    }


def dumps(obj) -> str:
    return json.dumps(plain(obj), indent=2, sort_keys=True)


def load_json(path: str | Path) -> dict:
    with open(path) as fh:
        return json.load(fh)
