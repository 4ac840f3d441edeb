"""JSON file formats.

Matrices are nested lists of ``[re, im]`` pairs. A system file looks like::

    {"dim": 2,
     "drift": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]],
     "controls": [[[[0, 0], [1, 0]], [[1, 0], [0, 0]]]]}

Schedules are ``{"segments": [{"duration": d, "values": [u1, ...]}, ...]}``.
Single operators and states use ``{"matrix": M}``; pure states may instead
give a ket as ``{"ket": [[re, im], ...]}``.

Structural problems raise :class:`MalformedInputError`; well-formed input
that violates a physical constraint raises :class:`InvalidInputError`.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .dynamics import Trajectory
from .geometry import MixedState, PureState, pure_state_from_ket
from .operators import DEFAULT_TOL, InvalidStateError, NotHermitianError, Tolerances
from .systems import ControlSchedule, ControlSystem, Segment

__all__ = [
    "MalformedInputError",
    "InvalidInputError",
    "read_json",
    "file_digest",
    "encode_matrix",
    "decode_matrix",
    "parse_system",
    "load_system",
    "parse_schedule",
    "load_schedule",
    "load_operator",
    "load_pure_state",
    "load_mixed_state",
    "dump_json",
    "trajectory_to_dict",
    "trajectory_from_dict",
]


class MalformedInputError(ValueError):
    """Input cannot be parsed into the expected structure (exit code 2)."""


class InvalidInputError(ValueError):
    """Input parses but is physically invalid (exit code 3)."""


def _reject_constant(name):
    raise MalformedInputError(f"non-finite number {name} is not allowed")


def read_json(path) -> tuple[Any, bytes]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise MalformedInputError(f"{path}: cannot read file ({exc.strerror})") from None
    try:
        text = raw.decode("utf-8")
        return json.loads(text, parse_constant=_reject_constant), raw
    except UnicodeDecodeError:
        raise MalformedInputError(f"{path}: not UTF-8 text") from None
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    except RecursionError:
        raise MalformedInputError(f"{path}: JSON nesting too deep") from None


def file_digest(raw: bytes) -> str:
    return "sha256:" + hashlib.sha256(raw).hexdigest()


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _entry(x, where: str) -> complex:
    if not (isinstance(x, list) and len(x) == 2 and _is_number(x[0]) and _is_number(x[1])):
        raise MalformedInputError(f"{where}: expected an [re, im] pair of finite numbers")
    return complex(float(x[0]), float(x[1]))


def decode_matrix(obj, where: str, dim: int | None = None) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise MalformedInputError(f"{where}: expected a non-empty list of rows")
    n = len(obj)
    if dim is not None and n != dim:
        raise MalformedInputError(f"{where}: has {n} rows, expected dim={dim}")
    out = np.empty((n, n), dtype=np.complex128)
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != n:
            raise MalformedInputError(f"{where}: row {i} must have {n} entries")
        for j, x in enumerate(row):
            out[i, j] = _entry(x, f"{where}[{i}][{j}]")
    return out


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _decode_ket(obj, where: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise MalformedInputError(f"{where}: expected a non-empty list of [re, im] pairs")
    return np.array([_entry(x, f"{where}[{i}]") for i, x in enumerate(obj)])


def _hermiticity_check(m: np.ndarray, where: str, tol: Tolerances):
    defect = np.abs(m - m.conj().T)
    limit = tol.herm_tol * max(1.0, float(np.linalg.norm(m)))
    if np.linalg.norm(defect) > limit:
        i, j = np.unravel_index(int(np.argmax(defect)), defect.shape)
        raise InvalidInputError(
            f"{where} is not Hermitian: worst entry [{i}][{j}] = {m[i, j]:.6g} "
            f"vs conj([{j}][{i}]) = {np.conj(m[j, i]):.6g}"
        )


def parse_system(doc, tol: Tolerances = DEFAULT_TOL) -> ControlSystem:
    if not isinstance(doc, dict):
        raise MalformedInputError("system file must be a JSON object")
    for key in ("dim", "drift", "controls"):
        if key not in doc:
            raise MalformedInputError(f"system file is missing field '{key}'")
    dim = doc["dim"]
    if not (isinstance(dim, int) and not isinstance(dim, bool) and dim >= 1):
        raise MalformedInputError("field 'dim' must be a positive integer")
    if dim > 64:
        raise MalformedInputError(f"field 'dim' = {dim} exceeds the supported maximum of 64")
    if not isinstance(doc["controls"], list):
        raise MalformedInputError("field 'controls' must be a list of matrices")
    drift = decode_matrix(doc["drift"], "drift", dim)
    controls = [
        decode_matrix(c, f"controls[{k}]", dim) for k, c in enumerate(doc["controls"])
    ]
    _hermiticity_check(drift, "drift", tol)
    for k, c in enumerate(controls):
        _hermiticity_check(c, f"controls[{k}]", tol)
    herm = lambda m: 0.5 * (m + m.conj().T)  # noqa: E731
    return ControlSystem(herm(drift), tuple(herm(c) for c in controls), tol)


def load_system(path, tol: Tolerances = DEFAULT_TOL) -> tuple[ControlSystem, bytes]:
    doc, raw = read_json(path)
    return parse_system(doc, tol), raw


def parse_schedule(doc) -> ControlSchedule:
    if not isinstance(doc, dict) or not isinstance(doc.get("segments"), list):
        raise MalformedInputError("schedule file must be an object with a 'segments' list")
    segs = []
    for k, s in enumerate(doc["segments"]):
        if not isinstance(s, dict) or "duration" not in s or "values" not in s:
            raise MalformedInputError(f"segments[{k}]: needs 'duration' and 'values'")
        d, vals = s["duration"], s["values"]
        if not _is_number(d) or d <= 0:
            raise MalformedInputError(f"segments[{k}].duration must be a positive number")
        if not isinstance(vals, list) or not all(_is_number(u) for u in vals):
            raise MalformedInputError(f"segments[{k}].values must be a list of finite numbers")
        segs.append(Segment(float(d), tuple(float(u) for u in vals)))
    try:
        return ControlSchedule(tuple(segs))
    except ValueError as exc:
        raise MalformedInputError(str(exc)) from None


def load_schedule(path) -> ControlSchedule:
    doc, _ = read_json(path)
    return parse_schedule(doc)


def _matrix_doc(doc, where: str) -> np.ndarray:
    if not isinstance(doc, dict) or "matrix" not in doc:
        raise MalformedInputError(f"{where}: expected an object with a 'matrix' field")
    return decode_matrix(doc["matrix"], f"{where}.matrix", doc.get("dim") if isinstance(doc.get("dim"), int) else None)


def load_operator(path, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Hermitian observable from ``{"matrix": M}``."""
    doc, _ = read_json(path)
    m = _matrix_doc(doc, str(path))
    _hermiticity_check(m, "observable", tol)
    return 0.5 * (m + m.conj().T)


def load_pure_state(path) -> PureState:
    doc, _ = read_json(path)
    if isinstance(doc, dict) and "ket" in doc:
        psi = _decode_ket(doc["ket"], "ket")
        try:
            return pure_state_from_ket(psi)
        except InvalidStateError as exc:
            raise InvalidInputError(f"invalid state: {exc}") from None
    m = _matrix_doc(doc, str(path))
    try:
        return PureState(m)
    except (InvalidStateError, ValueError) as exc:
        raise InvalidInputError(f"invalid pure state: {exc}") from None


def load_mixed_state(path) -> MixedState:
    doc, _ = read_json(path)
    if isinstance(doc, dict) and "ket" in doc:
        psi = _decode_ket(doc["ket"], "ket")
        try:
            return MixedState(pure_state_from_ket(psi).projector)
        except InvalidStateError as exc:
            raise InvalidInputError(f"invalid state: {exc}") from None
    m = _matrix_doc(doc, str(path))
    try:
        return MixedState(m)
    except (InvalidStateError, NotHermitianError) as exc:
        raise InvalidInputError(f"invalid density matrix: {exc}") from None


def dump_json(obj) -> str:
    """Canonical serialization: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def trajectory_to_dict(traj: Trajectory) -> dict:
    return {
        "dim": int(traj.states.shape[1]),
        "times": [float(t) for t in traj.times],
        "states": [encode_matrix(s) for s in traj.states],
    }


def trajectory_from_dict(doc) -> Trajectory:
    if not isinstance(doc, dict) or not isinstance(doc.get("times"), list):
        raise MalformedInputError("trajectory must be an object with 'times' and 'states'")
    states = doc.get("states")
    if not isinstance(states, list) or len(states) != len(doc["times"]):
        raise MalformedInputError("trajectory 'states' must align with 'times'")
    dim = doc.get("dim")
    mats = [decode_matrix(s, f"states[{k}]", dim) for k, s in enumerate(states)]
    try:
        return Trajectory(np.array(doc["times"], dtype=np.float64), np.array(mats))
    except (ValueError, TypeError) as exc:
        raise MalformedInputError(str(exc)) from None
