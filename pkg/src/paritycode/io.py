"""JSON code and model files.

Code file::

    {"n_logical": 2,
     "spins": [[0, 1], [0, 2], [1, 2]],
     "stabilisers": [{"spins": [[0, 1], [0, 2], [1, 2]], "nu": 1, "face": "[0,2]"}],
     "logical_z": [[0, 1], [0, 2]]}

Spin ids are either two-element integer arrays or strings.  Model file::

    {"n": 3, "h": [0.1, -0.2, 0.3],
     "J": [{"i": 1, "j": 2, "value": 0.5}],
     "K": [{"spins": [1, 2, 3], "value": 0.25}]}
"""

from __future__ import annotations

import json
from collections.abc import Mapping
from pathlib import Path
from typing import Any

from .codes import ParityCode, Stabiliser, SpinId, build_code
from .errors import CodeDesignError, CodeFileError, InvalidParameterError
from .gf2 import SupportVector
from .model import LogicalModel


def _parse_json(source: str | Path | Mapping) -> Mapping:
    if isinstance(source, Mapping):
        return source
    text = Path(source).read_text() if isinstance(source, Path) or not str(source).lstrip().startswith("{") else source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CodeFileError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} col {exc.colno}") from None
    if not isinstance(doc, Mapping):
        raise CodeFileError("top level must be an object")
    return doc


def _spin_id(raw: Any, where: str) -> SpinId:
    if isinstance(raw, str):
        return raw
    if isinstance(raw, list) and len(raw) == 2 and all(isinstance(v, int) and not isinstance(v, bool) for v in raw):
        return (raw[0], raw[1])
    raise CodeFileError(f"spin id must be a string or [i, j], got {raw!r}", where)


def _encode_spin(s: SpinId) -> Any:
    return list(s) if isinstance(s, tuple) else s


def _require(doc: Mapping, key: str, kind: type | tuple, where: str = "") -> Any:
    if key not in doc:
        raise CodeFileError("missing field", f"{where}{key}")
    value = doc[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise CodeFileError(f"expected {getattr(kind, '__name__', kind)}", f"{where}{key}")
    return value


def load_custom_code(source: str | Path | Mapping, *, name: str | None = None) -> ParityCode:
    """Parse a code file and derive logical X chains and labels.

    Raises :class:`CodeFileError` for malformed input and the specific
    :class:`CodeDesignError` subclasses for count mismatch, dependent
    stabilisers and infeasible logical X systems.
    """
    doc = _parse_json(source)
    n_logical = _require(doc, "n_logical", int)
    raw_spins = _require(doc, "spins", list)
    spins = [_spin_id(s, f"spins[{k}]") for k, s in enumerate(raw_spins)]
    index: dict[SpinId, int] = {}
    for k, s in enumerate(spins):
        if s in index:
            raise CodeFileError(f"duplicate spin id {s!r}", f"spins[{k}]")
        index[s] = k

    def lookup(raw: Any, where: str) -> int:
        sid = _spin_id(raw, where)
        if sid not in index:
            raise CodeFileError(f"unknown spin {sid!r}", where)
        return index[sid]

    stabs = []
    for k, entry in enumerate(_require(doc, "stabilisers", list)):
        where = f"stabilisers[{k}]."
        if not isinstance(entry, Mapping):
            raise CodeFileError("expected object", where.rstrip("."))
        members = [lookup(s, f"{where}spins[{m}]") for m, s in enumerate(_require(entry, "spins", list, where))]
        if len(set(members)) != len(members):
            raise CodeFileError("spin repeated within stabiliser", f"{where}spins")
        nu = entry.get("nu", 1)
        if nu not in (1, -1) or isinstance(nu, bool):
            raise CodeFileError(f"nu must be +1 or -1, got {nu!r}", f"{where}nu")
        face = entry.get("face", f"S{k}")
        try:
            stabs.append(Stabiliser(SupportVector.from_indices(len(spins), members), nu, str(face)))
        except CodeDesignError as exc:
            raise CodeFileError(str(exc), where.rstrip(".")) from None
    logical_z = [lookup(s, f"logical_z[{k}]") for k, s in enumerate(_require(doc, "logical_z", list))]
    meta = dict(doc.get("metadata", {}))
    return build_code(
        n_logical, spins, stabs, logical_z,
        name=name or doc.get("name", "custom"), metadata=meta,
    )


def code_to_dict(code: ParityCode) -> dict:
    doc: dict[str, Any] = {
        "name": code.name,
        "n_logical": code.n_logical,
        "spins": [_encode_spin(s) for s in code.spins],
        "stabilisers": [
            {"spins": [_encode_spin(code.spins[p]) for p in s.support.indices()], "nu": s.nu, "face": s.face_id}
            for s in code.stabilisers
        ],
        "logical_z": [_encode_spin(code.spins[p]) for p in code.logical_z],
    }
    if code.metadata:
        doc["metadata"] = dict(code.metadata)
    return doc


def dump_code(code: ParityCode, path: str | Path | None = None) -> str:
    text = json.dumps(code_to_dict(code), indent=1)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def load_model(source: str | Path | Mapping) -> LogicalModel:
    doc = _parse_json(source)
    n = _require(doc, "n", int)
    h = _require(doc, "h", list)
    if len(h) != n:
        raise CodeFileError(f"{len(h)} fields for n = {n}", "h")
    for k, v in enumerate(h):
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise CodeFileError("expected number", f"h[{k}]")
    J = {}
    for k, entry in enumerate(doc.get("J", [])):
        where = f"J[{k}]."
        i, j = _require(entry, "i", int, where), _require(entry, "j", int, where)
        J[(i, j)] = _require(entry, "value", (int, float), where)
    K = {}
    for k, entry in enumerate(doc.get("K", [])):
        where = f"K[{k}]."
        K[tuple(_require(entry, "spins", list, where))] = _require(entry, "value", (int, float), where)
    try:
        return LogicalModel(n, tuple(h), J, K)
    except InvalidParameterError as exc:
        raise CodeFileError(str(exc)) from None


def model_to_dict(model: LogicalModel) -> dict:
    return {
        "n": model.n,
        "h": list(model.h),
        "J": [{"i": min(k), "j": max(k), "value": v} for k, v in model.terms() if len(k) == 2],
        "K": [{"spins": sorted(k), "value": v} for k, v in model.terms() if len(k) > 2],
    }


def dump_model(model: LogicalModel, path: str | Path | None = None) -> str:
    text = json.dumps(model_to_dict(model), indent=1)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def program_to_dict(program) -> dict:
    """Plain-data view of a compiled program (energies as floats, Delta applied)."""
    groups = []
    for g in program.groups:
        glob = g.face_sites + g.ancilla_sites
        groups.append({
            "face": g.face_id,
            "variant": g.variant,
            "target": g.target,
            "face_sites": list(g.face_sites),
            "ancilla_sites": list(g.ancilla_sites),
            "constant": g.Delta * float(g.constant),
            "terms": [
                {"kind": t.kind, "sites": [glob[s] for s in t.sites], "strength": g.Delta * float(t.strength)}
                for t in g.terms
            ],
        })
    return {
        "code": program.code.name,
        "variant": program.variant,
        "Delta": program.Delta,
        "ratio": None if program.ratio is None else str(program.ratio),
        "sites": [{"name": s.name, "dim": s.dim, "role": s.role} for s in program.sites],
        "fields": list(program.fields),
        "groups": groups,
        "total_dim": program.total_dim,
        "metadata": program.metadata,
    }


def dump_program(program, path: str | Path | None = None) -> str:
    text = json.dumps(program_to_dict(program), indent=1)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


EXAMPLE_CODES = ("reflection_gadget", "hub_strip")


def example_code_path(name: str) -> Path:
    """Path of a code file shipped with the package (see ``EXAMPLE_CODES``)."""
    if name not in EXAMPLE_CODES:
        raise InvalidParameterError(f"unknown example {name!r}; choose from {EXAMPLE_CODES}")
    return Path(__file__).with_name("data") / f"{name}.json"


def load_example_code(name: str) -> ParityCode:
    return load_custom_code(example_code_path(name))
