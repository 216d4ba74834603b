"""Reading and writing system files and knowns files.

Both are YAML documents (JSON is accepted, being a subset).  The field
reference lives in ``docs/format.md``.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .counterexamples import ExampleSpec, build_example
from .inequalities import Known
from .spaces import MinimalSystem, NormSpec


class InputError(ValueError):
    """Malformed or inconsistent user input (CLI exit code 2)."""


@dataclass
class LoadedSystem:
    system: MinimalSystem
    example: ExampleSpec | None = None
    source: str = ""


def plain(obj):
    """Recursively convert numpy scalars/arrays and tuples to JSON types."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def read_document(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise InputError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected a mapping at top level")
    return doc


def system_from_dict(d: dict) -> LoadedSystem:
    """Build a system from a parsed document, including the family shortcut."""
    try:
        if "family" in d:
            spec = ExampleSpec.from_dict(d)
            return LoadedSystem(build_example(spec), spec)
        missing = [k for k in ("norm", "basis") if k not in d]
        if missing:
            raise InputError(f"missing fields {missing}")
        norm = NormSpec.from_dict(d["norm"])
        basis = np.array(d["basis"], dtype=float, ndmin=2)
        if "ambient_dim" in d and int(d["ambient_dim"]) != basis.shape[1]:
            raise InputError(
                f"ambient_dim={d['ambient_dim']} but basis rows have length {basis.shape[1]}")
        kw = {"labels": d.get("labels"), "name": str(d.get("name", ""))}
        if d.get("duals") is None:
            sys = MinimalSystem.from_basis(basis, norm, **kw)
        else:
            sys = MinimalSystem(basis, np.array(d["duals"], dtype=float, ndmin=2), norm, **kw)
        return LoadedSystem(sys)
    except InputError:
        raise
    except (KeyError, TypeError, ValueError, np.linalg.LinAlgError) as exc:
        raise InputError(f"invalid system description: {exc}") from exc


def load_system(path) -> LoadedSystem:
    loaded = system_from_dict(read_document(path))
    loaded.source = str(path)
    return loaded


def system_document(loaded: LoadedSystem) -> dict:
    """Self-contained document that reloads to the same system."""
    if loaded.example is not None:
        return loaded.example.to_dict()
    d = loaded.system.to_dict()
    if loaded.system.name:
        d["name"] = loaded.system.name
    return d


def save_system(sys: MinimalSystem, path) -> None:
    Path(path).write_text(yaml.safe_dump(sys.to_dict(), sort_keys=True), encoding="utf-8")


def system_hash(sys: MinimalSystem) -> str:
    blob = json.dumps(plain(sys.to_dict()), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def knowns_from_dict(d: dict) -> dict[str, Known]:
    """``{name: value}`` or ``{name: {value, direction, note}}``; bare numbers are upper bounds."""
    out = {}
    for name, spec in d.items():
        try:
            if isinstance(spec, dict):
                out[str(name)] = Known(float(spec["value"]), spec.get("direction", "upper"),
                                       str(spec.get("note", "")))
            else:
                out[str(name)] = Known(float(spec))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad known {name!r}: {exc}") from exc
    return out


def load_knowns(path) -> dict[str, Known]:
    doc = read_document(path)
    return knowns_from_dict(doc.get("knowns", doc))
