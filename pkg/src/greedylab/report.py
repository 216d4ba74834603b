"""Machine-readable run reports.

A report is one JSON document.  Everything except the ``timings`` block is
deterministic for a fixed invocation, so two runs can be diffed with
:meth:`Report.body`.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from . import __version__
from .corpus import GENERATOR_ID
from .io import plain

TOOL = "greedylab"
FAIL = "FAIL"


@dataclass
class Report:
    command: str
    system_hash: str = ""
    system: dict = field(default_factory=dict)
    seed: int | None = None
    generator: str = GENERATOR_ID
    entries: list[dict] = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    tool: str = TOOL
    version: str = __version__

    def add(self, operation: str, name: str, status: str | None = None, *,
            inputs=None, outputs=None, witness=None) -> dict:
        entry = {"operation": operation, "name": name, "status": status,
                 "inputs": plain(inputs or {}), "outputs": plain(outputs or {}),
                 "witness": plain(witness or {})}
        if status == FAIL:
            entry["reproducer"] = {"system": self.system, "witness": entry["witness"],
                                   "inputs": entry["inputs"]}
        self.entries.append(entry)
        return entry

    @property
    def failed(self) -> bool:
        return any(e["status"] == FAIL for e in self.entries)

    def body(self) -> dict:
        return {"tool": self.tool, "version": self.version, "command": self.command,
                "system_hash": self.system_hash, "system": self.system, "seed": self.seed,
                "generator": self.generator, "entries": self.entries}

    def to_dict(self) -> dict:
        return {**self.body(), "timings": self.timings}

    def to_json(self) -> str:
        return json.dumps(plain(self.to_dict()), sort_keys=True, indent=2) + "\n"

    def body_json(self) -> str:
        return json.dumps(plain(self.body()), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        return cls(command=d["command"], system_hash=d.get("system_hash", ""),
                   system=d.get("system", {}), seed=d.get("seed"),
                   generator=d.get("generator", GENERATOR_ID), entries=d.get("entries", []),
                   timings=d.get("timings", {}), tool=d.get("tool", TOOL),
                   version=d.get("version", __version__))

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def to_tabular(self) -> str:
        """Flat CSV: one row per entry, scalar outputs spread into columns."""
        keys: list[str] = []
        for e in self.entries:
            for k, v in e["outputs"].items():
                if _scalar(v) and k not in keys:
                    keys.append(k)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["operation", "name", "status"] + keys)
        for e in self.entries:
            out = e["outputs"]
            w.writerow([e["operation"], e["name"], e["status"] or ""]
                       + [out.get(k, "") if _scalar(out.get(k)) else "" for k in keys])
        return buf.getvalue()

    def render(self, fmt: str = "structured") -> str:
        if fmt == "structured":
            return self.to_json()
        if fmt == "tabular":
            return self.to_tabular()
        raise ValueError(f"unknown format {fmt!r}")


def _scalar(v) -> bool:
    return isinstance(v, (int, float, str, bool)) or v is None
