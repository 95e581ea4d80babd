"""JSON file format for systems, perturbation structures and disturbances.

Schema version 1; see docs/system-file-schema.md for the full reference.
Matrices are row-major nested lists. All model invariants are re-validated
on load and violations are reported with the JSON path of the offending
field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import SwdelayError
from .model import (DelaySubsystem, DistributedKernel, SwitchedDelaySystem)
from .perturb import (DelayDisturbance, Disturbance, PerturbationStructure,
                      StructureQuad)

SCHEMA_VERSION = 1


class SystemFileError(SwdelayError):
    """Malformed system/disturbance file; message carries the JSON path."""


@dataclass(frozen=True, eq=False)
class SystemFile:
    """Parsed contents of one system file."""

    system: SwitchedDelaySystem
    perturbation: PerturbationStructure | None
    bound: DelaySubsystem | None


def _need(obj, key, path, kind=None):
    if not isinstance(obj, dict):
        raise SystemFileError(f"{path}: expected an object")
    if key not in obj:
        raise SystemFileError(f"{path}.{key}: missing")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise SystemFileError(f"{path}.{key}: wrong type")
    return val


def _matrix(obj, path, rows=None, cols=None) -> np.ndarray:
    try:
        m = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SystemFileError(f"{path}: not a numeric matrix ({exc})")
    if m.ndim != 2:
        raise SystemFileError(f"{path}: expected a 2-D matrix")
    if rows is not None and m.shape[0] != rows:
        raise SystemFileError(f"{path}: expected {rows} rows, got {m.shape[0]}")
    if cols is not None and m.shape[1] != cols:
        raise SystemFileError(f"{path}: expected {cols} columns, "
                              f"got {m.shape[1]}")
    if not np.isfinite(m).all():
        raise SystemFileError(f"{path}: entries must be finite")
    return m


def _kernel(obj, path, n=None) -> DistributedKernel:
    grid = _need(obj, "grid", path, list)
    values = _need(obj, "values", path, list)
    if len(grid) != len(values):
        raise SystemFileError(f"{path}: grid and values lengths differ")
    mats = tuple(_matrix(v, f"{path}.values[{i}]", n, n)
                 for i, v in enumerate(values))
    try:
        return DistributedKernel(tuple(float(g) for g in grid), mats)
    except (ValueError, TypeError) as exc:
        raise SystemFileError(f"{path}: {exc}")


def _subsystem(obj, path, n=None) -> DelaySubsystem:
    a0 = _matrix(_need(obj, "A0", path), f"{path}.A0", n, n)
    terms = []
    for i, item in enumerate(obj.get("discrete") or []):
        tp = f"{path}.discrete[{i}]"
        delay = _need(item, "delay", tp, (int, float))
        mat = _matrix(_need(item, "A", tp), f"{tp}.A", n, n)
        terms.append((float(delay), mat))
    kernel = None
    if obj.get("kernel") is not None:
        kernel = _kernel(obj["kernel"], f"{path}.kernel", n)
    try:
        return DelaySubsystem(a0, tuple(terms), kernel)
    except (ValueError, TypeError) as exc:
        raise SystemFileError(f"{path}: {exc}")


def parse_system_file(doc: dict) -> SystemFile:
    """Validate a decoded JSON document into model values."""
    n = _need(doc, "n", "$", int)
    h = _need(doc, "h", "$", (int, float))
    subs_doc = _need(doc, "subsystems", "$", list)
    if not subs_doc:
        raise SystemFileError("$.subsystems: must be nonempty")
    subs = tuple(_subsystem(item, f"$.subsystems[{i}]", n)
                 for i, item in enumerate(subs_doc))
    try:
        system = SwitchedDelaySystem(n, float(h), subs)
    except (ValueError, TypeError) as exc:
        raise SystemFileError(f"$: {exc}")

    perturbation = None
    if doc.get("perturbation") is not None:
        pert_doc = doc["perturbation"]
        if not isinstance(pert_doc, list) or len(pert_doc) != len(subs):
            raise SystemFileError("$.perturbation: need one structuring "
                                  "quadruple per subsystem")
        quads = []
        for i, item in enumerate(pert_doc):
            pp = f"$.perturbation[{i}]"
            quads.append(StructureQuad(
                _matrix(_need(item, "D0", pp), f"{pp}.D0", rows=n),
                _matrix(_need(item, "E0", pp), f"{pp}.E0", cols=n),
                _matrix(_need(item, "D1", pp), f"{pp}.D1", rows=n),
                _matrix(_need(item, "E1", pp), f"{pp}.E1", cols=n)))
        perturbation = PerturbationStructure(tuple(quads))

    bound = None
    if doc.get("bound") is not None:
        bound = _subsystem(doc["bound"], "$.bound", n)
    return SystemFile(system=system, perturbation=perturbation, bound=bound)


def load_system_file(path) -> SystemFile:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SystemFileError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise SystemFileError(f"{path}: invalid JSON ({exc})")
    return parse_system_file(doc)


def parse_disturbance(doc: dict, count: int) -> Disturbance:
    """Decode a disturbance document (one (delta0, delta1) pair per k)."""
    items = _need(doc, "subsystems", "$", list)
    if len(items) != count:
        raise SystemFileError(f"$.subsystems: need {count} entries")
    parts = []
    for i, item in enumerate(items):
        pp = f"$.subsystems[{i}]"
        delta0 = _matrix(_need(item, "delta0", pp), f"{pp}.delta0")
        jumps = []
        kernel = None
        d1 = item.get("delta1") or {}
        for j, term in enumerate(d1.get("discrete") or []):
            tp = f"{pp}.delta1.discrete[{j}]"
            delay = _need(term, "delay", tp, (int, float))
            jumps.append((float(delay),
                          _matrix(_need(term, "A", tp), f"{tp}.A")))
        if d1.get("kernel") is not None:
            kernel = _kernel(d1["kernel"], f"{pp}.delta1.kernel")
        try:
            parts.append((delta0, DelayDisturbance(tuple(jumps), kernel)))
        except (ValueError, TypeError) as exc:
            raise SystemFileError(f"{pp}.delta1: {exc}")
    return Disturbance(tuple(parts))


def load_disturbance_file(path, count: int) -> Disturbance:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SystemFileError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise SystemFileError(f"{path}: invalid JSON ({exc})")
    return parse_disturbance(doc, count)


def _kernel_doc(kernel: DistributedKernel | None):
    if kernel is None:
        return None
    return {"grid": list(kernel.grid),
            "values": [v.tolist() for v in kernel.values]}


def _subsystem_doc(s: DelaySubsystem) -> dict:
    doc = {"A0": s.a0.tolist()}
    if s.discrete:
        doc["discrete"] = [{"delay": d, "A": m.tolist()}
                           for d, m in s.discrete]
    if s.kernel is not None:
        doc["kernel"] = _kernel_doc(s.kernel)
    return doc


def system_file_doc(sf: SystemFile) -> dict:
    """Serialize back to the JSON document shape (round-trips parse)."""
    doc = {
        "schema": SCHEMA_VERSION,
        "n": sf.system.n,
        "h": sf.system.h,
        "subsystems": [_subsystem_doc(s) for s in sf.system.subsystems],
    }
    if sf.perturbation is not None:
        doc["perturbation"] = [
            {"D0": q.d0.tolist(), "E0": q.e0.tolist(),
             "D1": q.d1.tolist(), "E1": q.e1.tolist()}
            for q in sf.perturbation.quads]
    if sf.bound is not None:
        doc["bound"] = _subsystem_doc(sf.bound)
    return doc
