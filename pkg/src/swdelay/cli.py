"""Command-line interface.

Subcommands map onto the analysis modules: ``certify`` (common certificate
search), ``radius`` (bound computation via --theorem2 / --theorem3 /
--corollary5), ``subsystem-radius`` (single positive subsystem) and
``simulate`` (trajectory CSV plus a summary). Subsystem numbers on the
command line and in CSV output are 1-based; the Python API is 0-based.

Exit codes: 0 success (a diverging simulation is a result, not an error),
1 malformed input (file, flag grammar, missing section, step mismatch),
2 negative analysis outcome (infeasible certificate, failed preconditions).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import radius as radius_mod
from .certify import find_common_lclf, verify_certificate
from .errors import StepMismatch, SwdelayError
from .perturb import (PerturbationStructure, StructureQuad, apply,
                      disturbance_norm, sample_disturbance)
from .simulate import (Constant, Periodic, RandomDwell, decay_envelope_check,
                       simulate, trajectory_to_csv)
from .sysfile import (SystemFile, SystemFileError, load_disturbance_file,
                      load_system_file)

OK, INPUT_ERROR, NEGATIVE = 0, 1, 2


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        f = float(value)
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _rounded(value):
    if isinstance(value, float):
        return round(value, 4)
    if isinstance(value, list):
        return [_rounded(v) for v in value]
    if isinstance(value, dict):
        return {k: _rounded(v) for k, v in value.items()}
    return value


def _emit(payload: dict) -> None:
    doc = _jsonable(payload)
    doc["display"] = _rounded({k: v for k, v in doc.items()
                               if k not in ("display",)})
    print(json.dumps(doc, indent=2))


def _fail(message: str, code: int) -> int:
    print(json.dumps({"error": message}), file=sys.stderr)
    return code


def _load(path: str) -> SystemFile:
    return load_system_file(path)


def _cmd_certify(args) -> int:
    try:
        sf = _load(args.file)
    except SystemFileError as exc:
        return _fail(str(exc), INPUT_ERROR)
    cert = find_common_lclf(sf.system)
    if cert is None:
        _emit({"status": "infeasible", "xi": None, "margin": None,
               "alpha": None, "M": None})
        return NEGATIVE
    ok, slacks = verify_certificate(sf.system, cert.xi)
    _emit({"status": "certified", "xi": cert.xi, "margin": cert.margin,
           "alpha": cert.decay_alpha, "M": cert.envelope_gain,
           "verified": ok, "min_slack": float(slacks.min())})
    return OK


def _bound_structure(p: PerturbationStructure) -> StructureQuad:
    """Entrywise max of |D|, |E| over subsystems (dominates each by
    construction); shapes must agree across subsystems."""
    def stack(name):
        mats = [np.abs(getattr(q, name)) for q in p.quads]
        shape = mats[0].shape
        if any(m.shape != shape for m in mats):
            raise SystemFileError(
                f"perturbation {name} shapes differ between subsystems; "
                "a common bounding structure needs equal shapes")
        return np.maximum.reduce(mats)
    return StructureQuad(stack("d0"), stack("e0"), stack("d1"), stack("e1"))


def _cmd_radius(args) -> int:
    try:
        sf = _load(args.file)
    except SystemFileError as exc:
        return _fail(str(exc), INPUT_ERROR)
    try:
        if args.theorem2:
            if sf.perturbation is None:
                return _fail("theorem2 needs a 'perturbation' section",
                             INPUT_ERROR)
            report = radius_mod.radius_bounds_theorem2(sf.system,
                                                       sf.perturbation)
        elif args.theorem3:
            if sf.perturbation is None:
                return _fail("theorem3 needs a 'perturbation' section",
                             INPUT_ERROR)
            if sf.bound is None:
                return _fail("theorem3 needs a 'bound' section", INPUT_ERROR)
            bq = _bound_structure(sf.perturbation)
            lower = radius_mod.radius_lower_theorem3(
                sf.system, sf.perturbation, sf.bound, bq)
            report = radius_mod.RadiusReport(
                lower=lower, upper=None,
                lower_method="Theorem3-Domination", upper_method=None)
        else:
            if sf.bound is None:
                return _fail("corollary5 needs a 'bound' section", INPUT_ERROR)
            report = radius_mod.radius_bounds_corollary5(sf.system, sf.bound)
    except SystemFileError as exc:
        return _fail(str(exc), INPUT_ERROR)
    except SwdelayError as exc:
        return _fail(f"{type(exc).__name__}: {exc}", NEGATIVE)
    _emit({"lower": report.lower, "upper": report.upper,
           "lower_method": report.lower_method,
           "upper_method": report.upper_method,
           "xi": report.certificate_xi})
    return OK


def _cmd_subsystem_radius(args) -> int:
    try:
        sf = _load(args.file)
    except SystemFileError as exc:
        return _fail(str(exc), INPUT_ERROR)
    k = args.k - 1
    if not 0 <= k < sf.system.size:
        return _fail(f"--k must be in 1..{sf.system.size}", INPUT_ERROR)
    if sf.perturbation is not None:
        quad = sf.perturbation.quads[k]
    else:
        quad = StructureQuad.identity(sf.system.n)
    sub = sf.system.subsystems[k]
    try:
        lower, upper = radius_mod.subsystem_radius_positive(sub, quad)
    except SwdelayError as exc:
        return _fail(f"{type(exc).__name__}: {exc}", NEGATIVE)
    exact = bool(np.array_equal(quad.d0, quad.d1) or
                 np.array_equal(quad.e0, quad.e1))
    _emit({"lower": lower, "upper": upper, "exact": exact})
    return OK


def _parse_signal(spec: str, n_sub: int):
    kind, _, rest = spec.partition(":")
    if kind == "constant":
        return Constant(int(rest) - 1)
    if kind == "periodic":
        entries = []
        for chunk in rest.split(","):
            k, _, dur = chunk.partition(":")
            entries.append((int(k) - 1, float(dur)))
        return Periodic(tuple(entries))
    if kind == "random":
        lo, hi, seed = rest.split(",")
        return RandomDwell(float(lo), float(hi), int(seed))
    raise ValueError(f"unknown signal kind {kind!r}")


def _parse_history(spec: str, n: int):
    kind, _, rest = spec.partition(":")
    if kind != "const":
        raise ValueError(f"unknown history kind {kind!r}")
    values = [float(v) for v in rest.split(",")]
    if len(values) != n:
        raise ValueError(f"history needs {n} components")
    return np.array(values)


def _cmd_simulate(args) -> int:
    try:
        sf = _load(args.file)
    except SystemFileError as exc:
        return _fail(str(exc), INPUT_ERROR)
    sys_model = sf.system
    try:
        signal = _parse_signal(args.signal, sys_model.size)
        history = (_parse_history(args.history, sys_model.n)
                   if args.history else np.ones(sys_model.n))
    except (ValueError, TypeError) as exc:
        return _fail(f"bad flag: {exc}", INPUT_ERROR)

    disturbance = None
    if args.disturb:
        kind, _, rest = args.disturb.partition(":")
        try:
            if kind == "file":
                disturbance = load_disturbance_file(rest, sys_model.size)
            elif kind == "sample":
                if sf.perturbation is None:
                    return _fail("sampling a disturbance needs a "
                                 "'perturbation' section", INPUT_ERROR)
                norm_s, seed_s = rest.split(",")
                delays = tuple(
                    tuple(d for d, _ in s.discrete) or (1.0,)
                    for s in sys_model.subsystems)
                disturbance = sample_disturbance(
                    sf.perturbation, float(norm_s), int(seed_s),
                    jump_delays=delays)
            else:
                return _fail(f"unknown disturb kind {kind!r}", INPUT_ERROR)
        except (ValueError, SystemFileError) as exc:
            return _fail(f"bad disturbance: {exc}", INPUT_ERROR)
    if disturbance is not None:
        if sf.perturbation is None:
            return _fail("applying a disturbance needs a 'perturbation' "
                         "section", INPUT_ERROR)
        try:
            sys_model = apply(sys_model, sf.perturbation, disturbance)
        except SwdelayError as exc:
            return _fail(f"bad disturbance: {exc}", INPUT_ERROR)

    try:
        traj = simulate(sys_model, history, signal, args.horizon, args.dt)
    except (StepMismatch, ValueError) as exc:
        return _fail(f"{type(exc).__name__}: {exc}", INPUT_ERROR)

    if args.out:
        with open(args.out, "w") as fh:
            trajectory_to_csv(traj, fh)

    cert = find_common_lclf(sys_model)
    envelope_ok = None
    if cert is not None and not traj.diverged:
        history_norm = float(np.abs(history).max())
        envelope_ok = decay_envelope_check(traj, cert, history_norm)
    summary = {
        "final_norm": float(np.abs(traj.final_state).max()),
        "diverged": traj.diverged,
        "envelope_ok": envelope_ok,
        "certified": cert is not None,
        "steps": int(len(traj.times) - 1),
    }
    if disturbance is not None:
        summary["disturbance_norm"] = disturbance_norm(disturbance)
    _emit(summary)
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swdelay",
        description="Stability certificates, stability-radius bounds and "
                    "simulation for switched linear time-delay systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="search for a common certificate")
    p.add_argument("file")
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("radius", help="stability-radius bounds")
    p.add_argument("file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--theorem2", action="store_true")
    group.add_argument("--theorem3", action="store_true")
    group.add_argument("--corollary5", action="store_true")
    p.set_defaults(func=_cmd_radius)

    p = sub.add_parser("subsystem-radius",
                       help="radius of one positive subsystem")
    p.add_argument("file")
    p.add_argument("--k", type=int, required=True,
                   help="subsystem number (1-based)")
    p.set_defaults(func=_cmd_subsystem_radius)

    p = sub.add_parser("simulate", help="integrate and write a CSV")
    p.add_argument("file")
    p.add_argument("--signal", required=True,
                   help="constant:K | periodic:K1:D1,K2:D2,... | "
                        "random:MIN,MAX,SEED (K is 1-based)")
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--history", help="const:v1,...,vn (default: ones)")
    p.add_argument("--disturb", help="file:PATH | sample:NORM,SEED")
    p.add_argument("--out", help="trajectory CSV path")
    p.set_defaults(func=_cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code not in (0, None) else 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
