"""Command-line front end: ``gridctrl <subcommand> ...``.

Output is JSON on stdout by default (``--format csv`` where tabular), floats
printed with 17 significant digits.  Exit codes: 0 success, 1 domain error
(including an uncontrollable verdict under ``--require-controllable``),
2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .controllability import (
    ModelParams,
    build_second_order,
    in_degenerate_set,
    kalman_rank,
    min_control_set,
    pbh_test,
    second_order_controllable,
)
from .diophantine import classify_quadruple
from .errors import GridCtrlError, UsageError
from .graphs import GraphSpec, build_laplacian, node_from_linear
from .multiplicity import exact_multiplicity_report
from .sim import PatternFormat, export_pattern, gramian_steer, integrate

OUTPUT_DIR_ENV = "GRIDCTRL_OUTPUT_DIR"


def _num(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, complex):
        return dumps({"re": obj.real, "im": obj.imag}, indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _num(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


_NODE_TOKEN = re.compile(r"\s*(?:\(\s*(\d+)\s*,\s*(\d+)\s*\)|(\d+))\s*(?:,|$)")


def parse_nodes(text: str | None) -> list:
    """``"0,1,(2,3)"`` → ``[0, 1, (2, 3)]``; coordinates are ``(outer, inner)``."""
    if text is None or not text.strip():
        return []
    out: list = []
    pos = 0
    while pos < len(text):
        match = _NODE_TOKEN.match(text, pos)
        if not match or match.end() == pos:
            raise UsageError(f"cannot parse node list {text!r} near position {pos}")
        if match.group(3) is not None:
            out.append(int(match.group(3)))
        else:
            out.append((int(match.group(1)), int(match.group(2))))
        pos = match.end()
    return out


def parse_params(text: str) -> ModelParams:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot parse params {text!r}; expected a,b,c,d,nu1,nu2") from exc
    return ModelParams.from_sequence(values)


def _spec(args) -> GraphSpec:
    return GraphSpec(args.topology, args.m, args.n)


def _coords(spec: GraphSpec, nodes) -> list[list[int]]:
    return [[node_from_linear(spec, i).outer, node_from_linear(spec, i).inner] for i in nodes]


def cmd_spectrum(args) -> tuple[object, int]:
    from .spectra import spectrum_rows

    return spectrum_rows(_spec(args)), 0


def cmd_multiplicity(args) -> tuple[object, int]:
    if args.sweep is None:
        return exact_multiplicity_report(_spec(args)).to_dict(), 0
    M, N = args.sweep
    lo_m, lo_n = (3, 2) if args.topology == "cylinder" else (1, 1)
    rows = []
    for m in range(lo_m, M + 1):
        for n in range(lo_n, N + 1):
            rep = exact_multiplicity_report(GraphSpec(args.topology, m, n))
            rows.append(
                {"m": m, "n": n, "psi": rep.psi, "phi": rep.phi, "witness_eigenvalue": rep.witness_class.value}
            )
    return rows, 0


def cmd_min_controls(args) -> tuple[object, int]:
    spec = _spec(args)
    control = min_control_set(spec)
    report = pbh_test(spec, control)
    rank = kalman_rank(build_laplacian(spec), control.matrix)
    payload = {
        "spec": str(spec),
        "nodes": list(control.nodes),
        "coordinates": _coords(spec, control.nodes),
        "verification": report.to_dict(),
        "kalman_rank": rank,
        "node_count": spec.node_count,
    }
    return payload, 0


def cmd_verify(args) -> tuple[object, int]:
    spec = _spec(args)
    report = pbh_test(spec, parse_nodes(args.nodes))
    code = 1 if args.require_controllable and not report.controllable else 0
    return report.to_dict(), code


def cmd_second_order(args) -> tuple[object, int]:
    spec = _spec(args)
    params = parse_params(args.params)
    B = parse_nodes(args.b_nodes)
    C = parse_nodes(args.c_nodes)
    report = second_order_controllable(params, spec, B or None, C or None)
    payload = report.to_dict()
    payload["degeneracy"] = in_degenerate_set(params, spec).to_dict()
    code = 1 if args.require_controllable and not report.controllable else 0
    return payload, code


def cmd_diophantine(args) -> tuple[object, int]:
    return classify_quadruple(args.angles).to_dict(), 0


def _load_scenario(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read scenario {path!r}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("scenario must be a JSON object")
    return data


def _scenario_system(sc: dict):
    try:
        spec = GraphSpec(sc["topology"], sc["m"], sc.get("n"))
        raw = sc["params"]
        params = ModelParams(**raw) if isinstance(raw, dict) else ModelParams.from_sequence(raw)
    except KeyError as exc:
        raise UsageError(f"scenario is missing {exc}") from exc
    except GridCtrlError:
        raise
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid scenario: {exc}") from exc
    B = sc.get("b_nodes")
    C = sc.get("c_nodes")
    if B == "min":
        B = list(min_control_set(spec).nodes)
    if C == "min":
        C = list(min_control_set(spec).nodes)
    B = [tuple(x) if isinstance(x, list) else x for x in (B or [])]
    C = [tuple(x) if isinstance(x, list) else x for x in (C or [])]
    return spec, params, build_second_order(params, spec, B or None, C or None)


def _vector(desc, size: int, rng: np.random.Generator, name: str) -> np.ndarray:
    """``None``/"zeros", "random", ``{"unit": k}`` or an explicit list."""
    if desc is None or desc == "zeros":
        return np.zeros(size)
    if desc == "random":
        return rng.standard_normal(size)
    if isinstance(desc, dict) and "unit" in desc:
        v = np.zeros(size)
        v[int(desc["unit"])] = 1.0
        return v
    v = np.asarray(desc, dtype=float)
    if v.shape != (size,):
        raise UsageError(f"{name} must have length {size}")
    return v


def _output_path(name: str) -> Path:
    path = Path(name)
    if not path.is_absolute():
        path = Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _export(args, sc: dict, spec: GraphSpec, state: np.ndarray) -> str | None:
    target = args.pattern_out or sc.get("pattern_out")
    if not target:
        return None
    fmt = PatternFormat(args.pattern_format or sc.get("pattern_format", "csv"))
    return export_pattern(state, spec, args.channel, _output_path(target), fmt)


def cmd_simulate(args) -> tuple[object, int]:
    sc = _load_scenario(args.scenario)
    spec, params, system = _scenario_system(sc)
    rng = np.random.default_rng(args.seed)
    z0 = _vector(sc.get("z0"), 2 * spec.node_count, rng, "z0")
    u = sc.get("u")
    T = float(sc.get("T", 1.0))
    dt = float(sc.get("dt", 1e-3))
    traj = integrate(system, u, z0, T, dt)
    payload = {
        "spec": str(spec),
        "params": list(params.as_tuple()),
        "T": T,
        "steps": len(traj.times) - 1,
        "final_state": traj.final,
        "pattern_file": _export(args, sc, spec, traj.final),
    }
    return payload, 0


def cmd_steer(args) -> tuple[object, int]:
    sc = _load_scenario(args.scenario)
    spec, params, system = _scenario_system(sc)
    rng = np.random.default_rng(args.seed)
    size = 2 * spec.node_count
    z0 = _vector(sc.get("z0"), size, rng, "z0")
    target = _vector(sc.get("target", "random"), size, rng, "target")
    T = float(sc.get("T", 5.0))
    dt = float(sc.get("dt", 1e-3))
    plan = gramian_steer(system, z0, target, T, int(sc.get("steps", 2000)))
    traj = integrate(system, plan.control, z0, T, dt)
    err = float(np.linalg.norm(traj.final - target))
    payload = {
        "spec": str(spec),
        "params": list(params.as_tuple()),
        "T": T,
        "gramian_condition": plan.gramian_condition,
        "target": target,
        "final_state": traj.final,
        "terminal_error": err,
        "relative_terminal_error": err / max(float(np.linalg.norm(target)), 1e-300),
        "control_samples": [[t, u] for t, u in plan.control_samples(int(sc.get("samples", 11)))],
        "pattern_file": _export(args, sc, spec, traj.final),
    }
    return payload, 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gridctrl", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default=None, help="output format")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized inputs")
    common.add_argument("--output", help="write the payload to this file instead of stdout")

    graph = argparse.ArgumentParser(add_help=False)
    graph.add_argument("--topology", required=True, choices=("path", "cycle", "grid", "cylinder"))
    graph.add_argument("--m", type=int, required=True)
    graph.add_argument("--n", type=int, default=None)

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common, graph], help="exact spectrum table")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("multiplicity", parents=[common, graph], help="largest multiplicity / minimal control count")
    p.add_argument("--sweep", nargs=2, type=int, metavar=("M", "N"), help="table over all m <= M, n <= N")
    p.set_defaults(func=cmd_multiplicity)

    p = sub.add_parser("min-controls", parents=[common, graph], help="constructive minimal control set")
    p.set_defaults(func=cmd_min_controls)

    p = sub.add_parser("verify", parents=[common, graph], help="PBH test of a control node set")
    p.add_argument("--nodes", required=True, help='linear indices and/or "(outer,inner)" pairs, comma separated')
    p.add_argument("--require-controllable", action="store_true", help="exit 1 when uncontrollable")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("second-order", parents=[common, graph], help="controllability of the Turing lift")
    p.add_argument("--params", required=True, help="a,b,c,d,nu1,nu2 (use --params=... for a leading minus)")
    p.add_argument("--b-nodes", default="", help="nodes actuated in the first channel")
    p.add_argument("--c-nodes", default="", help="nodes actuated in the second channel")
    p.add_argument("--require-controllable", action="store_true")
    p.set_defaults(func=cmd_second_order)

    p = sub.add_parser("diophantine", parents=[common], help="vanishing cosine sums")
    dsub = p.add_subparsers(dest="action", required=True)
    q = dsub.add_parser("classify", parents=[common], help="classify four angles p/q (units of pi)")
    q.add_argument("angles", nargs=4)
    q.set_defaults(func=cmd_diophantine)

    for name, func, text in (("simulate", cmd_simulate, "RK4 integration"), ("steer", cmd_steer, "Gramian steering")):
        p = sub.add_parser(name, parents=[common], help=f"{text} from a JSON scenario")
        p.add_argument("scenario", help="JSON scenario file")
        p.add_argument("--pattern-out", help=f"export the final pattern (relative to ${OUTPUT_DIR_ENV})")
        p.add_argument("--pattern-format", choices=("csv", "pgm"))
        p.add_argument("--channel", type=int, choices=(1, 2), default=1)
        p.set_defaults(func=func)
    return parser


def _render(payload, fmt: str | None, default: str) -> str:
    fmt = fmt or default
    if fmt == "csv":
        if isinstance(payload, dict):
            flat = {}
            for k, v in payload.items():
                if isinstance(v, np.ndarray):
                    v = v.tolist()
                if isinstance(v, list) and all(isinstance(x, (int, float)) for x in v):
                    flat[k] = " ".join(_num(x) if isinstance(x, float) else str(x) for x in v)
                elif not isinstance(v, (list, dict)):
                    flat[k] = v
            payload = [flat]
        return _csv_text(payload)
    return dumps(payload) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload, code = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"gridctrl: error: {exc}", file=sys.stderr)
        return 2
    except GridCtrlError as exc:
        print(f"gridctrl: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    default = "csv" if getattr(args, "sweep", None) else "json"
    text = _render(payload, args.format, default)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
