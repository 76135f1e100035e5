"""Command-line front end: simulate / design / poles.

Configurations are JSON documents (see README for the schema).  Exit
codes: 0 ok, 2 config error, 3 diverged simulation, 4 unstable design,
5 solver failure or inconclusive root search.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .charpoly import RootFindConfig, find_roots
from .design import (DesignSpecPd, DesignSpecPi, design_pd_fractional,
                     design_pd_integer, design_pi)
from .errors import ConfigError, DivergedError, FracregError, NoSolutionError
from .model import (PdController, PiController, Plant, build_pd_model,
                    build_pi_model, char_poly_pd, char_poly_pi)
from .simulate import SimConfig, StepInput, simulate_state_space

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_UNSTABLE = 4
EXIT_SOLVER = 5

_FLOAT_FMT = "%.12g"


def _get(block, key, path, expect=None):
    if key not in block:
        raise ConfigError(f"missing key '{path}.{key}'", key=f"{path}.{key}")
    value = block[key]
    if expect is not None and not isinstance(value, expect):
        raise ConfigError(f"key '{path}.{key}' has wrong type", key=f"{path}.{key}")
    return value


def _num(block, key, path, default=None):
    if default is not None and key not in block:
        return default
    value = _get(block, key, path)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"key '{path}.{key}' must be a number", key=f"{path}.{key}")
    return float(value)


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    return doc


def parse_plant(doc) -> Plant:
    block = _get(doc, "plant", "", dict)
    try:
        return Plant(
            a0=_num(block, "a0", "plant"),
            a1=_num(block, "a1", "plant"),
            a2=_num(block, "a2", "plant"),
            alpha=_num(block, "alpha", "plant"),
            beta=_num(block, "beta", "plant"),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid 'plant' block: {exc}", key="plant")


def parse_controller(doc):
    block = _get(doc, "controller", "", dict)
    kind = _get(block, "type", "controller")
    try:
        if kind == "pd":
            return PdController(
                K=_num(block, "K", "controller"),
                Td=_num(block, "Td", "controller"),
                delta=_num(block, "delta", "controller"),
            )
        if kind == "pi":
            return PiController(
                K=_num(block, "K", "controller"),
                Ti=_num(block, "Ti", "controller"),
                lam=_num(block, "lambda", "controller"),
            )
    except ValueError as exc:
        raise ConfigError(f"invalid 'controller' block: {exc}", key="controller")
    raise ConfigError(f"unknown controller type {kind!r}", key="controller.type")


def _parse_poles(block, path):
    raw = _get(block, "poles", path, list)
    poles = []
    for item in raw:
        if not (isinstance(item, list) and len(item) == 2):
            raise ConfigError(f"'{path}.poles' entries must be [re, im] pairs",
                              key=f"{path}.poles")
        poles.append(complex(item[0], item[1]))
    return poles


def parse_sim(doc) -> SimConfig:
    block = _get(doc, "sim", "", dict)
    inp = block.get("input", {"type": "step", "amplitude": 1.0})
    if not isinstance(inp, dict):
        raise ConfigError("'sim.input' must be an object", key="sim.input")
    kind = inp.get("type", "step")
    if kind == "step":
        input_spec = StepInput(amplitude=_num(inp, "amplitude", "sim.input", default=1.0))
    elif kind == "samples":
        input_spec = _get(inp, "values", "sim.input", list)
    else:
        raise ConfigError(f"unknown input type {kind!r}", key="sim.input.type")
    memory_len = block.get("memory_len")
    if memory_len is not None:
        memory_len = _num(block, "memory_len", "sim")
    try:
        return SimConfig(
            step=_num(block, "h", "sim"),
            t_end=_num(block, "t_end", "sim"),
            memory_len=memory_len,
            input=input_spec,
        )
    except ValueError as exc:
        raise ConfigError(f"invalid 'sim' block: {exc}", key="sim")


def _out_path(doc, args, key, default):
    out_dir = Path(args.out) if args.out else Path(args.config).resolve().parent
    name = doc.get("output", {}).get(key, default)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / name


def write_trajectory_csv(path, traj):
    header = ["t", "w", "y"] + [f"x{i + 1}" for i in range(len(traj.states))]
    cols = [traj.times, traj.input, traj.output, *traj.states]
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*cols):
            fh.write(",".join(_FLOAT_FMT % v for v in row) + "\n")


def _controller_dict(ctrl):
    if isinstance(ctrl, PdController):
        return {"type": "pd", "K": ctrl.K, "Td": ctrl.Td, "delta": ctrl.delta}
    return {"type": "pi", "K": ctrl.K, "Ti": ctrl.Ti, "lambda": ctrl.lam}


def _report_roots(report):
    return {
        "roots": [
            {"re": r.value.real, "im": r.value.imag, "residual": r.residual}
            for r in report.roots
        ],
        "method": report.method,
        "verdict": report.verdict,
        "coverage_caveat": report.coverage_caveat,
    }


def _char_poly_for(plant, ctrl):
    if isinstance(ctrl, PdController):
        return char_poly_pd(plant, ctrl)
    return char_poly_pi(plant, ctrl)


def cmd_simulate(args) -> int:
    doc = load_config(args.config)
    plant = parse_plant(doc)
    ctrl = parse_controller(doc)
    cfg = parse_sim(doc)
    if isinstance(ctrl, PdController):
        model = build_pd_model(plant, ctrl)
    else:
        model = build_pi_model(plant, ctrl)
    csv_path = _out_path(doc, args, "trajectory_csv", "trajectory.csv")
    try:
        traj = simulate_state_space(model, cfg)
    except DivergedError as exc:
        if exc.trajectory is not None:
            write_trajectory_csv(csv_path, exc.trajectory)
        print(f"simulation diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    write_trajectory_csv(csv_path, traj)
    print(csv_path)
    return EXIT_OK


def _resolve_design(doc, plant):
    block = _get(doc, "design", "", dict)
    kind = block.get("type", "pd")
    t0 = time.perf_counter()
    if kind == "pd":
        poles = _parse_poles(block, "design")
        pole = next((p for p in poles if p.imag > 0), poles[0] if poles else None)
        if pole is None:
            raise ConfigError("'design.poles' must contain at least one pole",
                              key="design.poles")
        try:
            if block.get("integer"):
                spec = DesignSpecPd(plant=plant, pole=pole)
                ctrl = design_pd_integer(spec)
            else:
                spec = DesignSpecPd(
                    plant=plant,
                    pole=pole,
                    ess_percent=_num(block, "ess", "design") if "ess" in block else None,
                    K_override=_num(block, "K", "design") if "K" in block else None,
                )
                ctrl = design_pd_fractional(spec)
        except ValueError as exc:
            raise ConfigError(f"invalid 'design' block: {exc}", key="design")
    elif kind == "pi":
        poles = _parse_poles(block, "design")
        try:
            ctrl = design_pi(DesignSpecPi(plant=plant, poles=tuple(poles)))
        except ValueError as exc:
            raise ConfigError(f"invalid 'design' block: {exc}", key="design")
    else:
        raise ConfigError(f"unknown design type {kind!r}", key="design.type")
    return ctrl, time.perf_counter() - t0


def cmd_design(args) -> int:
    doc = load_config(args.config)
    plant = parse_plant(doc)
    if "controller" in doc and "design" in doc:
        raise ConfigError("give 'controller' or 'design', not both", key="design")
    try:
        ctrl, design_s = _resolve_design(doc, plant)
    except NoSolutionError as exc:
        print(f"design solver failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    poly = _char_poly_for(plant, ctrl)
    t0 = time.perf_counter()
    report = find_roots(poly, RootFindConfig())
    roots_s = time.perf_counter() - t0
    payload = {
        "config": doc,
        "controller": _controller_dict(ctrl),
        "characteristic_polynomial": [[c, e] for c, e in poly.terms],
        **_report_roots(report),
        "timings": {"design_s": design_s, "roots_s": roots_s},
    }
    report_path = _out_path(doc, args, "report_json", "report.json")
    report_path.write_text(json.dumps(payload, indent=2) + "\n")
    print(report_path)
    return EXIT_UNSTABLE if report.verdict == "unstable" else EXIT_OK


def cmd_poles(args) -> int:
    doc = load_config(args.config)
    plant = parse_plant(doc)
    ctrl = parse_controller(doc)
    poly = _char_poly_for(plant, ctrl)
    t0 = time.perf_counter()
    report = find_roots(poly, RootFindConfig())
    payload = {
        "config": doc,
        "controller": _controller_dict(ctrl),
        "characteristic_polynomial": [[c, e] for c, e in poly.terms],
        **_report_roots(report),
        "timings": {"roots_s": time.perf_counter() - t0},
    }
    out_path = _out_path(doc, args, "roots_json", "poles.json")
    out_path.write_text(json.dumps(payload, indent=2) + "\n")
    print(out_path)
    if report.verdict == "inconclusive":
        print("root search was inconclusive", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracreg",
        description="Fractional-order control loop simulation, pole analysis and design.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in (("simulate", cmd_simulate), ("design", cmd_design), ("poles", cmd_poles)):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="path to a RunConfig JSON file")
        sp.add_argument("--out", help="output directory (default: config directory)")
        sp.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoSolutionError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except FracregError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
