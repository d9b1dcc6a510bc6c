"""``quasih`` command line: evolve, sweep, entanglement, verify, dyson-demo.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 input/output error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from . import analytics as an
from . import dynamics as dy
from . import dyson as ds
from . import verify as vf
from .config import ConfigError, ScenarioConfig

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_IO = 3

COLUMNS = ("t", "p", "q", "entropy_H", "entropy_hW")


class CliIOError(Exception):
    pass


def curve_columns(traj: dy.Trajectory, times: np.ndarray, bits: bool = False) -> dict[str, np.ndarray]:
    """Populations and entropies of both sides on ``times``; entropies in nats unless ``bits``."""
    p = dy.population_p(traj, times)
    q = dy.population_q(traj, times)
    unit = math.log(2) if bits else 1.0
    return {"t": times, "p": p, "q": q, "entropy_H": an.entropy(p) / unit, "entropy_hW": an.entropy(q) / unit}


def _rows(cols: dict[str, np.ndarray]) -> list[dict[str, float]]:
    n = len(cols["t"])
    return [{k: float(cols[k][i]) for k in COLUMNS} for i in range(n)]


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def render_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def render_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


# --------------------------------------------------------------------------
# subcommands


def _resolve(cfg: ScenarioConfig, args, default: str = "csv") -> tuple[str, str | None]:
    fmt = args.format or cfg.output.format or default
    out = args.out if args.out is not None else cfg.output.path
    return fmt, out


def cmd_evolve(cfg: ScenarioConfig, args) -> tuple[str, str | None]:
    fmt, out = _resolve(cfg, args)
    traj = cfg.trajectory()
    cols = curve_columns(traj, cfg.times(traj), args.bits)
    if fmt == "csv":
        return render_csv(list(COLUMNS), [[cols[k][i] for k in COLUMNS] for i in range(len(cols["t"]))]), out
    return render_json({"meta": {"command": "evolve", "version": __version__, "config": cfg.to_dict(),
                                 "entropy_unit": "bits" if args.bits else "nats"},
                        "rows": _rows(cols)}), out


def _threads() -> int:
    raw = os.environ.get("QUASIH_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError("QUASIH_THREADS", f"must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("QUASIH_THREADS", f"must be a positive integer, got {raw!r}")
    return n


def cmd_sweep(cfg: ScenarioConfig, args) -> tuple[str, str | None]:
    if cfg.sweep is None:
        raise ConfigError("sweep", "the sweep command needs a 'sweep' section")
    fmt, out = _resolve(cfg, args)
    param, values = cfg.sweep.param, list(cfg.sweep.values)

    def block(v):
        traj = cfg.trajectory(**{param: v})
        return curve_columns(traj, cfg.times(traj), args.bits)

    # results are collected in input order, so output does not depend on the thread count
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        blocks = list(pool.map(block, values))
    if fmt == "csv":
        rows = []
        for v, cols in zip(values, blocks):
            label = f"{param}={_fmt(float(v))}"
            rows.extend([label] + [cols[k][i] for k in COLUMNS] for i in range(len(cols["t"])))
        return render_csv(["block", *COLUMNS], rows), out
    doc = {
        "meta": {"command": "sweep", "version": __version__, "config": cfg.to_dict(),
                 "entropy_unit": "bits" if args.bits else "nats"},
        "blocks": [{"param": param, "value": float(v), "rows": _rows(cols)} for v, cols in zip(values, blocks)],
    }
    return render_json(doc), out


def entanglement_report(cfg: ScenarioConfig) -> dict:
    traj = cfg.trajectory()
    horizon = cfg.grid.t_max if cfg.grid.t_max is not None else 2 * math.pi / traj.omega
    sides = {}
    for side in an.Side:
        dt = an.disentanglement_times(traj, side, horizon)
        sides[side.value] = {
            "classification": dt.classification.value,
            "times": [float(t) for t in dt.times],
            "first_zero": [float(t) for t in dt.first_zero],
            "second_zero": [float(t) for t in dt.second_zero],
        }
    avg_h = an.averaged_state(traj)
    avg_nh = an.averaged_state(traj.with_unitary(traj.w.identity()))
    return {
        "meta": {"command": "entanglement", "version": __version__, "config": cfg.to_dict()},
        "horizon": float(horizon),
        "sides": sides,
        "averaged_state": {
            side: {"q0": float(avg.q0), "z_re": float(avg.z.real), "z_im": float(avg.z.imag),
                   "concurrence": float(an.concurrence(avg)),
                   "eigenvalue_splitting": float(an.eigenvalue_splitting(avg))}
            for side, avg in (("non_hermitian", avg_nh), ("hermitian", avg_h))
        },
    }


def _flatten(prefix: str, obj, out: list):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, out)
    elif isinstance(obj, list) and not all(isinstance(v, (int, float)) for v in obj):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}.{i}", v, out)
    elif isinstance(obj, list):
        out.append([prefix, " ".join(_fmt(float(v)) for v in obj)])
    else:
        out.append([prefix, obj])


def cmd_entanglement(cfg: ScenarioConfig, args) -> tuple[str, str | None]:
    fmt, out = _resolve(cfg, args, default="json")
    doc = entanglement_report(cfg)
    if fmt == "csv":
        rows: list = []
        _flatten("", {k: v for k, v in doc.items() if k != "meta"}, rows)
        return render_csv(["field", "value"], rows), out
    return render_json(doc), out


def cmd_dyson_demo(args) -> tuple[str, str | None]:
    samples = args.samples if args.samples is not None else 41
    rep = ds.dyson_demo(args.choice, t_end=args.t_end, samples=samples)
    doc = {
        "meta": {"command": "dyson-demo", "version": __version__},
        "choice": rep.choice,
        "t_end": rep.t_end,
        "samples": rep.samples,
        "max_deviation": rep.max_deviation,
        "max_hermiticity_defect": rep.max_hermiticity_defect,
        "max_w_route_gap": rep.max_w_route_gap,
    }
    if args.format == "csv":
        return render_csv(["field", "value"], [[k, v] for k, v in doc.items() if k != "meta"]), args.out
    return render_json(doc), args.out


# --------------------------------------------------------------------------
# plumbing


def _load_config(args) -> ScenarioConfig:
    if args.config is None:
        cfg = ScenarioConfig()
        cfg.validate()
    else:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise CliIOError(f"cannot read config {args.config}: {exc.strerror}") from None
        cfg = ScenarioConfig.from_json(text)
    if args.samples is not None:
        if args.samples < 64:
            raise ConfigError("--samples", "must be at least 64")
        cfg.grid.samples = args.samples
    if args.seed is not None and cfg.unitary.mode == "random":
        cfg.unitary.seed = args.seed
    return cfg


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader went away (e.g. piped into head); silence the flush at exit
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
            raise CliIOError("output pipe closed") from None
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliIOError(f"cannot write {out}: {exc.strerror}") from None


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario JSON file")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--seed", type=_u64, help="seed for random unitaries and verification draws")
    common.add_argument("--samples", type=int, help="number of time samples")

    parser = argparse.ArgumentParser(prog="quasih", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    curves = argparse.ArgumentParser(add_help=False)
    curves.add_argument("--bits", action="store_true", help="report entropies in bits instead of nats")
    sub.add_parser("evolve", parents=[common, curves], help="populations and entropies over time")
    sub.add_parser("sweep", parents=[common, curves], help="one curve block per swept alpha or c")
    sub.add_parser("entanglement", parents=[common], help="product-state times and averaged state")
    v = sub.add_parser("verify", parents=[common], help="seeded invariant checks")
    v.add_argument("suite", nargs="?", default="all", choices=vf.SUITES)
    d = sub.add_parser("dyson-demo", parents=[common], help="reconstruct h(t) from a time-dependent Dyson map")
    d.add_argument("choice", choices=("h_zero", "constant_A", "time_dep_A"))
    d.add_argument("--t-end", type=float, default=2.0)
    return parser


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else 0
    results = vf.run_suite(args.suite, seed)
    failed = [r.name for r in results if not r.passed]
    doc = {
        "suite": args.suite,
        "seed": seed,
        "passed": len(results) - len(failed),
        "failed": failed,
        "checks": [r.to_dict() for r in results],
    }
    _emit(render_json(doc), args.out)
    for name in failed:
        print(f"verification failed: {name}", file=sys.stderr)
    return EXIT_VERIFY if failed else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "dyson-demo":
            text, out = cmd_dyson_demo(args)
        else:
            cfg = _load_config(args)
            handler = {"evolve": cmd_evolve, "sweep": cmd_sweep, "entanglement": cmd_entanglement}[args.command]
            text, out = handler(cfg, args)
        _emit(text, out)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CliIOError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
