"""Command-line interface: region tracing, single-point maximization,
certification, and oracle runs.

Channel configs are JSON files (see README).  Outputs are deterministic
for fixed config, flags, and seed: region CSVs are byte-identical across
reruns, and every output file gets a sibling ``.manifest.json`` with
enough information to reproduce it exactly.

Exit codes: 0 pass, 1 usage, 2 runtime error, 3 certification failure.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__, certify, optimizer
from .channel import AlignedChannel, CovSplit, GeneralChannel, to_aligned
from .errors import (
    DegenerateConstraint,
    InvalidChannel,
    NoCertificate,
    ParseError,
    SecregionError,
    UnsupportedDim,
)
from .matcore import SymMatrix

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_CERT = 3

LN2 = math.log(2.0)

CSV_HEADER = ["r0_target", "theta", "r0", "r1", "r2", "units"]


class UsageError(SecregionError):
    pass


@dataclass(frozen=True)
class ChannelConfig:
    mode: str
    units: str
    channel: GeneralChannel | AlignedChannel
    raw: dict


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _parse_matrix(raw, name, path):
    try:
        m = np.array(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: field {name!r} is not a numeric matrix: {exc}")
    if m.ndim != 2:
        raise ParseError(f"{path}: field {name!r} must be a nested array (matrix)")
    return m


def load_config(path) -> ChannelConfig:
    """Parse and validate a channel config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: top level must be an object")
    mode = raw.get("mode")
    if mode not in ("general", "aligned"):
        raise ParseError(f"{path}: field 'mode' must be 'general' or 'aligned'")
    units = raw.get("units", "nats")
    if units not in ("nats", "bits"):
        raise ParseError(f"{path}: field 'units' must be 'nats' or 'bits'")
    names = ("H1", "H2", "S") if mode == "general" else ("N1", "N2", "S")
    mats = {}
    for name in names:
        if name not in raw:
            raise ParseError(f"{path}: missing field {name!r} for mode {mode!r}")
        mats[name] = _parse_matrix(raw[name], name, path)
    try:
        if mode == "general":
            chan = GeneralChannel(h1=mats["H1"], h2=mats["H2"],
                                  s=SymMatrix(mats["S"]))
        else:
            chan = AlignedChannel(n1=SymMatrix(mats["N1"]),
                                  n2=SymMatrix(mats["N2"]),
                                  s=SymMatrix(mats["S"]))
    except DegenerateConstraint as exc:
        raise InvalidChannel(str(exc)) from exc
    except SecregionError as exc:
        raise InvalidChannel(str(exc)) from exc
    return ChannelConfig(mode=mode, units=units, channel=chan, raw=raw)


def _as_aligned(cfg: ChannelConfig) -> AlignedChannel:
    if isinstance(cfg.channel, AlignedChannel):
        return cfg.channel
    return to_aligned(cfg.channel)


def _solver_config(args) -> optimizer.SolverConfig:
    kwargs = {"seed": args.seed}
    if getattr(args, "restarts", None) is not None:
        kwargs["restarts"] = args.restarts
    if getattr(args, "max_iters", None) is not None:
        kwargs["max_iters"] = args.max_iters
    return optimizer.SolverConfig(**kwargs)


def _units_scale(units: str) -> float:
    return LN2 if units == "bits" else 1.0


def _manifest(command, args, cfg: ChannelConfig, solver_cfg, out_path):
    body = {
        "command": command,
        "version": __version__,
        "started_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "config_path": str(args.config),
        "config": cfg.raw,
        "seed": args.seed,
        "solver": {
            "restarts": solver_cfg.restarts,
            "max_iters": solver_cfg.max_iters,
            "step_init": solver_cfg.step_init,
            "step_shrink": solver_cfg.step_shrink,
            "penalty_weight": solver_cfg.penalty_weight,
            "penalty_rounds": solver_cfg.penalty_rounds,
            "proj_iters": solver_cfg.proj_iters,
            "tol_obj": solver_cfg.tol_obj,
        },
        "flags": {
            k: getattr(args, k)
            for k in ("r0_steps", "weight_steps", "units", "dump_covariances")
            if hasattr(args, k)
        },
    }
    path = str(out_path) + ".manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(body, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _effective_units(args, cfg):
    return args.units if args.units else cfg.units


def cmd_region(args) -> int:
    cfg = load_config(args.config)
    if args.r0_steps < 1 or args.weight_steps < 1:
        raise UsageError("--r0-steps and --weight-steps must be >= 1")
    ch = _as_aligned(cfg)
    solver_cfg = _solver_config(args)
    units = _effective_units(args, cfg)
    scale = _units_scale(units)
    samples = optimizer.trace_surface(ch, args.r0_steps, args.weight_steps,
                                      solver_cfg)
    header = list(CSV_HEADER)
    t = ch.t
    if args.dump_covariances:
        header += [f"b0_{i}{j}" for i in range(t) for j in range(t)]
        header += [f"b1_{i}{j}" for i in range(t) for j in range(t)]
    lines = [",".join(header)]
    for smp in samples:
        theta = math.atan2(smp.weights.lambda2, smp.weights.lambda1)
        row = [
            _fmt(smp.weights.r0_target / scale),
            _fmt(theta),
            _fmt(smp.rates.r0 / scale),
            _fmt(smp.rates.r1 / scale),
            _fmt(smp.rates.r2 / scale),
            units,
        ]
        if args.dump_covariances:
            row += [_fmt(v) for v in smp.split.b0.array.ravel()]
            row += [_fmt(v) for v in smp.split.b1.array.ravel()]
        lines.append(",".join(row))
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    manifest = _manifest("region", args, cfg, solver_cfg, args.out)
    print(f"wrote {len(samples)} samples to {args.out}")
    print(f"manifest: {manifest}")
    return EXIT_OK


def _weights(args) -> optimizer.Weights:
    try:
        return optimizer.Weights(lambda1=args.l1, lambda2=args.l2,
                                 r0_target=args.r0)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _print_matrix(label, m: SymMatrix):
    for i, row in enumerate(m.array):
        prefix = f"{label} = " if i == 0 else " " * (len(label) + 3)
        print(prefix + "[" + ", ".join(_fmt(v) for v in row) + "]")


def _print_result(res, units, scale):
    print(f"value = {_fmt(res.value / scale)} {units}")
    print(f"r0 = {_fmt(res.rates.r0 / scale)} {units}")
    print(f"r1 = {_fmt(res.rates.r1 / scale)} {units}")
    print(f"r2 = {_fmt(res.rates.r2 / scale)} {units}")
    _print_matrix("B0", res.split.b0)
    _print_matrix("B1", res.split.b1)
    active = ", ".join(sorted(res.active_constraints)) or "none"
    print(f"active constraints: {active}")
    print(f"converged: {res.converged}")
    print(f"iterations: {res.iterations}")


def cmd_maximize(args) -> int:
    cfg = load_config(args.config)
    ch = _as_aligned(cfg)
    w = _weights(args)
    solver_cfg = _solver_config(args)
    units = _effective_units(args, cfg)
    scale = _units_scale(units)
    res = optimizer.maximize_weighted(ch, w, solver_cfg)
    _print_result(res, units, scale)
    return EXIT_OK


def cmd_oracle(args) -> int:
    cfg = load_config(args.config)
    ch = _as_aligned(cfg)
    w = _weights(args)
    units = _effective_units(args, cfg)
    scale = _units_scale(units)
    res = optimizer.grid_oracle(ch, w, args.resolution)
    _print_result(res, units, scale)
    stats = res.grid
    print(f"points scanned: {stats.points_scanned}")
    print(f"feasible pairs: {stats.feasible_count}")
    window = "; ".join(f"{name} in [{_fmt(lo)}, {_fmt(hi)}]"
                       for name, lo, hi in stats.refinement_window)
    print(f"refinement window: {window}")
    return EXIT_OK


def _load_solution(path, t):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(raw, dict) or "B0" not in raw or "B1" not in raw:
        raise ParseError(f"{path}: solution file must contain 'B0' and 'B1'")
    b0 = _parse_matrix(raw["B0"], "B0", path)
    b1 = _parse_matrix(raw["B1"], "B1", path)
    if b0.shape != (t, t) or b1.shape != (t, t):
        raise ParseError(
            f"{path}: B0/B1 must be {t}x{t}, got {b0.shape} and {b1.shape}"
        )
    return CovSplit(b0=SymMatrix(b0), b1=SymMatrix(b1))


def cmd_certify(args) -> int:
    cfg = load_config(args.config)
    ch = _as_aligned(cfg)
    w = _weights(args)
    split = _load_solution(args.solution, ch.t)
    try:
        cert = certify.recover_multipliers(ch, split, w)
    except NoCertificate as exc:
        print(f"no certificate: {exc}")
        for name in sorted(exc.residuals):
            print(f"  {name} = {_fmt(exc.residuals[name])}")
        return EXIT_CERT
    residuals = certify.verify_kkt(ch, split, cert)
    n_tilde = certify.construct_enhanced_noise(ch, cert, split)
    report = certify.verify_enhancement(ch, split, cert, n_tilde)

    print(f"beta1 = {_fmt(cert.beta1)}, beta2 = {_fmt(cert.beta2)}")
    print(f"recovery residual = {_fmt(cert.ls_residual)}")
    print(f"recovery conditioning = {_fmt(cert.conditioning)}")
    for name in sorted(residuals):
        print(f"kkt.{name} = {_fmt(residuals[name])}")
    _print_matrix("N~", report.n_tilde)
    for name in ("dominance1", "dominance2", "det_identity", "ratio_identity",
                 "stationarity_enh", "converse_gap"):
        print(f"enh.{name} = {_fmt(report.residuals[name])}")
    kkt_ok = certify.kkt_max_residual(residuals) <= certify.KKT_PASS_TOL
    verdict = "PASS" if (kkt_ok and report.passed) else "FAIL"
    print(f"certificate: {verdict}")
    return EXIT_OK if verdict == "PASS" else EXIT_CERT


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="secregion",
                     description="Secrecy capacity regions of two-receiver "
                                 "MIMO Gaussian broadcast channels")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, weights=False):
        p.add_argument("--config", required=True, help="channel config JSON")
        p.add_argument("--seed", type=int, default=0, help="solver RNG seed")
        p.add_argument("--units", choices=["nats", "bits"], default=None,
                       help="output units (default: config's units field)")
        p.add_argument("--restarts", type=int, default=None)
        p.add_argument("--max-iters", dest="max_iters", type=int, default=None)
        if weights:
            p.add_argument("--l1", type=float, required=True)
            p.add_argument("--l2", type=float, required=True)
            p.add_argument("--r0", type=float, default=0.0)

    p = sub.add_parser("region", help="trace the region boundary to CSV")
    common(p)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--r0-steps", dest="r0_steps", type=int, default=5)
    p.add_argument("--weight-steps", dest="weight_steps", type=int, default=9)
    p.add_argument("--dump-covariances", action="store_true")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("maximize", help="solve one weighted maximization")
    common(p, weights=True)
    p.set_defaults(func=cmd_maximize)

    p = sub.add_parser("oracle", help="exhaustive grid scan (t <= 2)")
    common(p, weights=True)
    p.add_argument("--resolution", type=int, default=9)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("certify", help="certify a candidate solution file")
    common(p, weights=True)
    p.add_argument("solution", help="JSON file holding B0 and B1")
    p.set_defaults(func=cmd_certify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (UsageError, UnsupportedDim) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoCertificate as exc:
        print(f"no certificate: {exc}", file=sys.stderr)
        return EXIT_CERT
    except SecregionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def entry():
    sys.exit(main())
