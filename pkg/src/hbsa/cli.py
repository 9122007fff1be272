"""Command-line front end: analyze, verify-table, sweep, sample.

Exit codes: 0 success, 1 verification or protocol failure, 2 usage or
configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings
from dataclasses import dataclass, field

from hbsa import __version__
from hbsa.analyzer import analyze, verify_table
from hbsa.emitter import CavityParams
from hbsa.errors import HbsaError, NonPhysicalParametersWarning, ProtocolViolationError
from hbsa.hilbert import HyperBellLabel, spins_str
from hbsa.metrics import (
    RNG_ALGORITHM,
    SWEEP_AXES,
    Axis,
    SweepRow,
    SweepSpec,
    outcome_key,
    sample,
    sweep,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FORMATS = ("json", "csv", "text-table")
DEFAULT_SEED = 20240601
DEFAULT_SHOTS = 10000
DEFAULT_STATE = "phiS+,phiP+,phiT+"
REVISION = "1"

PHYSICAL_KEYS = ("g", "kappa_s", "gamma", "p", "detuning_c", "detuning_x")
CONFIG_KEYS = PHYSICAL_KEYS + ("state", "shots", "seed", "format", "output", "axis", "range", "ideal", "strict")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    params: CavityParams
    state: str = DEFAULT_STATE
    shots: int = DEFAULT_SHOTS
    seed: int = DEFAULT_SEED
    format: str = "json"
    output: str | None = None
    axes: list = field(default_factory=list)  # [(name, range text)]
    strict: bool = False


def fmt12(x: float) -> str:
    """12 significant digits, trailing zeros kept, no negative zero."""
    return f"{x + 0.0:#.12g}"


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON config file (default: $HBSA_CONFIG)")
    common.add_argument("--g", type=float, help="dot-cavity coupling g/kappa")
    common.add_argument("--kappa-s", dest="kappa_s", type=float, help="side leakage kappa_s/kappa")
    common.add_argument("--gamma", type=float, help="exciton decay gamma/kappa")
    common.add_argument("--p", type=float, help="photon-dot interaction rate in [0, 1]")
    common.add_argument("--detuning-c", dest="detuning_c", type=float, help="(omega_c - omega)/kappa")
    common.add_argument("--detuning-x", dest="detuning_x", type=float, help="(omega_X - omega)/kappa")
    common.add_argument("--ideal", action="store_true", default=None, help="ideal parameters: g=1, no loss, p=1")
    common.add_argument("--format", choices=FORMATS, help="output format (default json)")
    common.add_argument("--output", help="write to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="hbsa", description="Hyperentangled Bell-state analyzer simulator.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="run one hyper-Bell state through the analyzer")
    p.add_argument("--state", help='label such as "phiS+,psiP-,phiT+"')

    sub.add_parser("verify-table", parents=[common], help="classify all 64 states against the table")

    p = sub.add_parser("sweep", parents=[common], help="efficiency and herald rates over a parameter grid")
    p.add_argument("--axis", action="append", choices=SWEEP_AXES, help="swept parameter (repeatable)")
    p.add_argument(
        "--range", action="append", dest="range", help='"start:stop:step" or "v1,v2,..." for the matching --axis'
    )
    p.add_argument("--strict", action="store_true", default=None, help="check all 64 labels at every point")

    p = sub.add_parser("sample", parents=[common], help="Monte Carlo detector counts for one state")
    p.add_argument("--state", help='label such as "phiS+,psiP-,phiT+"')
    p.add_argument("--shots", type=int, help=f"number of shots (default {DEFAULT_SHOTS})")
    p.add_argument("--seed", type=int, help=f"RNG seed (default {DEFAULT_SEED})")
    return parser


def _load_config(path: str | None) -> dict:
    path = path or os.environ.get("HBSA_CONFIG")
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must be a JSON object")
    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    return data


def _as_list(value) -> list:
    if value is None:
        return []
    return list(value) if isinstance(value, list) else [value]


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, config file and flags (flags win)."""
    file_cfg = _load_config(args.config)
    flags = {k: v for k, v in vars(args).items() if k in CONFIG_KEYS and v is not None}
    if flags.get("ideal") and any(k in flags for k in PHYSICAL_KEYS):
        raise UsageError("--ideal cannot be combined with explicit physical parameters")
    merged = dict(file_cfg)
    if flags.get("ideal"):
        for key in PHYSICAL_KEYS:
            merged.pop(key, None)
    merged.update(flags)

    try:
        params = CavityParams(
            g=float(merged.get("g", 1.0)),
            kappa_s=float(merged.get("kappa_s", 0.0)),
            gamma=float(merged.get("gamma", 0.0)),
            p=float(merged.get("p", 1.0)),
            omega_c=float(merged.get("detuning_c", 0.0)),
            omega_x=float(merged.get("detuning_x", 0.0)),
        )
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None

    fmt = merged.get("format", "json")
    if fmt not in FORMATS:
        raise UsageError(f"format must be one of {', '.join(FORMATS)}")
    try:
        shots = int(merged.get("shots", DEFAULT_SHOTS))
        seed = int(merged.get("seed", DEFAULT_SEED))
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    if shots < 1:
        raise UsageError(f"shots must be >= 1, got {shots}")
    if seed < 0:
        raise UsageError(f"seed must be >= 0, got {seed}")

    axis_names, ranges = _as_list(merged.get("axis")), _as_list(merged.get("range"))
    if len(axis_names) != len(ranges):
        raise UsageError("give exactly one --range per --axis")
    return RunConfig(
        params=params,
        state=str(merged.get("state", DEFAULT_STATE)),
        shots=shots,
        seed=seed,
        format=fmt,
        output=merged.get("output"),
        axes=list(zip(axis_names, ranges)),
        strict=bool(merged.get("strict", False)),
    )


def parse_axis(name: str, text: str) -> Axis:
    text = str(text).strip()
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            return Axis.from_range(name, start, stop, step)
        values = tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad range {text!r} for axis {name}: {exc}") from None
    return Axis(name, values)


def _parse_label(text: str) -> HyperBellLabel:
    try:
        return HyperBellLabel.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _params_dict(params: CavityParams) -> dict:
    return {
        "g": params.g,
        "kappa": params.kappa,
        "kappa_s": params.kappa_s,
        "gamma": params.gamma,
        "p": params.p,
        "detuning_c": params.detuning_c,
        "detuning_x": params.detuning_x,
    }


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# --- commands -------------------------------------------------------------------------


def cmd_analyze(cfg: RunConfig) -> tuple[int, str]:
    label = _parse_label(cfg.state)
    status = EXIT_OK
    try:
        report = analyze(label, cfg.params)
        violation = None
    except ProtocolViolationError as exc:
        report = analyze(label, cfg.params, check=False)
        violation = str(exc)
        status = EXIT_FAIL
    spins = report.spins
    if spins is not None:
        outcomes = {str(sig): report.conditional_outcomes[(sig, spins)] for sig in report.signatures}
    else:
        outcomes = {outcome_key(sig, sp): p for (sig, sp), p in sorted(report.conditional_outcomes.items())}
    led = report.ledger

    if cfg.format == "json":
        body = {
            "command": "analyze",
            "revision": REVISION,
            "params": _params_dict(cfg.params),
            "input": str(label),
            "spins": spins_str(spins) if spins is not None else None,
            "success_probability": report.success_probability,
            "ledger": {"p_D1": led.p_D1, "p_D2": led.p_D2, "p_D3": led.p_D3, "p_loss": led.p_loss},
            "closure_error": led.closure_error(report.success_probability),
            "classified": str(report.classified) if report.classified else None,
            "conditional_fidelity": report.conditional_fidelity,
            "outcomes": outcomes,
        }
        if violation:
            body["violation"] = violation
        return status, _dump_json(body)
    if cfg.format == "csv":
        rows = [(k, spins_str(spins) if spins else "", fmt12(v)) for k, v in outcomes.items()]
        return status, _csv_text(("signature", "spins", "probability"), rows)
    lines = [
        f"input                {label}",
        "params               " + " ".join(f"{k}={v:g}" for k, v in _params_dict(cfg.params).items()),
        f"spins                {spins_str(spins) if spins else '?'}",
        f"success_probability  {fmt12(report.success_probability)}",
        f"p_D1 p_D2 p_D3       {fmt12(led.p_D1)} {fmt12(led.p_D2)} {fmt12(led.p_D3)}",
        f"p_loss               {fmt12(led.p_loss)}",
        f"classified           {report.classified or '-'}",
        f"conditional_fidelity {fmt12(report.conditional_fidelity) if report.conditional_fidelity is not None else '-'}",
        "outcomes:",
    ]
    lines += [f"  {k}  {fmt12(v)}" for k, v in outcomes.items()]
    if violation:
        lines.append(f"PROTOCOL VIOLATION: {violation}")
    return status, "\n".join(lines) + "\n"


def cmd_verify_table(cfg: RunConfig) -> tuple[int, str]:
    report = verify_table(cfg.params)
    status = EXIT_OK if report.ok else EXIT_FAIL
    print(report.summary(), file=sys.stderr)
    if report.status == "verified":
        print(f"success_probability {fmt12(report.success_probability)}", file=sys.stderr)
    if cfg.format == "json":
        body = {
            "command": "verify-table",
            "revision": REVISION,
            "params": _params_dict(cfg.params),
            "status": report.status,
            "summary": report.summary(),
            "verified": report.verified,
            "total": report.total,
            "ambiguities": report.ambiguities,
            "success_probability": report.success_probability,
            "rows": [
                {
                    "label": str(e.label),
                    "spins": spins_str(e.spins) if e.spins else None,
                    "signatures": [str(s) for s in e.signatures],
                    "verified": e.verified,
                }
                for e in report.entries
            ],
            "failures": report.failures,
        }
        return status, _dump_json(body)
    if cfg.format == "csv":
        rows = [
            (str(e.label), spins_str(e.spins) if e.spins else "", " ".join(map(str, e.signatures)), e.verified)
            for e in report.entries
        ]
        return status, _csv_text(("label", "spins", "signatures", "verified"), rows)
    text = report.render_table()
    if report.failures:
        text += "".join(f"FAILED: {f}\n" for f in report.failures)
    return status, text


def cmd_sweep(cfg: RunConfig) -> tuple[int, str]:
    axes = tuple(parse_axis(name, text) for name, text in cfg.axes)
    if not axes:
        axes = (Axis("g", (cfg.params.g,)),)
    try:
        spec = SweepSpec(axes, cfg.params, cfg.strict)
    except (ValueError, HbsaError) as exc:
        raise UsageError(str(exc)) from None
    try:
        rows = sweep(spec)
    except ProtocolViolationError as exc:
        print(f"protocol violation: {exc}", file=sys.stderr)
        return EXIT_FAIL, ""
    if cfg.format == "csv":
        return EXIT_OK, _csv_text(SweepRow.COLUMNS, [[fmt12(v) for v in r.values()] for r in rows])
    if cfg.format == "json":
        body = {
            "command": "sweep",
            "revision": REVISION,
            "params": _params_dict(cfg.params),
            "axes": {a.name: list(a.values) for a in axes},
            "strict": cfg.strict,
            "columns": list(SweepRow.COLUMNS),
            "rows": [list(r.values()) for r in rows],
        }
        return EXIT_OK, _dump_json(body)
    widths = [max(len(c), 14) for c in SweepRow.COLUMNS]
    lines = ["  ".join(c.rjust(w) for c, w in zip(SweepRow.COLUMNS, widths))]
    lines += ["  ".join(fmt12(v).rjust(w) for v, w in zip(r.values(), widths)) for r in rows]
    return EXIT_OK, "\n".join(lines) + "\n"


def cmd_sample(cfg: RunConfig) -> tuple[int, str]:
    label = _parse_label(cfg.state)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonPhysicalParametersWarning)
        report = analyze(label, cfg.params, check=False)
    try:
        counts = sample(report, cfg.shots, cfg.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    meta = {
        "params": _params_dict(cfg.params),
        "state": str(label),
        "shots": cfg.shots,
        "seed": cfg.seed,
        "rng": RNG_ALGORITHM,
        "revision": REVISION,
    }
    if cfg.format == "json":
        return EXIT_OK, _dump_json({"command": "sample", "metadata": meta, "counts": counts})
    if cfg.format == "csv":
        return EXIT_OK, _csv_text(("outcome", "count"), counts.items())
    lines = [f"# {k}={v}" for k, v in meta.items() if k != "params"]
    lines.append("# params " + " ".join(f"{k}={v:g}" for k, v in meta["params"].items()))
    lines += [f"{k:<16} {v}" for k, v in counts.items()]
    return EXIT_OK, "\n".join(lines) + "\n"


COMMANDS = {
    "analyze": cmd_analyze,
    "verify-table": cmd_verify_table,
    "sweep": cmd_sweep,
    "sample": cmd_sample,
}


def _emit(text: str, output: str | None) -> None:
    if output:
        try:
            with open(output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {output}: {exc}") from None
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        status, text = COMMANDS[args.command](cfg)
        _emit(text, cfg.output)
    except UsageError as exc:
        print(f"hbsa: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return status


if __name__ == "__main__":
    sys.exit(main())
