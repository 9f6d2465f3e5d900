"""Command line entry point: ``heraldmux {certify,sweep,simulate,compare,loss}``.

Exit status is 0 on success, 1 when output cannot be written or an input file
cannot be read, and 2 for usage or domain errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import model, sweep
from .errors import DomainError
from .model import LossModel, MultiplexConfig
from .simulator import DEFAULT_TRIALS, Mode, SimulationSpec, run
from .statistics import Kind

EXIT_OK, EXIT_IO, EXIT_USAGE = 0, 1, 2


class IOFailure(Exception):
    pass


def _nonneg_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(x) or x < 0:
        raise argparse.ArgumentTypeError(f"must be a finite nonnegative number, got {text}")
    return x


def _unit_float(text: str) -> float:
    x = _nonneg_float(text)
    if x > 1:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {text}")
    return x


def _pos_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return n


def _seed(text: str) -> int:
    try:
        n = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= n < 2**64:
        raise argparse.ArgumentTypeError("must be an unsigned 64-bit integer")
    return n


def _kind(text: str) -> Kind:
    try:
        return Kind.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_config(p: argparse.ArgumentParser, nd_default: int = 8) -> None:
    p.add_argument("--nbar", type=_nonneg_float, default=1.0, help="mean pairs per pulse, whole system")
    p.add_argument("--eta", type=_unit_float, default=1.0, help="trigger detector efficiency")
    p.add_argument("--nd", type=_pos_int, default=nd_default, help="number of delay lines N_D")
    p.add_argument("--kind", type=_kind, default=Kind.BOSE_EINSTEIN,
                   help="photon statistics per mode: bose-einstein (default) or poisson")


def _add_output(p: argparse.ArgumentParser, formats=("pretty", "csv")) -> None:
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--json", action="store_true", help="print a JSON mirror of the table")
    p.add_argument("--out", type=Path, help="write to this file instead of standard output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heraldmux", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="per-delay certifications and aggregate probabilities")
    _add_config(p)
    p.add_argument("--delay", type=_pos_int, help="report only this delay index")
    _add_output(p)

    p = sub.add_parser("sweep", help="regenerate figure data or sweep a custom grid")
    p.add_argument("--target", choices=[t.value for t in sweep.Target], default="fig3a")
    p.add_argument("--nbar", type=_nonneg_float, nargs="+", help="nbar grid")
    p.add_argument("--eta", type=_unit_float, nargs="+", help="eta grid")
    p.add_argument("--nd", type=_pos_int, nargs="+", help="N_D grid (default 1..8)")
    p.add_argument("--kind", type=_kind, default=Kind.BOSE_EINSTEIN)
    p.add_argument("--mc", action="store_true", help="add Monte Carlo estimates")
    p.add_argument("--trials", type=_pos_int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--workers", type=_pos_int, default=1)
    _add_output(p, ("csv", "pretty", "svg"))

    p = sub.add_parser("simulate", help="Monte Carlo run of the delay system or the switched array")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="delay")
    _add_config(p)
    p.add_argument("--trials", type=_pos_int, default=DEFAULT_TRIALS)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--workers", type=_pos_int, default=1)
    p.add_argument("--switch-transmittance", type=_unit_float, default=1.0)
    p.add_argument("--output-transmittance", type=_unit_float, default=1.0)
    p.add_argument("--ar-surfaces", type=int, default=0,
                   help="extra coated surfaces folded into the output transmittance")
    p.add_argument("--ar-transmittance", type=_unit_float, default=0.995)
    _add_output(p)

    p = sub.add_parser("compare", help="faint laser vs conventional vs multiplexed source")
    _add_config(p)
    _add_output(p)

    p = sub.add_parser("loss", help="net transmittance and loss of a surface chain")
    p.add_argument("--surface", type=_unit_float, action="append", default=[],
                   help="one surface transmittance; repeat per surface")
    p.add_argument("--file", type=Path, help="file with one transmittance per line (# comments)")
    _add_output(p)
    return parser


def _rows_output(rows, args) -> bytes:
    if args.json:
        return (json.dumps([r.as_dict() for r in rows], indent=1) + "\n").encode()
    return sweep.emit_table(rows, args.format)


def _records_output(records: list[dict], args) -> bytes:
    """Tables that are not sweep rows; columns are the record keys."""
    if args.json:
        return (json.dumps(records, indent=1) + "\n").encode()
    keys = list(records[0]) if records else []
    if args.format == "csv":
        lines = [",".join(keys)]
        lines += [",".join(_csv_cell(r[k]) for k in keys) for r in records]
        return ("\n".join(lines) + "\n").encode()
    cells = [keys] + [[_pretty_cell(r[k]) for k in keys] for r in records]
    return sweep.render_text_table(cells).encode()


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _pretty_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".6g")
    return str(v)


def cmd_certify(args) -> bytes:
    cfg = MultiplexConfig(args.nbar, args.eta, args.nd, args.kind)
    if args.delay is not None and args.delay > cfg.num_delays:
        raise DomainError(f"--delay {args.delay} exceeds --nd {cfg.num_delays}")
    report = model.certify(cfg)
    nbar, eta, nd = cfg.nbar, cfg.eta, cfg.num_delays
    rows = []
    for d in report.per_delay:
        if args.delay is None or d.delay == args.delay:
            rows.append(sweep.SweepRow(nbar, eta, nd, d.delay, "certification", d.certification))
            rows.append(sweep.SweepRow(nbar, eta, nd, d.delay, "delay_fire_prob", d.occurrence))
    for name, value in (
        ("no_trigger_prob", report.p_no_trigger),
        ("single_photon_prob", report.p_single),
        ("single_photon_prob_given_trigger", report.p_single_given_trigger),
        ("poisson_limit", report.poisson_limit_p_single),
        ("poisson_limit_given_trigger", report.poisson_limit_given_trigger),
    ):
        rows.append(sweep.SweepRow(nbar, eta, nd, 0, name, value))
    return _rows_output(rows, args)


def _sweep_spec(args) -> sweep.SweepSpec:
    target = sweep.Target(args.target)
    nds = tuple(args.nd) if args.nd else tuple(range(1, 9))
    if target is sweep.Target.FIG5:
        nbars = tuple(args.nbar) if args.nbar else sweep.FIG5_NBARS
    else:
        nbars = tuple(args.nbar) if args.nbar else (1.0,)
    etas = tuple(args.eta) if args.eta else (1.0,)
    if target in (sweep.Target.FIG3A, sweep.Target.FIG3B) and (len(nbars) > 1 or len(etas) > 1):
        raise DomainError(f"--target {target.value} takes a single --nbar and --eta; use custom for grids")
    return sweep.SweepSpec(target, nbars, etas, nds, args.kind, args.mc, args.trials, args.seed)


def cmd_sweep(args) -> bytes:
    spec = _sweep_spec(args)
    rows = sweep.run_sweep(spec, workers=args.workers)
    if args.format == "svg" and not args.json:
        xlabel = {"fig5": "nbar", "fig3b": "delay"}.get(spec.target.value, "delay / N_D")
        return sweep.emit_plot(rows, spec.target, title=spec.target.value, xlabel=xlabel)
    return _rows_output(rows, args)


def _analytic_for(cfg: MultiplexConfig, name: str, delay: int):
    try:
        if name == "certification":
            return model.certification(cfg, delay)
        if name == "delay_fire_prob":
            return model.delay_fire_prob(cfg, delay)
        if name == "no_trigger_prob":
            return model.no_trigger_prob(cfg)
        if name == "single_photon_prob":
            return model.single_photon_prob(cfg)
        if name == "single_photon_prob_given_trigger":
            return model.single_photon_prob_given_trigger(cfg)
        if name == "p_herald":
            return 1.0 - model.no_trigger_prob(cfg)
    except DomainError:
        return None
    return None


def cmd_simulate(args) -> bytes:
    cfg = MultiplexConfig(args.nbar, args.eta, args.nd, args.kind)
    if args.ar_surfaces < 0:
        raise DomainError("--ar-surfaces must be nonnegative")
    output_t = args.output_transmittance * args.ar_transmittance ** args.ar_surfaces
    spec = SimulationSpec(cfg, args.trials, args.seed, Mode(args.mode), args.switch_transmittance, output_t)
    result = run(spec, workers=args.workers)
    throughput = spec.switch_transmittance * spec.output_transmittance
    records = []
    for e in result.estimates:
        analytic = _analytic_for(cfg, e.name, e.delay)
        if e.name == "p_emit_given_single_pair_herald":
            analytic = throughput
        records.append({
            "name": e.name,
            "delay": e.delay,
            "numerator": e.numerator,
            "denominator": e.denominator,
            "estimate": e.estimate if e.defined else None,
            "standard_error": e.standard_error if e.defined else None,
            "analytic": analytic,
        })
    if spec.mode is Mode.SWITCHED_ARRAY:
        for k, v in result.histogram.items():
            records.append({"name": "emitted_histogram", "delay": k, "numerator": v,
                            "denominator": spec.trials, "estimate": v / spec.trials,
                            "standard_error": None, "analytic": None})
    return _records_output(records, args)


def cmd_compare(args) -> bytes:
    table = model.source_comparison(args.nbar, args.eta, args.nd)
    rows = [sweep.SweepRow(args.nbar, args.eta, args.nd, 0, name, value) for name, value in table.items()]
    return _rows_output(rows, args)


def _read_surfaces(path: Path) -> list[float]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IOFailure(f"cannot read {path}: {exc}") from exc
    values = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(_unit_float(line))
        except argparse.ArgumentTypeError as exc:
            raise DomainError(f"{path}:{lineno}: {exc}") from None
    return values


def cmd_loss(args) -> bytes:
    surfaces = list(args.surface)
    if args.file is not None:
        surfaces += _read_surfaces(args.file)
    t, loss = model.loss_budget(LossModel(tuple(surfaces)))
    return _records_output([{"surfaces": len(surfaces), "net_transmittance": t, "net_loss": loss}], args)


COMMANDS = {
    "certify": cmd_certify,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "loss": cmd_loss,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload = COMMANDS[args.command](args)
    except DomainError as exc:
        parser.exit(EXIT_USAGE, f"{parser.prog} {args.command}: error: {exc}\n")
    except IOFailure as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        if args.out is not None:
            args.out.write_bytes(payload)
        else:
            sys.stdout.buffer.write(payload)
            sys.stdout.flush()
    except OSError as exc:
        print(f"{parser.prog} {args.command}: error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
