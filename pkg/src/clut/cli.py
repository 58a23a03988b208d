"""Command-line entry point: ``clut <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from .calibration import calibrate, write_calibration
from .circuit import (
    CircuitError,
    Flavor,
    LutConfig,
    Mode,
    build_clut,
    evaluate,
    read_cell,
    read_margin,
    transient_trace,
    write_cell,
)
from .dynamics import CalibrationError, CalibrationTargets
from .params import MissingCalibration, ParamError, load_device_params, load_tech_params
from .report import emit_histograms, generate_comparison, write_summary
from .variation import VariationSpec, run_monte_carlo


@dataclass
class RunConfig:
    device_params: str | None
    tech_params: str | None
    flavor: Flavor
    table: str | None
    mode: Mode
    spec: VariationSpec
    seed: int
    trials: int
    out: str | None

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        for path in (args.device_params, args.tech_params, getattr(args, "spec", None)):
            if path is not None and not Path(path).is_file():
                raise FileNotFoundError(path)
        spec = VariationSpec()
        if getattr(args, "spec", None):
            spec = VariationSpec.from_dict(json.loads(Path(args.spec).read_text()))
        return cls(
            device_params=args.device_params,
            tech_params=args.tech_params,
            flavor=Flavor(args.flavor.upper()),
            table=getattr(args, "table", None),
            mode=Mode(args.mode),
            spec=spec,
            seed=getattr(args, "seed", 0),
            trials=getattr(args, "trials", 1),
            out=getattr(args, "out", None),
        )

    def load(self):
        return load_device_params(self.device_params), load_tech_params(self.tech_params)

    def config(self) -> LutConfig:
        return LutConfig.from_hex(self.table or _zero_table(self.mode), self.mode)

    def circuit(self):
        device, tech = self.load()
        return build_clut(self.config(), tech, self.flavor, device)


def _zero_table(mode: Mode) -> str:
    return "0" * 16 if mode is Mode.SINGLE6 else "00000000,00000000"


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _non_negative_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--device-params", help="device parameter file (JSON)")
    common.add_argument("--tech-params", help="technology parameter file (JSON)")
    common.add_argument("--flavor", choices=("stt", "she"), default="stt")
    common.add_argument("--mode", choices=("single6", "dual5"), default="single6")

    p = argparse.ArgumentParser(prog="clut", description="Spin-based clockless fracturable LUT simulator")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[common], help="evaluate the LUT for one input vector")
    e.add_argument("--table", required=True, help="16 hex digits, or LOW,HIGH 8-digit tables in dual5 mode")
    e.add_argument("--inputs", required=True, help="six binary digits ABCDEF")

    w = sub.add_parser("write", parents=[common], help="write one cell and dump the access result")
    w.add_argument("--table", help="initial table (default all zero)")
    w.add_argument("--cell", type=int, required=True)
    w.add_argument("--bit", type=int, choices=(0, 1), required=True)
    w.add_argument("--pulse", type=float, help="pulse duration in seconds")

    r = sub.add_parser("read", parents=[common], help="read one cell and dump the access result")
    r.add_argument("--table", help="table (default all zero)")
    r.add_argument("--cell", type=int, required=True)

    t = sub.add_parser("trace", parents=[common], help="write a table then read one input vector (CSV)")
    t.add_argument("--table", required=True)
    t.add_argument("--inputs", required=True)
    t.add_argument("--no-read", action="store_true", help="keep RWL deasserted")
    t.add_argument("--out", help="CSV path (default stdout)")

    m = sub.add_parser("mc", parents=[common], help="Monte Carlo over process variation")
    m.add_argument("--trials", type=_positive_int, default=1000)
    m.add_argument("--seed", type=_non_negative_int, default=0)
    m.add_argument("--spec", help="variation spec file (JSON)")
    m.add_argument("--out", default="mc_out")
    m.add_argument("--workers", type=_positive_int, default=1)
    m.add_argument("--bins", type=_positive_int, default=50)
    m.add_argument("--whole-lut", action="store_true", help="vary and test all 64 cells per trial")

    c = sub.add_parser("compare", parents=[common], help="architecture comparison tables")
    c.add_argument("--out", help="directory for comparison.json")

    k = sub.add_parser("calibrate", parents=[common], help="fit parameters and write device/tech files")
    k.add_argument("--out", default=".", help="directory for device.json and tech.json")
    k.add_argument("--seed", type=_non_negative_int, default=0)
    return p


def _result_dict(res) -> dict:
    return {k: v for k, v in asdict(res).items() if v is not None}


def _cmd_eval(cfg: RunConfig, args) -> None:
    circuit = cfg.circuit()
    out = evaluate(circuit, args.inputs, cfg.mode)
    if cfg.mode is Mode.SINGLE6:
        print(out["OUT1"])
    else:
        print(f"OUT0={out['OUT0']} OUT2={out['OUT2']}")


def _cmd_write(cfg: RunConfig, args) -> None:
    circuit = cfg.circuit()
    res = write_cell(circuit, args.cell, args.bit, args.pulse)
    print(json.dumps(_result_dict(res), indent=2, sort_keys=True))


def _cmd_read(cfg: RunConfig, args) -> None:
    circuit = cfg.circuit()
    res = read_cell(circuit, args.cell)
    d = _result_dict(res)
    d["read_margin"] = read_margin(circuit, args.cell)
    print(json.dumps(d, indent=2, sort_keys=True))


def _cmd_trace(cfg: RunConfig, args) -> None:
    device, tech = cfg.load()
    config = cfg.config()
    # start from an all-zero array so the trace shows the configuration write
    circuit = build_clut(LutConfig(config.mode, 0), tech, cfg.flavor, device)
    trace = transient_trace(circuit, config, args.inputs, read=not args.no_read)
    if args.out:
        trace.to_csv(args.out)
    else:
        print("time_s,signal,value")
        for row in sorted(trace.rows, key=lambda r: (r.time_s, r.signal)):
            print(f"{row.time_s!r},{row.signal},{row.value!r}")


def _cmd_mc(cfg: RunConfig, args) -> None:
    device, tech = cfg.load()
    summary = run_monte_carlo(
        device, tech, cfg.spec, cfg.trials, cfg.seed, cfg.flavor,
        workers=args.workers, bins=args.bins, whole_lut=args.whole_lut,
    )
    path = write_summary(summary, cfg.out)
    emit_histograms(summary, cfg.out)
    s = summary.stats
    print(f"trials={summary.n_trials} seed={summary.seed} write_errors={summary.write_errors} "
          f"read_errors={summary.read_errors}")
    print(f"mean T_P-AP={s['t_p_ap']['mean'] * 1e9:.4f} ns  T_AP-P={s['t_ap_p']['mean'] * 1e9:.4f} ns  "
          f"max={summary.max_switching_time * 1e9:.4f} ns")
    print(f"mean I_WRITE={s['i_write']['mean'] * 1e6:.3f} uA  I_READ={s['i_read']['mean'] * 1e6:.3f} uA")
    print(f"summary written to {path}")


def _cmd_compare(cfg: RunConfig, args) -> None:
    device, tech = cfg.load()
    report = generate_comparison(device, tech)
    print(report.table())
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "comparison.json").write_text(report.to_json())


def _cmd_calibrate(cfg: RunConfig, args) -> None:
    result = calibrate(CalibrationTargets(), seed=args.seed)
    dev, tech = write_calibration(result, args.out)
    for k, v in result.notes.items():
        print(f"{k} = {v:.6g}")
    print(f"dynamics residual = {result.dynamics_residual:.3g}")
    print(f"wrote {dev} and {tech}")


COMMANDS = {
    "eval": _cmd_eval,
    "write": _cmd_write,
    "read": _cmd_read,
    "trace": _cmd_trace,
    "mc": _cmd_mc,
    "compare": _cmd_compare,
    "calibrate": _cmd_calibrate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    try:
        cfg = RunConfig.from_args(args)
        COMMANDS[args.command](cfg, args)
    except CircuitError as exc:
        parser.print_usage(sys.stderr)
        print(f"clut: error: {exc}", file=sys.stderr)
        return 2
    except ParamError as exc:
        print(f"clut: config error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"clut: file not found: {exc.filename or exc}", file=sys.stderr)
        return 1
    except (MissingCalibration, CalibrationError, ValueError, OSError) as exc:
        print(f"clut: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
