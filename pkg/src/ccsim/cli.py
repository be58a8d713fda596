"""Command-line front end.

Subcommands: ``params`` (closed-form report for one configuration), ``sweep``
(effective-gain grid to CSV), ``simulate`` (end-to-end delivery run),
``ms-plan`` (memory-sharing plan for non-divisible parameters) and
``ic-simulate`` (cache-aided transmitter run).

Exit codes: 0 all checks passed, 2 parameter error, 3 decode or invariant
failure. Flags override values from an optional ``--config`` file (plain
``key = value`` lines, keys named like the long flags); defaults fill the
rest.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction

from .errors import DecodeError, ParameterError
from .formulas import (SystemParams, effective_K, effective_gain,
                       min_gamma_for_gain, pd_lc_elevated_gain,
                       subpacketization_grouped, subpacketization_single,
                       theoretical_performance)
from .delivery import run_delivery
from .interference import build_transmitter_caches, run_ic_delivery
from .memory_sharing import plan_memory_sharing

NOISELESS_TOLERANCE = 1e-9


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a fraction: {text!r}") from exc


def _int_list(text: str) -> list[int]:
    """Comma list ("1,2,4") or range ("20:100:20"); floats like 1e6 allowed."""
    if ":" in text:
        parts = [int(float(p)) for p in text.split(":")]
        if len(parts) == 2:
            parts.append(1)
        start, stop, step = parts
        return list(range(start, stop + 1, step))
    return [int(float(p)) for p in text.split(",")]


def _fraction_list(text: str) -> list[Fraction]:
    return [_fraction(p) for p in text.split(",")]


def _write_output(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _load_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            for sep in ("=", ":"):
                if sep in line:
                    key, value = line.split(sep, 1)
                    values[key.strip().replace("-", "_")] = value.strip()
                    break
            else:
                raise ParameterError(f"config line not key = value: {raw!r}")
    return values


def cmd_params(args: argparse.Namespace) -> int:
    params = SystemParams(args.K, args.L, args.gamma, args.smax)
    t = params.cache_redundancy
    dof, delay = theoretical_performance(params)
    lines = [
        f"K: {params.K}",
        f"L: {params.L}",
        f"gamma: {params.gamma}",
        f"cache_redundancy: {t}",
        f"subpacketization_single: {subpacketization_single(params.K, t)}",
        f"subpacketization_grouped: {subpacketization_grouped(params.K, params.L, t)}",
        f"theoretical_dof: {dof}",
        f"theoretical_delay: {delay}",
    ]
    if args.smax is not None:
        report = effective_gain(params)
        lines += [
            f"s_max: {args.smax}",
            f"effective_K: {report.effective_K}",
            f"effective_gain: {report.effective_gain}",
            f"effective_dof: {report.effective_dof}",
            f"gain_lower_bound: {report.lower_bound_gain:.6g}",
            f"operating_subpacketization: {report.subpacketization}",
        ]
        if params.gamma < 1:
            lines.append(
                "pd_lc_elevated_gain: "
                f"{pd_lc_elevated_gain(params.gamma, args.smax, params.L, params.K):.6g}")
        if t >= 1 and args.smax >= 2:
            lines.append(
                "min_gamma_for_gain: "
                f"{min_gamma_for_gain(t, args.smax, params.L):.6g}")
    _write_output("\n".join(lines) + "\n", args.out)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    rows = [["K", "gamma", "L", "s_max", "effective_K", "effective_gain",
             "effective_dof"]]
    points = []
    for smax in args.smax:
        for L in args.L:
            for gamma in args.gamma:
                for K in (args.K if args.K is not None else [None]):
                    points.append((smax, L, gamma, K))
    points.sort(key=lambda p: (p[0], p[1], p[2], p[3] if p[3] is not None else -1))
    for smax, L, gamma, K in points:
        if K is None:
            k1 = effective_K(gamma, smax, 1, None)
            k_eff = L * k1
            gain = L * int(k1 * gamma)
        else:
            report = effective_gain(SystemParams(K, L, gamma, smax))
            k_eff = report.effective_K
            gain = report.effective_gain
        rows.append(["" if K is None else str(K), str(gamma), str(L),
                     str(smax), str(k_eff), str(gain), str(L + gain)])
    _write_output(_csv_text(rows), args.out)
    return 0


def _default_requests(K: int, library: int) -> tuple[int, ...]:
    return tuple((k - 1) % library + 1 for k in range(1, K + 1))


def _simulation_noise(args: argparse.Namespace) -> dict:
    if args.noiseless:
        return {"noise_power": 0.0}
    if args.snr_db is not None:
        return {"snr_db": args.snr_db}
    return {"noise_power": args.noise_power}


def _report_delivery(report, theoretical_delay, out, fmt) -> int:
    line = (f"{report.transmissions} transmissions, "
            f"delay {report.measured_delay} (theoretical {theoretical_delay}), "
            f"dof {report.achieved_dof}, max_err {report.max_error:.3e}\n")
    sys.stdout.write(line)
    if out:
        _write_output(_csv_text(report.csv_rows()) if fmt == "csv"
                      else report.to_text(), out)
    ok = report.measured_delay == theoretical_delay
    if report.noise_power == 0:
        ok = ok and report.max_error <= NOISELESS_TOLERANCE
    sys.stdout.write("status: pass\n" if ok else "status: fail\n")
    return 0 if ok else 3


def cmd_simulate(args: argparse.Namespace) -> int:
    params = SystemParams(args.K, args.L, args.gamma)
    library = args.library_n if args.library_n is not None else args.K
    requests = _default_requests(args.K, library)
    report = run_delivery(params, requests, args.seed, num_files=library,
                          freeze_channel=args.freeze_channel,
                          symbolic_check=args.symbolic,
                          **_simulation_noise(args))
    _, delay = theoretical_performance(params)
    return _report_delivery(report, delay, args.out, args.format)


def cmd_ms_plan(args: argparse.Namespace) -> int:
    gamma = Fraction(args.gamma)
    # floor K*gamma onto the planner's grid, mirroring SystemParams
    gamma = Fraction(int(args.K * gamma), args.K)
    plan = plan_memory_sharing(args.K, args.L, gamma)
    if args.format == "csv":
        text = _csv_text([list(plan.csv_header), plan.csv_row()])
    else:
        text = plan.to_text()
    _write_output(text, args.out)
    if args.out:
        sys.stdout.write(
            f"p {plan.p}, exact delay {plan.exact_delay}, "
            f"gap bound {plan.gap_bound}\n")
    return 0


def cmd_ic_simulate(args: argparse.Namespace) -> int:
    placement = build_transmitter_caches(args.kt, args.mt, args.library_n,
                                         args.lt)
    requests = _default_requests(args.K, args.library_n)
    report = run_ic_delivery(args.K, args.gamma, placement, requests,
                             args.seed, freeze_channel=args.freeze_channel,
                             symbolic_check=args.symbolic,
                             **_simulation_noise(args))
    params = SystemParams(args.K, placement.emulated_antennas, args.gamma)
    _, delay = theoretical_performance(params)
    return _report_delivery(report, delay, args.out, args.format)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="write the report to this path")
    parser.add_argument("--format", choices=("text", "csv"), default="text")


def _add_simulation(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--snr-db", type=float, default=None)
    parser.add_argument("--noise-power", type=float, default=0.0)
    parser.add_argument("--noiseless", action="store_true",
                        help="force a noise-free run")
    parser.add_argument("--freeze-channel", action="store_true",
                        help="one fading realization for the whole run "
                             "instead of one per transmission")
    parser.add_argument("--symbolic", action="store_true",
                        help="run the coefficient bookkeeping oracle per clique")
    _add_common(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccsim",
        description="Grouped coded caching: planning formulas and "
                    "zero-forcing delivery simulation")
    parser.add_argument("--config", help="key = value file of flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="closed-form report for one configuration")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--L", type=int, default=1)
    p.add_argument("--gamma", type=_fraction, required=True)
    p.add_argument("--smax", type=lambda s: int(float(s)), default=None)
    _add_common(p)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("sweep", help="effective-gain grid to CSV")
    p.add_argument("--K", type=_int_list, default=None,
                   help="user counts (list or start:stop:step); omit to "
                        "maximize over K")
    p.add_argument("--L", type=_int_list, default=[1])
    p.add_argument("--gamma", type=_fraction_list, required=True)
    p.add_argument("--smax", type=_int_list, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="end-to-end delivery run")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--gamma", type=_fraction, required=True)
    p.add_argument("--library-n", type=int, default=None)
    _add_simulation(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ms-plan", help="memory-sharing plan for non-divisible "
                                       "parameters")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--gamma", type=_fraction, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_ms_plan)

    p = sub.add_parser("ic-simulate", help="cache-aided transmitter run")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--gamma", type=_fraction, required=True)
    p.add_argument("--kt", type=int, required=True,
                   help="number of transmitters")
    p.add_argument("--mt", type=int, required=True,
                   help="files cached per transmitter")
    p.add_argument("--library-n", type=int, required=True)
    p.add_argument("--lt", type=int, default=1,
                   help="antennas per transmitter")
    _add_simulation(p)
    p.set_defaults(func=cmd_ic_simulate)
    return parser


_COMMANDS = ("params", "sweep", "simulate", "ms-plan", "ic-simulate")
_BOOL_KEYS = {"noiseless", "freeze_channel", "symbolic"}


def _config_to_flags(values: dict[str, str]) -> list[str]:
    flags: list[str] = []
    for key, value in values.items():
        flag = "--" + key.replace("_", "-")
        if key in _BOOL_KEYS:
            if value.lower() in ("1", "true", "yes", "on"):
                flags.append(flag)
        else:
            flags += [flag, value]
    return flags


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    # precedence flag > config file > default: config values are spliced in
    # right after the subcommand, where explicit flags then override them
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, rest = probe.parse_known_args(argv)
    if known.config:
        try:
            injected = _config_to_flags(_load_config(known.config))
        except (OSError, ParameterError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        for i, token in enumerate(rest):
            if token in _COMMANDS:
                rest = rest[:i + 1] + injected + rest[i + 1:]
                break
        argv = rest
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return 2
    except (DecodeError, AssertionError) as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
