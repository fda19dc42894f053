"""Command-line front end for orbit metrics and diagnostics.

Every run is described by one effective configuration: an optional JSON
config file supplies defaults, explicit flags override it, and the result
is echoed into each output artifact so artifacts are self-describing.
All randomness derives from --seed, so identical configs give
byte-identical outputs.

Exit codes: 0 on success, 1 when --strict is set and the verdict is
"violated", 2 on any input error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction

from . import __version__
from . import analysis as _analysis
from . import pseudometrics as _pseudometrics
from . import selftest as _selftest
from . import systems as _systems
from .errors import SamplingError
from .measures import Schedule

DEFAULT_SCHEDULE_MAX = 1000
MEANEQ_SCHEDULE_MAX = 200
DEFAULT_PAIR_SAMPLES = 20
DEFAULT_POINT_SAMPLES = 20

# "0110", "01(10)*", "(1)*" -- prefix plus optional periodic tail
_SHIFT_POINT = re.compile(r"^([01]*)(?:\(([01]+)\)\*)?$")


class CliError(Exception):
    """Invalid input; the process exits with status 2."""


# ---------------------------------------------------------------------------
# config resolution: flags override the config file, which overrides defaults


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read config file: {exc}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")
    if not isinstance(data, dict):
        raise CliError(f"{path}: config must be a JSON object")
    return data


def _effective(args, cfg: dict, key: str, default=None):
    value = getattr(args, key, None)
    if value is None:
        value = cfg.get(key, default)
    return value


def _require(args, cfg: dict, key: str, flag: str):
    value = _effective(args, cfg, key)
    if value is None:
        raise CliError(f"{flag} is required for this command")
    return value


def _positive_int(args, cfg: dict, key: str, default: int, flag: str) -> int:
    value = _effective(args, cfg, key, default)
    try:
        value = int(value)
    except (TypeError, ValueError):
        raise CliError(f"{flag} must be an integer")
    if value < 1:
        raise CliError(f"{flag} must be at least 1")
    return value


def _positive_float(args, cfg: dict, key: str, flag: str) -> float:
    value = _require(args, cfg, key, flag)
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise CliError(f"{flag} must be a number")
    if not value > 0:
        raise CliError(f"{flag} must be positive")
    return value


def _common_values(args, cfg: dict) -> tuple[int, str, bool]:
    seed = _effective(args, cfg, "seed", 0)
    try:
        seed = int(seed)
    except (TypeError, ValueError):
        raise CliError("--seed must be an integer")
    fmt = _effective(args, cfg, "format", "csv")
    if fmt not in ("csv", "json"):
        raise CliError(f"unknown format '{fmt}' (choose csv or json)")
    strict = bool(_effective(args, cfg, "strict", False))
    return seed, fmt, strict


# ---------------------------------------------------------------------------
# system and point parsing


def _parse_json_arg(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(
            f"{what}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")


def _build_system(args, cfg: dict) -> _systems.System:
    name = _effective(args, cfg, "system")
    spec = _effective(args, cfg, "system_json")
    if name is not None and spec is not None:
        raise CliError("conflicting system definitions: give --system or --system-json, not both")
    if spec is not None:
        if isinstance(spec, str):
            spec = _parse_json_arg(spec, "--system-json")
        try:
            return _systems.system_from_dict(spec)
        except (KeyError, TypeError, ValueError) as exc:
            raise CliError(f"bad system description: {exc}")
    if name is None:
        raise CliError("no system given (use --system or --system-json)")
    if name in ("circle", "circle_rotation"):
        alpha = _effective(args, cfg, "alpha")
        if alpha is None:
            raise CliError("--alpha is required for the circle rotation")
        return _systems.CircleRotation(alpha=float(alpha))
    if name in ("doubling", "doubling_map"):
        return _systems.DoublingMap()
    if name in ("tent", "tent_map"):
        return _systems.TentMap()
    if name in ("logistic", "logistic_map"):
        r = _effective(args, cfg, "r", 4.0)
        return _systems.LogisticMap(r=float(r))
    if name in ("shift", "binary_shift"):
        horizon = _effective(args, cfg, "horizon", _systems.DEFAULT_HORIZON)
        return _systems.BinaryShift(horizon=int(horizon))
    raise CliError(f"unknown system '{name}'")


def _parse_scalar(text: str):
    s = str(text).strip()
    if "/" in s:
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError):
            raise CliError(f"bad fraction '{text}'")
    try:
        return float(s)
    except ValueError:
        raise CliError(f"bad numeric point '{text}'")


def _parse_shift_point(text: str) -> _systems.ShiftPoint:
    m = _SHIFT_POINT.match(str(text).strip())
    if not m or (not m.group(1) and m.group(2) is None):
        raise CliError(
            f"bad shift point '{text}' (use e.g. '0110', '01(10)*' or '(1)*')")
    return _systems.ShiftPoint.from_string(m.group(1), m.group(2))


def _product_point(system: _systems.ProductSystem, spec):
    if not isinstance(spec, (list, tuple)) or len(spec) != 2:
        raise CliError("a product point must be a JSON pair [first, second]")
    out = []
    for factor, comp in zip((system.first, system.second), spec):
        if factor.kind == "binary_shift":
            out.append(_parse_shift_point(comp))
        elif factor.kind == "product":
            out.append(_product_point(factor, comp))
        elif isinstance(comp, (int, float)):
            out.append(float(comp))
        else:
            out.append(_parse_scalar(comp))
    return tuple(out)


def _parse_point(system: _systems.System, text: str):
    if system.kind == "binary_shift":
        return _parse_shift_point(text)
    if system.kind == "product":
        return _product_point(system, _parse_json_arg(text, "point"))
    return _parse_scalar(text)


def _build_schedule(args, cfg: dict, allow_single_n: bool = False,
                    default_max: int = DEFAULT_SCHEDULE_MAX) -> Schedule:
    single = _effective(args, cfg, "n") if allow_single_n else None
    checkpoints = _effective(args, cfg, "checkpoints")
    schedule_max = _effective(args, cfg, "schedule_max")
    given = sum(v is not None for v in (single, checkpoints, schedule_max))
    if given > 1:
        raise CliError("give at most one of --n, --checkpoints, --schedule-max")
    tail_start = _effective(args, cfg, "tail_start")
    try:
        if single is not None:
            return Schedule((int(single),))
        if checkpoints is not None:
            if isinstance(checkpoints, str):
                parts = [p for p in checkpoints.split(",") if p.strip()]
            else:
                parts = list(checkpoints)
            try:
                cps = tuple(int(p) for p in parts)
            except (TypeError, ValueError):
                raise CliError(f"bad checkpoint list '{checkpoints}'")
            return Schedule(cps, int(tail_start) if tail_start is not None else 0)
        max_n = int(schedule_max) if schedule_max is not None else default_max
        schedule = Schedule.geometric(max_n)
        if tail_start is not None:
            schedule = Schedule(schedule.checkpoints, int(tail_start))
        return schedule
    except ValueError as exc:
        raise CliError(f"bad schedule: {exc}")


# ---------------------------------------------------------------------------
# output assembly


def _preamble(metric: str, system_dict, config: dict) -> list[str]:
    return [
        f"# metric={metric} system={json.dumps(system_dict, sort_keys=True)}",
        "# config=" + json.dumps(config, sort_keys=True),
    ]


def _emit_report(report: _analysis.DiagnosticReport, config: dict,
                 fmt: str, strict: bool) -> tuple[str, int]:
    if fmt == "json":
        payload = {
            "config": config,
            "version": __version__,
            "name": report.name,
            "parameters": report.parameters,
            "observations": report.observations,
            "summary": report.summary,
            "verdict": report.verdict,
            "witnesses": report.witnesses,
        }
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    else:
        lines = _preamble(report.name, report.parameters.get("system"), config)
        lines.append(report.to_csv().rstrip("\n"))
        lines.append("# summary=" + json.dumps(report.summary, sort_keys=True))
        lines.append(f"# verdict={report.verdict}")
        text = "\n".join(lines) + "\n"
    code = 1 if strict and report.verdict == _analysis.VERDICT_VIOLATED else 0
    return text, code


# ---------------------------------------------------------------------------
# command runners


def _run_pair(args, cfg: dict) -> tuple[str, int]:
    system = _build_system(args, cfg)
    x_text = _require(args, cfg, "x", "--x")
    y_text = _require(args, cfg, "y", "--y")
    x = _parse_point(system, x_text)
    y = _parse_point(system, y_text)
    schedule = _build_schedule(args, cfg, allow_single_n=True)
    method = _effective(args, cfg, "method", "auto")
    seed, fmt, _ = _common_values(args, cfg)
    ebar = _pseudometrics.ebar_estimate(system, x, y, schedule, method=method)
    bes = _pseudometrics.besicovitch_estimate(system, x, y, schedule)
    observations = [
        {"n": n, "ebar": e, "besicovitch": b}
        for (n, e), (_, b) in zip(ebar.rows(), bes.rows())
    ]
    summary = {"ebar_tail": ebar.tail_sup, "besicovitch_tail": bes.tail_sup}
    config = {
        "command": "pair", "system": system.to_dict(),
        "x": str(x_text), "y": str(y_text),
        "checkpoints": list(schedule.checkpoints),
        "tail_start": schedule.tail_start,
        "method": method, "seed": seed, "format": fmt,
    }
    if fmt == "json":
        payload = {"config": config, "version": __version__, "name": "pair",
                   "observations": observations, "summary": summary}
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    else:
        lines = _preamble("pair", system.to_dict(), config)
        lines.append("n,ebar,besicovitch")
        for row in observations:
            lines.append(f"{row['n']},{row['ebar']!r},{row['besicovitch']!r}")
        lines.append("# summary=" + json.dumps(summary, sort_keys=True))
        text = "\n".join(lines) + "\n"
    return text, 0


def _run_modulus(args, cfg: dict) -> tuple[str, int]:
    system = _build_system(args, cfg)
    delta = _positive_float(args, cfg, "delta", "--delta")
    pairs = _positive_int(args, cfg, "pairs", DEFAULT_PAIR_SAMPLES, "--pairs")
    threshold = float(_effective(args, cfg, "threshold", _analysis.DEFAULT_THRESHOLD))
    if threshold <= 0:
        raise CliError("--threshold must be positive")
    schedule = _build_schedule(args, cfg)
    seed, fmt, strict = _common_values(args, cfg)
    report = _analysis.continuity_modulus(
        system, delta, pairs, schedule, seed=seed, threshold=threshold)
    config = {
        "command": "modulus", "system": system.to_dict(), "delta": delta,
        "pairs": pairs, "threshold": threshold,
        "checkpoints": list(schedule.checkpoints),
        "tail_start": schedule.tail_start, "seed": seed, "format": fmt,
    }
    return _emit_report(report, config, fmt, strict)


def _run_ue(args, cfg: dict) -> tuple[str, int]:
    system = _build_system(args, cfg)
    points = _positive_int(args, cfg, "points", DEFAULT_POINT_SAMPLES, "--points")
    threshold = float(_effective(args, cfg, "threshold", _analysis.DEFAULT_THRESHOLD))
    if threshold <= 0:
        raise CliError("--threshold must be positive")
    schedule = _build_schedule(args, cfg)
    seed, fmt, strict = _common_values(args, cfg)
    report = _analysis.unique_ergodicity_diagnostic(
        system, points, schedule, seed=seed, threshold=threshold)
    config = {
        "command": "ue", "system": system.to_dict(), "points": points,
        "threshold": threshold, "checkpoints": list(schedule.checkpoints),
        "tail_start": schedule.tail_start, "seed": seed, "format": fmt,
    }
    return _emit_report(report, config, fmt, strict)


def _run_birkhoff(args, cfg: dict) -> tuple[str, int]:
    system = _build_system(args, cfg)
    observable = _effective(args, cfg, "observable")
    if observable is None:
        observable = "symbol0" if system.kind == "binary_shift" else "coordinate"
    points = _positive_int(args, cfg, "points", DEFAULT_POINT_SAMPLES, "--points")
    threshold = float(_effective(args, cfg, "threshold", _analysis.DEFAULT_THRESHOLD))
    if threshold <= 0:
        raise CliError("--threshold must be positive")
    schedule = _build_schedule(args, cfg)
    seed, fmt, strict = _common_values(args, cfg)
    report = _analysis.birkhoff_profile(
        system, observable, points, schedule, seed=seed, threshold=threshold)
    config = {
        "command": "birkhoff", "system": system.to_dict(),
        "observable": observable, "points": points, "threshold": threshold,
        "checkpoints": list(schedule.checkpoints),
        "tail_start": schedule.tail_start, "seed": seed, "format": fmt,
    }
    return _emit_report(report, config, fmt, strict)


def _run_meaneq(args, cfg: dict) -> tuple[str, int]:
    system = _build_system(args, cfg)
    delta = _positive_float(args, cfg, "delta", "--delta")
    pairs = _positive_int(args, cfg, "pairs", DEFAULT_PAIR_SAMPLES, "--pairs")
    threshold = float(_effective(args, cfg, "threshold", _analysis.DEFAULT_THRESHOLD))
    if threshold <= 0:
        raise CliError("--threshold must be positive")
    # the product-orbit route solves a dense assignment per checkpoint, so
    # this command defaults to a shorter schedule than the others
    schedule = _build_schedule(args, cfg, default_max=MEANEQ_SCHEDULE_MAX)
    seed, fmt, strict = _common_values(args, cfg)
    report = _analysis.mean_equicontinuity_diagnostic(
        system, delta, pairs, schedule, seed=seed, threshold=threshold)
    config = {
        "command": "meaneq", "system": system.to_dict(), "delta": delta,
        "pairs": pairs, "threshold": threshold,
        "checkpoints": list(schedule.checkpoints),
        "tail_start": schedule.tail_start, "seed": seed, "format": fmt,
    }
    return _emit_report(report, config, fmt, strict)


def _run_example31(args, cfg: dict) -> tuple[str, int]:
    blocks = _positive_int(args, cfg, "blocks", 6, "--blocks")
    rule = _effective(args, cfg, "block_rule", "factorial")
    if isinstance(rule, str) and rule != "factorial":
        try:
            rule = tuple(int(p) for p in rule.split(",") if p.strip())
        except ValueError:
            raise CliError(f"bad block rule '{rule}' (use 'factorial' or a comma list)")
    elif isinstance(rule, (list, tuple)):
        rule = tuple(int(p) for p in rule)
    seed, fmt, strict = _common_values(args, cfg)
    config_obj = _analysis.Example31Config(block_rule=rule, n_blocks=blocks)
    report = _analysis.example31_report(config_obj)
    config = {
        "command": "example31", "blocks": blocks,
        "block_rule": rule if isinstance(rule, str) else list(rule),
        "seed": seed, "format": fmt,
    }
    return _emit_report(report, config, fmt, strict)


def _run_selftest(args, cfg: dict) -> tuple[None, int]:
    failures = _selftest.run(verbose=True)
    return None, 1 if failures else 0


_RUNNERS = {
    "pair": _run_pair,
    "modulus": _run_modulus,
    "ue": _run_ue,
    "birkhoff": _run_birkhoff,
    "meaneq": _run_meaneq,
    "example31": _run_example31,
    "selftest": _run_selftest,
}


# ---------------------------------------------------------------------------
# argument parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE",
                        help="JSON file with defaults; explicit flags override it")
    common.add_argument("--seed", type=int, help="random seed (default 0)")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    common.add_argument("--strict", action="store_true", default=None,
                        help="exit 1 when the verdict is 'violated'")

    sysflags = argparse.ArgumentParser(add_help=False)
    sysflags.add_argument("--system",
                          choices=("circle", "circle_rotation", "doubling",
                                   "doubling_map", "tent", "tent_map", "logistic",
                                   "logistic_map", "shift", "binary_shift"),
                          help="named system")
    sysflags.add_argument("--alpha", type=float, help="rotation angle in [0, 1)")
    sysflags.add_argument("--r", type=float, help="logistic parameter in (0, 4]")
    sysflags.add_argument("--horizon", type=int, help="shift metric horizon")
    sysflags.add_argument("--system-json", dest="system_json", metavar="JSON",
                          help="full system description (products supported)")

    sched = argparse.ArgumentParser(add_help=False)
    sched.add_argument("--schedule-max", dest="schedule_max", type=int,
                       help="geometric checkpoint schedule up to this orbit length")
    sched.add_argument("--checkpoints", metavar="N1,N2,...",
                       help="explicit comma-separated checkpoint list")
    sched.add_argument("--tail-start", dest="tail_start", type=int,
                       help="index of the first checkpoint counted as tail")

    parser = argparse.ArgumentParser(
        prog="orbitmetric",
        description="Orbit pseudo-metrics, measure distances and diagnostics "
                    "for topological dynamical systems.")
    parser.add_argument("--version", action="version",
                        version=f"orbitmetric {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("pair", parents=[common, sysflags, sched],
                       help="orbit pseudo-metric trace for one pair of points")
    p.add_argument("--x", help="first point")
    p.add_argument("--y", help="second point")
    p.add_argument("--n", type=int, help="single orbit length instead of a schedule")
    p.add_argument("--method", choices=("auto", "assignment", "fast"),
                   help="matched-average route (default auto)")

    p = sub.add_parser("modulus", parents=[common, sysflags, sched],
                       help="mean pseudo-metric modulus over close pairs")
    p.add_argument("--delta", type=float, help="closeness bound on sampled pairs")
    p.add_argument("--pairs", type=int, help="number of sampled pairs")
    p.add_argument("--threshold", type=float, help="consistency threshold")

    p = sub.add_parser("ue", parents=[common, sysflags, sched],
                       help="unique ergodicity surrogate: empirical diameter")
    p.add_argument("--points", type=int, help="number of sampled points")
    p.add_argument("--threshold", type=float, help="consistency threshold")

    p = sub.add_parser("birkhoff", parents=[common, sysflags, sched],
                       help="spread of Birkhoff averages across points")
    p.add_argument("--observable", help="observable name (default coordinate/symbol0)")
    p.add_argument("--points", type=int, help="number of sampled points")
    p.add_argument("--threshold", type=float, help="consistency threshold")

    p = sub.add_parser("meaneq", parents=[common, sysflags, sched],
                       help="mean equicontinuity diagnostic over close pairs")
    p.add_argument("--delta", type=float, help="closeness bound on sampled pairs")
    p.add_argument("--pairs", type=int, help="number of sampled pairs")
    p.add_argument("--threshold", type=float, help="consistency threshold")

    p = sub.add_parser("example31", parents=[common],
                       help="slow-alternation counterexample audit")
    p.add_argument("--blocks", type=int, help="number of blocks (default 6)")
    p.add_argument("--block-rule", dest="block_rule",
                   help="'factorial' or comma-separated block lengths")

    sub.add_parser("selftest", parents=[common],
                   help="run the built-in cross-check suite")

    # kept so unrecognized-argument errors can show the right usage text
    parser.command_parsers = dict(sub.choices)
    return parser


def _write_output(text: str, out_path) -> None:
    if out_path:
        try:
            with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise CliError(f"cannot write output: {exc}")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    if extra:
        chosen = parser.command_parsers.get(getattr(args, "command", None), parser)
        sys.stderr.write(chosen.format_usage())
        print(f"error: unrecognized arguments: {' '.join(extra)}", file=sys.stderr)
        return 2
    if getattr(args, "command", None) is None:
        parser.print_usage(sys.stderr)
        print("error: a command is required", file=sys.stderr)
        return 2
    try:
        config_path = getattr(args, "config", None)
        cfg = _load_config_file(config_path) if config_path else {}
        text, code = _RUNNERS[args.command](args, cfg)
        if text is not None:
            _write_output(text, _effective(args, cfg, "out"))
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, SamplingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    raise SystemExit(main())
