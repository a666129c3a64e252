"""Command-line entry point ``itp-lab``.

Every command writes ``<out>/<command>-<name>.csv`` and a JSON sidecar
``<out>/<command>-<name>.json``.  Outputs carry no timestamps, so re-running
a command with the same configuration reproduces them byte for byte.

Exit codes: 0 success, 1 computation failure or failed check (artifacts are
still written and flagged), 2 usage error.
"""
import argparse
import configparser
import csv
import json
import math
import os
import sys
from pathlib import Path

from .errors import DomainError, ItpLabError, UsageError
from .profiles import CaseTag, MediumPair, RadialProfile, classify

__all__ = ["main", "build_parser", "parse_config", "run", "read_pair_file", "write_pair_file"]

COMMANDS = ("regions", "spectrum", "dtn-verify", "psido-verify", "apriori-verify",
            "profile-validate")

PAIR_SECTIONS = ("c1", "n1", "c2", "n2")

_CONFIG_HELP = """\
configuration file:
  INI-style: a [<command>] section (e.g. [spectrum]) with "key = value" lines,
  keys being the long option names with or without the leading dashes
  (ell-max = 25).  Keys are case-sensitive; relative paths resolve against
  the working directory.  Command-line flags override file values; unknown
  sections or keys are a usage error.  An optional [global] section accepts
  "jobs".
"""

_PAIR_HELP = """\
pair file:
  Sections [c1], [n1], [c2], [n2], each a list of "r value" lines with r
  increasing from 0 to 1 (piecewise linear profile; a single line "value"
  means a constant).  An optional [medium] section holds "d = 2" and
  "b0 = 0.5".  Lines starting with # are comments.
"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ----------------------------------------------------------------- parsing

def _pow2_token(tok):
    tok = tok.strip()
    if tok.startswith("2^"):
        return 2.0 ** float(tok[2:])
    return float(tok)


def parse_float_list(text):
    """``"0,1,3"`` or a dyadic range ``"2^-10:2^-4"`` (both ends included)."""
    text = str(text).strip()
    try:
        if ":" in text and "," not in text:
            lo, hi = (_pow2_token(t) for t in text.split(":"))
            if lo <= 0 or hi <= 0 or hi < lo:
                raise ValueError
            k0, k1 = math.log2(lo), math.log2(hi)
            if k0 != round(k0) or k1 != round(k1):
                raise ValueError
            return [2.0 ** k for k in range(int(k0), int(k1) + 1)]
        vals = [_pow2_token(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed number list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty number list")
    return vals


def parse_int_range(text):
    """``"0:10"`` (inclusive) or ``"0,2,5"``."""
    text = str(text).strip()
    try:
        if ":" in text:
            a, b = (int(t) for t in text.split(":"))
            vals = list(range(a, b + 1))
        else:
            vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed integer list {text!r}") from None
    if not vals or min(vals) < 0:
        raise argparse.ArgumentTypeError("need nonnegative integers")
    return vals


def parse_range(text, n):
    try:
        vals = [float(t) for t in str(text).split(":")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed range {text!r}") from None
    if len(vals) != n or any(not math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"expected {n} colon-separated numbers, got {text!r}")
    return vals


def parse_complex(text):
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed complex number {text!r}") from None


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed number {text!r}") from None
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _existing_file(text):
    p = Path(text)
    if not p.is_file():
        raise argparse.ArgumentTypeError(f"no such file: {text}")
    return p


def read_pair_file(path):
    """Parse a pair file into a :class:`MediumPair`."""
    sections = {}
    meta = {}
    current = None
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            if current not in PAIR_SECTIONS + ("medium",):
                raise UsageError(f"{path}:{lineno}: unknown section [{current}]")
            if current in sections or (current == "medium" and meta):
                raise UsageError(f"{path}:{lineno}: duplicate section [{current}]")
            if current != "medium":
                sections[current] = []
            continue
        if current is None:
            raise UsageError(f"{path}:{lineno}: data outside a section")
        if current == "medium":
            key, sep, val = line.partition("=")
            key = key.strip().lower()
            if not sep or key not in ("d", "b0"):
                raise UsageError(f"{path}:{lineno}: expected 'd = ...' or 'b0 = ...'")
            meta[key] = val.strip()
            continue
        try:
            sections[current].append([float(t) for t in line.split()])
        except ValueError:
            raise UsageError(f"{path}:{lineno}: malformed number") from None
    missing = [s for s in PAIR_SECTIONS if s not in sections]
    if missing:
        raise UsageError(f"{path}: missing sections {missing}")
    profiles = {}
    for name in PAIR_SECTIONS:
        rows = sections[name]
        try:
            if len(rows) == 1 and len(rows[0]) == 1:
                profiles[name] = RadialProfile([0.0, 1.0], [rows[0][0]] * 2)
            else:
                if any(len(r) != 2 for r in rows):
                    raise UsageError(f"{path}: section [{name}] needs 'r value' lines")
                profiles[name] = RadialProfile([r[0] for r in rows], [r[1] for r in rows])
        except ItpLabError as exc:
            if isinstance(exc, UsageError):
                raise
            raise UsageError(f"{path}: section [{name}]: {exc}") from None
    try:
        d = int(meta.get("d", 2))
        b0 = float(meta["b0"]) if "b0" in meta else None
        return MediumPair(profiles["c1"], profiles["n1"], profiles["c2"], profiles["n2"],
                          d=d, b0=b0)
    except (ValueError, ItpLabError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def write_pair_file(path, pair):
    """Write ``pair`` in the format read by :func:`read_pair_file`."""
    lines = ["[medium]", f"d = {pair.d}"]
    if pair.b0 is not None:
        lines.append(f"b0 = {float(pair.b0)!r}")
    for name in PAIR_SECTIONS:
        prof = getattr(pair, name)
        lines.append(f"[{name}]")
        lines.extend(f"{float(r)!r} {float(v)!r}" for r, v in zip(prof.breakpoints, prof.values))
    Path(path).write_text("\n".join(lines) + "\n")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--out", default=None, help="output directory (default: .)")
    common.add_argument("--name", default=None, help="artifact name (default: per command)")
    # also accepted after the command; SUPPRESS keeps the global value otherwise
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                        help="worker processes (same as the global option)")

    p = _Parser(prog="itp-lab", description="Interior transmission eigenvalue laboratory.",
                epilog=_CONFIG_HELP + "\n" + _PAIR_HELP,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--config", type=_existing_file, default=None, help="INI configuration file")
    p.add_argument("--jobs", type=int, default=None,
                   help="worker processes (default: $ITP_LAB_JOBS, else all CPUs)")
    sub = p.add_subparsers(dest="command", metavar="command", parser_class=_Parser)

    s = sub.add_parser("regions", parents=[common], help="free-region boundary curve")
    s.add_argument("--case", default=None, help="Isotropic, AnisoNegative or AnisoPositive")
    s.add_argument("--mu", type=int, default=None)
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--C", type=float, default=None)
    s.add_argument("--epsilon", type=float, default=0.1)
    s.add_argument("--abs-range", type=lambda t: parse_range(t, 2), default=None,
                   help="a:b range of |lambda|")
    s.add_argument("--samples", type=int, default=200)

    s = sub.add_parser("spectrum", parents=[common], help="transmission eigenvalues in a box")
    s.add_argument("--pair", type=_existing_file, default=None, help="pair file")
    s.add_argument("--box", type=lambda t: parse_range(t, 4), default=None,
                   help="re0:re1:im0:im1")
    s.add_argument("--ell-max", type=int, default=None)
    s.add_argument("--tol", type=_positive_float, default=1e-10)
    s.add_argument("--ode-tol", type=_positive_float, default=1e-12)
    s.add_argument("--C", type=float, default=None,
                   help="constant whose free-region violations are listed")

    s = sub.add_parser("dtn-verify", parents=[common], help="DtN parametrix scaling")
    s.add_argument("--pair", type=_existing_file, default=None,
                   help="pair file (first medium used; default c = n = 1)")
    s.add_argument("--z", type=parse_complex, default=complex(-1.0))
    s.add_argument("--glancing", action="store_true", help="use theta = h**(2/5) instead of --z")
    s.add_argument("--h-list", type=parse_float_list, default=parse_float_list("2^-10:2^-4"))
    s.add_argument("--xi", type=parse_float_list, default=[0.0, 1.0, 3.0])
    s.add_argument("--with-q", action="store_true")
    s.add_argument("--ode-tol", type=_positive_float, default=1e-11)
    s.add_argument("--slope-band", type=_positive_float, default=0.3)

    s = sub.add_parser("psido-verify", parents=[common], help="composition and mollification")
    s.add_argument("--h-list", type=parse_float_list, default=parse_float_list("2^-9:2^-4"))
    s.add_argument("--rough-h-list", type=parse_float_list, default=parse_float_list("2^-8:2^-3"))
    s.add_argument("--t-list", type=parse_float_list, default=parse_float_list("2^-6:2^-1"))
    s.add_argument("--k", type=float, default=0.0, help="Sobolev order of the source space")

    s = sub.add_parser("apriori-verify", parents=[common], help="boundary flux boundedness")
    s.add_argument("--pair", type=_existing_file, default=None,
                   help="pair file (first medium used; default c = n = 1)")
    s.add_argument("--z", type=parse_complex, default=1j)
    s.add_argument("--h-list", type=parse_float_list, default=parse_float_list("2^-11:2^-4"))
    s.add_argument("--ells", type=parse_int_range, default=list(range(11)))
    s.add_argument("--thetas", type=parse_float_list, default=[1.0, 0.3, 0.1])
    s.add_argument("--theta-h", type=_positive_float, default=2.0 ** -7)
    s.add_argument("--ode-tol", type=_positive_float, default=1e-10)

    s = sub.add_parser("profile-validate", parents=[common], help="check a pair file")
    s.add_argument("--pair", type=_existing_file, default=None)
    s.add_argument("--b0", type=_positive_float, default=None)
    return p


def _subparser(parser, command):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[command]
    raise AssertionError("no subcommands")


def _apply_config(parser, sub, path, command):
    cfg = configparser.ConfigParser(interpolation=None)
    cfg.optionxform = str
    try:
        with open(path) as fh:
            cfg.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for section in cfg.sections():
        if section not in COMMANDS + ("global",):
            raise UsageError(f"unknown config section [{section}]")
    actions = {a.dest: a for a in sub._actions if a.option_strings}
    top = {a.dest: a for a in parser._actions if a.option_strings}
    out_sub, out_top = {}, {}
    for section, table, store in (("global", top, out_top), (command, actions, out_sub)):
        if not cfg.has_section(section):
            continue
        for key, raw in cfg.items(section):
            dest = key.lstrip("-").replace("-", "_")
            if section == "global" and dest != "jobs":
                raise UsageError(f"unknown key {key!r} in [global]")
            if dest not in table or dest in ("help", "config"):
                raise UsageError(f"unknown key {key!r} in [{section}]")
            act = table[dest]
            if isinstance(act, argparse._StoreTrueAction):
                if raw.strip().lower() not in ("true", "false", "yes", "no", "1", "0"):
                    raise UsageError(f"{key}: expected a boolean")
                store[dest] = raw.strip().lower() in ("true", "yes", "1")
                continue
            try:
                store[dest] = act.type(raw) if act.type else raw
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"config key {key!r}: {exc}") from None
    sub.set_defaults(**out_sub)
    parser.set_defaults(**out_top)


def parse_config(argv, parser=None):
    """Parse ``argv`` (plus the ``--config`` file) into a namespace.

    Raises
    ------
    UsageError
        Unknown flags or keys, missing files, malformed numbers, missing
        required parameters.
    """
    parser = parser or build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError(f"a command is required: {', '.join(COMMANDS)}")
    if args.config is not None:
        _apply_config(parser, _subparser(parser, args.command), args.config, args.command)
        args = parser.parse_args(argv)
    _check_required(args)
    if args.out is None:
        args.out = "."
    if args.jobs is None:
        env = os.environ.get("ITP_LAB_JOBS")
        try:
            args.jobs = int(env) if env else (os.cpu_count() or 1)
        except ValueError:
            raise UsageError(f"ITP_LAB_JOBS must be an integer, got {env!r}") from None
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    return args


def _check_required(args):
    need = {
        "regions": ("case", "mu", "C", "abs_range"),
        "spectrum": ("pair", "box"),
        "profile-validate": ("pair",),
    }.get(args.command, ())
    missing = ["--" + n.replace("_", "-") for n in need if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command}: missing {', '.join(missing)}")


# ----------------------------------------------------------------- output

def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):
        return _clean(obj.item())
    return obj


def _write_json(path, data):
    path.write_text(json.dumps(_clean(data), indent=2) + "\n")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])


def _artifact(args, name):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{args.command}-{name}"
    return out / f"{stem}.csv", out / f"{stem}.json"


def _write_sweep(args, name, result, passed, extra_params=None):
    csv_path, json_path = _artifact(args, name)
    _write_csv(csv_path, ["h", "theta", "value"], result.points)
    summary = result.summary(passed)
    if extra_params:
        summary["params"] = dict(summary["params"], **extra_params)
    _write_json(json_path, summary)
    return passed


# ----------------------------------------------------------------- commands

def _cmd_regions(args):
    from .regions import boundary_curve, exponents, region_spec, thresholds, write_boundary_curve_csv

    case = CaseTag.parse(args.case)
    spec = region_spec(case, args.mu, args.d, args.C, args.epsilon)
    name = args.name or f"{case.value.lower()}-mu{args.mu}-d{args.d}"
    csv_path, json_path = _artifact(args, name)
    write_boundary_curve_csv(csv_path, boundary_curve(spec, args.abs_range, args.samples))
    ex = exponents(case, args.mu, args.d)
    h_ref = 1.0 / args.abs_range[0]
    data = {
        "experiment": "regions",
        "params": {"case": case.value, "mu": args.mu, "d": args.d, "C": args.C,
                   "epsilon": args.epsilon, "abs_range": args.abs_range,
                   "samples": args.samples},
        "exponents": {k: (str(v) if v is not None else None) for k, v in ex.as_dict().items()},
        "thresholds_at_range_start": thresholds(h_ref, args.mu, args.d) if h_ref < 1 else None,
        "pass": True,
    }
    _write_json(json_path, data)
    return 0


def _cmd_spectrum(args):
    from .rootfinder import SearchBox, itp_spectrum
    from .verify import region_consistency

    pair = read_pair_file(args.pair)
    box = SearchBox(tuple(args.box[:2]), tuple(args.box[2:]))
    name = args.name or Path(args.pair).stem
    csv_path, json_path = _artifact(args, name)
    roots = itp_spectrum(pair, box, ell_max=args.ell_max, tol=args.tol, ode_tol=args.ode_tol,
                         jobs=args.jobs)
    _write_csv(csv_path, ["re", "im", "ell", "ells", "residual", "winding"],
               [(r.lam.real, r.lam.imag, r.ell, " ".join(map(str, r.ells)), r.residual,
                 r.winding) for r in roots])
    case = classify(pair)
    report = region_consistency(roots, case, box, C=args.C)
    data = {
        "experiment": "spectrum",
        "params": {"pair": Path(args.pair).name, "box": args.box, "ell_max": args.ell_max,
                   "tol": args.tol, "ode_tol": args.ode_tol},
        "case": case.value,
        "count": len(roots),
        "complete": roots.complete,
        "failures": roots.failures,
        "region": {
            "calibrated_C": report.calibrated_C,
            "checked_C": report.checked_C,
            "violations": [[r.lam.real, r.lam.imag] for r, _ in report.violations],
            "vacuous": report.vacuous,
        },
        "pass": roots.complete and not report.violations and not report.calibration_failed,
    }
    _write_json(json_path, data)
    return 0 if data["pass"] else 1


def _medium_arg(args):
    return read_pair_file(args.pair) if args.pair is not None else None


def _cmd_dtn_verify(args):
    from .verify import dtn_parametrix_sweep, z_fixed, z_glancing

    medium = _medium_arg(args)
    rule = z_glancing if args.glancing else z_fixed(args.z)
    ok = True
    for xi in args.xi:
        res = dtn_parametrix_sweep(medium, rule, args.h_list, xi, args.with_q,
                                   d=medium.d if medium else 2, ode_tol=args.ode_tol)
        passed = (math.isfinite(res.fitted_slope)
                  and abs(res.fitted_slope - 1.0) <= args.slope_band)
        base = args.name or "xi"
        extra = {"z": "glancing" if args.glancing else [args.z.real, args.z.imag]}
        ok &= _write_sweep(args, f"{base}{xi:g}", res, passed, extra)
    return 0 if ok else 1


def _cmd_psido_verify(args):
    from .verify import composition_sweep, mollification_sweep

    base = args.name or "composition"
    smooth = composition_sweep("smooth", args.h_list, k=args.k)
    mult = composition_sweep("multiplier", args.h_list, k=args.k)
    rough = composition_sweep("rough", args.rough_h_list, k=args.k)
    moll = mollification_sweep(args.t_list)
    results = [
        _write_sweep(args, f"{base}-smooth", smooth, smooth.fitted_slope >= 0.9),
        _write_sweep(args, f"{base}-multiplier", mult, mult.status == "exact"),
        _write_sweep(args, f"{base}-rough", rough, rough.fitted_slope >= 0.4),
        _write_sweep(args, "mollification", moll, abs(moll.fitted_slope - 2.0) <= 0.3),
    ]
    return 0 if all(results) else 1


def _cmd_apriori_verify(args):
    from .verify import apriori_sweep

    medium = _medium_arg(args)
    d = medium.d if medium else 2
    base = args.name or "apriori"
    hs = apriori_sweep(medium, args.z, 1.0, args.h_list, args.ells, d, args.ode_tol)
    rules = [complex(math.sqrt(max(0.0, 1.0 - t * t)), t) for t in args.thetas]
    ts = [apriori_sweep(medium, z, 1.0, [args.theta_h], args.ells, d, args.ode_tol)
          for z in rules]
    theta_pts = [(p[0], p[1], p[2]) for r in ts for p in r.points]
    theta_max = max(p[2] for p in theta_pts)
    ok_h = hs.extra["variation"] < 3.0
    ok_t = theta_max < 3.0 * hs.extra["max_ratio"]
    _write_sweep(args, f"{base}-h", hs, ok_h)
    csv_path, json_path = _artifact(args, f"{base}-theta")
    _write_csv(csv_path, ["h", "theta", "value"], theta_pts)
    _write_json(json_path, {"experiment": "apriori-theta",
                            "params": {"h": args.theta_h, "thetas": args.thetas,
                                       "ells": args.ells},
                            "max_ratio": theta_max, "pass": ok_t})
    return 0 if ok_h and ok_t else 1


def _cmd_profile_validate(args):
    pair = read_pair_file(args.pair)
    if args.b0 is not None:
        pair = MediumPair(pair.c1, pair.n1, pair.c2, pair.n2, pair.d, args.b0)
    reports = pair.validate()
    name = args.name or Path(args.pair).stem
    csv_path, json_path = _artifact(args, name)
    rows = []
    for prof, rep in reports.items():
        for v in rep.violations:
            rows.append((prof, v.rule, v.index, v.message))
    _write_csv(csv_path, ["profile", "rule", "index", "message"], rows)
    ok = not rows
    data = {"experiment": "profile-validate", "params": {"pair": Path(args.pair).name,
                                                         "b0": pair.b0},
            "case": classify(pair).value if ok else None, "violations": len(rows), "pass": ok}
    _write_json(json_path, data)
    for prof, rule, index, message in rows:
        print(f"{prof}: {rule} at {index}: {message}", file=sys.stderr)
    return 0 if ok else 1


_DISPATCH = {
    "regions": _cmd_regions,
    "spectrum": _cmd_spectrum,
    "dtn-verify": _cmd_dtn_verify,
    "psido-verify": _cmd_psido_verify,
    "apriori-verify": _cmd_apriori_verify,
    "profile-validate": _cmd_profile_validate,
}


def run(args):
    """Execute a parsed configuration and return the exit code."""
    try:
        return _DISPATCH[args.command](args)
    except (UsageError, DomainError) as exc:
        # out-of-range parameters are reported like malformed ones
        print(f"itp-lab: usage error: {exc}", file=sys.stderr)
        return 2
    except ItpLabError as exc:
        print(f"itp-lab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_config(argv)
    except UsageError as exc:
        print(f"itp-lab: usage error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
