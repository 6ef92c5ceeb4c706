"""Command-line front end.

    radsing solve --N 2 --M 1 --q 3 --seed eikonal --from 1e-3 --to 10 --out run1
    radsing construct eikonal --N 1 --q 3 --out run2
    radsing classify run2/profile.csv --N 1 --q 3
    radsing expand --N 3 --q 3 --order 4
    radsing phase triple-theta --N 10 --q 3
    radsing sweep --Ns 3,4,5 --qs 1.5,3 --workers 4
    radsing selftest

Every command accepts --N --M --q --out --rel-tol --abs-tol --config FILE.
The config file holds flat ``key = value`` lines (keys as the long flag
names, dashes or underscores); command-line flags override it.

Data files (CSV) are deterministic: fixed column order, 17 significant
digits, LF line endings.  The JSON provenance next to each data file embeds
the fully resolved configuration and is the only place holding a timestamp.

Exit codes: 0 success; for ``solve`` 2 on BlowUpDetected and 3 on
StepUnderflow/MaxSteps; 64 usage or invalid input; 65 parameters outside a
construction's window; 66 classification window too short; 1 other failures
(runtime errors come with a JSON object on stderr).
"""

from __future__ import annotations

import argparse
import cmath
import concurrent.futures
import datetime as _dt
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import __version__
from .asymptotics import classify_infinity, classify_origin
from .constructors import (
    construct_dirac,
    construct_emden_singular,
    construct_gradient_singular,
    construct_hj_subcritical,
    shoot_eikonal_1d,
    shoot_eikonal_nd,
)
from .core import Params, SystemTag, eikonal_u
from .errors import RadsingError
from .phase_systems import equilibria
from .radial_solver import (
    IntegratorConfig,
    RadialState,
    TerminationKind,
    _g,
    _jsonable,
    dumps,
    integrate,
    profile_to_json,
    read_profile_csv,
    regular_seed_radius,
    seed_regular,
)
from .series import evaluate_expansion, expand, self_test

EXIT_USAGE = 64
SOLVE_EXIT = {
    TerminationKind.REACHED_BOUND: 0,
    TerminationKind.EVENT_HIT: 0,
    TerminationKind.BLOWUP_DETECTED: 2,
    TerminationKind.STEP_UNDERFLOW: 3,
    TerminationKind.MAX_STEPS: 3,
}
TAGS = ("emden", "hj", "dirac", "eikonal", "gradient-singular")

GLOBAL_DEFAULTS = {"N": 3, "M": 1.0, "q": 3.0, "out": None, "rel_tol": 1e-10, "abs_tol": 1e-12}
COMMAND_DEFAULTS = {
    "solve": {"seed": "eikonal", "r_from": None, "to": 10.0},
    "construct": {"gamma": -0.01, "rho": 0.1, "u0": 0.0, "data": "0,0"},
    "classify": {"at": "origin"},
    "expand": {"order": 4, "radius": None},
    "phase": {},
    "sweep": {"Ns": "3", "Ms": "1", "qs": "1.5,3", "tag": "auto", "workers": 0},
    "selftest": {},
}
_INT_KEYS = {"N", "order", "workers"}
_FLOAT_KEYS = {"M", "q", "rel_tol", "abs_tol", "r_from", "to", "gamma", "rho", "u0", "radius"}


class UsageError(RadsingError):
    exit_code = EXIT_USAGE


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    """Resolved configuration: defaults < config file < command-line flags."""

    command: str
    params: Params
    options: dict = field(default_factory=dict)
    out: str | None = None
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    config_file: str | None = None

    def integrator(self, **kw) -> IntegratorConfig:
        return IntegratorConfig(rel_tol=self.rel_tol, abs_tol=self.abs_tol, **kw)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "params": self.params.to_dict(),
            "options": dict(sorted(self.options.items())),
            "out": self.out,
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "config_file": self.config_file,
        }


def read_config_file(path) -> dict:
    """Flat ``key = value`` file; '#' starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        k = k.lstrip("-").replace("-", "_")
        out["r_from" if k == "from" else k] = v
    return out


def _convert(key, value):
    if value is None:
        return None
    try:
        if key in _INT_KEYS:
            f = float(value)
            if f != int(f):
                raise ValueError
            return int(f)
        if key in _FLOAT_KEYS:
            return float(value)
    except (TypeError, ValueError):
        raise UsageError(f"invalid value for {key}: {value!r}") from None
    return value


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--N", help="dimension (integer >= 1)")
    p.add_argument("--M", help="gradient coefficient M > 0")
    p.add_argument("--q", help="gradient exponent q > 1, q != 2")
    p.add_argument("--out", help="output directory")
    p.add_argument("--rel-tol", dest="rel_tol")
    p.add_argument("--abs-tol", dest="abs_tol")
    p.add_argument("--config", help="key = value file; flags override it")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="radsing", description=__doc__.split("\n\n")[0],
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    kw = dict(parents=[common], argument_default=argparse.SUPPRESS)

    p = sub.add_parser("solve", help="integrate from a named seed or explicit state", **kw)
    p.add_argument("--seed", help="eikonal | regular:u0=X | state:r=R,u=U,du=P")
    p.add_argument("--from", dest="r_from", help="start radius")
    p.add_argument("--to", help="end radius")

    p = sub.add_parser("construct", help="build a singular solution", **kw)
    p.add_argument("tag", choices=TAGS)
    p.add_argument("--gamma", help="Dirac coefficient (negative)")
    p.add_argument("--rho", help="Dirac outer radius")
    p.add_argument("--u0", help="gradient-singular value u(0)")
    p.add_argument("--data", help="HJ data xi,eta at t0")

    p = sub.add_parser("classify", help="classify a profile CSV", **kw)
    p.add_argument("profile")
    p.add_argument("--at", choices=("origin", "infinity"))

    p = sub.add_parser("expand", help="series coefficients of the eikonal expansion", **kw)
    p.add_argument("--order")
    p.add_argument("--radius", help="also evaluate the expansion at this radius")

    p = sub.add_parser("phase", help="equilibria and eigen-structure of a phase system", **kw)
    p.add_argument("system", help="e.g. triple-theta, lotka-volterra, emden-plane, hj")

    p = sub.add_parser("sweep", help="construct and classify over a parameter grid", **kw)
    p.add_argument("--Ns", help="comma list of N")
    p.add_argument("--Ms", help="comma list of M")
    p.add_argument("--qs", help="comma list of q")
    p.add_argument("--tag", choices=("auto", "regular") + TAGS)
    p.add_argument("--workers", help="worker processes (0 = cpu count)")

    sub.add_parser("selftest", help="fast internal consistency checks", **kw)
    return parser


def resolve(ns: argparse.Namespace) -> RunConfig:
    given = dict(vars(ns))
    command = given.pop("command")
    config_file = given.pop("config", None)
    merged = dict(GLOBAL_DEFAULTS)
    merged.update(COMMAND_DEFAULTS[command])
    if config_file:
        merged.update(read_config_file(config_file))
    merged.update(given)
    merged = {k: _convert(k, v) for k, v in merged.items()}
    params = Params(merged.pop("N"), merged.pop("M"), merged.pop("q"))
    out = merged.pop("out")
    rel, ab = merged.pop("rel_tol"), merged.pop("abs_tol")
    return RunConfig(command, params, merged, out, rel, ab, config_file)


# ---------------------------------------------------------------------------
# output helpers

def _outdir(cfg: RunConfig) -> Path | None:
    if cfg.out is None:
        return None
    d = Path(cfg.out)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _csv(columns: dict) -> str:
    names = list(columns)
    cols = [np.asarray(columns[n]) for n in names]
    lines = [",".join(names)]
    for row in zip(*cols):
        lines.append(",".join(v if isinstance(v, str) else _g(v) for v in row))
    return "\n".join(lines) + "\n"


def _write(d: Path | None, name: str, text: str):
    if d is not None:
        with open(d / name, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)


def _provenance(cfg: RunConfig, result: dict) -> str:
    return dumps({
        "config": cfg.to_dict(),
        "result": result,
        "software": {"package": "radsing", "version": __version__, "numpy": np.__version__},
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }) + "\n"


def _profile_columns(profile, extra=None) -> dict:
    cols = {"r": profile.r, "u": profile.u, "du": profile.p, "residual": profile.residuals}
    if extra:
        cols.update(extra)
    return cols


def _emit(obj):
    sys.stdout.write(dumps(obj) + "\n")


# ---------------------------------------------------------------------------
# commands

def _parse_seed(cfg: RunConfig) -> tuple[RadialState, str]:
    seed = str(cfg.options["seed"])
    params = cfg.params
    kind, _, rest = seed.partition(":")
    fields = {}
    for item in filter(None, rest.split(",")):
        k, _, v = item.partition("=")
        fields[k.strip()] = _convert("r_from", v)
    r0 = cfg.options.get("r_from")
    if kind == "eikonal":
        r0 = 1e-3 if r0 is None else r0
        return RadialState(r0, float(eikonal_u(params, r0)), -params.q / r0), kind
    if kind == "regular":
        u0 = fields.get("u0", 0.0)
        r0 = regular_seed_radius(params, u0) if r0 is None else r0
        return seed_regular(params, u0, r0), kind
    if kind == "state":
        try:
            return RadialState(fields["r"], fields["u"], fields["du"]), kind
        except KeyError:
            raise UsageError("state seed needs r=..,u=..,du=..") from None
    raise UsageError(f"unknown seed {seed!r}")


def cmd_solve(cfg: RunConfig) -> int:
    start, kind = _parse_seed(cfg)
    prof = integrate(cfg.params, start, cfg.options["to"], cfg.integrator())
    extra = {}
    result = profile_to_json(prof)
    if kind == "eikonal":
        dev = prof.u - eikonal_u(cfg.params, prof.r)
        extra["dev_eikonal"] = dev
        result["max_dev_eikonal"] = float(np.max(np.abs(dev)))
    d = _outdir(cfg)
    _write(d, "profile.csv", _csv(_profile_columns(prof, extra)))
    _write(d, "provenance.json", _provenance(cfg, result))
    _emit({k: result[k] for k in ("termination", "samples", "r_range") if k in result}
          | ({"max_dev_eikonal": result["max_dev_eikonal"]} if "max_dev_eikonal" in result else {}))
    return SOLVE_EXIT[prof.termination.kind]


def construct(tag: str, params: Params, options: dict | None = None):
    """Dispatch a construction tag to its constructor."""
    o = options or {}
    if tag == "emden":
        return construct_emden_singular(params)
    if tag == "hj":
        data = [float(x) for x in str(o.get("data", "0,0")).split(",")]
        return construct_hj_subcritical(params, data=tuple(data))
    if tag == "dirac":
        return construct_dirac(params, o.get("gamma", -0.01), o.get("rho", 0.1))
    if tag == "eikonal":
        if params.N == 1:
            return shoot_eikonal_1d(params)[1]
        return shoot_eikonal_nd(params)
    if tag == "gradient-singular":
        return construct_gradient_singular(params, u0_target=o.get("u0", 0.0))
    raise UsageError(f"unknown construction {tag!r}")


def _safe_classify(fn, profile, params) -> dict:
    try:
        return fn(profile, params).to_dict()
    except RadsingError as e:
        return e.to_dict()


def cmd_construct(cfg: RunConfig) -> int:
    tag = cfg.options["tag"]
    prof = construct(tag, cfg.params, cfg.options)
    report = _safe_classify(classify_origin, prof, cfg.params)
    result = profile_to_json(prof, {"tag": tag, "classification": report})
    d = _outdir(cfg)
    _write(d, "profile.csv", _csv(_profile_columns(prof)))
    _write(d, "provenance.json", _provenance(cfg, result))
    _emit({"tag": tag, "classification": report, "samples": len(prof)})
    return 0


def cmd_classify(cfg: RunConfig) -> int:
    path = cfg.options["profile"]
    try:
        prof = read_profile_csv(path, cfg.params)
    except (OSError, KeyError, ValueError) as e:
        if isinstance(e, RadsingError):
            raise
        raise UsageError(f"cannot read profile {path}: {e}") from None
    fn = classify_origin if cfg.options["at"] == "origin" else classify_infinity
    report = fn(prof, cfg.params).to_dict()
    d = _outdir(cfg)
    _write(d, "classification.json", _provenance(cfg, report))
    _emit(report)
    return 0


def cmd_expand(cfg: RunConfig) -> int:
    exp = expand(cfg.params, cfg.options["order"])
    r = cfg.options.get("radius")
    if r is not None:
        u, du = evaluate_expansion(exp, cfg.params, r)
        exp.validation["evaluation"] = {"r": r, "u": u, "du": du}
    d = _outdir(cfg)
    k = np.arange(1, exp.n + 1)
    _write(d, "expansion.csv", _csv({"k": k, "A": exp.A, "a": exp.a, "b": exp.b}))
    _write(d, "expansion.json", _provenance(cfg, exp.to_dict()))
    _emit(exp.to_dict())
    return 0


def cmd_phase(cfg: RunConfig) -> int:
    tag = SystemTag.parse(cfg.options["system"])
    reports = [rep.to_dict() for rep in equilibria(tag, cfg.params)]
    d = _outdir(cfg)
    _write(d, "phase.json", _provenance(cfg, reports))
    _emit(reports)
    return 0


def _auto_tag(params: Params) -> str:
    if params.q > 2:
        return "eikonal"
    if params.N >= 3:
        return "emden"
    return "regular"


def sweep_point(args) -> dict:
    """One sweep row; errors are reported in the regime column."""
    (N, M, q), tag, options = args
    row = {"N": N, "M": M, "q": q, "regime": "", "constant": math.nan, "residual": math.nan}
    try:
        params = Params(N, M, q)
        tag = _auto_tag(params) if tag == "auto" else tag
        if tag == "regular":
            s = seed_regular(params, 0.0, regular_seed_radius(params, 0.0))
            prof = integrate(params, s, 1e3, IntegratorConfig(rel_tol=options["rel_tol"], abs_tol=options["abs_tol"]))
            cl = classify_infinity(prof, params)
        else:
            cl = classify_origin(construct(tag, params, options), params)
        row["regime"] = cl.regime.value
        if cl.constants:
            row["constant"] = float(next(iter(cl.constants.values())))
        row["residual"] = float(cl.residual)
    except RadsingError as e:
        row["regime"] = e.kind
    return row


def _list(text, conv):
    try:
        return [conv(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"invalid list {text!r}") from None


def cmd_sweep(cfg: RunConfig) -> int:
    o = cfg.options
    grid = [(N, M, q) for N in _list(o["Ns"], int) for M in _list(o["Ms"], float) for q in _list(o["qs"], float)]
    opts = {k: v for k, v in o.items() if k in ("gamma", "rho", "u0", "data")}
    opts.update(rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol)
    jobs = [(g, o["tag"], opts) for g in grid]
    workers = o["workers"] or min(len(jobs), os.cpu_count() or 1)
    if workers <= 1:
        rows = [sweep_point(j) for j in jobs]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(sweep_point, jobs))
    cols = {k: [row[k] for row in rows] for k in ("N", "M", "q", "regime", "constant", "residual")}
    text = _csv(cols)
    d = _outdir(cfg)
    _write(d, "sweep.csv", text)
    _write(d, "provenance.json", _provenance(cfg, {"rows": len(rows)}))
    sys.stdout.write(text)
    return 0


def run_selftest() -> dict:
    """Series arithmetic, an eigenvalue identity and the exact N=2 solution."""
    checks = {}
    st = self_test()
    checks["series_ops"] = {"passed": st["passed"], "errors": st["errors"]}
    ev = []
    for N in range(3, 12):
        for q in (1.5, 3.0):
            rep = [e for e in equilibria(SystemTag.TRIPLE_THETA, Params(N, 1.0, q)) if e.name == "Emden"][0]
            # closed-form roots; np.roots loses half the digits at the N = 10 double root
            d = cmath.sqrt((N - 2) ** 2 - 8 * (N - 2))
            roots = np.array([2 - q, (2 - N + d) / 2, (2 - N - d) / 2])
            cost = np.abs(rep.eigenvalues[:, None] - roots[None, :])
            i, j = linear_sum_assignment(cost)
            ev.append(float(cost[i, j].max()))
    checks["emden_eigenvalues"] = {"passed": max(ev) < 1e-8, "max_error": max(ev)}
    p = Params(2, 1.0, 3.0)
    prof = integrate(p, RadialState(1e-3, float(eikonal_u(p, 1e-3)), -3e3), 10.0)
    dev = float(np.max(np.abs(prof.u - eikonal_u(p, prof.r))))
    checks["exact_N2"] = {"passed": dev < 1e-6, "max_dev": dev}
    try:
        a = expand(Params(2, 1.0, 3.0), 5).a
        checks["series_N2_zero"] = {"passed": max(abs(x) for x in a) < 1e-12}
    except RadsingError as e:
        checks["series_N2_zero"] = {"passed": False, "error": e.kind}
    return {"passed": all(c["passed"] for c in checks.values()), "checks": checks}


def cmd_selftest(cfg: RunConfig) -> int:
    report = run_selftest()
    d = _outdir(cfg)
    _write(d, "selftest.json", _provenance(cfg, report))
    _emit(report)
    return 0 if report["passed"] else 1


COMMANDS = {
    "solve": cmd_solve,
    "construct": cmd_construct,
    "classify": cmd_classify,
    "expand": cmd_expand,
    "phase": cmd_phase,
    "sweep": cmd_sweep,
    "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        cfg = resolve(ns)
        return COMMANDS[cfg.command](cfg)
    except RadsingError as e:
        sys.stderr.write(json.dumps(_jsonable(e.to_dict()), sort_keys=True) + "\n")
        return e.exit_code
    except OSError as e:
        sys.stderr.write(json.dumps({"error": type(e).__name__, "message": str(e)}) + "\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
