"""Command-line front end: distances, volumes, moduli, operators and verification suites."""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .errors import BetapotError, ContractError, DivergenceError, QuadratureError
from .fields import EXAMPLE1_RADIUS, make_field, make_weight, sample_to_grid, write_grid
from .metric import BetaParams, ball_volume_exact, beta_distance
from .operators import build_growth_function, gen_frac_integral
from .quadrature import QuadratureConfig, integrate_ball, integrate_ball_mc
from .report import VerificationReport, canonical, fmt
from .spaces import CenterGrid, make_center_grid, morrey_norm, stummel_modulus
from .verify import SUITE_IDS, SuiteConfig, run_example1, run_suite

SEED_ENV = "BETAPOT_SEED"
COMMANDS = ("dist", "ball-volume", "morrey-norm", "stummel", "frac-integral", "growth-fn", "verify", "example1")
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DIVERGENCE = 0, 1, 2, 3


class UsageError(BetapotError):
    """Invalid command line or configuration; ``param`` names the offending option."""

    def __init__(self, message: str, param: str | None = None):
        super().__init__(message)
        self.param = param


def _reals(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in str(text).replace(" ", "").split(",") if v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}") from None


def _params(text: str) -> tuple[str, ...]:
    items = tuple(t for t in str(text).replace(";", " ").split() if t)
    for t in items:
        if "=" not in t:
            raise argparse.ArgumentTypeError(f"expected key=value, got {t!r}")
    return items


@dataclass(frozen=True)
class RunConfig:
    """One field per command-line flag; ``None`` means the command's default."""

    command: str
    beta: tuple[float, ...] | None = None
    x: tuple[float, ...] | None = None
    y: tuple[float, ...] | None = None
    field: str | None = None
    field_param: tuple[str, ...] = ()
    weight: str | None = None
    weight_param: tuple[str, ...] = ()
    p: float | None = None
    lam: float | None = None
    sigma: float | None = None
    gamma: float | None = None
    epsilon: float | None = None
    radius: float | None = None
    rmax: float | None = None
    J: int | None = None
    center: tuple[float, ...] | None = None
    per_axis: int | None = None
    convention: str | None = None
    method: str | None = None
    rel_tol: float | None = None
    abs_tol: float | None = None
    angular_order: int | None = None
    radial_order: int | None = None
    mc_budget: int | None = None
    t_range: tuple[float, ...] | None = None
    points: int | None = None
    suite: str | None = None
    replay: str | None = None
    workers: int | None = None
    seed: int | None = None
    out: str | None = None
    text_out: str | None = None
    save_grid: str | None = None
    grid_points: int | None = None
    config: str | None = None


@dataclass(frozen=True)
class Option:
    dest: str
    flags: tuple[str, ...]
    kwargs: dict
    commands: tuple[str, ...]


FIELD_CMDS = ("morrey-norm", "stummel", "frac-integral")
QUAD_CMDS = ("ball-volume", "morrey-norm", "stummel", "frac-integral", "verify", "example1")
LADDER_CMDS = ("morrey-norm", "stummel", "example1")
ALL = COMMANDS

OPTIONS: tuple[Option, ...] = (
    Option("beta", ("--beta",), {"type": _reals, "help": "exponents beta_i >= 1/2, comma-separated (default 0.5,0.5)"},
           tuple(c for c in ALL if c != "verify")),
    Option("x", ("--x",), {"type": _reals, "help": "point x (dist: first point; frac-integral: evaluation point)"},
           ("dist", "frac-integral")),
    Option("y", ("--y",), {"type": _reals, "help": "second point for dist"}, ("dist",)),
    Option("field", ("--field",), {"help": "field registry id or grid:<path> (default const)"}, FIELD_CMDS),
    Option("field_param", ("--field-param",), {"type": _params, "action": "append",
                                               "help": "field parameter key=value (repeatable)"}, FIELD_CMDS),
    Option("weight", ("--weight",), {"help": "weight registry id or curve:<csv> (phi for growth-fn, h for frac-integral)"},
           ("stummel", "frac-integral", "growth-fn")),
    Option("weight_param", ("--weight-param",), {"type": _params, "action": "append",
                                                 "help": "weight parameter key=value (repeatable)"},
           ("stummel", "frac-integral", "growth-fn")),
    Option("p", ("--p",), {"type": float, "help": "order p"}, ("stummel", "frac-integral", "growth-fn")),
    Option("lam", ("--lambda",), {"type": float, "help": "Morrey exponent lambda"}, ("morrey-norm",)),
    Option("sigma", ("--sigma",), {"type": float, "help": "sigma in (0, 1)"}, ("growth-fn",)),
    Option("gamma", ("--gamma",), {"type": float, "help": "power applied to a curve:<csv> weight"},
           ("stummel", "frac-integral", "growth-fn")),
    Option("epsilon", ("--epsilon",), {"type": float, "help": "lambda = n - 2 + epsilon (default 0.25)"}, ("example1",)),
    Option("radius", ("--radius",), {"type": float, "help": "ball radius (ball-volume, default 1) or truncation radius"},
           ("ball-volume", "frac-integral")),
    Option("rmax", ("--rmax",), {"type": float, "help": "top of the radius ladder"}, LADDER_CMDS),
    Option("J", ("-J", "--J"), {"type": int, "help": "ladder depth: radii rmax 2^-j, j = 0..J"}, LADDER_CMDS),
    Option("center", ("--center",), {"type": _reals, "help": "single centre (default: a lattice over the support)"},
           ("ball-volume", "morrey-norm", "stummel")),
    Option("per_axis", ("--per-axis",), {"type": int, "help": "centre lattice points per axis (default 3)"},
           ("morrey-norm", "stummel", "example1")),
    Option("convention", ("--convention",), {"choices": ("generalized", "paper-literal"),
                                             "help": "kernel exponent convention"},
           ("morrey-norm", "stummel", "frac-integral", "growth-fn", "example1")),
    Option("method", ("--method",), {"choices": ("chart", "mc", "exact"), "help": "ball-volume method (default chart)"},
           ("ball-volume",)),
    Option("rel_tol", ("--rel-tol",), {"type": float, "help": "quadrature relative tolerance"}, QUAD_CMDS),
    Option("abs_tol", ("--abs-tol",), {"type": float, "help": "quadrature absolute tolerance"}, QUAD_CMDS),
    Option("angular_order", ("--angular-order",), {"type": int, "help": "Gauss-Legendre order per angle"}, QUAD_CMDS),
    Option("radial_order", ("--radial-order",), {"type": int, "help": "Gauss-Legendre order per shell"}, QUAD_CMDS),
    Option("mc_budget", ("--mc-budget",), {"type": int, "help": "Monte Carlo sample budget"}, QUAD_CMDS),
    Option("t_range", ("--t-range",), {"type": _reals, "help": "lo,hi of the output ladder (default 1e-2,1e2)"},
           ("growth-fn",)),
    Option("points", ("--points",), {"type": int, "help": "points on the output ladder (default 50)"}, ("growth-fn",)),
    Option("suite", ("--suite",), {"choices": SUITE_IDS, "help": "suite to run (default all)"}, ("verify",)),
    Option("replay", ("--replay",), {"help": "re-run the suite recorded in a JSON report; exit 1 unless identical"},
           ("verify",)),
    Option("workers", ("--workers",), {"type": int, "help": "threads for suite entries (default 1)"},
           ("verify", "example1")),
    Option("seed", ("--seed",), {"type": int, "help": f"random seed (default ${SEED_ENV} or 0)"}, ALL),
    Option("out", ("--out",), {"help": "output path (default stdout)"}, ALL),
    Option("text_out", ("--text-out",), {"help": "human-readable report path"}, ("verify", "example1")),
    Option("save_grid", ("--save-grid",), {"help": "write the sampled field to a grid file usable as grid:<path>"},
           FIELD_CMDS),
    Option("grid_points", ("--grid-points",), {"type": int, "help": "grid points per axis for --save-grid (default 65)"},
           FIELD_CMDS),
    Option("config", ("--config",), {"help": "key=value config file with [run] and per-command sections"}, ALL),
)

COMMAND_HELP = {
    "dist": "beta-distance between --x and --y",
    "ball-volume": "Lebesgue volume of a beta-ball",
    "morrey-norm": "Morrey norm estimate with its quotient curve",
    "stummel": "Stummel modulus curve (CSV)",
    "frac-integral": "fractional integral I_{p,h}(f)(x)",
    "growth-fn": "Phi, H, psi and G on a log ladder (CSV)",
    "verify": "run a verification suite (JSON report)",
    "example1": "the worked example's three claims (JSON report)",
}

COMMAND_DEFAULTS: dict[str, dict[str, Any]] = {
    "example1": {"J": 40, "rmax": EXAMPLE1_RADIUS, "convention": "paper-literal", "epsilon": 0.25},
    "ball-volume": {"radius": 1.0, "method": "chart"},
}
GENERIC_DEFAULTS: dict[str, Any] = {
    "beta": (0.5, 0.5), "field": "const", "rmax": 1.0, "J": 20, "per_axis": 3, "convention": "generalized",
    "t_range": (1e-2, 1e2), "points": 50, "suite": "all", "workers": 1, "grid_points": 65,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would print and exit; route through the JSON error path
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="betapot", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for cmd in COMMANDS:
        sp = sub.add_parser(cmd, help=COMMAND_HELP[cmd], description=COMMAND_HELP[cmd])
        for opt in OPTIONS:
            if cmd in opt.commands:
                sp.add_argument(*opt.flags, dest=opt.dest, default=argparse.SUPPRESS, **opt.kwargs)
    return parser


# -- configuration ------------------------------------------------------------


def _converter(opt: Option) -> Callable[[str], Any]:
    conv = opt.kwargs.get("type", str)
    if "choices" in opt.kwargs:
        choices = opt.kwargs["choices"]

        def check(v, conv=conv):
            v = conv(v)
            if v not in choices:
                raise argparse.ArgumentTypeError(f"{v!r} not in {choices}")
            return v

        return check
    return conv


def read_config_file(path: str, command: str) -> dict[str, Any]:
    """[run] applies to every command that takes the key, [<command>] overrides it; keys are flag names."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keep "J" distinct from other keys
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}", "config") from None
    except configparser.Error as exc:
        raise UsageError(f"malformed config file: {exc}", "config") from None
    by_name = {}
    for opt in OPTIONS:
        for fl in opt.flags:
            by_name[fl.lstrip("-").replace("-", "_")] = opt
    out: dict[str, Any] = {}
    for section in ("run", command):
        if not cp.has_section(section):
            continue
        for key, raw in cp.items(section):
            k = key.replace("-", "_")
            opt = by_name.get(k) or by_name.get(k.lower())
            if opt is None:
                raise UsageError(f"unknown config key {key!r} in [{section}]", key)
            if command not in opt.commands:
                if section == "run":
                    continue  # shared keys for other commands
                raise UsageError(f"config key {key!r} does not apply to {command}", key)
            try:
                val = _converter(opt)(raw)
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"config key {key!r}: {exc}", key) from None
            out[opt.dest] = [val] if opt.kwargs.get("action") == "append" else val
    return out


def _env_seed() -> int | None:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}", "seed") from None


def parse_config(argv: list[str] | None) -> RunConfig:
    """Flags win over the config file, which wins over $BETAPOT_SEED and the command defaults."""
    ns = vars(build_parser().parse_args(argv))
    cmd = ns["command"]
    merged: dict[str, Any] = {}
    env = _env_seed()
    if env is not None:
        merged["seed"] = env
    if ns.get("config"):
        merged.update(read_config_file(ns["config"], cmd))
    merged.update(ns)
    for key in ("field_param", "weight_param"):
        if key in merged:
            merged[key] = tuple(item for group in merged[key] for item in group)
    return RunConfig(**merged)


def resolved(cfg: RunConfig, name: str) -> Any:
    v = getattr(cfg, name)
    if v is not None:
        return v
    return COMMAND_DEFAULTS.get(cfg.command, {}).get(name, GENERIC_DEFAULTS.get(name))


def _require(cfg: RunConfig, name: str, flag: str) -> Any:
    v = resolved(cfg, name)
    if v is None:
        raise UsageError(f"{cfg.command} requires {flag}", name)
    return v


def _kv(items: tuple[str, ...], param: str) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for item in items:
        k, _, v = item.partition("=")
        k = k.strip()
        if "," in v:
            out[k] = _reals(v)
            continue
        try:
            out[k] = int(v) if v.strip().lstrip("-").isdigit() else float(v)
        except ValueError:
            out[k] = v
        if k == "":
            raise UsageError(f"empty key in {item!r}", param)
    return out


def _beta(cfg: RunConfig) -> BetaParams:
    try:
        return BetaParams(tuple(resolved(cfg, "beta")))
    except ContractError as exc:
        raise UsageError(str(exc), "beta") from None


def _point(cfg: RunConfig, name: str, bp: BetaParams, flag: str) -> np.ndarray:
    v = np.asarray(_require(cfg, name, flag), float)
    if v.shape != (bp.n,):
        raise UsageError(f"{flag} has {v.size} coordinates but beta has n={bp.n}", name)
    return v


def _quad(cfg: RunConfig, seed: int) -> QuadratureConfig:
    kw = {k: getattr(cfg, k) for k in ("rel_tol", "abs_tol", "angular_order", "radial_order", "mc_budget")
          if getattr(cfg, k) is not None}
    try:
        return QuadratureConfig(seed=seed, **kw)
    except ContractError as exc:
        raise UsageError(str(exc), next(iter(kw), "quadrature")) from None


def _seed(cfg: RunConfig) -> int:
    return 0 if cfg.seed is None else int(cfg.seed)


def validate(cfg: RunConfig) -> None:
    """Check the target operation's preconditions before dispatch."""
    if cfg.command not in COMMANDS:
        raise UsageError(f"unknown command {cfg.command!r}", "command")
    positive = {"radius": "--radius", "rmax": "--rmax", "sigma": "--sigma", "gamma": "--gamma",
                "epsilon": "--epsilon"}
    for name, flag in positive.items():
        v = getattr(cfg, name)
        if v is not None and not v > 0:
            raise UsageError(f"{flag} must be positive, got {v}", name)
    for name, flag, lo in (("J", "-J", 1), ("per_axis", "--per-axis", 1), ("points", "--points", 2),
                           ("workers", "--workers", 1), ("grid_points", "--grid-points", 2)):
        v = getattr(cfg, name)
        if v is not None and v < lo:
            raise UsageError(f"{flag} must be >= {lo}, got {v}", name)
    if cfg.sigma is not None and not cfg.sigma < 1:
        raise UsageError(f"--sigma must lie in (0, 1), got {cfg.sigma}", "sigma")
    if cfg.p is not None and not cfg.p >= 1:
        raise UsageError(f"--p must be >= 1, got {cfg.p}", "p")
    if cfg.t_range is not None and not (len(cfg.t_range) == 2 and 0 < cfg.t_range[0] < cfg.t_range[1]):
        raise UsageError("--t-range must be lo,hi with 0 < lo < hi", "t_range")
    if cfg.command != "verify":
        bp = _beta(cfg)
        if cfg.command == "dist":
            _point(cfg, "x", bp, "--x")
            _point(cfg, "y", bp, "--y")
        if cfg.command == "frac-integral":
            _point(cfg, "x", bp, "--x")
            _require(cfg, "p", "--p")
        if cfg.command == "stummel" and not _require(cfg, "p", "--p") > 1:
            raise UsageError(f"--p must exceed 1, got {cfg.p}", "p")
        if cfg.command == "morrey-norm":
            lam = _require(cfg, "lam", "--lambda")
            if not 0 < lam < bp.n:
                raise UsageError(f"--lambda must lie in (0, n={bp.n}), got {lam}", "lam")
        if cfg.command == "growth-fn":
            _require(cfg, "sigma", "--sigma")
            _require(cfg, "p", "--p")
        if cfg.command == "example1" and bp.n < 2:
            raise UsageError("example1 needs n >= 2", "beta")
        if cfg.center is not None:
            _point(cfg, "center", bp, "--center")
    elif cfg.suite is not None and cfg.replay is not None:
        raise UsageError("--suite and --replay are exclusive", "replay")


# -- output -------------------------------------------------------------------


def fmt_scalar(v: float) -> str:
    """12 significant digits, always with a decimal point or exponent."""
    if not math.isfinite(v):
        return str(v)
    return repr(float(fmt(v)))


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(canonical(obj), sort_keys=True, indent=2) + "\n"


# -- commands -------------------------------------------------------------------


def _field(cfg: RunConfig, bp: BetaParams):
    spec = resolved(cfg, "field")
    try:
        f = make_field(spec, bp, **_kv(cfg.field_param, "field_param"))
    except TypeError as exc:
        raise UsageError(f"bad parameters for field {spec!r}: {exc}", "field_param") from None
    if cfg.save_grid:
        box = f.bounding_box(bp)
        if box is None:
            box = (-np.ones(bp.n), np.ones(bp.n))
        vals, grid = sample_to_grid(f, box[0], box[1], resolved(cfg, "grid_points"))
        write_grid(cfg.save_grid, vals, grid)
    return f


def _weight(cfg: RunConfig):
    if cfg.weight is None:
        return None
    params = _kv(cfg.weight_param, "weight_param")
    if cfg.gamma is not None:
        if not cfg.weight.startswith("curve:"):
            raise UsageError("--gamma applies only to curve:<csv> weights", "gamma")
        params["gamma"] = cfg.gamma
    try:
        return make_weight(cfg.weight, **params)
    except TypeError as exc:
        raise UsageError(f"bad parameters for weight {cfg.weight!r}: {exc}", "weight_param") from None


def _grid(cfg: RunConfig, f, bp: BetaParams) -> CenterGrid:
    if cfg.center is not None:
        return CenterGrid((tuple(float(v) for v in cfg.center),))
    return make_center_grid(f, bp, resolved(cfg, "per_axis"))


def cmd_dist(cfg: RunConfig) -> int:
    bp = _beta(cfg)
    d = beta_distance(_point(cfg, "x", bp, "--x"), _point(cfg, "y", bp, "--y"), bp)
    _emit(fmt_scalar(float(d)) + "\n", cfg.out)
    return EXIT_OK


def cmd_ball_volume(cfg: RunConfig) -> int:
    bp = _beta(cfg)
    r = resolved(cfg, "radius")
    c = np.zeros(bp.n) if cfg.center is None else _point(cfg, "center", bp, "--center")
    method = resolved(cfg, "method")
    seed = _seed(cfg)
    one = make_field("const", bp)
    if method == "exact":
        val, err = ball_volume_exact(r, bp), 0.0
    elif method == "mc":
        q = _quad(cfg, seed)
        res = integrate_ball_mc(one, c, r, bp, q.mc_budget, seed)
        val, err = res.value, res.error_estimate
    else:
        res = integrate_ball(one, c, r, bp, _quad(cfg, seed))
        val, err = res.value, res.error_estimate
    _emit(_json({"volume": val, "error_estimate": err, "method": method, "radius": r, "beta": bp.beta}), cfg.out)
    return EXIT_OK


def cmd_stummel(cfg: RunConfig) -> int:
    bp = _beta(cfg)
    f = _field(cfg, bp)
    curve = stummel_modulus(f, cfg.p, bp, _grid(cfg, f, bp), resolved(cfg, "rmax"), resolved(cfg, "J"),
                            _quad(cfg, _seed(cfg)), weight=_weight(cfg), convention=resolved(cfg, "convention"))
    _emit(curve.to_csv(), cfg.out)
    return EXIT_OK


def cmd_morrey_norm(cfg: RunConfig) -> int:
    bp = _beta(cfg)
    f = _field(cfg, bp)
    est = morrey_norm(f, cfg.lam, bp, _grid(cfg, f, bp), resolved(cfg, "rmax"), resolved(cfg, "J"),
                      _quad(cfg, _seed(cfg)), resolved(cfg, "convention"))
    if cfg.out:
        est.curve.write_csv(cfg.out)
    sys.stdout.write(_json({"value": est.value, "status": est.status, "growth_exponent": est.growth_exponent,
                            "center": est.center, "lambda": cfg.lam}))
    return EXIT_OK


def cmd_frac_integral(cfg: RunConfig) -> int:
    bp = _beta(cfg)
    f = _field(cfg, bp)
    x = _point(cfg, "x", bp, "--x")
    v = gen_frac_integral(f, cfg.p, _weight(cfg), x, bp, _quad(cfg, _seed(cfg)), resolved(cfg, "convention"),
                          cfg.radius)
    _emit(fmt_scalar(v) + "\n", cfg.out)
    return EXIT_OK


def cmd_growth_fn(cfg: RunConfig) -> int:
    bp = _beta(cfg)
    phi = _weight(cfg) or make_weight("power", alpha=1.0)
    gf = build_growth_function(phi, cfg.sigma, cfg.p, bp, convention=resolved(cfg, "convention"))
    lo, hi = resolved(cfg, "t_range")
    t = np.geomspace(lo, hi, resolved(cfg, "points"))
    cols = (t, gf.Phi(t), gf.H(t), gf.psi(t), gf.G(t))
    lines = [f"# round_trip_error={fmt(gf.meta['round_trip_error'])}", "t,Phi,H,psi,G"]
    lines += [",".join(fmt(float(c[i])) for c in cols) for i in range(len(t))]
    _emit("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def _suite_config(cfg: RunConfig) -> SuiteConfig:
    seed = _seed(cfg)
    kw: dict[str, Any] = {"seed": seed, "quadrature": _quad(cfg, seed), "workers": resolved(cfg, "workers")}
    if cfg.command == "example1":
        kw.update(example_J=resolved(cfg, "J"), example_eps=resolved(cfg, "epsilon"),
                  example_convention=resolved(cfg, "convention"))
    return SuiteConfig(**kw)


def _write_report(report: VerificationReport, cfg: RunConfig) -> int:
    _emit(report.to_json(), cfg.out)
    if cfg.text_out:
        Path(cfg.text_out).write_text(report.to_text(), encoding="utf-8")
    else:
        sys.stderr.write(report.to_text())
    return EXIT_OK if report.passed else EXIT_FAIL


def suite_config_from_report(data: dict) -> SuiteConfig:
    c = dict(data["config"])
    q = QuadratureConfig(**c.pop("quadrature"))
    known = {f.name for f in fields(SuiteConfig)}
    unknown = set(c) - known
    if unknown:
        raise UsageError(f"report config has unknown keys {sorted(unknown)}", "replay")
    return SuiteConfig(quadrature=q, **c)


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.replay:
        try:
            recorded = json.loads(Path(cfg.replay).read_text(encoding="utf-8"))
            sc = suite_config_from_report(recorded)
            suite = recorded["suite"]
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"cannot replay {cfg.replay}: {exc}", "replay") from None
        sc = replace(sc, workers=resolved(cfg, "workers"))
        report = run_suite(suite, sc)
        same = json.loads(report.to_json()) == recorded
        _emit(_json({"replayed": cfg.replay, "suite": suite, "identical": same, "passed": report.passed}), cfg.out)
        return EXIT_OK if same else EXIT_FAIL
    return _write_report(run_suite(resolved(cfg, "suite"), _suite_config(cfg)), cfg)


def cmd_example1(cfg: RunConfig) -> int:
    bp = _beta(cfg)
    sc = _suite_config(cfg)
    report = VerificationReport("example1", {**sc.as_dict(), "beta": bp.beta, "rmax": resolved(cfg, "rmax")})
    report.extend(_example1_entries(bp, sc, resolved(cfg, "rmax"), resolved(cfg, "per_axis")))
    for e in report.entries:
        e.seed = sc.seed
    return _write_report(report, cfg)


def _example1_entries(bp: BetaParams, sc: SuiteConfig, rmax: float, per_axis: int):
    if rmax == EXAMPLE1_RADIUS and per_axis == 3:
        return run_example1(bp, sc)
    from .checks import check_example1

    return check_example1(bp, sc.cfg, r_max=rmax, J=sc.example_J, eps=sc.example_eps,
                          convention=sc.example_convention, per_axis=per_axis)


HANDLERS: dict[str, Callable[[RunConfig], int]] = {
    "dist": cmd_dist,
    "ball-volume": cmd_ball_volume,
    "morrey-norm": cmd_morrey_norm,
    "stummel": cmd_stummel,
    "frac-integral": cmd_frac_integral,
    "growth-fn": cmd_growth_fn,
    "verify": cmd_verify,
    "example1": cmd_example1,
}


def _fail(code: int, exc: BaseException, param: str | None = None) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if param:
        payload["parameter"] = param
    trace = getattr(exc, "trace", None)
    if trace:
        payload["trace"] = canonical(trace)
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
        validate(cfg)
        return HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        return _fail(EXIT_USAGE, exc, exc.param)
    except (DivergenceError, QuadratureError) as exc:
        return _fail(EXIT_DIVERGENCE, exc)
    except BetapotError as exc:
        return _fail(EXIT_USAGE, exc)
    except OSError as exc:
        return _fail(EXIT_USAGE, exc)


if __name__ == "__main__":
    sys.exit(main())
