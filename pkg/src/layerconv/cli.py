"""Command-line front end.

Subcommands: run, sweep, jumps, layer, embed, mms, report. Configuration is an
INI file with sections [domain], [layers], [grid], [time], [sweep], [initial]
and optional [model]; eps values may be exact fractions like "1/64". Exit
codes: 0 success, 1 run failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .coeffs import DIFFUSE, SHARP, LayerStack
from .grid import DomainSpec, GridError
from .harness import (
    SweepConfig,
    jump_refinement_study,
    mms_verify,
    read_table,
    run_sweep,
    save_snapshot,
    write_manifest,
    write_profile_csv,
    write_rows_csv,
    write_table,
)
from .norms import embedding_ratio
from .simulate import InitialSpec, RunConfig, SimulationError, run
from .transport import CflError, StepperConfig


class ConfigError(ValueError):
    """Malformed or physically inadmissible configuration; exits with code 2."""


def _parse_number(raw: str, key: str) -> float:
    """Decimal or exact fraction ('1/64'); fractions avoid dyadic float drift."""
    raw = raw.strip()
    try:
        if "/" in raw:
            return float(Fraction(raw))
        return float(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"key {key!r}: cannot parse number from {raw!r}") from exc


def _parse_list(raw: str, key: str) -> tuple[float, ...]:
    items = [s for s in (part.strip() for part in raw.split(",")) if s]
    if not items:
        raise ConfigError(f"key {key!r}: empty list")
    return tuple(_parse_number(s, key) for s in items)


@dataclass
class ResolvedConfig:
    """Everything a subcommand may need, resolved with defaults applied."""

    domain: DomainSpec
    stack: LayerStack
    nx: int
    nz_per_layer: int
    dt: float
    T_final: float
    cfl: float
    scheme: str
    snapshots: int
    initial: InitialSpec
    model: str
    model_eps: float | None
    eps_list: tuple[float, ...]
    alphas: tuple[float, ...]

    def run_config(self) -> RunConfig:
        stepper = StepperConfig(dt=self.dt, cfl=self.cfl, scheme=self.scheme)
        return RunConfig(
            domain=self.domain, stack=self.stack, model=self.model,
            eps=self.model_eps, nx=self.nx, nz_per_layer=self.nz_per_layer,
            T_final=self.T_final, stepper=stepper, initial=self.initial,
            snapshots=self.snapshots,
        )

    def sweep_config(self, out_dir: Path | None = None) -> SweepConfig:
        return SweepConfig(base=self.run_config(), eps_list=self.eps_list,
                           alphas=self.alphas, out_dir=out_dir)


_DEFAULTS = {
    ("domain", "L"): "1.0",
    ("domain", "H"): "1.0",
    ("domain", "interfaces"): "-0.5",
    ("layers", "K"): "1.0, 0.2",
    ("layers", "D"): "1.0, 0.5",
    ("grid", "nx"): "128",
    ("grid", "nz_per_layer"): "32",
    ("time", "dt"): "1e-3",
    ("time", "T_final"): "0.25",
    ("time", "cfl"): "0.4",
    ("time", "scheme"): "imex-cnab2",
    ("time", "snapshots"): "20",
    ("initial", "kind"): "separable",
    ("initial", "amplitude"): "0.5",
    ("initial", "x_mode"): "1",
    ("model", "type"): "sharp",
    ("model", "eps"): "",
    ("sweep", "eps"): "1/16, 1/32, 1/64, 1/128, 1/256",
    ("sweep", "alphas"): "0.6, 0.75",
}


def parse_config(path: Path | str) -> ResolvedConfig:
    """Read and fully resolve a configuration file (defaults applied)."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser()
    try:
        cp.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    def get(section: str, key: str) -> str:
        if cp.has_option(section, key):
            return cp.get(section, key)
        return _DEFAULTS[(section, key)]

    L = _parse_number(get("domain", "L"), "domain.L")
    H = _parse_number(get("domain", "H"), "domain.H")
    interfaces = _parse_list(get("domain", "interfaces"), "domain.interfaces")
    try:
        domain = DomainSpec(L=L, H=H, interfaces=interfaces)
    except GridError as exc:
        raise ConfigError(f"domain: {exc}") from exc

    K = _parse_list(get("layers", "K"), "layers.K")
    D = _parse_list(get("layers", "D"), "layers.D")
    try:
        stack = LayerStack(K=K, D=D)
    except ValueError as exc:
        raise ConfigError(f"layers: {exc}") from exc
    if stack.n_layers != domain.n_layers:
        raise ConfigError(
            f"layers.K/D define {stack.n_layers} layers but domain.interfaces "
            f"implies {domain.n_layers}")

    nx = int(_parse_number(get("grid", "nx"), "grid.nx"))
    nz_per_layer = int(_parse_number(get("grid", "nz_per_layer"), "grid.nz_per_layer"))
    dt = _parse_number(get("time", "dt"), "time.dt")
    T_final = _parse_number(get("time", "T_final"), "time.T_final")
    cfl = _parse_number(get("time", "cfl"), "time.cfl")
    scheme = get("time", "scheme").strip()
    snapshots = int(_parse_number(get("time", "snapshots"), "time.snapshots"))

    kind = get("initial", "kind").strip()
    amplitude = _parse_number(get("initial", "amplitude"), "initial.amplitude")
    x_mode = int(_parse_number(get("initial", "x_mode"), "initial.x_mode"))
    modes: tuple[tuple[int, float], ...] = ()
    if cp.has_option("initial", "modes"):
        pairs = []
        for chunk in cp.get("initial", "modes").split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            try:
                n_str, a_str = chunk.split(":")
                pairs.append((int(n_str), _parse_number(a_str, "initial.modes")))
            except ValueError as exc:
                raise ConfigError(f"key 'initial.modes': bad entry {chunk!r}") from exc
        modes = tuple(pairs)
    try:
        initial = InitialSpec(kind=kind, amplitude=amplitude, x_mode=x_mode, modes=modes)
    except ValueError as exc:
        raise ConfigError(f"initial: {exc}") from exc

    model = get("model", "type").strip()
    if model not in (SHARP, DIFFUSE):
        raise ConfigError(f"key 'model.type': must be 'sharp' or 'diffuse', got {model!r}")
    eps_raw = get("model", "eps").strip()
    model_eps = _parse_number(eps_raw, "model.eps") if eps_raw else None
    if model == DIFFUSE and model_eps is None:
        raise ConfigError("key 'model.eps' is required for a diffuse run")

    eps_list = _parse_list(get("sweep", "eps"), "sweep.eps")
    alphas = _parse_list(get("sweep", "alphas"), "sweep.alphas")

    cfg = ResolvedConfig(
        domain=domain, stack=stack, nx=nx, nz_per_layer=nz_per_layer, dt=dt,
        T_final=T_final, cfl=cfl, scheme=scheme, snapshots=snapshots,
        initial=initial, model=model, model_eps=model_eps,
        eps_list=eps_list, alphas=alphas,
    )
    _validate(cfg)
    return cfg


def _validate(cfg: ResolvedConfig) -> None:
    emax = cfg.domain.max_eps()
    for e in cfg.eps_list:
        if not 0.0 < e < emax:
            raise ConfigError(
                f"key 'sweep.eps': {e} needs 0 < eps < {emax} for this interface spacing")
    if cfg.model_eps is not None and not 0.0 < cfg.model_eps < emax:
        raise ConfigError(
            f"key 'model.eps': {cfg.model_eps} needs 0 < eps < {emax}")
    if any(b >= a for a, b in zip(cfg.eps_list[:-1], cfg.eps_list[1:])):
        raise ConfigError("key 'sweep.eps': values must decrease strictly")
    if cfg.dt <= 0 or cfg.T_final <= 0:
        raise ConfigError("keys 'time.dt'/'time.T_final' must be positive")
    try:
        StepperConfig(dt=cfg.dt, cfl=cfg.cfl, scheme=cfg.scheme)
    except ValueError as exc:
        raise ConfigError(f"time: {exc}") from exc


def emit_config(cfg: ResolvedConfig) -> str:
    """Resolved configuration echoed as INI text; parse(emit(c)) == c."""
    lines = [
        "[domain]",
        f"L = {cfg.domain.L!r}",
        f"H = {cfg.domain.H!r}",
        "interfaces = " + ", ".join(repr(z) for z in cfg.domain.interfaces),
        "[layers]",
        "K = " + ", ".join(repr(v) for v in cfg.stack.K),
        "D = " + ", ".join(repr(v) for v in cfg.stack.D),
        "[grid]",
        f"nx = {cfg.nx}",
        f"nz_per_layer = {cfg.nz_per_layer}",
        "[time]",
        f"dt = {cfg.dt!r}",
        f"T_final = {cfg.T_final!r}",
        f"cfl = {cfg.cfl!r}",
        f"scheme = {cfg.scheme}",
        f"snapshots = {cfg.snapshots}",
        "[initial]",
        f"kind = {cfg.initial.kind}",
        f"amplitude = {cfg.initial.amplitude!r}",
        f"x_mode = {cfg.initial.x_mode}",
        "[model]",
        f"type = {cfg.model}",
        f"eps = {'' if cfg.model_eps is None else repr(cfg.model_eps)}",
        "[sweep]",
        "eps = " + ", ".join(repr(e) for e in cfg.eps_list),
        "alphas = " + ", ".join(repr(a) for a in cfg.alphas),
    ]
    if cfg.initial.modes:
        lines.insert(lines.index("[model]"),
                     "modes = " + "; ".join(f"{n}:{a!r}" for n, a in cfg.initial.modes))
    return "\n".join(lines) + "\n"


class _Reporter:
    def __init__(self, quiet: bool):
        self.quiet = quiet

    def artifact(self, path: Path) -> None:
        if not self.quiet:
            print(f"wrote {path}")

    def info(self, msg: str) -> None:
        if not self.quiet:
            print(msg)


def _apply_overrides(cfg: ResolvedConfig, args: argparse.Namespace) -> ResolvedConfig:
    if getattr(args, "eps", None):
        eps_list = tuple(_parse_number(e, "--eps") for e in args.eps)
        cfg = ResolvedConfig(**{**cfg.__dict__, "eps_list": eps_list})
    if getattr(args, "nx", None):
        cfg = ResolvedConfig(**{**cfg.__dict__, "nx": int(args.nx)})
    if getattr(args, "nz", None):
        cfg = ResolvedConfig(**{**cfg.__dict__, "nz_per_layer": int(args.nz)})
    _validate(cfg)
    return cfg


def _manifest_entries(cfg: ResolvedConfig, timings: dict | None = None) -> dict:
    entries = {"config": ""}
    entries.update({f"config.{i}": line for i, line in
                    enumerate(emit_config(cfg).strip().splitlines())})
    if timings:
        entries.update({f"timing.{k}": v for k, v in timings.items()})
    return entries


def _cmd_run(args: argparse.Namespace, rep: _Reporter) -> int:
    cfg = _apply_overrides(parse_config(args.config), args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    snaps = run(cfg.run_config())
    for i, s in enumerate(snaps):
        for name, fld in (("phi", s.phi), ("P", s.P), ("u", s.u), ("w", s.w)):
            p = out / f"snap_{i:04d}_{name}.pld"
            save_snapshot(fld, p, time=s.t)
            rep.artifact(p)
    mpath = out / "manifest.txt"
    write_manifest(mpath, _manifest_entries(cfg))
    rep.artifact(mpath)
    rep.info(f"run complete: {len(snaps)} snapshots, final t = {snaps[-1].t:g}")
    return 0


def _cmd_sweep(args: argparse.Namespace, rep: _Reporter) -> int:
    cfg = _apply_overrides(parse_config(args.config), args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = run_sweep(cfg.sweep_config(out))
    tpath = out / "sweep.csv"
    write_table(result.table, tpath)
    rep.artifact(tpath)
    npath = out / "nearfar.csv"
    write_rows_csv(result.nearfar, npath)
    rep.artifact(npath)
    ppath = out / "layer_profile.csv"
    write_profile_csv(result.profile, ppath)
    rep.artifact(ppath)
    mpath = out / "manifest.txt"
    write_manifest(mpath, _manifest_entries(cfg, result.timings))
    rep.artifact(mpath)
    for name, fit in result.table.rates.items():
        rep.info(f"rate {name}: eps^{fit.exponent:.3f} (R^2 = {fit.r2:.4f})")
    return 0


def _cmd_jumps(args: argparse.Namespace, rep: _Reporter) -> int:
    cfg = _apply_overrides(parse_config(args.config), args)
    rows = jump_refinement_study(cfg.run_config())
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    jpath = out / "jumps.csv"
    write_rows_csv(rows, jpath)
    rep.artifact(jpath)
    mpath = out / "manifest.txt"
    write_manifest(mpath, _manifest_entries(cfg))
    rep.artifact(mpath)
    worst = max(r["u_relation"] for r in rows if r["factor"] == 1)
    rep.info(f"u-jump relation residual at base grid: {worst:.3e}")
    return 0


def _cmd_layer(args: argparse.Namespace, rep: _Reporter) -> int:
    # Same computation as sweep, but the layer/near-far artifacts are the point.
    return _cmd_sweep(args, rep)


def _cmd_embed(args: argparse.Namespace, rep: _Reporter) -> int:
    alpha = float(args.alpha)
    rows = []
    for J in range(3, 8):
        fld, _ = _embedding_family_field(J, alpha)
        iso, aniso = embedding_ratio(fld, alpha)
        rows.append({"family": "truncation", "J": J, "alpha": alpha,
                     "iso": iso, "aniso": aniso})
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    epath = out / "embed.csv"
    write_rows_csv(rows, epath)
    rep.artifact(epath)
    for r in rows:
        rep.info(f"J = {r['J']}: iso = {r['iso']:.4f}, aniso = {r['aniso']:.4f}")
    return 0


def _embedding_family_field(J: int, alpha: float, nx: int = 512, nz: int = 1024):
    """Truncated coefficient family u(n,m) = (1+n^2+m^2)^(-(alpha+1)/2).

    Built on L = 2*pi, H = pi so the norm multiplier matches (1+n^2+m^2)
    exactly; returns the physical field on a uniform grid.
    """
    from .grid import CENTER, Field, DomainSpec as _DS, build_grid as _bg

    domain = _DS(L=2.0 * np.pi, H=np.pi, interfaces=(-np.pi / 2,))
    grid = _bg(domain, nx=nx, nz_per_layer=nz // 2)
    N = 2**J
    n = np.arange(N + 1)[:, None]
    m = np.arange(N + 1)[None, :]
    uh = (1.0 + n**2 + m**2) ** (-(alpha + 1.0) / 2.0)
    cosx = np.cos(np.outer(grid.x, np.arange(N + 1)))          # (nx, N+1)
    cosz = np.cos(np.outer(np.arange(N + 1), np.pi * grid.z_centers / domain.H))
    data = cosx @ uh @ cosz
    return Field(grid, data, CENTER), grid


def _cmd_mms(args: argparse.Namespace, rep: _Reporter) -> int:
    rows = []
    orders = {}
    for case in ("elliptic", "diffusion"):
        res = mms_verify(case)
        rows.extend(res.rows)
        orders[case] = res.observed_order
        orders.update({f"{case}.{k}": v for k, v in res.extra_orders.items()})
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    mpath = out / "mms.csv"
    norm_rows = [{k: r.get(k, "") for k in ("case", "n", "h", "dt", "err", "err_P", "err_w")}
                 for r in rows]
    write_rows_csv(norm_rows, mpath)
    rep.artifact(mpath)
    for name, order in orders.items():
        rep.info(f"observed order [{name}]: {order:.3f}")
    return 0


def _cmd_report(args: argparse.Namespace, rep: _Reporter) -> int:
    out = Path(args.out)
    spath = out / "sweep.csv"
    if not spath.exists():
        raise ConfigError(f"no sweep.csv under {out}; run 'sweep' first")
    table = read_table(spath)
    rep.info(f"sweep over eps = {table.eps}")
    for name, fit in table.rates.items():
        rep.info(f"  {name}: exponent {fit.exponent:.3f}, R^2 {fit.r2:.4f}")
    try:  # optional figure rendering when the plotting package is around
        from layerconv_plots.figures import render_report  # type: ignore

        for p in render_report(out):
            rep.artifact(Path(p))
    except ImportError:
        rep.info("plots package not installed; text summary only")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="layerconv",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, config_required: bool) -> None:
        if config_required:
            p.add_argument("--config", required=True, help="INI configuration file")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--quiet", action="store_true", help="errors only")

    p_run = sub.add_parser("run", help="one model run, snapshots to disk")
    common(p_run, True)
    p_run.add_argument("--nx", type=int)
    p_run.add_argument("--nz", type=int)

    p_sweep = sub.add_parser("sweep", help="diffuse-width study against the sharp reference")
    common(p_sweep, True)
    p_sweep.add_argument("--eps", nargs="+", help="override eps list (fractions ok)")
    p_sweep.add_argument("--nx", type=int)
    p_sweep.add_argument("--nz", type=int)

    p_jumps = sub.add_parser("jumps", help="interfacial jump-condition residuals")
    common(p_jumps, True)
    p_jumps.add_argument("--nx", type=int)
    p_jumps.add_argument("--nz", type=int)

    p_layer = sub.add_parser("layer", help="boundary-layer velocity and near/far report")
    common(p_layer, True)
    p_layer.add_argument("--eps", nargs="+")
    p_layer.add_argument("--nx", type=int)
    p_layer.add_argument("--nz", type=int)

    p_embed = sub.add_parser("embed", help="anisotropic embedding diagnostic")
    common(p_embed, False)
    p_embed.add_argument("--alpha", default="0.75")

    p_mms = sub.add_parser("mms", help="manufactured-solution verification")
    common(p_mms, False)

    p_report = sub.add_parser("report", help="re-render summaries from existing CSVs")
    common(p_report, False)
    return parser


_HANDLERS = {
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "jumps": _cmd_jumps,
    "layer": _cmd_layer,
    "embed": _cmd_embed,
    "mms": _cmd_mms,
    "report": _cmd_report,
}


def dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    rep = _Reporter(quiet=bool(getattr(args, "quiet", False)))
    try:
        return _HANDLERS[args.command](args, rep)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (CflError, SimulationError, GridError) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # remaining ValueErrors come from configuration-shaped invariants
        print(f"config error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch())
