"""Sweep orchestration: diffuse-width studies against a sharp reference,
difference-norm tables with fitted rates, MMS verification, and persistence.

Every member of a sweep (the sharp reference and all diffuse runs) shares one
grid -- aligned to every band edge in the eps list -- and one time axis, so
difference fields are formed pointwise with no interpolation. Everything here
is deterministic: fixed reduction order, no randomness.
"""

from __future__ import annotations

import csv
import struct
import time as _time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .coeffs import DIFFUSE, SHARP, LayerStack, diffuse_profile, sharp_profile
from .diagnostics import (
    NearFarSplit,
    approx_streamfunction,
    interface_traces,
    jump_residuals,
    near_far_split,
)
from .elliptic import solve_pressure, velocity_from_streamfunction
from .grid import CENTER, ZFACE, DomainSpec, Field, FloatArray, Grid, build_grid, ddx
from .norms import _grad_sq, h_alpha_norm, l2, linf
from .simulate import RunConfig, run
from .transport import SCHEME_CNAB2, StepperConfig, TransportStepper

_trapz = getattr(np, "trapezoid", np.trapz)

RATE_FLOOR = 1e-13

TABLE_COLUMNS = (
    "dphi_l2",        # sup_t ||dphi||_2
    "dphi_dx_l2",     # sup_t ||d/dx dphi||_2
    "dphi_dxx_l2",    # sup_t ||d2/dx2 dphi||_2
    "grad_dphi_l2t",  # || grad dphi ||_{L2 in time and space}
    "grad_dP_l2",     # sup_t ||grad dP||_2
    "du_l2",          # sup_t ||du||_2 (both components)
    "dphi_linf",      # sup_t grid-max |dphi|
    "du_far_sup",     # sup_t far-field (|z-z_j| > eps) max |du|
    "du_global_sup",  # sup_t global max |du|
    "u_tilde_inf",    # sup_t ||u_eps - u_tilde||_inf
)


class SnapshotFormatError(ValueError):
    """Bad magic/version/shape in a snapshot file."""


@dataclass
class RateFit:
    exponent: float
    intercept: float
    r2: float


def fit_loglog(eps: list[float], values: list[float]) -> RateFit:
    """Least squares of log(value) on log(eps); rows below the floor are dropped."""
    xs, ys = [], []
    for e, v in zip(eps, values):
        if v >= RATE_FLOOR:
            xs.append(np.log(e))
            ys.append(np.log(v))
    if len(xs) < 3:
        raise ValueError(f"need at least 3 usable rows to fit a rate, got {len(xs)}")
    x = np.asarray(xs)
    y = np.asarray(ys)
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    sstot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if sstot < 1e-300 else 1.0 - float(np.sum(resid**2)) / sstot
    return RateFit(exponent=float(slope), intercept=float(intercept), r2=float(r2))


@dataclass
class ConvergenceTable:
    eps: list[float]
    columns: dict[str, list[float]]
    rates: dict[str, RateFit] = field(default_factory=dict)

    def column_names(self) -> list[str]:
        return list(self.columns.keys())

    def fit_all(self) -> None:
        for name, vals in self.columns.items():
            try:
                self.rates[name] = fit_loglog(self.eps, vals)
            except ValueError:
                continue  # all-zero columns (e.g. zero initial data) have no rate


def fit_rate(table: ConvergenceTable, column: str) -> RateFit:
    if column not in table.columns:
        raise KeyError(f"no column {column!r} in the table")
    return fit_loglog(table.eps, table.columns[column])


@dataclass
class SweepConfig:
    base: RunConfig                    # model field is ignored; runs derive from it
    eps_list: tuple[float, ...] = (1 / 16, 1 / 32, 1 / 64, 1 / 128, 1 / 256)
    alphas: tuple[float, ...] = (0.6, 0.75)
    out_dir: Path | None = None

    def __post_init__(self) -> None:
        es = self.eps_list
        if any(b >= a for a, b in zip(es[:-1], es[1:])):
            raise ValueError("eps list must be strictly decreasing")
        emax = self.base.domain.max_eps()
        for e in es:
            if not 0.0 < e < emax:
                raise ValueError(f"eps = {e} inadmissible for this domain (< {emax} required)")


@dataclass
class SweepResult:
    table: ConvergenceTable
    nearfar: list[dict]          # rows: eps, margin name, margin, sup/l2 splits
    profile: dict[str, FloatArray]  # z plus per-member u columns at x of max jump
    grid: Grid
    timings: dict[str, float]
    invariants: list[dict] = field(default_factory=list)  # one row per member run


def _center_w(w: Field) -> FloatArray:
    return 0.5 * (w.data[:, :-1] + w.data[:, 1:])


def _vec_l2(grid: Grid, ux: FloatArray, wz: FloatArray) -> float:
    return float(np.sqrt(np.sum((ux**2 + wz**2) * grid.dz[None, :]) * grid.dx))


def run_invariants(snaps: list, label: str) -> dict:
    """Structural-invariant metrics of one run (all should be near zero/one).

    sup_ratio: max_t ||phi||_inf / ||phi0||_inf (maximum-principle surrogate);
    div_rel: worst divergence scaled by velocity over finest spacing;
    energy_increase: worst relative growth of ||phi||_2 between snapshots;
    mirror_rel: worst asymmetry under x -> L - x, relative to ||phi0||_inf.
    """
    from .elliptic import divergence
    from .grid import mirror_x

    grid = snaps[0].phi.grid
    h_min = min(grid.dx, float(np.min(grid.dz)))
    phi0_sup = linf(snaps[0].phi)
    sup_ratio = 0.0
    div_rel = 0.0
    energy_increase = 0.0
    mirror_rel = 0.0
    prev_l2 = None
    for s in snaps:
        sup_ratio = max(sup_ratio, linf(s.phi) / max(phi0_sup, 1e-300))
        vel = max(linf(s.u), linf(s.w))
        if vel > 1e-300:
            div_rel = max(div_rel, linf(divergence(s.u, s.w)) * h_min / vel)
        e = l2(s.phi)
        if prev_l2 is not None and prev_l2 > 1e-300:
            energy_increase = max(energy_increase, e / prev_l2 - 1.0)
        prev_l2 = e
        asym = float(np.max(np.abs(s.phi.data - mirror_x(s.phi).data)))
        mirror_rel = max(mirror_rel, asym / max(phi0_sup, 1e-300))
    return {"run": label, "sup_ratio": sup_ratio, "div_rel": div_rel,
            "energy_increase": energy_increase, "mirror_rel": mirror_rel}


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Run the sharp reference plus one diffuse member per eps and tabulate.

    All members share the grid aligned to every band edge; comparison times
    are the snapshot cadence of the base configuration.
    """
    t0 = _time.perf_counter()
    base = cfg.base
    grid = build_grid(base.domain, base.nx, base.nz_per_layer, eps=cfg.eps_list)
    sharp_cfg = replace(base, model=SHARP, eps=None)
    sharp_prof = sharp_profile(base.stack, grid)
    sharp_snaps = run(sharp_cfg, grid=grid, profile=sharp_prof)
    t_sharp = _time.perf_counter() - t0

    columns: dict[str, list[float]] = {name: [] for name in TABLE_COLUMNS}
    for a in cfg.alphas:
        columns[f"u_tilde_h{a:g}"] = []
    nearfar_rows: list[dict] = []
    profile_cols: dict[str, FloatArray] = {"z": grid.z_centers.copy()}
    invariants = [run_invariants(sharp_snaps, "sharp")]

    for eps in cfg.eps_list:
        diff_prof = diffuse_profile(base.stack, grid, eps)
        diff_cfg = replace(base, model=DIFFUSE, eps=eps)
        diff_snaps = run(diff_cfg, grid=grid, profile=diff_prof)
        if len(diff_snaps) != len(sharp_snaps) or any(
                d.t != s.t for d, s in zip(diff_snaps, sharp_snaps)):
            raise RuntimeError("sharp and diffuse snapshot times do not match")
        invariants.append(run_invariants(diff_snaps, f"diffuse_{eps:g}"))

        sup = {name: 0.0 for name in columns}
        grad_dphi_series = []
        nf_acc: dict[str, NearFarSplit] | None = None
        for s, d in zip(sharp_snaps, diff_snaps):
            dphi = Field(grid, d.phi.data - s.phi.data, CENTER)
            dP = Field(grid, d.P.data - s.P.data, CENTER)
            dux = d.u.data - s.u.data
            dwc = _center_w(d.w) - _center_w(s.w)

            sup["dphi_l2"] = max(sup["dphi_l2"], l2(dphi))
            sup["dphi_dx_l2"] = max(sup["dphi_dx_l2"], l2(ddx(dphi)))
            sup["dphi_dxx_l2"] = max(sup["dphi_dxx_l2"], l2(ddx(ddx(dphi))))
            grad_dphi_series.append(_grad_sq(dphi, dirichlet_walls=True))
            sup["grad_dP_l2"] = max(sup["grad_dP_l2"],
                                    float(np.sqrt(_grad_sq(dP))))
            sup["du_l2"] = max(sup["du_l2"], _vec_l2(grid, dux, dwc))
            sup["dphi_linf"] = max(sup["dphi_linf"], linf(dphi))

            dumag = Field(grid, np.sqrt(dux**2 + dwc**2), CENTER)
            splits = near_far_split(dumag, eps)
            sup["du_far_sup"] = max(sup["du_far_sup"], splits["eps"].far_sup)
            sup["du_global_sup"] = max(sup["du_global_sup"], linf(dumag))
            if nf_acc is None:
                nf_acc = splits
            else:
                for key, sp in splits.items():
                    acc = nf_acc[key]
                    nf_acc[key] = NearFarSplit(
                        margin=sp.margin,
                        near_sup=max(acc.near_sup, sp.near_sup),
                        far_sup=max(acc.far_sup, sp.far_sup),
                        near_l2=max(acc.near_l2, sp.near_l2),
                        far_l2=max(acc.far_l2, sp.far_l2),
                    )

            psi_t = approx_streamfunction(s, sharp_prof, diff_prof)
            ut, wt = velocity_from_streamfunction(psi_t)
            eux = d.u.data - ut.data
            ewc = _center_w(d.w) - _center_w(wt)
            emag = np.sqrt(eux**2 + ewc**2)
            sup["u_tilde_inf"] = max(sup["u_tilde_inf"], float(np.max(emag)))
            for a in cfg.alphas:
                ha = np.hypot(h_alpha_norm(Field(grid, eux, CENTER), a),
                              h_alpha_norm(Field(grid, ewc, CENTER), a))
                sup[f"u_tilde_h{a:g}"] = max(sup[f"u_tilde_h{a:g}"], float(ha))

        times = [s.t for s in sharp_snaps]
        sup["grad_dphi_l2t"] = float(np.sqrt(_trapz(grad_dphi_series, times)))
        for name in columns:
            columns[name].append(sup[name])
        assert nf_acc is not None
        for key, sp in nf_acc.items():
            nearfar_rows.append({
                "eps": eps, "margin_kind": key, "margin": sp.margin,
                "near_sup": sp.near_sup, "far_sup": sp.far_sup,
                "near_l2": sp.near_l2, "far_l2": sp.far_l2,
            })

        # Velocity profile across the first interface at the x of largest jump,
        # final comparison time (consumed by the layer figure).
        s_end, d_end = sharp_snaps[-1], diff_snaps[-1]
        fj = grid.face_index(grid.domain.interfaces[0])
        jump = np.abs(s_end.u.data[:, fj - 1] - s_end.u.data[:, fj])
        ix = int(np.argmax(jump))
        if "u_sharp" not in profile_cols:
            profile_cols["u_sharp"] = s_end.u.data[ix, :].copy()
        psi_t = approx_streamfunction(s_end, sharp_prof, diff_prof)
        ut, _ = velocity_from_streamfunction(psi_t)
        profile_cols[f"u_eps_{eps:g}"] = d_end.u.data[ix, :].copy()
        profile_cols[f"u_tilde_{eps:g}"] = ut.data[ix, :].copy()

    table = ConvergenceTable(eps=list(cfg.eps_list), columns=columns)
    table.fit_all()
    timings = {"sharp_run_s": t_sharp, "total_s": _time.perf_counter() - t0}
    return SweepResult(table=table, nearfar=nearfar_rows, profile=profile_cols,
                       grid=grid, timings=timings, invariants=invariants)


def jump_refinement_study(base: RunConfig, factors: tuple[int, ...] = (1, 2, 4)) -> list[dict]:
    """Sharp-run interfacial residuals at the final time across refinements.

    dt refines with the grid: keeping dt fixed while dz shrinks leaves
    Crank-Nicolson ringing at the interface kink nearly undamped, which would
    pollute the extrapolated flux traces.
    """
    rows: list[dict] = []
    for f in factors:
        stepper = replace(base.stepper, dt=base.stepper.dt / f)
        cfg = replace(base, model=SHARP, eps=None,
                      nz_per_layer=base.nz_per_layer * f, stepper=stepper)
        snaps = run(cfg)
        final = snaps[-1]
        grid = final.phi.grid
        for j in range(len(grid.domain.interfaces)):
            tr = interface_traces(final, base.stack, grid, j)
            res = jump_residuals(tr, base.stack)
            rows.append({"factor": f, "nz_per_layer": cfg.nz_per_layer,
                         "interface": j, "t": final.t, **res})
    return rows


# ---------------------------------------------------------------------------
# MMS verification
# ---------------------------------------------------------------------------

@dataclass
class MmsResult:
    case: str
    rows: list[dict]
    observed_order: float
    extra_orders: dict[str, float] = field(default_factory=dict)


def two_layer_mode_reference(kx: float, K1: float, K2: float, H: float, z1: float):
    """Closed-form pressure mode for phi_hat(z) = sin(pi z / H), two layers.

    Solves the 4x4 interface system gluing A e^{kz} + B e^{-kz} branches by
    continuity of P and of K(P' + phi) at z1, with wall flux zero. Returns
    (P(z), dPdz(z)) callables valid across the whole channel.
    """
    mz = np.pi / H
    denom = kx**2 + mz**2

    def pp(z):
        return mz * np.cos(mz * z) / denom

    def dpp(z):
        return -(mz**2) * np.sin(mz * z) / denom

    def phihat(z):
        return np.sin(mz * z)

    e = np.exp
    # Unknowns [A1, B1, A2, B2].
    M = np.zeros((4, 4))
    b = np.zeros(4)
    # Wall flux on top: k(A1 - B1) + dpp(0) + phihat(0) ... P'(0) = -phi(0)
    M[0] = [kx, -kx, 0.0, 0.0]
    b[0] = -dpp(0.0) - phihat(0.0)
    # Wall flux on bottom.
    M[1] = [0.0, 0.0, kx * e(-kx * H), -kx * e(kx * H)]
    b[1] = -dpp(-H) - phihat(-H)
    # Continuity of P at z1.
    M[2] = [e(kx * z1), e(-kx * z1), -e(kx * z1), -e(-kx * z1)]
    b[2] = 0.0
    # Continuity of K (P' + phi) at z1.
    c = dpp(z1) + phihat(z1)
    M[3] = [K1 * kx * e(kx * z1), -K1 * kx * e(-kx * z1),
            -K2 * kx * e(kx * z1), K2 * kx * e(-kx * z1)]
    b[3] = (K2 - K1) * c
    A1, B1, A2, B2 = np.linalg.solve(M, b)

    def P(z):
        z = np.asarray(z, dtype=float)
        up = A1 * e(kx * z) + B1 * e(-kx * z) + pp(z)
        dn = A2 * e(kx * z) + B2 * e(-kx * z) + pp(z)
        return np.where(z >= z1, up, dn)

    def dPdz(z):
        z = np.asarray(z, dtype=float)
        up = kx * (A1 * e(kx * z) - B1 * e(-kx * z)) + dpp(z)
        dn = kx * (A2 * e(kx * z) - B2 * e(-kx * z)) + dpp(z)
        return np.where(z >= z1, up, dn)

    return P, dPdz


_MMS_DOMAIN = DomainSpec(L=1.0, H=1.0, interfaces=(-0.5,))
_MMS_STACK = LayerStack(K=(2.0, 1.0), D=(0.3, 0.3))


def _mms_elliptic(nz_levels: tuple[int, ...] = (16, 32, 64, 128)) -> MmsResult:
    kx = 2.0 * np.pi / _MMS_DOMAIN.L
    Pref, dPref = two_layer_mode_reference(kx, *_MMS_STACK.K, _MMS_DOMAIN.H,
                                           _MMS_DOMAIN.interfaces[0])
    rows = []
    errs_P, errs_w, hs = [], [], []
    for nz in nz_levels:
        grid = build_grid(_MMS_DOMAIN, nx=8, nz_per_layer=nz)
        prof = sharp_profile(_MMS_STACK, grid)
        xcos = np.cos(kx * grid.x)
        phi = Field(grid, xcos[:, None] * np.sin(np.pi * grid.z_centers / _MMS_DOMAIN.H)[None, :],
                    CENTER)
        sol = solve_pressure(prof, phi)
        P_exact = xcos[:, None] * Pref(grid.z_centers)[None, :]
        err_P = l2(Field(grid, sol.P.data - P_exact, CENTER))

        # Exact flux is single-valued at the interface, so pairing each face
        # with the layer value of its upper side is branch-consistent.
        zf = grid.z_faces[1:-1]
        Kz = np.where(zf >= _MMS_DOMAIN.interfaces[0], _MMS_STACK.K[0], _MMS_STACK.K[1])
        w_e = -Kz * (dPref(zf) + np.sin(np.pi * zf / _MMS_DOMAIN.H))
        werr = np.zeros((grid.nx, grid.nz + 1))
        werr[:, 1:-1] = sol.w.data[:, 1:-1] - xcos[:, None] * w_e[None, :]
        err_w = l2(Field(grid, werr, ZFACE))

        h = float(np.max(grid.dz))
        rows.append({"case": "elliptic", "n": nz, "h": h, "err_P": err_P, "err_w": err_w})
        errs_P.append(err_P)
        errs_w.append(err_w)
        hs.append(h)

    fit = fit_loglog(hs, errs_P)
    fit_w = fit_loglog(hs, errs_w)
    return MmsResult(case="elliptic", rows=rows, observed_order=fit.exponent,
                     extra_orders={"w": fit_w.exponent})


def _pure_diffusion_error(nz: int, dt: float, T: float,
                          ref_dt: float | None = None) -> float:
    """CNAB2 error on the separable decay solution with zero velocity."""
    grid = build_grid(_MMS_DOMAIN, nx=8, nz_per_layer=nz)
    prof = sharp_profile(_MMS_STACK, grid)  # equal layers: constant D
    kx = 2.0 * np.pi / _MMS_DOMAIN.L
    lam = _MMS_STACK.D[0] * (kx**2 + (np.pi / _MMS_DOMAIN.H) ** 2)
    phi0 = np.cos(kx * grid.x)[:, None] * np.sin(np.pi * grid.z_centers)[None, :]

    def evolve(step_dt: float) -> FloatArray:
        cfg = StepperConfig(dt=step_dt, scheme=SCHEME_CNAB2)
        stepper = TransportStepper(grid, prof, cfg)
        phi = Field(grid, phi0.copy(), CENTER)
        zero_u = Field.zeros(grid, CENTER)
        zero_w = Field.zeros(grid, ZFACE)
        n = int(round(T / step_dt))
        t = 0.0
        for _ in range(n):
            phi = stepper.step(phi, (zero_u, zero_w), t)
            t += step_dt
        return phi.data

    got = evolve(dt)
    if ref_dt is None:
        exact = np.exp(-lam * T) * phi0
    else:
        exact = evolve(ref_dt)
    return l2(Field(grid, got - exact, CENTER))


def _mms_diffusion() -> MmsResult:
    rows = []
    # Spatial sweep: tiny dt so the z-discretization error dominates.
    hs, errs = [], []
    for nz in (8, 16, 32, 64):
        e = _pure_diffusion_error(nz, dt=2e-5, T=0.01)
        h = 0.5 / nz
        rows.append({"case": "diffusion-space", "n": nz, "h": h, "err": e})
        hs.append(h)
        errs.append(e)
    fit_space = fit_loglog(hs, errs)

    # Temporal sweep against a same-grid fine-dt reference (spatial error cancels).
    dts, terrs = [], []
    for dt in (4e-3, 2e-3, 1e-3):
        e = _pure_diffusion_error(32, dt=dt, T=0.04, ref_dt=1e-4)
        rows.append({"case": "diffusion-time", "dt": dt, "err": e})
        dts.append(dt)
        terrs.append(e)
    fit_time = fit_loglog(dts, terrs)

    return MmsResult(case="diffusion", rows=rows, observed_order=fit_space.exponent,
                     extra_orders={"temporal": fit_time.exponent})


def mms_verify(case: str) -> MmsResult:
    """Manufactured-solution orders: 'elliptic' or 'diffusion'."""
    if case == "elliptic":
        return _mms_elliptic()
    if case == "diffusion":
        return _mms_diffusion()
    raise ValueError(f"unknown MMS case {case!r}")


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

SNAPSHOT_MAGIC = b"PLYD"
SNAPSHOT_VERSION = 1
_HEADER = struct.Struct("<4sIIIdddB")
_STAG_TAG = {CENTER: 0, ZFACE: 1}
_TAG_STAG = {v: k for k, v in _STAG_TAG.items()}


@dataclass
class Snapshot:
    nx: int
    nz: int            # number of z samples (faces store nz_cells + 1)
    L: float
    H: float
    time: float
    stag: str
    data: FloatArray


def save_snapshot(fld: Field, path: Path | str, time: float = 0.0) -> None:
    """Binary snapshot: magic, version, sizes, L, H, time, staggering, f64 LE data."""
    grid = fld.grid
    header = _HEADER.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION, grid.nx,
                          fld.data.shape[1], grid.domain.L, grid.domain.H,
                          float(time), _STAG_TAG[fld.stag])
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(fld.data, dtype="<f8").tobytes())


def load_snapshot(path: Path | str, grid: Grid | None = None):
    """Read a snapshot; returns (Field, time) when a matching grid is supplied."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise SnapshotFormatError("truncated snapshot header")
    magic, version, nx, nz, L, H, t, tag = _HEADER.unpack_from(raw)
    if magic != SNAPSHOT_MAGIC:
        raise SnapshotFormatError(f"bad magic {magic!r}")
    if version != SNAPSHOT_VERSION:
        raise SnapshotFormatError(f"unsupported snapshot version {version}")
    if tag not in _TAG_STAG:
        raise SnapshotFormatError(f"unknown staggering tag {tag}")
    data = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if data.size != nx * nz:
        raise SnapshotFormatError("payload size does not match header")
    data = data.reshape(nx, nz).astype(np.float64)
    snap = Snapshot(nx=nx, nz=nz, L=L, H=H, time=t, stag=_TAG_STAG[tag], data=data)
    if grid is None:
        return snap
    if (nx, L, H) != (grid.nx, grid.domain.L, grid.domain.H) or \
            nz != grid.n_samples(snap.stag):
        raise SnapshotFormatError("snapshot does not match the supplied grid")
    return Field(grid, data, snap.stag), t


def write_table(table: ConvergenceTable, path: Path | str) -> None:
    """sweep.csv: RFC-4180 rows plus '#rate,' footer lines per fitted column."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        names = table.column_names()
        writer.writerow(["eps"] + names)
        for i, e in enumerate(table.eps):
            writer.writerow([repr(e)] + [repr(table.columns[n][i]) for n in names])
        for name, fit in table.rates.items():
            fh.write(f"#rate,{name},{fit.exponent!r},{fit.intercept!r},{fit.r2!r}\r\n")


def read_table(path: Path | str) -> ConvergenceTable:
    eps: list[float] = []
    columns: dict[str, list[float]] = {}
    rates: dict[str, RateFit] = {}
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty table")
    header = rows[0]
    names = header[1:]
    for name in names:
        columns[name] = []
    for row in rows[1:]:
        if not row:
            continue
        if row[0].startswith("#rate"):
            if len(row) >= 5:
                _, name, expo, inter, r2 = row[:5]
            else:
                _, name, expo, inter, r2 = row[0].split(",")
            rates[name] = RateFit(float(expo), float(inter), float(r2))
            continue
        eps.append(float(row[0]))
        for name, val in zip(names, row[1:]):
            columns[name].append(float(val))
    return ConvergenceTable(eps=eps, columns=columns, rates=rates)


def write_rows_csv(rows: list[dict], path: Path | str) -> None:
    path = Path(path)
    if not rows:
        raise ValueError(f"refusing to write an empty table to {path}")
    names = list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for row in rows:
            writer.writerow([repr(row[n]) if isinstance(row[n], float) else row[n]
                             for n in names])


def write_profile_csv(profile: dict[str, FloatArray], path: Path | str) -> None:
    names = list(profile.keys())
    n = len(profile["z"])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for i in range(n):
            writer.writerow([repr(float(profile[k][i])) for k in names])


def write_manifest(path: Path | str, entries: dict) -> None:
    with open(path, "w") as fh:
        for key, val in entries.items():
            fh.write(f"{key} = {val}\n")
