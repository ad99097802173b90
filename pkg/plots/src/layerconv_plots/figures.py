"""Figure builders: log-log rate charts, interface velocity profiles, and
embedding-ratio trends.

Rendering is batch-only and reproducible: Agg backend, fixed style, no
timestamps in the output metadata, fixed SVG hash salt.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .csvio import CsvFormatError, read_columns, read_sweep

plt.rcParams.update({
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 110,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.fontsize": 7,
    "svg.hashsalt": "layerconv",
})

_SAVE_KW = {"metadata": {"Date": None}}


def _fit_slope(eps: list[float], vals: list[float]) -> float | None:
    xs = [np.log(e) for e, v in zip(eps, vals) if v > 1e-13]
    ys = [np.log(v) for v in vals if v > 1e-13]
    if len(xs) < 3:
        return None
    A = np.vstack([xs, np.ones(len(xs))]).T
    (slope, _), *_ = np.linalg.lstsq(A, np.asarray(ys), rcond=None)
    return float(slope)


def _save(fig, out_image: Path | str) -> Path:
    out = Path(out_image)
    out.parent.mkdir(parents=True, exist_ok=True)
    kw = dict(_SAVE_KW) if out.suffix.lower() in (".png", ".svg") else {}
    fig.savefig(out, **kw)
    plt.close(fig)
    return out


def plot_rates(sweep_csv: Path | str, out_image: Path | str) -> dict[str, float]:
    """Log-log decay of every sweep column vs eps, annotated with fitted slopes.

    Slopes are refitted here from the data rows; the figure also carries a
    reference eps^(1/2) guide line. Returns {column: slope} for the columns
    that were fitted (the caller can check them against the table footer).
    """
    table = read_sweep(sweep_csv)
    eps = np.asarray(table.eps)
    fig, ax = plt.subplots()
    slopes: dict[str, float] = {}
    for name, vals in table.columns.items():
        v = np.asarray(vals)
        if np.all(v <= 1e-13):
            continue
        slope = _fit_slope(table.eps, vals)
        label = name if slope is None else f"{name}: s={slope:.2f}"
        if slope is not None:
            slopes[name] = slope
        ax.loglog(eps, np.where(v > 0, v, np.nan), marker="o", ms=3, lw=1,
                  label=label)
    if not slopes:
        raise CsvFormatError(f"{sweep_csv}: no fittable columns")
    ymid = np.exp(np.mean([np.log(v[0]) for v in
                           (np.asarray(c) for c in table.columns.values())
                           if v[0] > 1e-13]))
    ax.loglog(eps, ymid * (eps / eps[0]) ** 0.5, "k--", lw=1,
              label="slope 1/2 guide")
    ax.set_xlabel("transition half-width eps")
    ax.set_ylabel("difference norm")
    ax.set_title("sharp-limit convergence")
    ax.legend(loc="lower right", ncol=2)
    _save(fig, out_image)
    return slopes


def plot_layer(profile_csv: Path | str, out_image: Path | str) -> Path:
    """Tangential velocity across the interface: sharp, diffuse, approximate.

    The sharp profile is discontinuous; the diffuse members bridge the jump
    over ever narrower bands, and the approximate (streamfunction) velocity
    tracks them.
    """
    cols = read_columns(profile_csv, required=("z", "u_sharp"))
    z = np.asarray(cols["z"])
    fig, ax = plt.subplots()
    ax.plot(z, cols["u_sharp"], "k-", lw=1.8, label="sharp")
    for name, vals in cols.items():
        if name.startswith("u_eps_"):
            ax.plot(z, vals, lw=1, label=f"diffuse {name[6:]}")
        elif name.startswith("u_tilde_"):
            ax.plot(z, vals, ls="--", lw=0.8, label=f"approx {name[8:]}")
    ax.set_xlabel("z")
    ax.set_ylabel("tangential velocity")
    ax.set_title("velocity boundary layer across the interface")
    ax.legend(loc="best", ncol=2)
    return _save(fig, out_image)


def plot_embed(embed_csv: Path | str, out_image: Path | str) -> Path:
    """Sup-norm control ratios vs truncation level J."""
    cols = read_columns(embed_csv, required=("J", "iso", "aniso"))
    J = np.asarray(cols["J"])
    fig, ax = plt.subplots()
    ax.plot(J, cols["iso"], "o-", label="sup / isotropic norm")
    ax.plot(J, cols["aniso"], "s-", label="sup / anisotropic norm")
    ax.set_xlabel("truncation level J (max frequency 2^J)")
    ax.set_ylabel("ratio")
    ax.set_title("embedding diagnostic")
    ax.legend(loc="best")
    return _save(fig, out_image)


def render_report(out_dir: Path | str) -> list[Path]:
    """Render every figure whose input CSV exists under out_dir."""
    out_dir = Path(out_dir)
    written: list[Path] = []
    if (out_dir / "sweep.csv").exists():
        plot_rates(out_dir / "sweep.csv", out_dir / "rates.png")
        written.append(out_dir / "rates.png")
    if (out_dir / "layer_profile.csv").exists():
        written.append(plot_layer(out_dir / "layer_profile.csv",
                                  out_dir / "layer_profile.png"))
    if (out_dir / "embed.csv").exists():
        written.append(plot_embed(out_dir / "embed.csv", out_dir / "embed.png"))
    return written
