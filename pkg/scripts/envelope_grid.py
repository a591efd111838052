"""Render the sup-norm envelope grid to a contour plot.

Writes grid.csv through the library, then envelope.png next to it. The shaded
band marks grid points where the envelope is strictly above half the sup norm.

    python3 scripts/envelope_grid.py --out-dir out/envelope
"""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from polarprox.cli import emit_envelope_grid  # noqa: E402
from polarprox.config import load_builtin  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="out/envelope")
    ap.add_argument("--scenario", default="infnorm-envelope-grid")
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = load_builtin(args.scenario)
    path = emit_envelope_grid(cfg, out / cfg.grid_path)

    data = np.genfromtxt(path, delimiter=",", names=True, dtype=None, encoding="utf-8")
    n = cfg.grid.resolution
    X = data["x"].reshape(n, n)
    L = data["lam"].reshape(n, n)
    E = data["envelope"].reshape(n, n)
    above = E > np.maximum(np.abs(X), np.abs(L)) / 2 + 1e-9

    fig, ax = plt.subplots(figsize=(5.5, 5))
    cs = ax.contour(X, L, E, levels=12, cmap="viridis")
    ax.clabel(cs, fontsize=7)
    ax.contourf(X, L, above.astype(float), levels=[0.5, 1.5], colors=["tab:red"], alpha=0.25)
    ax.set_xlabel("x")
    ax.set_ylabel("lambda")
    ax.set_aspect("equal")
    ax.set_title(f"{cfg.name} (alpha={cfg.alpha:g})")
    fig.tight_layout()
    fig.savefig(out / "envelope.png", dpi=150)
    print(f"wrote {path} and {out / 'envelope.png'}; {int(above.sum())} of {n * n} points off the faces")


if __name__ == "__main__":
    main()
