"""Optional figure rendering for trajectories and Wigner maps."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def plot_trajectory(traj, path: str | Path, title: str = "") -> Path:
    path = Path(path)
    fig, (ax_x, ax_s) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
    ax_x.plot(traj.times, traj.x, color="C0", label=r"$\langle x \rangle$")
    ax_x.plot(traj.times, traj.p, color="C1", ls="--", label=r"$\langle p \rangle$")
    ax_x.set_ylabel("quadrature")
    ax_x.legend(loc="best")
    ax_s.plot(traj.times, traj.sy, color="C2", label=r"$\langle \sigma_y \rangle$")
    ax_s.plot(traj.times, traj.sz, color="C3", ls="--", label=r"$\langle \sigma_z \rangle$")
    ax_s.set_xlabel("t (ns)")
    ax_s.set_ylabel("spin")
    ax_s.legend(loc="best")
    if title:
        ax_x.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_wigner(wmap, path: str | Path, title: str = "") -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6, 5))
    vmax = float(np.max(np.abs(wmap.values)))
    mesh = ax.pcolormesh(
        wmap.x_grid, wmap.p_grid, wmap.values.T,
        cmap="RdBu_r", vmin=-vmax, vmax=vmax, shading="nearest",
    )
    fig.colorbar(mesh, ax=ax, label="W(x, p)")
    ax.set_xlabel("x")
    ax.set_ylabel("p")
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
