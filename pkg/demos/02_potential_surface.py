"""The quartic potential surface that organizes the dynamics.

The rescaled map is a noisy gradient descent on a double-well-like quartic
surface.  This script renders the (negated) surface and its contours: the
four wells on the axes are the attractors, connected pairwise through the
saddles that gate the escape routes.  The valley from a well to a saddle is
the corridor along which noise eventually pushes the system out.
"""

import pathlib

import numpy as np

from mapescape import MapParams, escape_anchors, potential_xy, trace_valley_path

OUT = pathlib.Path(__file__).parent / "out"
PARAMS = MapParams.from_ratio(0.75, tau=0.04, a=0.25, b=0.5)


def main():
    OUT.mkdir(exist_ok=True)
    lim = 2.2
    axis = np.linspace(-lim, lim, 241)
    gx, gy = np.meshgrid(axis, axis)
    u = potential_xy(gx.ravel(), gy.ravel(), PARAMS).reshape(gx.shape)
    print(f"potential range on [{-lim}, {lim}]^2: [{u.min():.4f}, {u.max():.4f}]")

    # the on-axis wells vs the saddle between them
    from mapescape import critical_potentials

    pots = critical_potentials(PARAMS)
    print(f"U(saddle) = {pots.u_sp:.6f}")
    print(f"U(x-axis attractor) = {pots.u_fp_x:.6f}")
    print(f"U(y-axis attractor) = {pots.u_fp_y:.6f}")
    print(f"escape barrier from the x-axis attractor: {pots.u_sp - pots.u_fp_x:.6f}")

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib unavailable; skipping the figure")
        return

    fig = plt.figure(figsize=(10, 4.4))
    ax3 = fig.add_subplot(1, 2, 1, projection="3d")
    ax3.plot_surface(gx, gy, -u, cmap="viridis", rstride=4, cstride=4, linewidth=0)
    ax3.set_title("negated potential: wells become hills")
    ax3.set_xlabel("x")
    ax3.set_ylabel("y")

    ax2 = fig.add_subplot(1, 2, 2)
    levels = np.linspace(u.min(), 0.4, 35)
    cs = ax2.contourf(gx, gy, u, levels=levels, cmap="viridis")
    fig.colorbar(cs, ax=ax2, shrink=0.9)
    fp, sp_plus, sp_minus = escape_anchors(PARAMS)
    path = trace_valley_path(PARAMS, fp, sp_plus)
    ax2.plot(path.vertices[:, 0], path.vertices[:, 1], "w--", lw=1.5,
             label="valley path")
    ax2.plot(*fp.xy, "o", color="w")
    ax2.plot(*sp_plus.xy, "x", color="w", mew=2)
    ax2.plot(*sp_minus.xy, "x", color="w", mew=2)
    ax2.legend(loc="lower left")
    ax2.set_title("contours with the escape valley")
    ax2.set_aspect("equal")
    fig.tight_layout()
    target = OUT / "potential_surface.png"
    fig.savefig(target, dpi=150)
    print(f"wrote {target}")


if __name__ == "__main__":
    main()
