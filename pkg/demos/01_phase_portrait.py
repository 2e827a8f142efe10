"""Phase portrait of the noiseless map: competing attractors and saddles.

Iterates a fan of initial conditions under the transformed (rescaled) map
and overlays the critical points: four stable fixed points on the axes,
four saddles between them, and the unstable origin.  Every interior orbit
relaxes onto one of the axis attractors; the saddles sit on the basin
boundaries.
"""

import pathlib

import numpy as np

from mapescape import MapParams, State2D, fixed_points, iterate_transformed, step_transformed

OUT = pathlib.Path(__file__).parent / "out"
PARAMS = MapParams.from_ratio(1.0, tau=0.05, a=0.25, b=0.5)


def trajectory(x0, y0, n=4000):
    pts = np.empty((n + 1, 2))
    state = State2D(x0, y0)
    pts[0] = (x0, y0)
    for i in range(n):
        state = step_transformed(state, PARAMS)
        pts[i + 1] = (state.x, state.y)
    return pts


def main():
    OUT.mkdir(exist_ok=True)
    points = fixed_points(PARAMS)
    print(f"critical points for tau12={PARAMS.tau12:g}, a={PARAMS.a}, b={PARAMS.b}:")
    for pt in points:
        print(f"  {pt.kind:<16} ({pt.location.x:+.6f}, {pt.location.y:+.6f})  "
              f"eigenvalues {pt.eigenvalues[0]:.4f}, {pt.eigenvalues[1]:.4f}")

    rng = np.random.default_rng(1)
    starts = rng.uniform(-2.6, 2.6, size=(40, 2))
    finals = []
    for x0, y0 in starts:
        final = iterate_transformed(State2D(x0, y0), PARAMS, 20_000)
        finals.append((final.x, final.y))
    finals = np.array(finals)
    landed = np.unique(np.round(finals, 4), axis=0)
    print(f"\n{len(starts)} random starts settled onto {len(landed)} attractor(s):")
    for x, y in landed:
        print(f"  ({x:+.4f}, {y:+.4f})")

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib unavailable; skipping the figure")
        return

    fig, ax = plt.subplots(figsize=(6, 6))
    for x0, y0 in starts[:25]:
        pts = trajectory(x0, y0)
        ax.plot(pts[:, 0], pts[:, 1], lw=0.5, color="steelblue", alpha=0.6)
    for pt in points:
        marker, color = {
            "stable-fp": ("o", "forestgreen"),
            "saddle": ("x", "crimson"),
            "unstable-origin": ("s", "black"),
        }[pt.kind]
        ax.plot(pt.location.x, pt.location.y, marker, color=color, ms=9, mew=2)
    ax.set_xlabel("x (rescaled)")
    ax.set_ylabel("y (rescaled)")
    ax.set_title("noiseless flow: orbits drain into the axis attractors")
    ax.set_aspect("equal")
    fig.tight_layout()
    target = OUT / "phase_portrait.png"
    fig.savefig(target, dpi=150)
    print(f"\nwrote {target}")


if __name__ == "__main__":
    main()
