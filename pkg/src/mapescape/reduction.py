"""Valley path between attractor and saddle, and the 1D system living on it.

Escape is overwhelmingly likely to proceed along the potential valley that
connects a stable fixed point to an adjacent saddle.  This module traces
that path (the saddle's unstable manifold under the noiseless map), samples
the potential along arclength, and packages the result as a one-dimensional
noisy map  s' = s - tau * U'(s) + xi  whose statistics mirror the full 2D
escape problem.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .model import (
    SADDLE,
    STABLE_FP,
    _step_transformed_xy,
    jacobian_transformed,
    potential_grad_xy,
    potential_xy,
)

DEFAULT_SPACING = 1e-3

# non-monotonicity smaller than this is interpolation noise, not a real dip
_MONOTONE_TOL = 1e-9


@dataclass(frozen=True)
class ValleyPath:
    """Arclength-parameterized polyline from stable fixed point to saddle."""

    vertices: np.ndarray   # (n, 2), rescaled frame, FP first, SP last
    arclength: np.ndarray  # (n,), 0 at the FP, strictly increasing
    tangents: np.ndarray   # (n, 2), unit tangents

    @property
    def length(self):
        return float(self.arclength[-1])


@dataclass(frozen=True)
class ReducedSystem:
    """Sampled 1D reduction: potential and derivative along the valley path.

    Arclength runs from 0 at the fixed point to ``s_sp`` at the saddle; the
    mirrored exit through the second saddle is handled by even/odd extension
    (``u(-s) = u(s)``).  Beyond the saddle the potential continues
    quadratically with the curvature matched at the saddle, which keeps the
    1D map well defined on an open domain.
    """

    path: ValleyPath
    u_of_s: np.ndarray
    du_of_s: np.ndarray
    d2u_of_s: np.ndarray
    tau: float
    s_fp: float
    s_sp: float
    curvature_fp: float  # d2u/ds2 at the FP (> 0)
    curvature_sp: float  # d2u/ds2 at the SP (< 0)

    @property
    def barrier(self):
        """Potential difference between saddle and fixed point."""
        return float(self.u_of_s[-1] - self.u_of_s[0])

    def _grid(self):
        return self.path.arclength

    def u(self, s):
        """Reduced potential, even-extended and continued past the saddle."""
        s = np.asarray(s, dtype=float)
        t = np.abs(s)
        inside = np.interp(np.minimum(t, self.s_sp), self._grid(), self.u_of_s)
        beyond = self.u_of_s[-1] + 0.5 * self.curvature_sp * (t - self.s_sp) ** 2
        return np.where(t <= self.s_sp, inside, beyond)

    def du(self, s):
        """Arclength derivative of the reduced potential (odd in s)."""
        s = np.asarray(s, dtype=float)
        t = np.abs(s)
        inside = np.interp(np.minimum(t, self.s_sp), self._grid(), self.du_of_s)
        beyond = self.curvature_sp * (t - self.s_sp)
        return np.sign(s) * np.where(t <= self.s_sp, inside, beyond)

    def d2u(self, s):
        """Second arclength derivative (even in s)."""
        s = np.asarray(s, dtype=float)
        t = np.abs(s)
        inside = np.interp(np.minimum(t, self.s_sp), self._grid(), self.d2u_of_s)
        return np.where(t <= self.s_sp, inside, self.curvature_sp)

    def mirrored_grid(self):
        """Nodal grid over the full interval [-s_sp, s_sp]."""
        s = self._grid()
        return np.concatenate([-s[::-1][:-1], s])


class WrongBranchError(RuntimeError):
    """The traced manifold ran into a different attractor than requested."""


def _trace_manifold(params, fp_xy, sp_xy, delta, tol, max_steps):
    jac = jacobian_transformed(sp_xy[0], sp_xy[1], params)
    eigval, eigvec = np.linalg.eig(jac)
    k = int(np.argmax(np.abs(eigval)))
    v = np.real(eigvec[:, k])
    v /= np.hypot(v[0], v[1])
    if np.dot(v, fp_xy - sp_xy) < 0:
        v = -v

    last_err = None
    for direction in (v, -v):
        z = sp_xy + delta * direction
        pts = [z.copy()]
        ok = False
        for _ in range(max_steps):
            z = np.array(_step_transformed_xy(z[0], z[1], params))
            pts.append(z.copy())
            if np.hypot(z[0] - fp_xy[0], z[1] - fp_xy[1]) < tol:
                ok = True
                break
        if ok:
            return np.array(pts)
        last_err = WrongBranchError(
            "unstable-manifold trace did not reach the requested fixed point "
            f"within {max_steps} steps (ended near {tuple(np.round(z, 6))})"
        )
    raise last_err


def _resample(points, spacing):
    seg = np.hypot(np.diff(points[:, 0]), np.diff(points[:, 1]))
    keep = np.concatenate([[True], seg > 0.0])
    points = points[keep]
    s = np.concatenate(
        [[0.0], np.cumsum(np.hypot(np.diff(points[:, 0]), np.diff(points[:, 1])))]
    )
    n = int(np.ceil(s[-1] / spacing)) + 1
    grid = np.linspace(0.0, s[-1], n)
    x = np.interp(grid, s, points[:, 0])
    y = np.interp(grid, s, points[:, 1])
    return grid, x, y


def trace_valley_path(params, fp, sp, method="manifold", spacing=DEFAULT_SPACING,
                      delta=1e-6, tol=1e-8, max_steps=2_000_000):
    """Construct the FP -> SP valley path.

    Parameters
    ----------
    fp, sp : CriticalPoint
        A stable fixed point and an adjacent saddle from :func:`fixed_points`.
    method : str
        ``"manifold"`` (default) follows the saddle's unstable manifold under
        the noiseless map, seeded ``delta`` along the unstable eigenvector;
        ``"chord"`` returns the straight segment as a cheap fallback.
    spacing : float
        Upper bound on the uniform arclength spacing of the returned path.

    Returns
    -------
    ValleyPath
        Vertices run from the fixed point (arclength 0) to the saddle.
    """
    if fp.kind != STABLE_FP:
        raise ValueError(f"fp must be a stable fixed point, got kind={fp.kind!r}")
    if sp.kind != SADDLE:
        raise ValueError(f"sp must be a saddle, got kind={sp.kind!r}")
    fp_xy = np.array(fp.xy)
    sp_xy = np.array(sp.xy)

    if method == "manifold":
        traj = _trace_manifold(params, fp_xy, sp_xy, delta, tol, max_steps)
        pts = np.vstack([fp_xy, traj[::-1], sp_xy])
    elif method == "chord":
        pts = np.vstack([fp_xy, sp_xy])
    else:
        raise ValueError(f"unknown path method {method!r}")

    grid, x, y = _resample(pts, spacing)
    vertices = np.column_stack([x, y])
    # exact anchors survive the resampling since the grid hits both ends
    vertices[0] = fp_xy
    vertices[-1] = sp_xy
    tx = np.gradient(x, grid, edge_order=2)
    ty = np.gradient(y, grid, edge_order=2)
    norm = np.hypot(tx, ty)
    tangents = np.column_stack([tx / norm, ty / norm])
    return ValleyPath(vertices=vertices, arclength=grid, tangents=tangents)


def build_reduced_system(path, params):
    """Sample the potential along a valley path and assemble the 1D system.

    The derivative is taken by centered differences on the uniform arclength
    grid; at the two endpoints (critical points of the surface) it is replaced
    by the analytic tangential gradient, which vanishes there.  Paths whose
    potential is not monotone from fixed point to saddle are rejected: the 1D
    reduction assumes a clean valley with no intermediate extrema.
    """
    s = path.arclength
    x = path.vertices[:, 0]
    y = path.vertices[:, 1]
    u = potential_xy(x, y, params)

    drops = np.diff(u)
    if drops.min() < -_MONOTONE_TOL:
        i = int(np.argmin(drops))
        raise ValueError(
            "potential along the path is not monotone "
            f"(dip of {drops.min():.3e} near s={s[i]:.4f}); not a valley path"
        )

    du = np.gradient(u, s, edge_order=2)
    gx, gy = potential_grad_xy(x, y, params)
    tangential = gx * path.tangents[:, 0] + gy * path.tangents[:, 1]
    du[0] = tangential[0]
    du[-1] = tangential[-1]

    h = s[1] - s[0]
    # endpoints are critical points, so one-sided parabolic fits are exact
    # through second order there
    curvature_fp = 2.0 * (u[1] - u[0]) / h ** 2
    curvature_sp = 2.0 * (u[-2] - u[-1]) / h ** 2
    d2u = np.gradient(du, s, edge_order=2)
    d2u[0] = curvature_fp
    d2u[-1] = curvature_sp

    if u[-1] - u[0] <= 0.0:
        raise ValueError("path has non-positive barrier; expected U(SP) > U(FP)")

    return ReducedSystem(
        path=path,
        u_of_s=u,
        du_of_s=du,
        d2u_of_s=d2u,
        tau=params.tau2,
        s_fp=0.0,
        s_sp=float(s[-1]),
        curvature_fp=float(curvature_fp),
        curvature_sp=float(curvature_sp),
    )


def reduced_step(s, system, stream=None):
    """One step of the reduced noisy map s' = s - tau * U'(s) + xi."""
    drift = s - system.tau * float(system.du(s))
    if stream is None:
        return drift
    return drift + stream.sample()


def reduced_system_for(params, method="manifold", spacing=DEFAULT_SPACING):
    """Convenience: trace the default escape path for ``params`` and reduce it."""
    from .model import escape_anchors

    fp, sp_plus, _ = escape_anchors(params)
    path = trace_valley_path(params, fp, sp_plus, method=method, spacing=spacing)
    return build_reduced_system(path, params)


def export_path_csv(path, params, destination):
    """Write the path as CSV rows (s, x, y, U) for surface/valley plots."""
    u = potential_xy(path.vertices[:, 0], path.vertices[:, 1], params)
    with open(destination, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s", "x", "y", "U"])
        for si, (xi, yi), ui in zip(path.arclength, path.vertices, u):
            writer.writerow([repr(float(si)), repr(float(xi)), repr(float(yi)), repr(float(ui))])
