"""First-passage machinery: absorbing boundary, Monte Carlo trials, 1D oracle.

A trial starts at the stable fixed point and iterates the noisy transformed
map until it crosses one of two absorbing lines, each passing through a
saddle perpendicular to the fixed-point/saddle segment.  Hitting times are
aggregated as <ln T> statistics.  For the reduced 1D system the mean first
passage time can instead be computed exactly (up to grid discretization) by
solving the linear system  t = 1 + P t  built from the one-step Gaussian
transition kernel; that solve serves as the independent oracle for the
Monte Carlo engine.
"""

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve as _dense_solve

from .model import NoiseStream, _step_transformed_xy, coexistence_window, escape_anchors

DEFAULT_CAP = 10 ** 8
_BLOCK = 1024

PLUS = "plus"
MINUS = "minus"


@dataclass(frozen=True)
class AbsorbingBoundary:
    """Two absorbing lines through the mirrored saddles.

    Each line passes through its saddle with normal along the FP -> SP
    direction, so the fixed-point side has negative signed distance and a
    trajectory is absorbed once either signed distance reaches zero.
    """

    normal_plus: tuple   # unit normal of the +y line
    offset_plus: float   # n . p >= offset  <=>  beyond the +y line
    normal_minus: tuple
    offset_minus: float

    def signed_distances(self, x, y):
        npx, npy = self.normal_plus
        nmx, nmy = self.normal_minus
        d_plus = npx * np.asarray(x) + npy * np.asarray(y) - self.offset_plus
        d_minus = nmx * np.asarray(x) + nmy * np.asarray(y) - self.offset_minus
        return d_plus, d_minus

    def hit(self, x, y):
        d_plus, d_minus = self.signed_distances(x, y)
        return (d_plus >= 0.0) | (d_minus >= 0.0)


@dataclass(frozen=True)
class FptSample:
    """Outcome of one escape trial."""

    steps: int
    branch: str        # which line was crossed: "plus" or "minus"
    censored: bool     # True when the step cap was reached instead


@dataclass(frozen=True)
class MfptEstimate:
    """Aggregated escape-time statistics over independent trials.

    ``mean_ln_t``/``stderr_ln_t`` are the sample mean and standard error of
    ln(steps) over uncensored trials (natural log); ``mean_t`` is the plain
    mean over the same trials.  Censored trials are counted separately and
    an estimate with more than 1% of them is flagged unreliable.
    """

    trials: int
    mean_ln_t: float
    stderr_ln_t: float
    mean_t: float
    censored_count: int
    exit_plus: int
    exit_minus: int

    @property
    def reliable(self):
        return self.censored_count <= 0.01 * self.trials


def build_boundary(fp, saddles):
    """Absorbing boundary from a fixed point and its mirrored saddle pair."""
    sp_plus, sp_minus = saddles
    fx, fy = fp.xy
    px, py = sp_plus.xy
    mx, my = sp_minus.xy
    if not (abs(mx - px) <= 1e-9 and abs(my + py) <= 1e-9):
        raise ValueError("saddles must be mirror images through the x-axis")
    if py < 0:
        (px, py), (mx, my) = (mx, my), (px, py)
    dx, dy = px - fx, py - fy
    length = math.hypot(dx, dy)
    if length < 1e-12:
        raise ValueError("degenerate boundary: fixed point coincides with saddle")
    n_plus = (dx / length, dy / length)
    n_minus = (n_plus[0], -n_plus[1])
    return AbsorbingBoundary(
        normal_plus=n_plus,
        offset_plus=n_plus[0] * px + n_plus[1] * py,
        normal_minus=n_minus,
        offset_minus=n_minus[0] * mx + n_minus[1] * my,
    )


# ---------------------------------------------------------------------------
# Monte Carlo engine
# ---------------------------------------------------------------------------

def _simulate_lanes(params, boundary, x0, y0, streams, cap, block=_BLOCK):
    """Run one lane per noise stream until absorption or the step cap.

    Lanes advance in lockstep through fixed-size noise blocks drawn from
    their own streams, so each lane's trajectory depends only on its stream:
    results are bit-identical whether lanes run alone, batched, or in any
    order.  Absorbed lanes are parked on the start point until the block
    ends, then dropped.
    """
    n = len(streams)
    result_steps = np.zeros(n, dtype=np.int64)
    result_branch = np.zeros(n, dtype=np.int8)
    result_censored = np.zeros(n, dtype=bool)

    npx, npy = boundary.normal_plus
    nmx, nmy = boundary.normal_minus
    op, om = boundary.offset_plus, boundary.offset_minus
    sd = math.sqrt(params.epsilon)

    lane_ids = np.arange(n)
    active = list(streams)
    x = np.full(n, float(x0))
    y = np.full(n, float(y0))
    base = 0

    while len(lane_ids) > 0:
        m = len(lane_ids)
        noise = np.empty((m, block, 2))
        for i, stream in enumerate(active):
            noise[i] = stream.standard_block(block)
        if sd != 1.0:
            noise *= sd
        done = np.zeros(m, dtype=bool)
        for k in range(block):
            xn, yn = _step_transformed_xy(x, y, params)
            xn = xn + noise[:, k, 0]
            yn = yn + noise[:, k, 1]
            step = base + k + 1
            d_plus = npx * xn + npy * yn - op
            d_minus = nmx * xn + nmy * yn - om
            hit = ((d_plus >= 0.0) | (d_minus >= 0.0)) & ~done
            if hit.any():
                ids = lane_ids[hit]
                result_steps[ids] = step
                result_branch[ids] = np.where(d_plus[hit] >= d_minus[hit], 1, -1)
                done |= hit
            if step >= cap:
                late = ~done
                if late.any():
                    ids = lane_ids[late]
                    result_steps[ids] = cap
                    result_censored[ids] = True
                    done[:] = True
            if done.any():
                xn = np.where(done, x0, xn)
                yn = np.where(done, y0, yn)
            x, y = xn, yn
            if done.all():
                break
        base += block
        keep = ~done
        lane_ids = lane_ids[keep]
        x = x[keep]
        y = y[keep]
        active = [s for s, k_ in zip(active, keep) if k_]

    return result_steps, result_branch, result_censored


def run_trial(params, boundary, start, stream, cap=DEFAULT_CAP):
    """Single escape trial from ``start`` (rescaled frame) to the boundary."""
    if bool(boundary.hit(start.x, start.y)):
        raise ValueError("start lies on or beyond the absorbing boundary")
    if cap < 1:
        raise ValueError("step cap must be a positive integer")
    steps, branch, censored = _simulate_lanes(
        params, boundary, start.x, start.y, [stream], cap
    )
    return FptSample(
        steps=int(steps[0]),
        branch=PLUS if branch[0] >= 0 else MINUS,
        censored=bool(censored[0]),
    )


def _aggregate(steps, branch, censored, trials):
    ok = ~censored
    if ok.any():
        ln = np.log(steps[ok].astype(float))
        mean_ln = float(ln.mean())
        stderr = float(ln.std(ddof=1) / math.sqrt(len(ln))) if len(ln) > 1 else 0.0
        mean_t = float(steps[ok].mean())
    else:
        mean_ln = math.nan
        stderr = math.nan
        mean_t = math.nan
    return MfptEstimate(
        trials=trials,
        mean_ln_t=mean_ln,
        stderr_ln_t=stderr,
        mean_t=mean_t,
        censored_count=int(censored.sum()),
        exit_plus=int((branch == 1).sum()),
        exit_minus=int((branch == -1).sum()),
    )


def estimate_mfpt(params, trials, seed, cap=DEFAULT_CAP, samples_path=None):
    """Monte Carlo mean-first-passage estimate from the x-axis fixed point.

    Runs ``trials`` independent trials with noise stream id equal to the
    trial index under ``seed``, so the estimate is bit-identical for a fixed
    (seed, params, trials) regardless of batching or execution order.

    Parameters
    ----------
    params : MapParams
        Must lie inside the coexistence window and carry epsilon > 0.
    trials : int
        Number of independent trials (>= 1; acceptance runs use >= 100).
    seed : int
        Master seed; trial i consumes NoiseStream(seed, i).
    cap : int
        Step cap; trials that reach it are censored, not errors.
    samples_path : str, optional
        When given, per-trial samples are written as JSON lines with fields
        trial, steps, branch, censored.

    Returns
    -------
    MfptEstimate
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if params.epsilon <= 0.0:
        raise ValueError("estimate_mfpt needs epsilon > 0")
    if not coexistence_window(params):
        raise ValueError(
            "no coexistence regime: cannot run escape trials for "
            f"tau12={params.tau12:.6g}, a={params.a}, b={params.b}"
        )
    fp, sp_plus, sp_minus = escape_anchors(params)
    boundary = build_boundary(fp, (sp_plus, sp_minus))
    streams = [NoiseStream(seed, i, params.epsilon) for i in range(trials)]
    steps, branch, censored = _simulate_lanes(
        params, boundary, fp.location.x, fp.location.y, streams, cap
    )
    if samples_path is not None:
        with open(samples_path, "w") as fh:
            for i in range(trials):
                fh.write(
                    json.dumps(
                        {
                            "trial": i,
                            "steps": int(steps[i]),
                            "branch": PLUS if branch[i] >= 0 else MINUS,
                            "censored": bool(censored[i]),
                        }
                    )
                    + "\n"
                )
    return _aggregate(steps, branch, censored, trials)


# ---------------------------------------------------------------------------
# 1D kernel oracle
# ---------------------------------------------------------------------------

def oracle_mfpt_1d(system, epsilon, spacing=None):
    """Mean first passage time of the reduced 1D map by direct linear solve.

    Discretizes the interval I = [-s_sp, s_sp] on a uniform midpoint grid,
    builds the one-step Gaussian kernel  P(z_j | z_i) dz  with
    f(z) = z - tau U'(z), and solves  t = 1 + P t.  Probability mass leaving
    I is absorbed (rows are not renormalized), which is exactly the
    restriction of the mean-hitting-time identity to I.  Returns t at the
    fixed point s = 0.

    ``spacing`` defaults to sqrt(epsilon)/10 and may only be refined, never
    coarsened, so the Gaussian kernel stays resolved.
    """
    if epsilon <= 0.0:
        raise ValueError("oracle needs epsilon > 0")
    max_spacing = math.sqrt(epsilon) / 10.0
    if spacing is None:
        spacing = max_spacing
    elif spacing > max_spacing * (1.0 + 1e-12):
        raise ValueError(
            f"grid spacing {spacing:.3g} too coarse; need <= sqrt(eps)/10 = {max_spacing:.3g}"
        )
    s_sp = system.s_sp
    m = 2 * int(math.ceil(s_sp / spacing)) + 1  # odd: one node sits at s = 0
    if m > 20001:
        raise ValueError(
            f"epsilon too small: resolving the kernel needs {m} nodes and the "
            "dense solve becomes intractable"
        )
    h = 2.0 * s_sp / m
    z = -s_sp + (np.arange(m) + 0.5) * h
    f = z - system.tau * system.du(z)
    kernel = (
        np.exp(-0.5 * (z[None, :] - f[:, None]) ** 2 / epsilon)
        / math.sqrt(2.0 * math.pi * epsilon)
        * h
    )
    absorbed = 1.0 - kernel.sum(axis=1)
    if absorbed.max() < 1e-14:
        raise ValueError(
            "epsilon too small: no probability mass reaches the boundary at "
            "this grid, the kernel system is singular"
        )
    t = _dense_solve(np.eye(m) - kernel, np.ones(m))
    value = float(t[(m - 1) // 2])
    if not np.isfinite(value) or value < 1.0:
        raise ValueError("oracle solve produced an invalid mean passage time")
    return value


def empirical_density_1d(system, epsilon, steps=10_000_000, bins=101, seed=0,
                         chains=16, block=4096):
    """Quasi-stationary histogram of the reduced map confined to I.

    Runs ``chains`` independent walkers (total ``steps`` map iterations),
    re-injecting a walker at the fixed point whenever it leaves
    [-s_sp, s_sp].  Returns (bin_centers, density) with the density
    normalized over I.
    """
    if epsilon <= 0.0:
        raise ValueError("density sampling needs epsilon > 0")
    if steps < chains:
        raise ValueError("steps must be at least the number of chains")
    per_chain = steps // chains
    streams = [NoiseStream(seed, i, epsilon) for i in range(chains)]
    sd = math.sqrt(epsilon)
    s_sp = system.s_sp
    tau = system.tau
    edges = np.linspace(-s_sp, s_sp, bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    s = np.zeros(chains)
    done = 0
    buf = np.empty((chains, block))
    while done < per_chain:
        nb = min(block, per_chain - done)
        noise = np.empty((chains, nb))
        for i, stream in enumerate(streams):
            noise[i] = stream.standard_block(nb, dim=1)[:, 0]
        noise *= sd
        for k in range(nb):
            s = s - tau * system.du(s) + noise[:, k]
            s[np.abs(s) >= s_sp] = 0.0  # absorbed: re-inject at the FP
            buf[:, k] = s
        hist, _ = np.histogram(buf[:, :nb], bins=edges)
        counts += hist
        done += nb
    width = edges[1] - edges[0]
    density = counts / counts.sum() / width
    centers = 0.5 * (edges[1:] + edges[:-1])
    return centers, density
