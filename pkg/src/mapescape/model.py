"""Weakly nonlinear coupled map: dynamics, potential landscape and critical points.

The system couples two amplitudes through cubic terms,

    x' = (1 + tau1) * x * (1 - a*x**2 - b*y**2) + xi1
    y' = (1 + tau2) * y * (1 - a*y**2 - b*x**2) + xi2

with independent Gaussian kicks of variance ``epsilon``.  Rescaling
``x = sqrt(tau2)*xt``, ``y = sqrt(tau1)*yt`` turns the weak-nonlinearity
limit into a noisy gradient descent on a quartic double-well surface; this
module provides both frames, the potential and its derivatives, the full set
of fixed points with stability classification, and reproducible noise
streams for Monte Carlo work.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

RAW = "raw"
RESCALED = "rescaled"

STABLE_FP = "stable-fp"
SADDLE = "saddle"
UNSTABLE_ORIGIN = "unstable-origin"

# soft ceiling for the weak-nonlinearity regime; larger values still run
WEAK_TAU_WARN = 0.2

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class MapParams:
    """Model constants: growth rates, cubic coefficients and noise variance.

    ``tau1``/``tau2`` must lie in (0, 1) and ``a``/``b`` in (0, 1);
    ``epsilon`` is the per-component noise *variance* (the kick distribution
    is ``exp(-xi**2 / (2*epsilon))``), not a standard deviation.
    """

    tau1: float
    tau2: float
    a: float
    b: float
    epsilon: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.a < 1.0 and 0.0 < self.b < 1.0):
            raise ValueError(f"a and b must lie in (0, 1), got a={self.a}, b={self.b}")
        if not (0.0 < self.tau1 < 1.0 and 0.0 < self.tau2 < 1.0):
            raise ValueError(
                f"tau1 and tau2 must lie in (0, 1), got tau1={self.tau1}, tau2={self.tau2}"
            )
        if self.epsilon < 0.0:
            raise ValueError(f"noise variance epsilon must be >= 0, got {self.epsilon}")
        if max(self.tau1, self.tau2) > WEAK_TAU_WARN:
            warnings.warn(
                f"tau={max(self.tau1, self.tau2)} is outside the weak-nonlinearity "
                f"regime (> {WEAK_TAU_WARN}); asymptotic results degrade",
                stacklevel=2,
            )

    @property
    def tau12(self):
        """Growth-rate ratio tau1/tau2."""
        return self.tau1 / self.tau2

    @classmethod
    def from_ratio(cls, tau12, tau=0.05, a=0.25, b=0.5, epsilon=0.0):
        """Build params from the ratio convention tau2 = tau, tau1 = tau12*tau."""
        return cls(tau1=tau12 * tau, tau2=tau, a=a, b=b, epsilon=epsilon)

    def with_epsilon(self, epsilon):
        return MapParams(self.tau1, self.tau2, self.a, self.b, epsilon)


@dataclass(frozen=True)
class State2D:
    """A point of the plane tagged with the frame it lives in."""

    x: float
    y: float
    frame: str = RESCALED

    def as_array(self):
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class CriticalPoint:
    """Fixed point of the noiseless rescaled map with its stability class."""

    location: State2D
    kind: str
    eigenvalues: tuple

    @property
    def xy(self):
        return self.location.x, self.location.y


def _require_frame(state, frame, op):
    if state.frame != frame:
        raise ValueError(f"{op} expects a {frame}-frame state, got {state.frame!r}")


# ---------------------------------------------------------------------------
# map steps
# ---------------------------------------------------------------------------

def step_raw(state, params, noise=None):
    """One step of the raw cubic map, optionally with an additive noise pair."""
    _require_frame(state, RAW, "step_raw")
    x, y = state.x, state.y
    xn = (1.0 + params.tau1) * x * (1.0 - params.a * x * x - params.b * y * y)
    yn = (1.0 + params.tau2) * y * (1.0 - params.a * y * y - params.b * x * x)
    if noise is not None:
        xn += noise[0]
        yn += noise[1]
    return State2D(xn, yn, RAW)


def rescale(state, params):
    """Map a raw-frame state to the rescaled frame (x/sqrt(tau2), y/sqrt(tau1))."""
    _require_frame(state, RAW, "rescale")
    return State2D(state.x / np.sqrt(params.tau2), state.y / np.sqrt(params.tau1), RESCALED)


def unrescale(state, params):
    """Inverse of :func:`rescale`."""
    _require_frame(state, RESCALED, "unrescale")
    return State2D(state.x * np.sqrt(params.tau2), state.y * np.sqrt(params.tau1), RAW)


def _step_transformed_xy(x, y, params):
    """First-order-in-tau map on rescaled coordinates (array friendly).

    This is the expanded form of one gradient-descent step
    ``(x - tau1 * dU/dx, y - tau2 * dU/dy)``; the two agree to rounding.
    Kept as the single authoritative arithmetic so scalar steps and the
    vectorized Monte Carlo engine produce bit-identical trajectories.
    """
    c1 = 1.0 + params.tau1
    c2 = params.a * params.tau2
    c3 = params.tau1 * params.b
    d1 = 1.0 + params.tau2
    d2 = params.a * params.tau1
    d3 = params.tau2 * params.b
    x2 = x * x
    y2 = y * y
    return x * (c1 - c2 * x2 - c3 * y2), y * (d1 - d2 * y2 - d3 * x2)


def step_transformed(state, params, noise=None):
    """One step of the transformed (rescaled, first order in tau) map."""
    _require_frame(state, RESCALED, "step_transformed")
    xn, yn = _step_transformed_xy(state.x, state.y, params)
    if noise is not None:
        xn += noise[0]
        yn += noise[1]
    return State2D(xn, yn, RESCALED)


def iterate_transformed(state, params, n, stream=None):
    """Iterate the transformed map ``n`` steps, drawing a noise pair per step."""
    s = state
    for _ in range(n):
        s = step_transformed(s, params, stream.pair() if stream is not None else None)
    return s


def iterate_raw(state, params, n, stream=None):
    """Iterate the raw map from an initial condition inside the unit box."""
    if abs(state.x) >= 1.0 or abs(state.y) >= 1.0:
        raise ValueError("raw-frame initial conditions must satisfy |x| < 1 and |y| < 1")
    s = state
    for _ in range(n):
        s = step_raw(s, params, stream.pair() if stream is not None else None)
    return s


# ---------------------------------------------------------------------------
# potential surface
# ---------------------------------------------------------------------------

def potential_xy(x, y, params):
    """Quartic double-well potential on rescaled coordinates (vectorized)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r12 = params.tau1 / params.tau2
    quart = (params.a / 4.0) * (x ** 4 / r12 + r12 * y ** 4)
    return -(x * x + y * y) / 2.0 + quart + params.b * x * x * y * y / 2.0


def potential(state, params):
    """Potential value at a rescaled-frame state."""
    _require_frame(state, RESCALED, "potential")
    return float(potential_xy(state.x, state.y, params))


def potential_grad_xy(x, y, params):
    """Analytic gradient of the potential (vectorized)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r12 = params.tau1 / params.tau2
    gx = -x + (params.a / r12) * x ** 3 + params.b * x * y * y
    gy = -y + params.a * r12 * y ** 3 + params.b * y * x * x
    return gx, gy


def potential_grad(state, params):
    """Analytic gradient at a rescaled-frame state."""
    _require_frame(state, RESCALED, "potential_grad")
    gx, gy = potential_grad_xy(state.x, state.y, params)
    return float(gx), float(gy)


def potential_hessian_xy(x, y, params):
    """Hessian entries (uxx, uxy, uyy) of the potential."""
    r12 = params.tau1 / params.tau2
    uxx = -1.0 + 3.0 * (params.a / r12) * x * x + params.b * y * y
    uyy = -1.0 + 3.0 * params.a * r12 * y * y + params.b * x * x
    uxy = 2.0 * params.b * x * y
    return uxx, uxy, uyy


def jacobian_transformed(x, y, params):
    """Jacobian of the noiseless transformed map at a rescaled point."""
    uxx, uxy, uyy = potential_hessian_xy(x, y, params)
    return np.array(
        [
            [1.0 - params.tau1 * uxx, -params.tau1 * uxy],
            [-params.tau2 * uxy, 1.0 - params.tau2 * uyy],
        ]
    )


# ---------------------------------------------------------------------------
# fixed points
# ---------------------------------------------------------------------------

def coexistence_window(params):
    """True when both competing attractors and their separating saddles exist.

    The off-axis saddles exist iff both squared coordinates from the
    stationarity conditions are positive, which for b > a reads
    a/b < tau1/tau2 < b/a.
    """
    if params.a == params.b:
        return False
    denom = params.a * params.a - params.b * params.b
    u = (params.a * params.tau12 - params.b) / denom
    v = (params.a - params.b * params.tau12) / (params.tau12 * denom)
    return u > 0.0 and v > 0.0


def _refine_fixed_point(x, y, params, tol=1e-13, max_iter=60):
    """Damped Newton iteration on F(z) - z for the noiseless transformed map."""
    z = np.array([x, y], dtype=float)

    def residual(p):
        fx, fy = _step_transformed_xy(p[0], p[1], params)
        return np.array([fx - p[0], fy - p[1]])

    r = residual(z)
    for _ in range(max_iter):
        if np.max(np.abs(r)) < tol:
            break
        jac = jacobian_transformed(z[0], z[1], params) - np.eye(2)
        step = np.linalg.solve(jac, r)
        lam = 1.0
        for _ in range(30):
            z_new = z - lam * step
            r_new = residual(z_new)
            if np.max(np.abs(r_new)) <= np.max(np.abs(r)):
                z, r = z_new, r_new
                break
            lam *= 0.5
        else:  # no damping factor helped; keep current iterate
            break
    return z


def _classify(eigenvalues):
    moduli = np.abs(eigenvalues)
    if np.all(moduli < 1.0):
        return STABLE_FP
    if np.sum(moduli > 1.0) == 1:
        return SADDLE
    return UNSTABLE_ORIGIN


def _critical_point(x, y, params):
    x, y = _refine_fixed_point(x, y, params)
    eig = np.linalg.eigvals(jacobian_transformed(x, y, params))
    eig = tuple(sorted(float(np.real(e)) for e in eig))
    return CriticalPoint(State2D(float(x), float(y), RESCALED), _classify(eig), eig)


def fixed_points(params):
    """All fixed points of the noiseless transformed map, Newton refined.

    Returns the origin, the four axis fixed points and, inside the
    coexistence window, the four off-axis saddles.  Outside the window a
    ``no coexistence regime`` warning is issued and only the nine-point set
    degenerates to origin plus axis points.
    """
    pts = [_critical_point(0.0, 0.0, params)]
    xf = np.sqrt(params.tau1 / (params.a * params.tau2))
    yf = np.sqrt(params.tau2 / (params.a * params.tau1))
    for sx in (1.0, -1.0):
        pts.append(_critical_point(sx * xf, 0.0, params))
    for sy in (1.0, -1.0):
        pts.append(_critical_point(0.0, sy * yf, params))
    if not coexistence_window(params):
        warnings.warn(
            "no coexistence regime: off-axis saddles do not exist for "
            f"tau12={params.tau12:.6g}, a={params.a}, b={params.b}",
            stacklevel=2,
        )
        return pts
    denom = params.a * params.a - params.b * params.b
    xs = np.sqrt((params.a * params.tau12 - params.b) / denom)
    ys = np.sqrt((params.a - params.b * params.tau12) / (params.tau12 * denom))
    for sx in (1.0, -1.0):
        for sy in (1.0, -1.0):
            pts.append(_critical_point(sx * xs, sy * ys, params))
    return pts


def escape_anchors(params):
    """Geometry of the standard escape experiment.

    Returns ``(fp, sp_plus, sp_minus)``: the positive x-axis fixed point
    (start of every trial) and the two adjacent saddles mirrored through the
    x-axis.  Requires the coexistence window.
    """
    if not coexistence_window(params):
        raise ValueError(
            "no coexistence regime: escape geometry undefined for "
            f"tau12={params.tau12:.6g}, a={params.a}, b={params.b}"
        )
    pts = fixed_points(params)
    fp = next(
        (p for p in pts if p.kind == STABLE_FP and p.location.x > 0 and p.location.y == 0),
        None,
    )
    off_axis_saddles = [
        p for p in pts if p.kind == SADDLE and p.location.x > 0 and p.location.y != 0
    ]
    if fp is None or len(off_axis_saddles) != 2:
        # with a > b the off-axis points are mixed-mode minima and the axis
        # points are the saddles; the axis-escape experiment needs b > a
        raise ValueError(
            "escape geometry needs a stable x-axis attractor flanked by two "
            f"off-axis saddles; requires b > a, got a={params.a}, b={params.b}"
        )
    sp_plus = next(p for p in off_axis_saddles if p.location.y > 0)
    sp_minus = next(p for p in off_axis_saddles if p.location.y < 0)
    return fp, sp_plus, sp_minus


# ---------------------------------------------------------------------------
# noise
# ---------------------------------------------------------------------------

class NoiseStream:
    """Reproducible Gaussian noise source keyed by (master_seed, stream_id).

    Streams are counter-based (Philox keyed with the two identifiers), so a
    given ``(master_seed, stream_id)`` pair always yields the same sequence
    and distinct stream ids are statistically independent regardless of the
    order or thread in which they are consumed.  Draw variance is the
    ``epsilon`` supplied at construction.
    """

    def __init__(self, master_seed, stream_id=0, epsilon=0.0):
        if epsilon < 0.0:
            raise ValueError(f"noise variance epsilon must be >= 0, got {epsilon}")
        self.master_seed = int(master_seed)
        self.stream_id = int(stream_id)
        self.epsilon = float(epsilon)
        self._sd = float(np.sqrt(self.epsilon))
        self.reset()

    def reset(self):
        key = np.array(
            [self.master_seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64
        )
        self._gen = Generator(Philox(key=key))

    def sample(self):
        """One draw from N(0, epsilon)."""
        return self._sd * float(self._gen.standard_normal())

    def pair(self):
        """A pair of independent N(0, epsilon) draws (one 2D map step)."""
        xi = self._gen.standard_normal(2)
        return self._sd * xi[0], self._sd * xi[1]

    def standard_block(self, n, dim=2):
        """Block of standard-normal draws; callers scale by sqrt(epsilon)."""
        return self._gen.standard_normal((n, dim))


def noise_sample(stream):
    """Single draw from a :class:`NoiseStream` (function-style alias)."""
    return stream.sample()
