"""Closed-form escape-time theory for the coupled map.

For weak noise the invariant density of the reduced 1D map is
``Q(s) ~ exp(-2 tau U(s) / eps)`` up to relative corrections of order
tau**2, and the mean escape time from the attractor obeys

    T = (C / tau) * exp( (2 tau / eps) * (U(SP) - U(FP)) )

so that <ln T> + ln tau grows linearly in tau/eps with slope
2 (U(SP) - U(FP)).  This module evaluates the critical-point potentials in
closed form, the resulting barrier and slope, the normalized density, a
residual check of the density's defining functional equation, and the
assembled escape-time prediction with its steepest-descent prefactor.
"""

import csv
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import coexistence_window


@dataclass(frozen=True)
class CriticalPotentials:
    """Potential values at the saddle and the two axis fixed points."""

    u_sp: float
    u_fp_x: float
    u_fp_y: float


@dataclass(frozen=True)
class TheoryPrediction:
    """Escape-time law assembled from barrier and prefactor.

    ``slope`` multiplies tau/eps in the scaling plot of <ln T> + ln tau and
    equals twice the barrier; ``prefactor_c`` is the steepest-descent
    constant C in T = (C/tau) exp(slope * tau/eps).
    """

    u_sp: float
    u_fp: float
    delta_u: float
    slope: float
    prefactor_c: float
    predicted_ln_t: Callable[[float, float], float]


def critical_potentials(params):
    """Closed-form potential values at the saddle and axis fixed points.

    Valid inside the coexistence window; the isotropic coupling a == b makes
    the saddle expression singular and is rejected.
    """
    if params.a == params.b:
        raise ValueError("degenerate isotropic coupling a == b: saddle potential undefined")
    if not coexistence_window(params):
        raise ValueError(
            "no coexistence regime: critical potentials need "
            f"min(a/b, b/a) < tau12 < max(a/b, b/a), got tau12={params.tau12:.6g}"
        )
    t12 = params.tau12
    a, b = params.a, params.b
    u_sp = -(a * t12 ** 2 + a - 2.0 * b * t12) / (4.0 * t12 * (a * a - b * b))
    u_fp_x = -t12 / (4.0 * a)
    u_fp_y = -1.0 / (4.0 * a * t12)
    return CriticalPotentials(u_sp=u_sp, u_fp_x=u_fp_x, u_fp_y=u_fp_y)


def barrier(params):
    """Barrier U(SP) - U(FP) for escape from the x-axis fixed point."""
    pots = critical_potentials(params)
    return pots.u_sp - pots.u_fp_x


def scaling_slope(params):
    """Predicted slope of <ln T> + ln tau against tau/eps: twice the barrier."""
    return 2.0 * barrier(params)


# ---------------------------------------------------------------------------
# invariant density
# ---------------------------------------------------------------------------

def wkb_density(s, system, epsilon):
    """Normalized weak-noise invariant density N exp(-2 tau U(s)/eps) on I.

    The normalization constant is fixed by trapezoid quadrature over the
    mirrored interval [-s_sp, s_sp] on the system's own arclength grid.
    """
    if epsilon <= 0.0:
        raise ValueError("wkb_density needs epsilon > 0")
    grid = system.mirrored_grid()
    scale = 2.0 * system.tau / epsilon
    u0 = float(system.u_of_s[0])  # subtract the minimum to keep exponents tame
    weights = np.exp(-scale * (system.u(grid) - u0))
    norm = np.trapezoid(weights, grid)
    return np.exp(-scale * (system.u(s) - u0)) / norm


def wkb_residual(system, tau, normalized=True):
    """Sup-norm residual of the density's functional equation under Phi = 2 tau U.

    Writing the weak-noise ansatz Q = N exp(-Phi/eps), the invariant-density
    condition forces

        Phi(z) - Phi( Phi'(z)/(1 - tau U''(z)) + z - tau U'(z) )
            + (1/2) * ( Phi'(z)/(1 - tau U''(z)) )**2  =  0.

    Substituting Phi = 2 tau U leaves a defect that vanishes at the critical
    points and scales as tau**2 relative to the 2*tau magnitude of Phi
    itself.  By default the sup-norm is reported on that per-(2 tau) scale,
    so halving tau divides the result by about four; ``normalized=False``
    returns the raw sup-norm of the left-hand side instead (one extra power
    of tau, factor about eight).
    """
    z = system.mirrored_grid()
    du = system.du(z)
    d2u = system.d2u(z)
    g = 2.0 * tau * du / (1.0 - tau * d2u)
    arg = z - tau * du + g
    phi_z = 2.0 * tau * system.u(z)
    phi_arg = 2.0 * tau * system.u(arg)
    residual = phi_z - phi_arg + 0.5 * g * g
    sup = float(np.max(np.abs(residual)))
    return sup / (2.0 * tau) if normalized else sup


# ---------------------------------------------------------------------------
# escape-time prediction
# ---------------------------------------------------------------------------

def prefactor(system):
    """Steepest-descent prefactor C = pi * sqrt(2 / U''(FP)).

    U''(FP) is the curvature of the reduced (arclength) potential at the
    fixed point, where the density quadrature localizes.
    """
    if system.curvature_fp <= 0.0:
        raise ValueError("reduced potential has no minimum at the fixed point")
    return math.pi * math.sqrt(2.0 / system.curvature_fp)


def predicted_mfpt(params, system, epsilon):
    """Escape-time prediction (T, ln T) for the given noise variance.

    Uses the reduced-system barrier and the steepest-descent prefactor:
    T = (C/tau) exp((2 tau / eps) * delta_U).  Asymptotic in tau/eps; a
    warning is issued below tau/eps = 1 where the expansion has no support.
    """
    if epsilon <= 0.0:
        raise ValueError("predicted_mfpt needs epsilon > 0")
    if not coexistence_window(params):
        raise ValueError("no coexistence regime: escape-time prediction undefined")
    tau = system.tau
    if tau / epsilon < 1.0:
        warnings.warn(
            f"tau/eps = {tau / epsilon:.3g} < 1: outside the asymptotic regime",
            stacklevel=2,
        )
    c = prefactor(system)
    ln_t = math.log(c) - math.log(tau) + (2.0 * tau / epsilon) * system.barrier
    return math.exp(ln_t), ln_t


def make_prediction(params, system):
    """Assemble the full prediction record for ``params``.

    The barrier and slope come from the closed-form critical potentials; the
    prefactor from the reduced system's curvature at the fixed point.
    """
    pots = critical_potentials(params)
    delta_u = pots.u_sp - pots.u_fp_x
    slope = 2.0 * delta_u
    c = prefactor(system)

    def predicted_ln_t(tau, epsilon):
        return math.log(c) - math.log(tau) + slope * (tau / epsilon)

    return TheoryPrediction(
        u_sp=pots.u_sp,
        u_fp=pots.u_fp_x,
        delta_u=delta_u,
        slope=slope,
        prefactor_c=c,
        predicted_ln_t=predicted_ln_t,
    )


def export_predictions_csv(rows, destination):
    """Write prediction rows as CSV.

    Each row is a mapping with keys tau12, a, b, tau, epsilon, delta_u,
    slope, prefactor, ln_T_pred.
    """
    fields = ["tau12", "a", "b", "tau", "epsilon", "delta_u", "slope", "prefactor", "ln_T_pred"]
    with open(destination, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(float(row[k])) for k in fields})
