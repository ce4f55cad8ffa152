"""Fiber-map geometry on the product of mass spheres.

Along the mass-preserving dilation s * (u, v) the energy restricted to a
fiber is an elementary exponential polynomial

    psi(s) = e^(2s) A1/2 - e^(4s) A2 - e^(p gamma_p s) (A3 + A4),

so its critical points reduce to roots of
g(s) = A1 - 4 A2 e^(2s) - 2(p-2)(A3+A4) e^((2p-6)s).  For 2 < p < 3 with
positive subquartic terms g has a single interior maximum at a closed-form
s_star, giving either two roots (a fiber minimum s_plus and a ridge
t_minus) or none; for p >= 3 it is monotone and only the ridge survives.
Projections dilate the fields to those roots and re-normalize mass.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from .grid import RadialField, dilate
from .functionals import (
    Aggregates,
    ModelParams,
    PairState,
    aggregates,
    fiber_derivatives,
    fiber_value,
)
from .profiles import GeometryConstants, geometry_constants

__all__ = [
    "FiberRoots",
    "FiberReport",
    "FiberProjection",
    "ProjectionUndefined",
    "GeometryRefusal",
    "fiber_roots",
    "project_minus",
    "project_plus",
    "classify",
]


class ProjectionUndefined(RuntimeError):
    """The requested fiber critical point does not exist for this pair."""


class GeometryRefusal(RuntimeError):
    """The constrained-geometry gate is closed for these parameters."""


@dataclass(frozen=True)
class FiberRoots:
    """Critical points of psi for one pair: s_plus is the fiber minimum
    (only for 2 < p < 3 with open geometry), t_minus the ridge maximum."""

    s_plus: Optional[float]
    t_minus: Optional[float]
    s_star: Optional[float]      # argmax of g, where defined
    g_star: Optional[float]      # max of g; <= 0 means no critical points
    n_roots: int


def _newton_bisect(f, df, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Safeguarded Newton: bisection bracket maintained throughout."""
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise ValueError("root not bracketed")
    x = 0.5 * (lo + hi)
    for _ in range(200):
        fx = f(x)
        if fx == 0.0:
            return x
        if np.sign(fx) == np.sign(flo):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
        d = df(x)
        x_new = x - fx / d if d != 0.0 else 0.5 * (lo + hi)
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= tol:
            return x_new
        x = x_new
    return x


def fiber_roots(agg: Aggregates) -> FiberRoots:
    """All critical points of the fiber map for one pair's aggregates."""
    p = agg.p
    A = agg.a1_term
    B = 4.0 * agg.a2_term
    C = 2.0 * (p - 2.0) * (agg.a3_term + agg.a4_term)
    q = 2.0 * p - 6.0  # exponent of the subquartic term in g

    if A <= 0.0:
        raise ValueError("pair has no gradient content")
    if B <= 0.0:
        raise ValueError("quartic aggregate must be positive (nonzero fields, mu > 0)")

    def g(s):
        return A - B * np.exp(2.0 * s) - C * np.exp(q * s)

    def dg(s):
        return -2.0 * B * np.exp(2.0 * s) - q * C * np.exp(q * s)

    if p < 3.0 and C > 0.0:
        # g rises to a single interior max then falls; two roots iff g* > 0
        kappa = -q  # 6 - 2p > 0
        s_star = np.log(kappa * C / (2.0 * B)) / (2.0 + kappa)
        g_star = float(g(s_star))
        if g_star <= 0.0:
            return FiberRoots(None, None, float(s_star), g_star, 0)
        lo = s_star - 1.0
        step = 1.0
        while g(lo) >= 0.0:
            lo -= step
            step *= 2.0
        s_plus = _newton_bisect(g, dg, lo, s_star)
        hi = s_star + 1.0
        step = 1.0
        while g(hi) >= 0.0:
            hi += step
            step *= 2.0
        t_minus = _newton_bisect(g, dg, s_star, hi)
        return FiberRoots(float(s_plus), float(t_minus), float(s_star), g_star, 2)

    if p == 3.0:
        # g(s) = (A - C) - B e^{2s}: a ridge exists iff the pair is coercive
        if A <= C:
            return FiberRoots(None, None, None, None, 0)
        t = 0.5 * np.log((A - C) / B)
        return FiberRoots(None, float(t), None, None, 1)

    # remaining cases have exactly one sign change + -> -: the ridge.
    # covers p > 3 (any C sign) and 2 < p < 3 with C <= 0.
    t0 = 0.5 * np.log(A / B)
    lo, hi = t0, t0
    step = 1.0
    while g(lo) <= 0.0:
        lo -= step
        step *= 2.0
        if lo < t0 - 500.0:
            # g < 0 arbitrarily far left: no ridge (possible for p < 3, C < 0
            # only when A <= 0, excluded above)
            return FiberRoots(None, None, None, None, 0)
    step = 1.0
    while g(hi) >= 0.0:
        hi += step
        step *= 2.0
    t_minus = _newton_bisect(g, dg, lo, hi)
    return FiberRoots(None, float(t_minus), None, None, 1)


@dataclass(frozen=True)
class FiberProjection:
    s: float                 # accumulated dilation applied to the input pair
    pair: PairState
    psi: float               # fiber value at the root, from final aggregates
    residual_root: float     # root left after the last correction pass
    mass_drift: float        # worst pre-renormalization relative mass loss


def _renormalize(f: RadialField, target_mass_sq: float) -> Tuple[RadialField, float]:
    m = float(np.dot(f.grid.quad_weights, f.values**2))
    if m <= 0.0:
        raise ValueError("cannot normalize a zero field")
    return RadialField(f.grid, f.values * np.sqrt(target_mass_sq / m)), abs(m - target_mass_sq) / target_mass_sq


def _root_of(roots: FiberRoots, which: str) -> Optional[float]:
    return roots.s_plus if which == "plus" else roots.t_minus


def _project(pair: PairState, params: ModelParams, agg: Aggregates, which: str) -> FiberProjection:
    """Dilate to the requested fiber root, correcting for resampling.

    Large dilations shift the discrete aggregates by the interpolation
    error, so the root is re-solved on the resampled pair and tiny
    corrective dilations applied until it sits below 1e-9.  Corrections
    this small leave the certificates untouched.
    """
    cur = pair
    a = agg
    total = 0.0
    drift = 0.0
    root = _root_of(fiber_roots(a), which)
    for _ in range(4):
        if root is None:
            raise ProjectionUndefined(
                f"fiber root '{which}' lost after resampling (domain too small for the dilated pair?)"
            )
        if abs(root) <= 1e-9:
            break
        u = dilate(cur.u, root)
        v = dilate(cur.v, root)
        u, du = _renormalize(u, params.a1**2)
        drift = max(drift, du)
        if float(np.max(np.abs(v.values))) > 0.0:
            v, dv = _renormalize(v, params.a2**2)
            drift = max(drift, dv)
        cur = PairState(u, v)
        total += root
        a = aggregates(cur, params)
        try:
            root = _root_of(fiber_roots(a), which)
        except ValueError as exc:
            # resampling onto a domain the dilated pair outgrew can flatten
            # it into a near-constant; refuse instead of leaking a ValueError
            raise ProjectionUndefined(
                f"fiber root '{which}' degenerated after resampling "
                f"(domain too small for the dilated pair?): {exc}"
            )
    psi = fiber_value(a, root if root is not None else 0.0)
    return FiberProjection(
        s=float(total), pair=cur, psi=float(psi),
        residual_root=float(root) if root is not None else float("nan"),
        mass_drift=float(drift),
    )


def project_minus(pair: PairState, params: ModelParams, agg: Optional[Aggregates] = None) -> FiberProjection:
    """Dilate the pair to the fiber ridge (the mountain-pass side)."""
    a = agg if agg is not None else aggregates(pair, params)
    roots = fiber_roots(a)
    if roots.t_minus is None:
        raise ProjectionUndefined(
            "fiber map has no ridge for this pair"
            + (" (coercivity A1/2 <= A3+A4 fails)" if params.p == 3.0 else "")
        )
    return _project(pair, params, a, "minus")


def project_plus(
    pair: PairState,
    params: ModelParams,
    agg: Optional[Aggregates] = None,
    geom: Optional[GeometryConstants] = None,
) -> FiberProjection:
    """Dilate the pair to the fiber minimum (the local-well side).

    Defined for 2 < p < 3 with the geometry gate open (T <= gamma1);
    refuses otherwise.
    """
    if params.p >= 3.0:
        raise ProjectionUndefined("the fiber minimum exists only for 2 < p < 3")
    if geom is None:
        geom = geometry_constants(
            params.p, params.a1, params.a2, params.alpha1, params.alpha2,
            params.mu1, params.mu2, params.beta,
        )
    if not geom.geometry_ok:
        raise GeometryRefusal(
            f"T = {geom.T:.6g} exceeds gamma1 = {geom.gamma1:.6g}; the local well is not certified"
        )
    a = agg if agg is not None else aggregates(pair, params)
    roots = fiber_roots(a)
    if roots.s_plus is None:
        raise ProjectionUndefined("fiber map has no interior minimum for this pair")
    return _project(pair, params, a, "plus")


@dataclass(frozen=True)
class FiberReport:
    """Where a pair sits relative to the constraint manifold.

    label is one of Pminus / Pplus / Pzero-band (on-manifold by Pohozaev,
    classified by psi''(0)) or off-manifold.
    """

    roots: FiberRoots
    psi_at_plus: Optional[float]
    psi_at_minus: Optional[float]
    zero_c: Optional[float]
    zero_d: Optional[float]
    pohozaev: float          # psi'(0)
    psi2_at_zero: float      # psi''(0)
    label: str


def classify(pair: PairState, params: ModelParams, agg: Optional[Aggregates] = None) -> FiberReport:
    a = agg if agg is not None else aggregates(pair, params)
    roots = fiber_roots(a)
    d1, d2 = fiber_derivatives(a, 0.0)
    tol_p = 1e-6 * (1.0 + a.a1_term)
    band = 1e-6 * a.a1_term
    if abs(d1) > tol_p:
        label = "off-manifold"
    elif d2 < -band:
        label = "Pminus"
    elif d2 > band:
        label = "Pplus"
    else:
        label = "Pzero-band"

    psi_plus = fiber_value(a, roots.s_plus) if roots.s_plus is not None else None
    psi_minus = fiber_value(a, roots.t_minus) if roots.t_minus is not None else None

    zero_c = zero_d = None
    if roots.t_minus is not None and psi_minus is not None and psi_minus > 0.0:
        lo = roots.s_plus if roots.s_plus is not None else roots.t_minus - 1.0
        if roots.s_plus is None:
            step = 1.0
            while fiber_value(a, lo) >= 0.0:
                lo -= step
                step *= 2.0
        if fiber_value(a, lo) < 0.0:
            zero_c = float(brentq(lambda s: fiber_value(a, s), lo, roots.t_minus, xtol=1e-13))
        hi = roots.t_minus + 1.0
        step = 1.0
        while fiber_value(a, hi) >= 0.0:
            hi += step
            step *= 2.0
        zero_d = float(brentq(lambda s: fiber_value(a, s), roots.t_minus, hi, xtol=1e-13))
    return FiberReport(
        roots=roots,
        psi_at_plus=None if psi_plus is None else float(psi_plus),
        psi_at_minus=None if psi_minus is None else float(psi_minus),
        zero_c=zero_c,
        zero_d=zero_d,
        pohozaev=float(d1),
        psi2_at_zero=float(d2),
        label=label,
    )
