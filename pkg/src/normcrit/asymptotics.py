"""Limit-regime verification for converged solve sequences.

Three collapse regimes admit explicit normalizations under which the
states converge to fixed profiles:

* mass collapse (ground branch, subcubic or supercubic power): after an
  amplitude/dilation normalization built from the limiting multiplier,
  each component tends to the unit-frequency scalar profile;
* bubble concentration (mountain-pass branch, small masses): the pair
  approaches a synchronized pair of quartic-critical bubbles and the
  energy approaches the closed-form limit level;
* cubic threshold (p = 3): as the mass-coupling products approach the
  sharp interpolation constant, a gap-dependent rescaling converges to
  a one-parameter family built on the cubic scalar profile.

This module applies those normalizations to finished SolveResults,
measures profile distances, fits multiplier and scale rates, and issues
trend verdicts.  True limits are unreachable at finite resolution, so a
verdict requires a strict decrease over at least four usable steps plus
a final tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import PchipInterpolator

from .functionals import ModelParams
from .grid import RadialField, RadialGrid, build_grid
from .profiles import (
    AdmissibilityError,
    CoupledConstants,
    ScalarProfile,
    bubble,
    coupled_constants,
    solve_scalar_profile,
)
from .solvers import SolveResult

__all__ = [
    "AsymptoticsReport",
    "BubbleFit",
    "DecayBound",
    "FitNotApplicable",
    "RateFit",
    "bubble_fit",
    "collapse_rate",
    "collapse_scaling",
    "decay_check",
    "grad_seminorm_dist",
    "ground_limit_check",
    "limit_multiplier",
    "mp_limit_check",
    "pure_scalar_field",
    "pure_scalar_level",
    "suggest_grid",
    "threshold_rescale",
]

_MIN_TREND_STEPS = 4


class FitNotApplicable(RuntimeError):
    """The state is not in the regime the fit assumes (no concentration)."""


# ---------------------------------------------------------------------------
# closed-form collapse data


def collapse_rate(p: float) -> float:
    """Slope of log(multiplier) against log(mass) in the collapse regimes.

    Positive for 2 < p < 3 (multiplier vanishes with the mass), negative
    for 3 < p < 4 (multiplier vanishes as the mass grows).  Undefined at
    the cubic power, where the collapse is driven by the coupling gap
    rather than the mass itself.
    """
    if not (2.0 < p < 4.0):
        raise AdmissibilityError(f"power must lie in (2, 4), got {p:g}")
    if abs(p - 3.0) < 1e-12:
        raise AdmissibilityError("rate is undefined at the cubic power p = 3")
    return (p - 2.0) / (3.0 - p)


def limit_multiplier(p: float, alpha: float, mass: float, profile_mass_sq: float) -> float:
    """Limiting Lagrange multiplier of one component in a collapse regime.

    This is also the exact multiplier of the pure-power scalar problem at
    this mass: the quartic term only perturbs it at higher order.
    """
    if abs(p - 3.0) < 1e-12:
        raise AdmissibilityError("no mass-driven multiplier law at p = 3")
    if not (2.0 < p < 4.0):
        raise AdmissibilityError(f"power must lie in (2, 4), got {p:g}")
    if alpha <= 0.0 or mass <= 0.0 or profile_mass_sq <= 0.0:
        raise AdmissibilityError("alpha, mass and profile mass must be positive")
    base = mass * mass * alpha ** (2.0 / (p - 2.0)) / profile_mass_sq
    return float(base ** ((p - 2.0) / (6.0 - 2.0 * p)))


def collapse_scaling(
    p: float, alpha: float, mass: float, profile_mass_sq: float
) -> Tuple[float, float]:
    """Amplitude and argument factors (amp, arg) of the normalizing map.

    The normalized field is f_tilde(x) = amp * f(arg * x).  By
    construction amp^2 * arg^-4 * mass^2 equals profile_mass_sq exactly,
    so the map carries the prescribed mass to the profile mass as an
    algebraic identity.
    """
    lam = limit_multiplier(p, alpha, mass, profile_mass_sq)
    amp = (lam / alpha) ** (-1.0 / (p - 2.0))
    return float(amp), float(lam ** -0.5)


def pure_scalar_level(p: float, alpha: float, mass: float, profile: ScalarProfile) -> float:
    """Closed-form energy of the scalar pure-power branch at this mass.

    Negative and minimum-type below the cubic power, positive and
    ridge-type above it; both signs share one constant built from the
    profile mass.
    """
    if abs(p - 3.0) < 1e-12:
        raise AdmissibilityError("no closed-form scalar level at p = 3")
    if not (2.0 < p < 4.0):
        raise AdmissibilityError(f"power must lie in (2, 4), got {p:g}")
    w2 = math.sqrt(profile.mass_sq)
    if p < 3.0:
        k = ((3.0 - p) / (4.0 - p)) * w2 ** ((2.0 - p) / (3.0 - p)) * alpha ** (1.0 / (3.0 - p))
        return -k * mass ** ((4.0 - p) / (3.0 - p))
    k = ((p - 3.0) / (4.0 - p)) * w2 ** ((p - 2.0) / (p - 3.0)) * alpha ** (1.0 / (3.0 - p))
    return k * mass ** (-(4.0 - p) / (p - 3.0))


def pure_scalar_field(
    p: float, alpha: float, mass: float, profile: ScalarProfile, grid: RadialGrid
) -> RadialField:
    """Exact pure-power scalar state at the given mass, sampled on grid.

    The state is the profile raised to the multiplier's amplitude and
    frequency: amp * w(sqrt(lam) r) with amp = (lam/alpha)^{1/(p-2)}.
    Inverse of the collapse_scaling normalization applied to the profile.
    """
    lam = limit_multiplier(p, alpha, mass, profile.mass_sq)
    amp = (lam / alpha) ** (1.0 / (p - 2.0))
    src = profile.field.grid
    interp = PchipInterpolator(src.r, profile.field.values, extrapolate=False)
    with np.errstate(invalid="ignore"):
        vals = amp * np.nan_to_num(interp(math.sqrt(lam) * grid.r), nan=0.0)
    vals[-1] = 0.0
    return RadialField(grid, vals)


def suggest_grid(
    lam_est: float,
    *,
    span: float = 26.0,
    n: int = 4096,
    min_radius: float = 20.0,
    max_radius: float = 2400.0,
) -> Tuple[float, int]:
    """Domain radius and node count matched to an expected multiplier.

    States decay at frequency sqrt(lam), so a domain of span/sqrt(lam)
    keeps the truncation error and the per-width resolution independent
    of where the sweep sits in a collapse regime.
    """
    if not (lam_est > 0.0):
        raise AdmissibilityError("multiplier estimate must be positive")
    r_max = float(min(max(span / math.sqrt(lam_est), min_radius), max_radius))
    return r_max, int(n)


# ---------------------------------------------------------------------------
# rescaling helpers


def _resample(
    field_in: RadialField, amp: float, arg: float, target: RadialGrid
) -> np.ndarray:
    # f_tilde(r) = amp * f(arg r) on the target nodes; zero outside the
    # source domain (states decay exponentially there)
    src = field_in.grid
    interp = PchipInterpolator(src.r, field_in.values, extrapolate=False)
    with np.errstate(invalid="ignore"):
        out = amp * np.nan_to_num(interp(arg * target.r), nan=0.0)
    out[-1] = 0.0
    return out


def _h1_sq(grid: RadialGrid, vals: np.ndarray) -> float:
    w = grid.quad_weights
    dv = grid.d1 @ vals
    return float(np.dot(w, dv * dv) + np.dot(w, vals * vals))


def _grad_sq(grid: RadialGrid, vals: np.ndarray) -> float:
    dv = grid.d1 @ vals
    return float(np.dot(grid.quad_weights, dv * dv))


def grad_seminorm_dist(f: RadialField, g: RadialField) -> float:
    """Gradient-seminorm distance ||grad(f - g)||_2 on a shared grid.

    The metric of the bubble comparisons; invariant under the critical
    rescaling f -> sigma f(sigma x) applied to both arguments at once
    (the mass-preserving dilation scales it by e^s instead).
    """
    if f.grid is not g.grid:
        raise ValueError("fields must share one grid")
    return math.sqrt(max(_grad_sq(f.grid, f.values - g.values), 0.0))


def threshold_rescale(
    field_in: RadialField, alpha: float, mass: float, profile: ScalarProfile
) -> Tuple[np.ndarray, float, float]:
    """Gap-driven normalization of one component at the cubic power.

    Returns the normalized samples on the profile grid, the gap factor
    r_gap = (1 - alpha*mass/|w|_2)^{-1/2}, and the fitted limit frequency
    nu.  The map is f_tilde(x) = c r^2 f(c r x) with c = mass/|w|_2; its
    mass equals the profile mass identically, so the two fitting
    equations (center value and mass) leave only the center row active
    and the least-squares nu is the center ratio.
    """
    w2 = math.sqrt(profile.mass_sq)
    gap = 1.0 - alpha * mass / w2
    if gap <= 0.0:
        raise AdmissibilityError(
            f"mass-coupling product {alpha * mass:.6g} at or beyond the sharp "
            f"threshold {w2:.6g}; the subcritical rescaling does not apply"
        )
    c = mass / w2
    r_gap = gap ** -0.5
    tilde = _resample(field_in, c * r_gap * r_gap, c * r_gap, profile.field.grid)
    # nu solves min over nu of (nu w(0) - f_tilde(0))^2 + (mass defect)^2;
    # the defect term is nu-free, leaving the center match
    nu = float(tilde[0] / profile.center)
    return tilde, float(r_gap), nu


# ---------------------------------------------------------------------------
# report types


@dataclass(frozen=True)
class RateFit:
    """Least-squares slope of a log-log trend with its uncertainty."""

    slope: float
    intercept: float
    stderr: float
    residual: float
    n: int

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "stderr": self.stderr,
            "residual": self.residual,
            "n": self.n,
        }


@dataclass(frozen=True)
class BubbleFit:
    """Concentration fit of a mountain-pass state to the bubble pair."""

    eps: float
    dist: float
    center_ratio: float
    eps_v: float

    def __iter__(self):
        # unpacks as (scale, distance, ratio check)
        return iter((self.eps, self.dist, self.center_ratio))

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "dist": self.dist,
            "center_ratio": self.center_ratio,
            "eps_v": self.eps_v,
        }


@dataclass(frozen=True)
class DecayBound:
    """Scaled sup bounds sup (1 + r^2)|f_scaled| for both components."""

    constant_u: float
    constant_v: float
    eps: float

    def to_dict(self) -> dict:
        return {
            "constant_u": self.constant_u,
            "constant_v": self.constant_v,
            "eps": self.eps,
        }


@dataclass
class AsymptoticsReport:
    """Trend summary of a solve sequence against its limit theorem."""

    regime: str
    sequence: List[Tuple[ModelParams, SolveResult]]
    distances: List[float]
    fitted_rates: Dict[str, RateFit]
    limit_energy_gap: List[float]
    monotone: bool
    final_ok: bool
    verdict: str
    notices: List[str] = field(default_factory=list)
    multipliers: List[Tuple[float, float]] = field(default_factory=list)
    center_ratios: List[float] = field(default_factory=list)
    decay_constants: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        rows = []
        for params, res in self.sequence:
            rows.append(
                {
                    "a1": params.a1,
                    "a2": params.a2,
                    "p": params.p,
                    "branch": res.branch,
                    "converged": res.converged,
                    "energy": res.energy,
                    "lambda1": res.lambda1,
                    "lambda2": res.lambda2,
                }
            )
        return {
            "regime": self.regime,
            "sequence": rows,
            "distances": list(self.distances),
            "fitted_rates": {k: v.to_dict() for k, v in self.fitted_rates.items()},
            "limit_energy_gap": list(self.limit_energy_gap),
            "monotone": self.monotone,
            "final_ok": self.final_ok,
            "verdict": self.verdict,
            "notices": list(self.notices),
            "multipliers": [list(t) for t in self.multipliers],
            "center_ratios": list(self.center_ratios),
            "decay_constants": list(self.decay_constants),
        }


def _rate_fit(x: Sequence[float], y: Sequence[float]) -> Optional[RateFit]:
    xs = np.log(np.asarray(x, dtype=float))
    ys = np.log(np.asarray(y, dtype=float))
    if xs.size < 2 or not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        return None
    if xs.size == 2:
        slope = (ys[1] - ys[0]) / (xs[1] - xs[0])
        return RateFit(float(slope), float(ys[0] - slope * xs[0]), math.inf, 0.0, 2)
    coeffs, cov = np.polyfit(xs, ys, 1, cov=True)
    fit = np.polyval(coeffs, xs)
    resid = float(np.sqrt(np.mean((ys - fit) ** 2)))
    return RateFit(
        float(coeffs[0]), float(coeffs[1]), float(np.sqrt(cov[0, 0])), resid, int(xs.size)
    )


def _trend(
    distances: Sequence[float], final_tol: float, what: str
) -> Tuple[bool, bool, str]:
    n = len(distances)
    monotone = n >= 2 and all(b < a for a, b in zip(distances, distances[1:]))
    final_ok = n >= 1 and distances[-1] <= final_tol
    if n < _MIN_TREND_STEPS:
        return monotone, final_ok, (
            f"inconclusive: {n} usable steps, trend needs {_MIN_TREND_STEPS}"
        )
    if not monotone:
        return monotone, final_ok, f"refuted: {what} not strictly decreasing"
    if not final_ok:
        return monotone, final_ok, (
            f"inconclusive: final {what} {distances[-1]:.3g} above {final_tol:.3g}"
        )
    return monotone, final_ok, "confirmed"


# ---------------------------------------------------------------------------
# ground-branch limits


def ground_limit_check(
    results: Sequence[SolveResult],
    mode: str,
    *,
    profile: Optional[ScalarProfile] = None,
    final_tol: float = 5e-2,
) -> AsymptoticsReport:
    """Measure a ground-branch sweep against its collapse limit.

    mode selects the regime: "small_mass" (2 < p < 3, masses shrinking),
    "large_mass" (3 < p < 4, masses growing), or "p3_threshold" (p = 3,
    mass-coupling products approaching the sharp constant).  Each
    converged entry is normalized per component, compared to the limit
    profile in relative H^1 distance, and the multiplier trend is fitted
    log-log.  Unconverged entries are skipped with a notice.
    """
    if mode not in ("small_mass", "large_mass", "p3_threshold"):
        raise ValueError(f"unknown mode {mode!r}")
    notices: List[str] = []
    used: List[SolveResult] = []
    for res in results:
        if not res.converged:
            notices.append(
                f"skipped unconverged entry a1={res.params.a1:g} a2={res.params.a2:g}"
            )
            continue
        used.append(res)
    if used:
        p = used[0].params.p
        if mode == "small_mass" and not (2.0 < p < 3.0):
            raise AdmissibilityError(f"small-mass collapse needs 2 < p < 3, got {p:g}")
        if mode == "large_mass" and not (3.0 < p < 4.0):
            raise AdmissibilityError(f"large-mass collapse needs 3 < p < 4, got {p:g}")
        if mode == "p3_threshold" and abs(p - 3.0) > 1e-12:
            raise AdmissibilityError(f"threshold mode needs p = 3, got {p:g}")
        prof = profile if profile is not None else solve_scalar_profile(p)
    else:
        prof = profile

    g = prof.field.grid if prof is not None else None
    distances: List[float] = []
    gaps: List[float] = []
    multipliers: List[Tuple[float, float]] = []
    gap_factors: List[float] = []

    for res in used:
        pr = res.params
        if mode == "p3_threshold":
            du, r1, nu1 = threshold_rescale(res.pair.u, pr.alpha1, pr.a1, prof)
            dv, r2, nu2 = threshold_rescale(res.pair.v, pr.alpha2, pr.a2, prof)
            limu = _resample(prof.field, nu1, math.sqrt(nu1), g)
            limv = _resample(prof.field, nu2, math.sqrt(nu2), g)
            num = _h1_sq(g, du - limu) + _h1_sq(g, dv - limv)
            den = _h1_sq(g, limu) + _h1_sq(g, limv)
            gaps.append(abs(res.energy))
            gap_factors.append(0.5 * (r1**-2 + r2**-2))
            notices.append(
                f"a1={pr.a1:g}: fitted limit frequencies nu=({nu1:.4g}, {nu2:.4g})"
            )
        else:
            amp1, arg1 = collapse_scaling(pr.p, pr.alpha1, pr.a1, prof.mass_sq)
            amp2, arg2 = collapse_scaling(pr.p, pr.alpha2, pr.a2, prof.mass_sq)
            du = _resample(res.pair.u, amp1, arg1, g)
            dv = _resample(res.pair.v, amp2, arg2, g)
            ident = abs(amp1 * amp1 * arg1**-4 * pr.a1 * pr.a1 / prof.mass_sq - 1.0)
            if ident > 1e-8:
                notices.append(
                    f"a1={pr.a1:g}: mass identity off by {ident:.2e} (scaling bug?)"
                )
            num = _h1_sq(g, du - prof.field.values) + _h1_sq(g, dv - prof.field.values)
            den = 2.0 * _h1_sq(g, prof.field.values)
            pred = pure_scalar_level(pr.p, pr.alpha1, pr.a1, prof) + pure_scalar_level(
                pr.p, pr.alpha2, pr.a2, prof
            )
            gaps.append(abs(res.energy - pred))
        distances.append(math.sqrt(max(num, 0.0) / den))
        multipliers.append((res.lambda1, res.lambda2))

    rates: Dict[str, RateFit] = {}
    if len(used) >= 2:
        a1s = [r.params.a1 for r in used]
        a2s = [r.params.a2 for r in used]
        l1s = [m[0] for m in multipliers]
        l2s = [m[1] for m in multipliers]
        if mode == "p3_threshold":
            fit = _rate_fit(gap_factors, l1s)
            if fit is not None:
                rates["lambda1_vs_gap"] = fit
            fit = _rate_fit(gap_factors, l2s)
            if fit is not None:
                rates["lambda2_vs_gap"] = fit
        else:
            fit = _rate_fit(a1s, l1s)
            if fit is not None:
                rates["lambda1_vs_a1"] = fit
            fit = _rate_fit(a2s, l2s)
            if fit is not None:
                rates["lambda2_vs_a2"] = fit
            fit = _rate_fit(a1s, distances)
            if fit is not None:
                rates["distance_vs_a1"] = fit

    monotone, final_ok, verdict = _trend(distances, final_tol, "profile distance")
    regime = {
        "small_mass": "small_mass_ground",
        "large_mass": "large_mass",
        "p3_threshold": "p3_threshold",
    }[mode]
    return AsymptoticsReport(
        regime=regime,
        sequence=[(r.params, r) for r in used],
        distances=distances,
        fitted_rates=rates,
        limit_energy_gap=gaps,
        monotone=monotone,
        final_ok=final_ok,
        verdict=verdict,
        notices=notices,
        multipliers=multipliers,
    )


# ---------------------------------------------------------------------------
# bubble concentration


def bubble_fit(
    result: SolveResult, *, constants: Optional[CoupledConstants] = None
) -> BubbleFit:
    """Fit the concentration scale of a mountain-pass state.

    The scale minimizes the squared center mismatch to sqrt(k1) times the
    bubble center value 2 sqrt(2)/eps, which the one-parameter least
    squares solves in closed form.  The reported distance is the
    gradient-seminorm distance of (u, v) to the synchronized bubble pair
    at the fitted scale, relative to the pair's own seminorm
    sqrt((k1+k2)) S; by dilation invariance this equals the distance of
    the eps-normalized pair to the unit-scale bubbles.
    """
    pr = result.params
    cc = constants if constants is not None else coupled_constants(pr.mu1, pr.mu2, pr.beta)
    u = result.pair.u
    v = result.pair.v
    g = u.grid
    u0 = float(u.values[0])
    v0 = float(v.values[0])
    if u0 <= 0.0 or v0 <= 0.0:
        raise FitNotApplicable("center values must be positive to fit a scale")
    amp = 2.0 * math.sqrt(2.0)
    eps = math.sqrt(cc.k1) * amp / u0
    eps_v = math.sqrt(cc.k2) * amp / v0
    gate = min(2.0, g.r_max / 20.0)
    if eps > gate:
        raise FitNotApplicable(
            f"fitted scale {eps:.3g} above the concentration gate {gate:.3g}; "
            "the state is not in the bubble regime"
        )
    ref = bubble(eps, g)
    du = grad_seminorm_dist(u, RadialField(g, math.sqrt(cc.k1) * ref.values))
    dv = grad_seminorm_dist(v, RadialField(g, math.sqrt(cc.k2) * ref.values))
    dist = math.hypot(du, dv) / math.sqrt(cc.s_sq_coupled)
    return BubbleFit(eps=eps, dist=dist, center_ratio=v0 / u0, eps_v=eps_v)


def decay_check(result: SolveResult, eps: float) -> DecayBound:
    """Sup bound sup (1 + r^2)|f_eps| of the eps-normalized components.

    f_eps(r) = eps f(eps r), so the bound is evaluated without
    interpolation as max over nodes of eps (1 + (r/eps)^2) |f(r)|.  The
    exact bubble at the matching scale gives 2 sqrt(2) at every node.
    """
    g = result.pair.u.grid
    gate = min(2.0, g.r_max / 20.0)
    if not (0.0 < eps <= gate):
        raise FitNotApplicable(
            f"scale {eps:.3g} outside the concentration gate (0, {gate:.3g}]"
        )
    shape = eps * (1.0 + (g.r / eps) ** 2)
    cu = float(np.max(shape * np.abs(result.pair.u.values)))
    cv = float(np.max(shape * np.abs(result.pair.v.values)))
    return DecayBound(constant_u=cu, constant_v=cv, eps=eps)


def mp_limit_check(
    results: Sequence[SolveResult],
    *,
    constants: Optional[CoupledConstants] = None,
    final_tol: float = 5e-2,
) -> AsymptoticsReport:
    """Measure a mountain-pass sweep against the bubble-concentration limit.

    Per converged entry: bubble distance, energy gap to the limit level
    (k1+k2) S^2 / 4, component center ratio, and the decay constant at
    the fitted scale.  The verdict tracks the relative energy gap: strict
    decrease plus final gap at most final_tol of the level.
    """
    notices: List[str] = []
    used: List[SolveResult] = []
    for res in results:
        if not res.converged:
            notices.append(
                f"skipped unconverged entry a1={res.params.a1:g} a2={res.params.a2:g}"
            )
            continue
        used.append(res)
    cc = constants
    if cc is None and used:
        pr = used[0].params
        cc = coupled_constants(pr.mu1, pr.mu2, pr.beta)

    distances: List[float] = []
    gaps: List[float] = []
    ratios: List[float] = []
    decays: List[float] = []
    eps_list: List[float] = []
    kept: List[SolveResult] = []
    for res in used:
        try:
            fit = bubble_fit(res, constants=cc)
        except FitNotApplicable as exc:
            notices.append(f"a1={res.params.a1:g}: {exc}")
            continue
        kept.append(res)
        distances.append(fit.dist)
        ratios.append(fit.center_ratio)
        eps_list.append(fit.eps)
        gaps.append(abs(res.energy - cc.level))
        decays.append(decay_check(res, fit.eps).constant_u)

    rates: Dict[str, RateFit] = {}
    if len(kept) >= 2:
        a1s = [r.params.a1 for r in kept]
        fit = _rate_fit(a1s, eps_list)
        if fit is not None:
            rates["eps_vs_a1"] = fit
        fit = _rate_fit(a1s, gaps)
        if fit is not None:
            rates["energy_gap_vs_a1"] = fit

    rel_gaps = [gp / cc.level for gp in gaps] if cc is not None else []
    monotone, final_ok, verdict = _trend(rel_gaps, final_tol, "relative energy gap")
    if len(decays) >= 3:
        tail = decays[-3:]
        if max(tail) > 2.0 * min(tail):
            notices.append(
                f"decay constant unstable over last three steps: {tail}"
            )
            if verdict == "confirmed":
                verdict = "inconclusive: decay constant unstable"
    return AsymptoticsReport(
        regime="small_mass_mp",
        sequence=[(r.params, r) for r in kept],
        distances=distances,
        fitted_rates=rates,
        limit_energy_gap=gaps,
        monotone=monotone,
        final_ok=final_ok,
        verdict=verdict,
        notices=notices,
        multipliers=[(r.lambda1, r.lambda2) for r in kept],
        center_ratios=ratios,
        decay_constants=decays,
    )
