"""Reference scalar profiles and the constants built from them.

Two special radial functions drive every threshold in the model: the
positive decaying solution w_p of  -Delta w + w = w^(p-1)  on R^4, found
by shooting, and the explicit quartic-critical bubble
U_eps(r) = 2 sqrt(2) eps / (eps^2 + r^2).  From them come the sharp
Gagliardo-Nirenberg constant, the Sobolev constant, the coupled
constants (k1, k2) of the limit system, and the constrained-geometry
radii that gate the solvers.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq
from scipy.special import k1 as bessel_k1

from .grid import RadialField, RadialGrid, build_grid

__all__ = [
    "ScalarProfile",
    "ShootingError",
    "AdmissibilityError",
    "solve_scalar_profile",
    "gn_constant",
    "gamma_p",
    "sobolev_constant",
    "bubble",
    "cutoff_bubble",
    "coupled_constants",
    "CoupledConstants",
    "geometry_constants",
    "GeometryConstants",
    "cache_dir",
    "cache_list",
    "cache_clear",
    "cache_warm",
]


class ShootingError(RuntimeError):
    """The shooting solve failed to certify a profile."""


class AdmissibilityError(ValueError):
    """Parameter combination outside the admissible window."""


def gamma_p(p: float) -> float:
    """Dilation weight of the L^p term: ||s*u||_p^p scales as e^(p gamma_p s)."""
    return 2.0 * (p - 2.0) / p


# ---------------------------------------------------------------------------
# shooting for w_p


@dataclass(frozen=True)
class ScalarProfile:
    """Certified sample of w_p on a grid.

    residual is the relative weighted-L2 defect of -Delta w + w - w^(p-1)
    measured with the grid operators; center is the shooting value w(0).
    """

    p: float
    field: RadialField
    center: float
    mass_sq: float
    grad_sq: float
    lp_pp: float
    residual: float
    from_cache: bool = False

    @property
    def l2(self) -> float:
        return float(np.sqrt(self.mass_sq))


def _shoot_once(p: float, b: float, r_end: float, rtol: float):
    """Integrate outward from the series start; classify the shot.

    Returns (kind, sol) with kind "cross" (hit zero: b too large),
    "turn" (derivative turned positive: b too small), or "end".
    """
    r0 = 1e-4
    c2 = (b - b ** (p - 1.0)) / 8.0
    y0 = [b + c2 * r0**2, 2.0 * c2 * r0]

    def rhs(r, y):
        w, wp = y
        return [wp, w - np.abs(w) ** (p - 2.0) * w - 3.0 * wp / r]

    def ev_cross(r, y):
        return y[0]

    ev_cross.terminal = True
    ev_cross.direction = -1.0

    def ev_turn(r, y):
        return y[1]

    ev_turn.terminal = True
    ev_turn.direction = 1.0

    sol = solve_ivp(
        rhs,
        (r0, r_end),
        y0,
        method="DOP853",
        events=(ev_cross, ev_turn),
        rtol=rtol,
        atol=1e-14,
        dense_output=True,
    )
    if sol.t_events[0].size:
        return "cross", sol
    if sol.t_events[1].size:
        return "turn", sol
    return "end", sol


def _classify(kind: str, sol) -> bool:
    """True when the shot overshoots (center value too large)."""
    if kind == "cross":
        return True
    if kind == "turn":
        return False
    # ran to r_end staying positive and decreasing; the growing mode, if
    # present, shows in the sign of w' + w
    w, wp = sol.y[0, -1], sol.y[1, -1]
    return wp + w < 0.0


def _shoot_bracket(p: float, r_end: float, rtol: float) -> Tuple[float, float]:
    lo = 1.0 + 1e-9  # w == 1 is the constant equilibrium; ground value is above
    hi = 4.0
    for _ in range(40):
        kind, sol = _shoot_once(p, hi, r_end, rtol)
        if _classify(kind, sol):
            return lo, hi
        lo, hi = hi, hi * 2.0
    raise ShootingError(f"no overshoot found up to center value {hi:g} (p={p:g})")


def _solve_shooting(p: float, r_end: float = 40.0):
    rtol = 1e-12
    lo, hi = _shoot_bracket(p, r_end, rtol)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        kind, sol = _shoot_once(p, mid, r_end, rtol)
        if _classify(kind, sol):
            hi = mid
        else:
            lo = mid
    b = 0.5 * (lo + hi)
    kind, sol = _shoot_once(p, b, r_end, rtol)
    r_valid = sol.t[-1]
    return b, sol, r_valid


def _evaluate_on_grid(p: float, b: float, sol, r_valid: float, grid: RadialGrid) -> np.ndarray:
    """Sample the shot on grid nodes, grafting the exact linear tail.

    Beyond the graft radius the decaying solution of w'' + 3w'/r = w is
    A K_1(r)/r; the neglected nonlinear forcing is O(w^(p-1)), far below
    the certificate tolerance there.
    """
    r = grid.r
    vals = np.empty_like(r)
    r0 = 1e-4
    c2 = (b - b ** (p - 1.0)) / 8.0

    inner = r < r0
    vals[inner] = b + c2 * r[inner] ** 2

    # pick the graft point: where the shot has decayed to ~1e-6 of center,
    # comfortably before the bisection noise blows up
    r_graft = min(0.9 * r_valid, grid.r_max)
    ts = np.linspace(r0, min(r_valid, grid.r_max), 400)
    ws = sol.sol(ts)[0]
    small = ts[ws <= 1e-6 * b]
    if small.size:
        r_graft = min(r_graft, small[0])

    mid = (~inner) & (r <= r_graft)
    vals[mid] = sol.sol(r[mid])[0]

    outer = r > r_graft
    if np.any(outer):
        w_g = float(sol.sol(r_graft)[0])
        amp = w_g * r_graft / bessel_k1(r_graft)
        with np.errstate(over="ignore"):
            tail = amp * bessel_k1(r[outer]) / r[outer]
        vals[outer] = np.where(np.isfinite(tail), tail, 0.0)
    return vals


def _newton_polish(p: float, vals: np.ndarray, grid: RadialGrid, boundary_value: float) -> np.ndarray:
    """Solve the discrete system -Delta_h w + w = |w|^(p-2) w exactly.

    The shot is only an initial guess; its dense-output noise and the
    graft kink sit well above the residual certificate.  A few Newton
    steps on the grid operator itself push the discrete residual to
    roundoff.  The outermost node is held at the linear-tail value.
    """
    from scipy.linalg import solve_banded

    w = vals.copy()
    w[-1] = boundary_value
    n = grid.n
    scale = max(1.0, float(np.max(np.abs(w))))
    prev = np.inf
    for _ in range(40):
        F = -(grid.lap @ w) + w - np.abs(w) ** (p - 2.0) * w
        F[-1] = 0.0
        sup = float(np.max(np.abs(F)))
        # the operator roundoff floor is ~ |w| eps / h^2, far above 1e-15;
        # stop on stall once comfortably below the certificate
        if sup <= 1e-12 * scale or (sup <= 1e-8 * scale and sup > 0.5 * prev):
            return w
        prev = sup
        ab = -np.asarray(grid.lap_bands).copy()
        ab[2] += 1.0 - (p - 1.0) * np.abs(w) ** (p - 2.0)
        ab[2, -1] = 1.0
        step = solve_banded((2, 2), ab, F)
        step[-1] = 0.0
        # keep the update from overshooting the positive branch
        lim = 0.5 * float(np.max(np.abs(w)))
        big = float(np.max(np.abs(step)))
        if big > lim:
            step *= lim / big
        w = w - step
    raise ShootingError(f"grid Newton polish did not converge (p={p:g}, N={n})")


def _profile_from_values(p: float, b: float, vals: np.ndarray, grid: RadialGrid, from_cache: bool) -> ScalarProfile:
    field = RadialField(grid, vals)
    w = grid.quad_weights
    lap = grid.lap @ vals
    res = -lap + vals - np.abs(vals) ** (p - 2.0) * vals
    # the Dirichlet row reads the operator as 0; score the defect there as 0
    res[-1] = 0.0
    scale = float(np.sqrt(np.dot(w, vals**2)))
    residual = float(np.sqrt(np.dot(w, res**2))) / scale
    return ScalarProfile(
        p=float(p),
        field=field,
        center=float(b),
        mass_sq=float(np.dot(w, vals**2)),
        grad_sq=float(np.dot(w, (grid.d1 @ vals) ** 2)),
        lp_pp=float(np.dot(w, np.abs(vals) ** p)),
        residual=residual,
        from_cache=from_cache,
    )


# ---------------------------------------------------------------------------
# profile cache

_RESIDUAL_TOL = 1e-7


def cache_dir() -> Path:
    env = os.environ.get("NORMCRIT_CACHE")
    if env:
        return Path(env).expanduser()
    return Path("~/.cache/normcrit").expanduser()


def _cache_path(p: float, grid: RadialGrid) -> Path:
    return cache_dir() / f"wp_p{p:.10g}_N{grid.n}_R{grid.r_max:.10g}.tsv"


def _cache_load(p: float, grid: RadialGrid) -> Optional[ScalarProfile]:
    path = _cache_path(p, grid)
    if not path.is_file():
        return None
    try:
        with open(path) as fh:
            header = fh.readline()
        if not header.startswith("#"):
            return None
        toks = header[1:].split()
        hp, hn, hr = float(toks[0]), int(toks[1]), float(toks[2])
        if hn != grid.n or abs(hp - p) > 1e-12 * max(1.0, abs(p)) or abs(hr - grid.r_max) > 1e-12 * grid.r_max:
            return None
        data = np.loadtxt(path)
        if data.shape != (grid.n, 2) or not np.allclose(data[:, 0], grid.r, rtol=0, atol=1e-12 * grid.r_max):
            return None
        prof = _profile_from_values(p, float(data[0, 1]), data[:, 1], grid, from_cache=True)
        if prof.residual > _RESIDUAL_TOL:
            return None
        return prof
    except (ValueError, IndexError, OSError):
        return None


def _cache_store(prof: ScalarProfile) -> None:
    grid = prof.field.grid
    path = _cache_path(prof.p, grid)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as fh:
            fh.write(
                f"# {prof.p:.17g} {grid.n} {grid.r_max:.17g} "
                f"{prof.mass_sq:.17g} {prof.grad_sq:.17g} {prof.lp_pp:.17g}\n"
            )
            for ri, wi in zip(grid.r, prof.field.values):
                fh.write(f"{ri:.17g}\t{wi:.17g}\n")
    except OSError:
        pass  # cache is best-effort


def cache_list() -> list:
    d = cache_dir()
    if not d.is_dir():
        return []
    return sorted(str(f.name) for f in d.glob("wp_p*_N*_R*.tsv"))


def cache_clear() -> int:
    d = cache_dir()
    n = 0
    if d.is_dir():
        for f in d.glob("wp_p*_N*_R*.tsv"):
            f.unlink()
            n += 1
    return n


def cache_warm(p_values: Sequence[float], grid: Optional[RadialGrid] = None) -> list:
    g = grid if grid is not None else _default_grid()
    return [solve_scalar_profile(p, g) for p in p_values]


_DEFAULT_GRID_PARAMS = (20.0, 4096, "uniform")


def _default_grid() -> RadialGrid:
    R, N, m = _DEFAULT_GRID_PARAMS
    return build_grid(R, N, m)


def solve_scalar_profile(p: float, grid: Optional[RadialGrid] = None, use_cache: bool = True) -> ScalarProfile:
    """Positive decaying solution of -Delta w + w = w^(p-1) on R^4.

    Shooting from the center with bisection on w(0); the far field is the
    exact Bessel tail.  The returned profile carries a pointwise PDE
    residual certificate; it must come out below 1e-7 or the solve raises.
    Profiles on uniform grids are cached as TSV under cache_dir().
    """
    if not (2.0 < p < 4.0):
        raise AdmissibilityError(f"p must lie in (2, 4), got {p:g}")
    g = grid if grid is not None else _default_grid()
    cacheable = use_cache and g.mapping == "uniform"
    if cacheable:
        hit = _cache_load(p, g)
        if hit is not None:
            return hit
    b, sol, r_valid = _solve_shooting(p)
    vals = _evaluate_on_grid(p, b, sol, r_valid, g)
    vals = _newton_polish(p, vals, g, boundary_value=float(vals[-1]))
    b = float(vals[0])
    if np.any(vals <= 0.0) or np.any(np.diff(vals) >= 0.0):
        # strict positivity/monotonicity is part of the contract
        bad = int(np.argmin(np.diff(vals))) if np.any(np.diff(vals) >= 0) else int(np.argmin(vals))
        raise ShootingError(f"profile fails positivity/monotonicity near node {bad} (p={p:g})")
    prof = _profile_from_values(p, b, vals, g, from_cache=False)
    if prof.residual > _RESIDUAL_TOL:
        raise ShootingError(
            f"residual {prof.residual:.3e} exceeds {_RESIDUAL_TOL:g} (p={p:g}, N={g.n}, R={g.r_max:g})"
        )
    if cacheable:
        _cache_store(prof)
    return prof


def gn_constant(profile: ScalarProfile) -> float:
    """Sharp interpolation constant: ||u||_p <= C ||grad u||^g ||u||^(1-g),
    g = gamma_p, with equality at w_p."""
    g = gamma_p(profile.p)
    num = profile.lp_pp ** (1.0 / profile.p)
    den = profile.grad_sq ** (g / 2.0) * profile.mass_sq ** ((1.0 - g) / 2.0)
    return num / den


# ---------------------------------------------------------------------------
# bubble and Sobolev constant


def bubble(eps: float, grid: RadialGrid) -> RadialField:
    """Quartic-critical bubble 2 sqrt(2) eps / (eps^2 + r^2); solves
    -Delta U = U^3."""
    if not (eps > 0.0):
        raise ValueError("eps must be positive")
    return RadialField(grid, 2.0 * np.sqrt(2.0) * eps / (eps**2 + grid.r**2))


def _blend(t: np.ndarray) -> np.ndarray:
    # C^2 quintic step: 1 at t<=0 falling to 0 at t>=1
    t = np.clip(t, 0.0, 1.0)
    return 1.0 - t**3 * (10.0 - 15.0 * t + 6.0 * t**2)


def cutoff_bubble(eps: float, r_in: float, r_out: float, grid: RadialGrid) -> RadialField:
    """Bubble cut to vanish beyond r_out with a C^2 blend from r_in."""
    if not (0.0 < r_in < r_out <= grid.r_max):
        raise ValueError("need 0 < r_in < r_out <= R_max")
    u = bubble(eps, grid).values * _blend((grid.r - r_in) / (r_out - r_in))
    return RadialField(grid, u)


_SOBOLEV_MEMO: dict = {}


def sobolev_constant(grid: Optional[RadialGrid] = None) -> float:
    """S with ||u||_4^2 <= ||grad u||^2 / S, from the bubble quotient on a
    wide grid; S^2 is the energy of the bubble."""
    key = None if grid is None else (grid.n, grid.r_max, grid.mapping)
    if key in _SOBOLEV_MEMO:
        return _SOBOLEV_MEMO[key]
    g = grid if grid is not None else build_grid(200.0, 8192)
    u = bubble(1.0, g)
    w = g.quad_weights
    gr = float(np.dot(w, (g.d1 @ u.values) ** 2))
    l4 = float(np.dot(w, u.values**4))
    s = gr / np.sqrt(l4)
    _SOBOLEV_MEMO[key] = s
    return s


# ---------------------------------------------------------------------------
# coupled constants and geometry


@dataclass(frozen=True)
class CoupledConstants:
    """Limit-system data: the pair (sqrt(k1) U, sqrt(k2) U) solves the
    quartic-critical coupled system, with energy level (k1+k2) S^2 / 4."""

    k1: float
    k2: float
    s: float                 # scalar Sobolev constant S
    s_sq_coupled: float      # (k1 + k2) S^2
    level: float             # (k1 + k2) S^2 / 4


def coupled_constants(mu1: float, mu2: float, beta: float, s: Optional[float] = None) -> CoupledConstants:
    """k1, k2 and the coupled Sobolev number for couplings (mu1, mu2, beta).

    Requires beta in (0, min(mu)) or beta > max(mu); elsewhere the linear
    system for (k1, k2) has a nonpositive solution.
    """
    if mu1 <= 0.0 or mu2 <= 0.0:
        raise AdmissibilityError("mu1, mu2 must be positive")
    lo, hi = min(mu1, mu2), max(mu1, mu2)
    if not (0.0 < beta < lo or beta > hi):
        raise AdmissibilityError(
            f"beta={beta:g} outside the admissible window (0, {lo:g}) | ({hi:g}, inf)"
        )
    det = beta**2 - mu1 * mu2
    k1 = (beta - mu2) / det
    k2 = (beta - mu1) / det
    s_val = s if s is not None else sobolev_constant()
    ssq = (k1 + k2) * s_val**2
    return CoupledConstants(k1=k1, k2=k2, s=s_val, s_sq_coupled=ssq, level=ssq / 4.0)


@dataclass(frozen=True)
class GeometryConstants:
    """Constrained-geometry constants on the mass sphere.

    h(rho) = rho^2/2 - D1 rho^4 - (D2 + D3) rho^(2(p-2)) lower-bounds the
    energy as a function of rho = |grad| on the constraint.  For
    2 < p < 3 and T <= gamma1 it is positive exactly on (R0, R1), which
    is what separates the local minimizer well from the mountain ridge.
    geometry_ok reflects that gate; for p >= 3 the radii are undefined
    and the gate is open.
    """

    p: float
    T: float
    gamma1: Optional[float]
    gamma0: Optional[float]
    D1: float
    D2: float
    D3: float
    rho0: Optional[float]
    rho_bar: Optional[float]
    R0: Optional[float]
    R1: Optional[float]
    geometry_ok: bool
    C_p: float
    coupled: CoupledConstants

    def h(self, rho):
        rho = np.asarray(rho, dtype=float)
        return 0.5 * rho**2 - self.D1 * rho**4 - (self.D2 + self.D3) * rho ** (2.0 * (self.p - 2.0))


def geometry_constants(
    p: float,
    a1: float,
    a2: float,
    alpha1: float,
    alpha2: float,
    mu1: float,
    mu2: float,
    beta: float,
    c_p: Optional[float] = None,
    grid: Optional[RadialGrid] = None,
) -> GeometryConstants:
    """Geometry gate for the masses (a1, a2); see GeometryConstants.

    T = alpha1 a1^(4-p) + alpha2 a2^(4-p) is compared against gamma1; for
    2 < p < 3 the gate closes when T > gamma1.
    """
    if not (2.0 < p < 4.0):
        raise AdmissibilityError(f"p must lie in (2, 4), got {p:g}")
    cc = coupled_constants(mu1, mu2, beta)
    if c_p is None:
        c_p = gn_constant(solve_scalar_profile(p, grid))
    T = alpha1 * a1 ** (4.0 - p) + alpha2 * a2 ** (4.0 - p)
    D1 = 1.0 / (4.0 * cc.s_sq_coupled)
    D2 = (alpha1 / p) * c_p**p * a1 ** (4.0 - p)
    D3 = (alpha2 / p) * c_p**p * a2 ** (4.0 - p)

    if p >= 3.0:
        return GeometryConstants(
            p=p, T=T, gamma1=None, gamma0=None, D1=D1, D2=D2, D3=D3,
            rho0=None, rho_bar=None, R0=None, R1=None,
            geometry_ok=True, C_p=c_p, coupled=cc,
        )

    ssq = cc.s_sq_coupled
    gamma1 = (
        p / (2.0 * (4.0 - p) * c_p**p)
        * (2.0 * (3.0 - p) * ssq / (4.0 - p)) ** (3.0 - p)
    )
    gamma0 = (
        p / (2.0 * (p - 2.0) * (4.0 - p) * c_p**p)
        * ((3.0 - p) * ssq / (4.0 - p)) ** (3.0 - p)
    )
    rho0 = np.sqrt((3.0 - p) / (2.0 * (4.0 - p) * D1))
    rho_bar = np.sqrt((3.0 - p) / (4.0 * (4.0 - p) * D1))

    geom = GeometryConstants(
        p=p, T=T, gamma1=gamma1, gamma0=gamma0, D1=D1, D2=D2, D3=D3,
        rho0=rho0, rho_bar=rho_bar, R0=None, R1=None,
        geometry_ok=bool(T <= gamma1 * (1.0 + 1e-12)), C_p=c_p, coupled=cc,
    )
    if not geom.geometry_ok:
        return geom

    if abs(T - gamma1) <= 1e-9 * gamma1:
        R0 = R1 = rho0
    else:
        K = D2 + D3
        # roots of h in log radius; h/rho^2 = 1/2 - D1 e^{2x} - K e^{(2p-6)x}
        def q(x):
            return 0.5 - D1 * np.exp(2.0 * x) - K * np.exp((2.0 * p - 6.0) * x)

        x0 = np.log(rho0)
        # inner root: the subquartic term dominates; expand left until q < 0
        xl = x0
        step = 1.0
        while q(xl) >= 0.0:
            xl -= step
            step *= 2.0
            if xl < x0 - 1e4:
                raise ShootingError("inner geometry radius not bracketed")
        R0 = float(np.exp(brentq(q, xl, x0, xtol=1e-15, rtol=1e-15)))
        xr = x0
        step = 1.0
        while q(xr) >= 0.0:
            xr += step
            step *= 2.0
        R1 = float(np.exp(brentq(q, x0, xr, xtol=1e-15, rtol=1e-15)))
    return GeometryConstants(
        p=p, T=T, gamma1=gamma1, gamma0=gamma0, D1=D1, D2=D2, D3=D3,
        rho0=rho0, rho_bar=rho_bar, R0=R0, R1=R1,
        geometry_ok=True, C_p=c_p, coupled=cc,
    )
