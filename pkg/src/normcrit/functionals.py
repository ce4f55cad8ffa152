"""Energy, constraint and certificate functionals for coupled pairs.

Everything here reduces to weighted sums over the grid, collected once
per pair into an Aggregates record: the fiber map, the Pohozaev
checksum, Lagrange multipliers, and the sign diagnostic all read from
it.  The unconstrained gradient is the only operator-valued output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .grid import RadialField, RadialGrid, _require_same_grid

__all__ = [
    "ModelParams",
    "PairState",
    "Aggregates",
    "aggregates",
    "energy",
    "pohozaev",
    "fiber_value",
    "fiber_derivatives",
    "gradient",
    "multipliers",
    "multiplier_identity_residual",
    "SignReport",
    "sign_diagnostic",
]


@dataclass(frozen=True)
class ModelParams:
    """Couplings, exponent and prescribed masses.

    The system is
        -Delta u + l1 u = mu1 u^3 + alpha1 |u|^(p-2) u + beta v^2 u
        -Delta v + l2 v = mu2 v^3 + alpha2 |v|^(p-2) v + beta u^2 v
    on R^4 with ||u||_2^2 = a1^2, ||v||_2^2 = a2^2; l1, l2 are the
    multipliers of the two mass constraints.
    """

    p: float
    mu1: float
    mu2: float
    beta: float
    alpha1: float
    alpha2: float
    a1: float
    a2: float

    def __post_init__(self):
        if not (2.0 < self.p < 4.0):
            raise ValueError(f"p must lie in (2, 4), got {self.p:g}")
        if self.mu1 <= 0.0 or self.mu2 <= 0.0:
            raise ValueError("mu1, mu2 must be positive")
        if self.a1 <= 0.0 or self.a2 <= 0.0:
            raise ValueError("masses a1, a2 must be positive")

    @property
    def gamma_p(self) -> float:
        return 2.0 * (self.p - 2.0) / self.p


@dataclass(frozen=True)
class PairState:
    """A coupled pair (u, v) on one grid."""

    u: RadialField
    v: RadialField

    def __post_init__(self):
        _require_same_grid(self.u, self.v)

    @property
    def grid(self) -> RadialGrid:
        return self.u.grid


@dataclass(frozen=True)
class Aggregates:
    """Weighted norms of a pair plus the parameter-weighted fiber terms.

    a1_term .. a4_term are the coefficients of the fiber polynomial:
    psi(s) = e^(2s) a1_term/2 - e^(4s) a2_term - e^(p gamma_p s)(a3_term + a4_term).
    """

    p: float
    mass_u: float
    mass_v: float
    grad_u: float
    grad_v: float
    l4_u: float
    l4_v: float
    lp_u: float
    lp_v: float
    cross: float
    a1_term: float
    a2_term: float
    a3_term: float
    a4_term: float


def _aggregate_arrays(
    grid: RadialGrid, u: np.ndarray, v: np.ndarray, params: ModelParams
) -> Aggregates:
    # the gradient terms use the operator quadratic form <-lap u, u> so
    # that the fiber map, multipliers, dilation balance and the solver
    # flows all live in one discrete system; the first-derivative
    # quadrature (norms()) agrees with it to the summation-by-parts
    # defect, which is far below every certificate for decayed fields
    w = grid.quad_weights
    p = params.p
    au = np.abs(u)
    av = np.abs(v)
    mass_u = float(np.dot(w, u * u))
    mass_v = float(np.dot(w, v * v))
    grad_u = -float(np.dot(w, u * (grid.lap @ u)))
    grad_v = -float(np.dot(w, v * (grid.lap @ v)))
    l4_u = float(np.dot(w, u**4))
    l4_v = float(np.dot(w, v**4))
    lp_u = float(np.dot(w, au**p))
    lp_v = float(np.dot(w, av**p))
    cross = float(np.dot(w, u * u * v * v))
    return Aggregates(
        p=p,
        mass_u=mass_u,
        mass_v=mass_v,
        grad_u=grad_u,
        grad_v=grad_v,
        l4_u=l4_u,
        l4_v=l4_v,
        lp_u=lp_u,
        lp_v=lp_v,
        cross=cross,
        a1_term=grad_u + grad_v,
        a2_term=0.25 * (params.mu1 * l4_u + params.mu2 * l4_v + 2.0 * params.beta * cross),
        a3_term=(params.alpha1 / p) * lp_u,
        a4_term=(params.alpha2 / p) * lp_v,
    )


def aggregates(pair: PairState, params: ModelParams) -> Aggregates:
    return _aggregate_arrays(pair.grid, pair.u.values, pair.v.values, params)


def energy(pair: PairState, params: ModelParams, agg: Optional[Aggregates] = None) -> float:
    """I(u, v) = A1/2 - A2 - A3 - A4 in aggregate terms."""
    a = agg if agg is not None else aggregates(pair, params)
    return 0.5 * a.a1_term - a.a2_term - a.a3_term - a.a4_term


def pohozaev(pair: PairState, params: ModelParams, agg: Optional[Aggregates] = None) -> float:
    """Dilation checksum P = A1 - 4 A2 - p gamma_p (A3 + A4); zero at any
    critical point of the constrained energy."""
    a = agg if agg is not None else aggregates(pair, params)
    return a.a1_term - 4.0 * a.a2_term - 2.0 * (params.p - 2.0) * (a.a3_term + a.a4_term)


def fiber_value(agg: Aggregates, s: float) -> float:
    pg = 2.0 * (agg.p - 2.0)
    return (
        0.5 * np.exp(2.0 * s) * agg.a1_term
        - np.exp(4.0 * s) * agg.a2_term
        - np.exp(pg * s) * (agg.a3_term + agg.a4_term)
    )


def fiber_derivatives(agg: Aggregates, s: float) -> Tuple[float, float]:
    """(psi'(s), psi''(s)); psi'(s) is the Pohozaev value of the dilated pair."""
    pg = 2.0 * (agg.p - 2.0)
    e2, e4, ep = np.exp(2.0 * s), np.exp(4.0 * s), np.exp(pg * s)
    sub = agg.a3_term + agg.a4_term
    d1 = e2 * agg.a1_term - 4.0 * e4 * agg.a2_term - pg * ep * sub
    d2 = 2.0 * e2 * agg.a1_term - 16.0 * e4 * agg.a2_term - pg**2 * ep * sub
    return float(d1), float(d2)


def _power(vals: np.ndarray, q: float) -> np.ndarray:
    # sign(u) |u|^(q-1) without 0**negative warnings
    return np.sign(vals) * np.abs(vals) ** (q - 1.0)


def gradient(pair: PairState, params: ModelParams) -> Tuple[RadialField, RadialField]:
    """Unconstrained energy gradient (-Delta u - N_u, -Delta v - N_v).

    A constrained critical point satisfies gradient + (l1 u, l2 v) = 0
    with the multipliers from multipliers().
    """
    g = pair.grid
    u = pair.u.values
    v = pair.v.values
    gu = -(g.lap @ u) - params.mu1 * u**3 - params.alpha1 * _power(u, params.p) - params.beta * v**2 * u
    gv = -(g.lap @ v) - params.mu2 * v**3 - params.alpha2 * _power(v, params.p) - params.beta * u**2 * v
    return RadialField(g, gu), RadialField(g, gv)


def multipliers(pair: PairState, params: ModelParams, agg: Optional[Aggregates] = None) -> Tuple[float, float]:
    """Constraint multipliers from the component balances:
    l1 = (mu1 ||u||_4^4 + alpha1 ||u||_p^p + beta cross - ||grad u||^2) / ||u||_2^2,
    same shape for l2.  Measured masses are used, not the prescribed ones,
    so the identity holds off the constraint too.
    """
    a = agg if agg is not None else aggregates(pair, params)
    l1 = (params.mu1 * a.l4_u + params.alpha1 * a.lp_u + params.beta * a.cross - a.grad_u) / a.mass_u
    l2 = (params.mu2 * a.l4_v + params.alpha2 * a.lp_v + params.beta * a.cross - a.grad_v) / a.mass_v
    return float(l1), float(l2)


def multiplier_identity_residual(
    pair: PairState, params: ModelParams, agg: Optional[Aggregates] = None
) -> float:
    """Relative defect of l1 a1^2 + l2 a2^2 = (1 - gamma_p)(alpha1 ||u||_p^p
    + alpha2 ||v||_p^p), which every critical point satisfies."""
    a = agg if agg is not None else aggregates(pair, params)
    l1, l2 = multipliers(pair, params, a)
    lhs = l1 * a.mass_u + l2 * a.mass_v
    rhs = (1.0 - params.gamma_p) * (params.alpha1 * a.lp_u + params.alpha2 * a.lp_v)
    return abs(lhs - rhs) / (1.0 + abs(rhs))


@dataclass(frozen=True)
class SignReport:
    """Multiplier signs at a state; negative multipliers flag parameter
    regimes with no positive solution."""

    lambda1: float
    lambda2: float
    flag: bool           # True when some multiplier is nonpositive
    identity_residual: float

    @property
    def min_lambda(self) -> float:
        return min(self.lambda1, self.lambda2)


def sign_diagnostic(pair: PairState, params: ModelParams, agg: Optional[Aggregates] = None) -> SignReport:
    a = agg if agg is not None else aggregates(pair, params)
    l1, l2 = multipliers(pair, params, a)
    return SignReport(
        lambda1=l1,
        lambda2=l2,
        flag=bool(l1 <= 0.0 or l2 <= 0.0),
        identity_residual=multiplier_identity_residual(pair, params, a),
    )
