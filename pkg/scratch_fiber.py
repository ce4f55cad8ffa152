"""Scratch validation for functionals.py + fiber.py."""
import time
import numpy as np

from normcrit.grid import build_grid, RadialField, dilate
from normcrit.functionals import (
    ModelParams, PairState, aggregates, energy, pohozaev,
    fiber_value, fiber_derivatives, gradient, multipliers,
)
from normcrit.fiber import (
    fiber_roots, project_plus, project_minus, classify,
    ProjectionUndefined, GeometryRefusal,
)

g = build_grid(20.0, 4096)
r = g.r


def make_pair(params, w1, w2, seed):
    rng = np.random.default_rng(seed)
    u = np.exp(-(r / w1) ** 2) * (1.0 + 0.3 * np.exp(-((r - rng.uniform(1, 3)) / 1.5) ** 2))
    v = np.exp(-(r / w2) ** 2)
    u[-1] = 0.0
    v[-1] = 0.0
    u *= params.a1 / np.sqrt(np.dot(g.quad_weights, u * u))
    v *= params.a2 / np.sqrt(np.dot(g.quad_weights, v * v))
    return PairState(RadialField(g, u), RadialField(g, v))


# --- regime p<3: expect exactly 2 roots for mass-normalized pairs, gate open
p25 = ModelParams(p=2.5, mu1=1.0, mu2=2.0, beta=3.0, alpha1=1.0, alpha2=1.0, a1=0.5, a2=0.5)
t0 = time.time()
n2 = 0
for k in range(50):
    w1 = 0.3 + 0.1 * (k % 11)
    w2 = 0.4 + 0.07 * (k % 13)
    pair = make_pair(p25, w1, w2, k)
    agg = aggregates(pair, p25)
    roots = fiber_roots(agg)
    if roots.n_roots == 2:
        n2 += 1
    else:
        print("  UNEXPECTED", k, roots)
print(f"p=2.5 two-root count: {n2}/50  ({time.time()-t0:.2f}s)")

# --- regime p>3: expect exactly 1 root
p35 = ModelParams(p=3.5, mu1=1.0, mu2=2.0, beta=3.0, alpha1=1.0, alpha2=1.0, a1=0.5, a2=0.5)
n1 = 0
for k in range(50):
    pair = make_pair(p35, 0.3 + 0.1 * (k % 11), 0.4 + 0.07 * (k % 13), 100 + k)
    roots = fiber_roots(aggregates(pair, p35))
    if roots.n_roots == 1 and roots.t_minus is not None and roots.s_plus is None:
        n1 += 1
    else:
        print("  UNEXPECTED", k, roots)
print(f"p=3.5 one-root count: {n1}/50")

# --- Psi'(s) vs Pohozaev of dilated pair
pair = make_pair(p25, 0.8, 1.1, 7)
agg = aggregates(pair, p25)
worst = 0.0
for s in (-0.7, -0.2, 0.0, 0.3, 0.9):
    d1, d2 = fiber_derivatives(agg, s)
    up = dilate(pair.u, s)
    vp = dilate(pair.v, s)
    P = pohozaev(PairState(up, vp), p25)
    err = abs(d1 - P) / (1.0 + abs(P))
    worst = max(worst, err)
print(f"Psi'(s) vs P(dilated): worst rel {worst:.3e}  (tol 1e-4)")

# --- projection idempotence
proj1 = project_plus(pair, p25)
proj2 = project_plus(proj1.pair, p25)
print(f"project_plus: s1={proj1.s:+.6e}  s2={proj2.s:+.3e}  (|s2|<=1e-6?)")
prm1 = project_minus(pair, p25)
prm2 = project_minus(prm1.pair, p25)
print(f"project_minus: t1={prm1.s:+.6e}  t2={prm2.s:+.3e}")
print(f"psi(s+)={proj1.psi:.6f} < psi(t-)={prm1.psi:.6f} ?", proj1.psi < prm1.psi)

# --- classify labels at the projections
rep_plus = classify(proj1.pair, p25)
rep_minus = classify(prm1.pair, p25)
print(f"classify at fiber min: {rep_plus.label}  (want Pplus)   psi2={rep_plus.psi2_at_zero:+.4e}")
print(f"classify at ridge:    {rep_minus.label}  (want Pminus)  psi2={rep_minus.psi2_at_zero:+.4e}")
rep_off = classify(pair, p25)
print(f"classify off-manifold: {rep_off.label}  P={rep_off.pohozaev:+.4e}")

# --- p=3 closed form and coercivity failure
p30 = ModelParams(p=3.0, mu1=1.0, mu2=1.0, beta=2.0, alpha1=1.0, alpha2=1.0, a1=0.5, a2=0.5)
pair3 = make_pair(p30, 0.8, 1.1, 9)
agg3 = aggregates(pair3, p30)
roots3 = fiber_roots(agg3)
A = agg3.a1_term
C = 2.0 * (agg3.a3_term + agg3.a4_term)
t_closed = 0.5 * np.log((A - C) / (4.0 * agg3.a2_term))
print(f"p=3 root {roots3.t_minus:.10f} vs closed {t_closed:.10f}  diff {abs(roots3.t_minus - t_closed):.2e}")
# coercivity failure: huge alpha so A <= C
p30bad = ModelParams(p=3.0, mu1=1.0, mu2=1.0, beta=2.0, alpha1=500.0, alpha2=500.0, a1=0.5, a2=0.5)
try:
    fiber_roots(aggregates(pair3, p30bad))
    print("p=3 coercivity failure: NOT RAISED (bug)")
except ProjectionUndefined as e:
    print(f"p=3 coercivity failure raised: {e}")

# --- gradient vs Gateaux finite difference
phi_u = np.exp(-((r - 1.3) / 0.9) ** 2); phi_u[-1] = 0.0
phi_v = r * np.exp(-r ** 2); phi_v[-1] = 0.0
gu, gv = gradient(pair, p25)
lhs = float(np.dot(g.quad_weights, gu.values * phi_u) + np.dot(g.quad_weights, gv.values * phi_v))
eps = 1e-6
worst_fd = None
for h in (1e-5, 1e-6):
    up = PairState(RadialField(g, pair.u.values + h * phi_u), RadialField(g, pair.v.values + h * phi_v))
    um = PairState(RadialField(g, pair.u.values - h * phi_u), RadialField(g, pair.v.values - h * phi_v))
    fd = (energy(up, p25) - energy(um, p25)) / (2 * h)
    err = abs(fd - lhs) / (1.0 + abs(lhs))
    print(f"Gateaux FD h={h:.0e}: <G,phi>={lhs:.10f} fd={fd:.10f} rel {err:.3e}")

# --- multipliers on a projected state (not critical, just smoke)
l1, l2 = multipliers(proj1.pair, p25)
print(f"multipliers at fiber min (not critical): l1={l1:.4f} l2={l2:.4f}")

# --- geometry refusal propagates
pbig = ModelParams(p=2.5, mu1=1.0, mu2=2.0, beta=3.0, alpha1=1.0, alpha2=1.0, a1=5.0, a2=5.0)
try:
    project_plus(make_pair(pbig, 0.8, 1.1, 3), pbig)
    print("geometry refusal: NOT RAISED (bug)")
except GeometryRefusal as e:
    print(f"geometry refusal raised: T>gamma1 ok")
