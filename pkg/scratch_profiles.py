import time
import numpy as np
from normcrit.grid import build_grid
from normcrit.profiles import (
    solve_scalar_profile, gn_constant, sobolev_constant, bubble,
    cutoff_bubble, coupled_constants, geometry_constants,
)

t0 = time.time()
s = sobolev_constant()
t1 = time.time()
print(f"S = {s:.8f}, S^2 = {s**2:.6f} vs 32pi^2/3 = {32*np.pi**2/3:.6f} "
      f"rel {abs(s**2 - 32*np.pi**2/3)/(32*np.pi**2/3):.2e}  ({t1-t0:.2f}s)")

g = build_grid(20.0, 4096)
for p in (2.5, 3.0, 3.5):
    t0 = time.time()
    prof = solve_scalar_profile(p, g, use_cache=False)
    dt = time.time() - t0
    print(f"p={p}: b={prof.center:.10f} mass={prof.mass_sq:.8f} grad={prof.grad_sq:.6f} "
          f"lp={prof.lp_pp:.6f} res={prof.residual:.2e}  ({dt:.2f}s)")
    cp = gn_constant(prof)
    print(f"   C_p = {cp:.8f}")
    if p == 3.0:
        lhs = 1.0 / cp**3
        rhs = (2.0/3.0) * np.sqrt(prof.mass_sq)
        print(f"   1/C3^3 = {lhs:.6f} vs (2/3)||w3||_2 = {rhs:.6f} rel {abs(lhs-rhs)/rhs:.2e}")

# reproducibility N vs 2N
p = 2.5
pr1 = solve_scalar_profile(p, build_grid(20.0, 2048), use_cache=False)
pr2 = solve_scalar_profile(p, build_grid(20.0, 4096), use_cache=False)
for k in ("mass_sq", "grad_sq", "lp_pp"):
    v1, v2 = getattr(pr1, k), getattr(pr2, k)
    print(f"  {k}: {v1:.8f} vs {v2:.8f} rel {abs(v1-v2)/v2:.2e}")

# coupled constants + geometry
cc = coupled_constants(1.0, 2.0, 3.0)
print(f"k1={cc.k1:.6f} k2={cc.k2:.6f} level={cc.level:.4f}")
geo = geometry_constants(2.5, 0.5, 0.5, 1.0, 1.0, 1.0, 2.0, 3.0)
print(f"T={geo.T:.6f} gamma1={geo.gamma1:.6f} gamma0={geo.gamma0:.6f} ok={geo.geometry_ok}")
if geo.geometry_ok:
    print(f"R0={geo.R0:.6e} rho0={geo.rho0:.6f} R1={geo.R1:.6f}")
    print(f"h(R0)={geo.h(geo.R0):.2e} h(rho0)={geo.h(geo.rho0):.4f} h(R1)={geo.h(geo.R1):.2e}")
# gate closing: crank masses until T > gamma1
geo2 = geometry_constants(2.5, 5.0, 5.0, 1.0, 1.0, 1.0, 2.0, 3.0, c_p=geo.C_p)
print(f"big mass: T={geo2.T:.4f} vs gamma1={geo2.gamma1:.4f} ok={geo2.geometry_ok}")
# T == gamma1 boundary: h(rho0) should be ~0
a_star = ((geo.gamma1/2.0)) ** (1.0/(4.0-2.5))  # alpha1=alpha2=1, a1=a2 -> T=2a^{4-p}
geo3 = geometry_constants(2.5, a_star, a_star, 1.0, 1.0, 1.0, 2.0, 3.0, c_p=geo.C_p)
print(f"boundary: T-gamma1 rel {abs(geo3.T-geo3.gamma1)/geo3.gamma1:.2e} h(rho0)={geo3.h(geo3.rho0):.3e} R0==R1: {geo3.R0 == geo3.R1}")
