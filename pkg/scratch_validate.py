"""De-risk the discretization: quadrature exactness, Laplacian quality,
summation-by-parts mismatch, dilation identities."""
import numpy as np
import time
from normcrit.grid import build_grid, RadialField, dilate, norms, radial_laplacian

t0 = time.time()
g = build_grid(20.0, 4096)
print(f"build: {time.time()-t0:.3f}s")

# 1. volume exactness
vol = g.quad_weights.sum()
tgt = 0.5 * np.pi**2 * 20.0**4
print(f"volume rel err: {abs(vol-tgt)/tgt:.2e}")

# 2. polynomial exactness r^k, k<=2 (i.e. integrand r^{3+k})
for k in (0, 1, 2):
    val = np.dot(g.quad_weights, g.r**k)
    exact = 2*np.pi**2 * 20.0**(4+k) / (4+k)
    print(f"r^{k}: rel err {abs(val-exact)/exact:.2e}")

# 3. laplacian of r^2 == 8 interior
u = RadialField(g, g.r**2)
L = radial_laplacian(u).values
print(f"lap(r^2) interior max dev from 8: {np.max(np.abs(L[:-3]-8)):.2e}  (rows n-3,n-2: {L[-3]-8:.2e},{L[-2]-8:.2e})")

# 4. grad_sq of r^2 on Rmax=1
g1 = build_grid(1.0, 2048)
u1 = RadialField(g1, g1.r**2)
gs = norms(u1)["grad_sq"]
print(f"grad_sq(r^2,R=1) vs 4pi^2/3: rel err {abs(gs - 4*np.pi**2/3)/(4*np.pi**2/3):.2e}")

# 5. symmetry defect <lap u, v> - <u, lap v> on compact smooth fields
uu = RadialField(g, np.exp(-g.r**2))
vv = RadialField(g, g.r**2 * np.exp(-0.7*g.r**2))
lu = radial_laplacian(uu).values
lv = radial_laplacian(vv).values
sym = np.dot(g.quad_weights, lu*vv.values) - np.dot(g.quad_weights, uu.values*lv)
print(f"symmetry defect N=4096: {abs(sym):.2e}")
g8 = build_grid(20.0, 8192)
uu8 = RadialField(g8, np.exp(-g8.r**2))
vv8 = RadialField(g8, g8.r**2*np.exp(-0.7*g8.r**2))
sym8 = np.dot(g8.quad_weights, (radial_laplacian(uu8).values)*vv8.values) - np.dot(g8.quad_weights, uu8.values*(radial_laplacian(vv8).values))
print(f"symmetry defect N=8192: {abs(sym8):.2e}")

# 6. SBP mismatch M = grad_sq - <-lap u, u> on a decaying field
M = norms(uu)["grad_sq"] - np.dot(g.quad_weights, -lu*uu.values)
print(f"SBP mismatch (gaussian, N=4096): {M:.2e}")
b = RadialField(g, 2*np.sqrt(2)*0.8/(0.8**2+g.r**2))  # bubble-like, fat tail
Mb = norms(b)["grad_sq"] - np.dot(g.quad_weights, -(radial_laplacian(b).values)*b.values)
print(f"SBP mismatch (bubble eps=.8): {Mb:.2e}  grad_sq={norms(b)['grad_sq']:.4f}")

# 7. dilation identities
for s in (0.2, -0.3, 0.05):
    du = dilate(uu, s)
    n0, n1 = norms(uu, q=(3.0,)), norms(du, q=(3.0,))
    m_err = abs(n1["mass_sq"]-n0["mass_sq"])/n0["mass_sq"]
    g_err = abs(n1["grad_sq"]-np.exp(2*s)*n0["grad_sq"])/(np.exp(2*s)*n0["grad_sq"])
    l3_err = abs(n1["lq"][3.0]-np.exp(2*s)*n0["lq"][3.0])/(np.exp(2*s)*n0["lq"][3.0])
    print(f"dilate s={s}: mass {m_err:.2e} grad {g_err:.2e} l3 {l3_err:.2e}")

# group law
d2 = dilate(dilate(uu, 0.17), -0.05)
d12 = dilate(uu, 0.12)
gl = np.max(np.abs(d2.values - d12.values))/np.max(np.abs(d12.values))
print(f"group law sup err: {gl:.2e}")

# 8. graded grid sanity
gg = build_grid(20.0, 4096, "graded")
print(f"graded vol rel err: {abs(gg.quad_weights.sum()-tgt)/tgt:.2e}, first spacings {gg.r[1]:.2e},{gg.r[2]-gg.r[1]:.2e}, last {gg.r[-1]-gg.r[-2]:.3f}")
ug = RadialField(gg, np.exp(-gg.r**2))
Lg = radial_laplacian(RadialField(gg, gg.r**2)).values
print(f"graded lap(r^2) interior max dev: {np.max(np.abs(Lg[:-3]-8)):.2e}")
Mg = norms(ug)["grad_sq"] - np.dot(gg.quad_weights, -(radial_laplacian(ug).values)*ug.values)
print(f"graded SBP mismatch: {Mg:.2e}")
symg = np.dot(gg.quad_weights, (radial_laplacian(ug).values)*(gg.r**2*np.exp(-0.7*gg.r**2))) - np.dot(gg.quad_weights, ug.values*(radial_laplacian(RadialField(gg, gg.r**2*np.exp(-0.7*gg.r**2))).values))
print(f"graded symmetry defect: {abs(symg):.2e}")
# timing of operator application
t0=time.time()
for _ in range(100):
    _ = g.lap @ uu.values
print(f"lap matvec: {(time.time()-t0)/100*1e6:.0f} us")
