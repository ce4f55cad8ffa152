import numpy as np
from normcrit.grid import build_grid
from normcrit import profiles as P

g = build_grid(20.0, 4096)
p = 2.5
b, sol, r_valid = P._solve_shooting(p)
print(f"b={b!r} r_valid={r_valid:.3f}")
vals = P._evaluate_on_grid(p, b, sol, r_valid, g)
lap = g.lap @ vals
res = -lap + vals - np.abs(vals) ** (p - 2.0) * vals
res[-1] = 0.0
w = g.quad_weights
scale = np.sqrt(np.dot(w, vals**2))
contrib = w * res**2
order = np.argsort(contrib)[::-1][:12]
print("top contributing nodes:")
for i in order:
    print(f"  i={i} r={g.r[i]:.4f} w={vals[i]:.3e} res={res[i]:.3e} contrib={contrib[i]:.3e}")
print(f"total rel residual: {np.sqrt(contrib.sum())/scale:.3e}")
# where is the graft?
ts = np.linspace(1e-4, min(r_valid, g.r_max), 400)
ws = sol.sol(ts)[0]
small = ts[ws <= 1e-6 * b]
print(f"graft at ~{small[0] if small.size else 'none'}")
