"""Feasibility probe for the acceptance sweeps (deleted before commit)."""
import time
import numpy as np

from normcrit.grid import build_grid
from normcrit.functionals import ModelParams
from normcrit.profiles import solve_scalar_profile, coupled_constants
from normcrit.solvers import sweep, solve_mountain_pass, solve_scalar_branch
from normcrit import asymptotics as asy

MASSES = [4.0, 2.0, 1.0, 0.5, 0.25]
P = 2.5


def prm(a):
    return ModelParams(p=P, mu1=1.0, mu2=2.0, beta=3.0, alpha1=1.0, alpha2=1.0, a1=a, a2=a)


def main():
    prof = solve_scalar_profile(P)
    W = prof.mass_sq
    cc = coupled_constants(1.0, 2.0, 3.0)
    print(f"W={W:.6f} level={cc.level:.6f}", flush=True)

    # --- ground sweep on one wide grid sized for the smallest mass
    lam_min = asy.limit_multiplier(P, 1.0, MASSES[-1], W)
    rmax, n = asy.suggest_grid(lam_min)
    g = build_grid(rmax, n)
    print(f"[ground] grid R={rmax:.1f} N={n}", flush=True)
    t0 = time.time()
    results = []
    for a in MASSES:
        t = time.time()
        res = sweep([prm(a)], grid=g, branch="local_min",
                    warm=False)[0] if not results else None
        if res is None:
            from normcrit.solvers import solve_local_min
            res = solve_local_min(prm(a), g, init=results[-1].pair)
        results.append(res)
        print(f"[ground] a={a}: conv={res.converged} E={res.energy:.10g} "
              f"lam=({res.lambda1:.6g},{res.lambda2:.6g}) it={res.iterations} "
              f"res={res.tangent_residual:.2e} {time.time()-t:.0f}s", flush=True)
    rep = asy.ground_limit_check(results, "small_mass", profile=prof)
    print(f"[ground] distances: {['%.4e' % d for d in rep.distances]}", flush=True)
    print(f"[ground] gaps     : {['%.4e' % d for d in rep.limit_energy_gap]}", flush=True)
    for k, v in rep.fitted_rates.items():
        print(f"[ground] rate {k}: slope={v.slope:.4f} stderr={v.stderr:.4f} resid={v.residual:.3g}", flush=True)
    print(f"[ground] verdict: {rep.verdict}  ({time.time()-t0:.0f}s total)", flush=True)

    # --- mp sweep, default grid, warm
    t0 = time.time()
    mp_results = []
    for a in MASSES:
        t = time.time()
        init = mp_results[-1].pair if mp_results else None
        res = solve_mountain_pass(prm(a), init=init)
        mp_results.append(res)
        d = res.diagnostics
        print(f"[mp] a={a}: conv={res.converged} E={res.energy:.10g} "
              f"lam=({res.lambda1:.6g},{res.lambda2:.6g}) it={res.iterations} "
              f"res={res.tangent_residual:.2e} seed={d.get('seed')} "
              f"refine={d.get('refine', {}).get('applied')} {time.time()-t:.0f}s", flush=True)
    rep = asy.mp_limit_check(mp_results)
    print(f"[mp] distances : {['%.4e' % d for d in rep.distances]}", flush=True)
    lvl = cc.level
    print(f"[mp] rel gaps  : {['%.4e' % (d / lvl) for d in rep.limit_energy_gap]}", flush=True)
    print(f"[mp] ratios    : {['%.5f' % d for d in rep.center_ratios]} target {np.sqrt(cc.k2/cc.k1):.5f}", flush=True)
    print(f"[mp] eps       : {[('%.4g' % f.eps) for f in [asy.bubble_fit(r) for r in mp_results if r.converged]]}", flush=True)
    print(f"[mp] decay     : {['%.4f' % d for d in rep.decay_constants]}", flush=True)
    for k, v in rep.fitted_rates.items():
        print(f"[mp] rate {k}: slope={v.slope:.4f}", flush=True)
    print(f"[mp] verdict: {rep.verdict}  ({time.time()-t0:.0f}s total)", flush=True)

    # --- p=3 subcritical mp (criterion 9 second half)
    t0 = time.time()
    p3 = ModelParams(p=3.0, mu1=1.0, mu2=2.0, beta=3.0, alpha1=1.0, alpha2=1.0, a1=2.0, a2=2.0)
    res3 = solve_mountain_pass(p3)
    print(f"[p3] conv={res3.converged} E={res3.energy:.10g} lam=({res3.lambda1:.6g},{res3.lambda2:.6g}) "
          f"res={res3.tangent_residual:.2e} {time.time()-t0:.0f}s", flush=True)

    # --- scalar mp halves for criterion 6
    t0 = time.time()
    s1 = solve_scalar_branch(P, 1.0, 1.0, 2.0, branch="mp")
    print(f"[scalar mp mu=1] conv={s1.converged} E={s1.energy:.10g} {time.time()-t0:.0f}s", flush=True)
    t0 = time.time()
    s2 = solve_scalar_branch(P, 2.0, 1.0, 2.0, branch="mp")
    print(f"[scalar mp mu=2] conv={s2.converged} E={s2.energy:.10g} {time.time()-t0:.0f}s", flush=True)


if __name__ == "__main__":
    main()
