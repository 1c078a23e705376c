import time

import numpy as np

import thinflow.profiles as pr
from thinflow.kernel import Grid, kernel_slice_1d
from thinflow.spectral import adjoint_polynomial

t0 = time.time()

# ---- trivial pair: exact zero residual for any n -------------------------
for n in (0.0, 0.1, 0.5, 1.0):
    grid = Grid(1, 0.05, 10.0, radial=True)
    prof = pr._profile(n, 0.0, "blowup", grid, np.ones(grid.axis.size), k=0,
                       growth_exponent=0.0)
    r = pr.residual_nep(prof)
    print(f"trivial n={n}: max|resid| = {np.max(np.abs(r)):.3e}")

# ---- linear-limit residuals ----------------------------------------------
grid = Grid(1, 0.05, 22.0, radial=True)
F = kernel_slice_1d(grid.axis, 0)
profF = pr._profile(0.0, 0.25, "global", grid, F, k=0)
rF = pr.residual_nep(profF)
print(f"global n=0 (N/4, F): max|resid| = {np.max(np.abs(rF)):.3e}")

for k in (1, 2, 3):
    poly = adjoint_polynomial((k,))
    vals = pr._poly_at(poly, grid.axis)
    profk = pr._profile(0.0, -k / 4.0, "blowup", grid, vals, k=k)
    rk = pr.residual_nep(profk)
    # growing polynomials: scale residual by local magnitude
    scale = 1.0 + np.abs(vals)
    print(f"blowup n=0 k={k}: max|resid| = {np.max(np.abs(rk)):.3e}, "
          f"rel = {np.max(np.abs(rk) / scale):.3e}")

# ---- global shooting ------------------------------------------------------
print("\n--- decaying branch ---")
t1 = time.time()
profs = pr.continuation_family("global", 0, [0.2, 0.1, 0.05])
for p in profs:
    mc = pr.mass_conservation_check(p)
    sc = pr.scaling_invariance_check(p)
    print(f"n={p.n}: alpha={p.alpha:.8f} interface={p.interface_radius:.4f} "
          f"zeros(last10%)={p.zero_count} mass_drift={float(mc):.2e} "
          f"sup_dist_F={p.diagnostics['sup_distance_limit']:.5f} "
          f"scaling_err={float(sc):.2e} "
          f"tail_rule={p.diagnostics['interface_tail_rule']}")
    resid = pr.residual_nep(p)
    core = p.grid.axis < 0.8 * p.interface_radius
    print(f"      residual: core max={np.max(np.abs(resid[core])):.3e}  "
          f"bisections={p.diagnostics['bisections']} a2={p.diagnostics['a2']:.6f}")
print(f"[decaying branch took {time.time()-t1:.1f}s]")

dists = [p.diagnostics["sup_distance_limit"] for p in profs]
print("monotone decreasing in n:", dists[0] > dists[1] > dists[2])

# ---- blow-up shooting ------------------------------------------------------
print("\n--- growing branch k=1 ---")
t1 = time.time()
bprofs = pr.continuation_family("blowup", 1, [0.2, 0.1, 0.05])
for p in bprofs:
    gam_th = p.diagnostics["growth_theory"]
    print(f"n={p.n}: alpha={p.alpha:.8f} (seed {p.diagnostics['alpha_seed']:.6f}) "
          f"growth_fit={p.growth_exponent:.5f} vs theory {gam_th:.5f} "
          f"({abs(p.growth_exponent-gam_th)/gam_th*100:.2f}%) "
          f"4/n={4/p.n:.1f} zeros={p.zero_count} "
          f"sup_dist={p.diagnostics['sup_distance_limit']:.5f} "
          f"iters={p.diagnostics['secant_iterations']}")
print(f"[growing branch took {time.time()-t1:.1f}s]")
bdists = [p.diagnostics["sup_distance_limit"] for p in bprofs]
print("distances:", [f"{d:.2e}" for d in bdists])
print("monotone or at floor:",
      all(bdists[i+1] <= bdists[i] + 1e-7 for i in range(2)))
for p in bprofs:
    exact = -1.0 / (4.0 - p.n)
    print(f"  n={p.n}: alpha vs exact -1/(4-n): {abs(p.alpha-exact):.2e}")

sc = pr.scaling_invariance_check(bprofs[0])
print(f"blowup scaling check n=0.2: err={float(sc):.2e} "
      f"coverage={sc.report['coverage']:.2f}")

print("\n--- growing branch k=2 (exact monomial check) ---")
t1 = time.time()
p2 = pr.shoot_blowup_profile(0.2, 2)
exact2 = -1.0 / (2.0 - 0.2)
print(f"n=0.2 k=2: alpha={p2.alpha:.8f} vs -1/(2-n)={exact2:.8f} "
      f"(err {abs(p2.alpha-exact2):.2e}) growth={p2.growth_exponent:.6f} "
      f"p_inner={p2.diagnostics['p_inner']:.2e} [{time.time()-t1:.1f}s]")
resid2 = pr.residual_nep(p2)
print(f"residual max: {np.max(np.abs(resid2)):.3e}")

# ---- expansion diagnostic ---------------------------------------------------
# meaningful for functions with isolated transversal zeros (the branching
# combinations), not for compactly supported profiles
print("\n--- expansion diagnostic ---")
fd = 1.0 - (grid.axis / 4.013) ** 2
rows = pr.expansion_diagnostic(fd, [0.2, 0.1, 0.05, 0.025], grid)
prev = None
for row in rows:
    ratio_prev = (row["l1_error"] / prev) if prev else float("nan")
    print(f"n={row['n']}: L1={row['l1_error']:.4e} excl={row['excluded_measure']:.4e} "
          f"2nd-order-ratio={row['second_order_ratio']:.3f} "
          f"excl/n={row['excluded_over_n']:.3e} halving-factor={ratio_prev:.3f}")
    prev = row["l1_error"]

const = np.ones(grid.axis.size)
rows_c = pr.expansion_diagnostic(const, [0.2], grid)
print(f"constant f: L1={rows_c[0]['l1_error']:.3e} (exact 0), "
      f"excl={rows_c[0]['excluded_measure']:.3e}")

print(f"\n[total {time.time()-t0:.1f}s]")
