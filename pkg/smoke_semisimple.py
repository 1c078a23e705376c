import time

import numpy as np

from thinflow.errors import ContinuumDetected
from thinflow.kernel import Grid, eval_kernel
from thinflow import branching as br

t0 = time.time()
table2 = eval_kernel(2, Grid(2, 0.1, 22.0), K=5)
print(f"2D K=5 table built in {time.time() - t0:.1f}s")

# ---- blow-up k=1 ------------------------------------------------------------
sys_b1 = br.assemble_semisimple_system(1, "blowup", table2)
print("\nblow-up k=1:")
print("  equations:", [q.to_dict() for q in sys_b1.equations])
print("  mu_star:", sys_b1.mu_star, "(expect -1/16 =", -1 / 16, ")")
print("  omega_sup:", sys_b1.omega_sup)
print("  notes:", sys_b1.notes)
try:
    br.solve_quadratic_branch(sys_b1)
    print("  solve: returned roots (unexpected)")
except ContinuumDetected as e:
    print("  solve: ContinuumDetected ->", e)

# ---- global k=1 -------------------------------------------------------------
sys_g1 = br.assemble_semisimple_system(1, "global", table2)
print("\nglobal k=1:")
fg = sys_g1.equations[0]
a, b, c = fg.as_univariate()
print(f"  gamma quadratic: a={a:.8f} (exact {-81 / 256}), b={b:.8f} "
      f"(exact {9 / 8}), c={c:.8f} (exact -1)")
print("  gamma_star:", sys_g1.gamma_star, "(exact 16/9 =", 16 / 9, ")")
gc = sys_g1.equations[1]
print("  c2 form max coeff:", gc.max_abs(), "noise:", sys_g1.noise_scale)
print("  omega_sup:", sys_g1.omega_sup, "excluded:", sys_g1.excluded_samples)
rep = br.solve_quadratic_branch(sys_g1)
print("  roots:", [(r.value, r.multiplicity, r.enclosure) for r in rep.roots])
print("  conditions:", rep.conditions, "critical value:", rep.critical_value,
      "controlled:", rep.perturbation_controlled)
try:
    br.solve_quadratic_branch(sys_g1, equation=1)
    print("  c2 equation: roots (unexpected)")
except ContinuumDetected as e:
    print("  c2 equation: ContinuumDetected")

# ---- blow-up k=2 ------------------------------------------------------------
t1 = time.time()
sys_b2 = br.assemble_semisimple_system(2, "blowup", table2)
print("\nblow-up k=2:")
print("  coeff max:", sys_b2.notes["coeff_max"], "noise:", sys_b2.noise_scale)
print("  mu_star:", sys_b2.mu_star, "(expect -1/4)")
print("  two-route dev:", sys_b2.notes["two_route_pairing_dev"])
try:
    br.intersect_conics(sys_b2.equations[0], sys_b2.equations[1],
                        noise=sys_b2.noise_scale)
    print("  intersect: points (unexpected)")
except ContinuumDetected as e:
    print("  intersect: ContinuumDetected")
scan = br.dense_conic_scan(sys_b2.equations[0], sys_b2.equations[1],
                           tol=sys_b2.noise_scale)
print("  dense scan:", scan)

# ---- global k=2 -------------------------------------------------------------
sys_g2 = br.assemble_semisimple_system(2, "global", table2)
print("\nglobal k=2:")
print("  coeff max:", sys_g2.notes["coeff_max"], "noise:", sys_g2.noise_scale)
print("  gamma_star:", sys_g2.gamma_star, "(expect eta = 1)")
print("  omega_sup:", sys_g2.omega_sup, "excluded:", sys_g2.excluded_samples)
print("  degenerate:", sys_g2.degenerate_to_quadrature)
try:
    br.intersect_conics(sys_g2.equations[0], sys_g2.equations[1],
                        noise=sys_g2.noise_scale)
    print("  intersect: points (unexpected)")
except ContinuumDetected as e:
    print("  intersect: ContinuumDetected")
scan = br.dense_conic_scan(sys_g2.equations[0], sys_g2.equations[1],
                           tol=sys_g2.noise_scale)
print("  dense scan:", scan)

hdr, rows = br.sample_forms(sys_g2, m=6)
print("  sample_forms header:", hdr, "rows:", len(rows))

print(f"\nsemisimple smoke total {time.time() - t0:.1f}s "
      f"(k=2 section {time.time() - t1:.1f}s)")
