import json
import math
import time
from fractions import Fraction

import numpy as np

from thinflow.kernel import Grid, QuadConfig, default_grid, eval_kernel
from thinflow.spectral import SparsePolynomial
from thinflow import branching as br

frozen = json.load(open("tests/frozen_values.json"))

t0 = time.time()
table1 = eval_kernel(1, default_grid(1), K=8)
print(f"1D table built in {time.time() - t0:.1f}s")

grid = table1.grid

# --- two-route shifted-linear log integral ---------------------------------
combo = SparsePolynomial(1, {(1,): Fraction(1), (0,): Fraction(1, 10)})
res = br.log_weighted_integral(
    table1.slice((1,)), combo, None, grid,
    adjoint_grad=(table1.slice((2,)),),
    target_grad_lap=(table1.slice((3,)),))
fz = frozen["log_integrals"]["two_route_shifted_linear"]
print("two-route: ibp", res.ibp, "direct", res.direct,
      "discrepancy", res.discrepancy)
print("  vs frozen ibp err:", abs(res.ibp - fz["ibp"]),
      "direct err:", abs(res.direct - fz["direct"]))
print("  excluded fraction:", res.excluded_fraction,
      "nodal:", res.nodal_fraction, "bound:", res.excluded_bound)

# --- gamma01 -----------------------------------------------------------------
g = br.gamma01(1.0, table1)
fg = frozen["log_integrals"]["gamma01"]
print("gamma01(1):", float(g), "frozen:", fg["gamma01_eta1"],
      "err:", abs(float(g) - fg["gamma01_eta1"]))
print("  denominator:", g.report["denominator"], "vs", fg["denominator"])
print("  dipole:", g.report["dipole"], "vs", fg["int_yFprime"])
print("  log direct:", g.report["log_term"]["direct"])
g2 = br.gamma01(2.0, table1)
print("  linearity:", abs(float(g2) - 2 * float(g)))

# --- mu10 / mu14 -------------------------------------------------------------
m0 = br.mu10(table1)
print("mu10:", float(m0), "residual:", m0.report["residual"])
m4 = br._mu_blowup(4, table1)
fm = frozen["log_integrals"]["mu14"]
print("mu14:", float(m4), "frozen:", fm["mu14"], "err:",
      abs(float(m4) - fm["mu14"]))
print("  log ibp:", m4.report["log_term"]["ibp"], "vs", fm["log_term_ibp"])
print("  discrepancy:", m4.report["log_term"]["discrepancy"],
      "euler quad:", m4.report["euler_pairing_quadrature"],
      "ip:", m4.report["pairing_norm"])

# --- transversality ----------------------------------------------------------
tv = br.transversality_check(table1)
print("transversality:", float(tv))

# --- simple solvability reports ---------------------------------------------
rep_g = br.assemble_simple_solvability(0, "global", 1.0, table1)
print("solv global k=0:", rep_g.coefficient, "resid:", rep_g.residual,
      "transversality:", rep_g.transversality)
rep_b0 = br.assemble_simple_solvability(0, "blowup", None, table1)
print("solv blowup k=0: mu =", rep_b0.coefficient, "resid:", rep_b0.residual)
rep_b4 = br.assemble_simple_solvability(4, "blowup", None, table1)
print("solv blowup k=4: mu =", rep_b4.coefficient)
rep_g4 = br.assemble_simple_solvability(4, "global", 1.0, table1)
print("solv global k=4: gamma =", rep_g4.coefficient,
      "denominator:", rep_g4.denominator,
      "(-(N+k)^2/16 =", -(1 + 4) ** 2 / 16, ")")

# --- alpha expansion ----------------------------------------------------------
print("alpha global k=0 N=1 n=1:", br.alpha_expansion(0, 1, "global", 1))
print("alpha global k=2 N=2 n=0:", br.alpha_expansion(2, 0, "global", 2))
print("alpha blowup k=0 n=0.3:", br.alpha_expansion(0, 0.3, "blowup", 1))
print("alpha blowup k=1 N=2 n=1/10:",
      br.alpha_expansion(1, Fraction(1, 10), "blowup", 2))
print("alpha blowup k=4 N=1 n=0.1:",
      br.alpha_expansion(4, 0.1, "blowup", 1, table=table1))

# --- spectrum shift -----------------------------------------------------------
for k in range(4):
    out = br.spectrum_shift(0.25, 0.1, k, table1)
    print(f"spectrum shift k={k}: measured {out['measured']:.8f} "
          f"absolute {out['absolute']:.8f} printed {out['printed']:.8f} "
          f"residual {out['residual']:.2e}")

# --- synthetic conic machinery -------------------------------------------------
circle = br.QuadraticForm(A=1.0, B=1.0, F0=-1.0)
pair = br.QuadraticForm(E=1.0)
print("classify circle:", br.conic_classify(circle).to_dict())
print("classify u^2-v:", br.conic_classify(
    br.QuadraticForm(A=1.0, D=-1.0)).to_dict())
print("classify rect hyperbola:", br.conic_classify(
    br.QuadraticForm(A=1.0, B=-1.0, F0=-1.0)).to_dict())
inter = br.intersect_conics(circle, pair, simplex=False)
print("circle x line-pair points:", inter.points, "count:", inter.count)
scan = br.dense_conic_scan(circle, pair, domain=((-1.5, 1.5), (-1.5, 1.5)))
print("dense scan count:", scan)

quad = br.QuadraticForm.univariate(8.0, -6.0, 1.0)   # roots 1/4, 1/2
repq = br.solve_quadratic_branch(quad, omega=0.05)
print("synthetic quadratic roots:", [r.value for r in repq.roots],
      "conditions:", repq.conditions, "controlled:",
      repq.perturbation_controlled, "enclosures:",
      [r.enclosure for r in repq.roots])

print("total smoke time:", time.time() - t0)
