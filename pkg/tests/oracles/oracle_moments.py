"""Closed-form moment values used by the semigroup tests.

Monomial moments M_b(u0) = (1/sqrt(b!)) int z^b u0(z) dz for two reference
initial data: the centered Gaussian exp(-y^2) and the shifted Gaussian
exp(-(y-1/2)^2) (generic data whose moments of every order are nonzero, used
by the decay-rate fixtures). Also the kernel's own monomial moments
m_k = i^k d^k/dxi^k exp(-xi^4) |_0, which vanish for k in {1,2,3} and equal
-24, 20160 at k = 4, 8 — the same constants that appear in the adjoint
polynomials (Appell duality).
"""

import json
from math import factorial

import sympy as sp


def main():
    y = sp.symbols("y", real=True)
    out = {}

    g2 = sp.integrate(y**2 * sp.exp(-(y**2)), (y, -sp.oo, sp.oo))
    out["M2_centered_gaussian"] = float(g2 / sp.sqrt(2))  # (1/sqrt(2))*(sqrt(pi)/2)

    shifted = sp.exp(-((y - sp.Rational(1, 2)) ** 2))
    out["M_shifted_gaussian_upto8"] = [
        float(sp.integrate(y**k * shifted, (y, -sp.oo, sp.oo)) / sp.sqrt(factorial(k)))
        for k in range(9)
    ]

    xi = sp.symbols("xi")
    symbol = sp.exp(-(xi**4))
    out["kernel_monomial_moments_upto8"] = [
        int(sp.I**k * sp.diff(symbol, xi, k).subs(xi, 0)) for k in range(9)
    ]
    return out


if __name__ == "__main__":
    print(json.dumps(main(), indent=2))
