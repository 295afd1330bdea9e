"""Painleve VI chain: P6 solution, Backlund map, the T equations, the quantum potential.

Usage: python3 scripts/p6_chain.py [out.csv]
"""
import sys

import numpy as np

from polarsuper import catalog, specfun
from polarsuper import quantumop as Q


def main(out=None):
    p = specfun.P6Params(0.5, -0.2, 0.2, 0.3)
    print(f"gammas {p.gamma1, p.gamma2, p.gamma3, p.gamma4}, constraint residual {abs(p.constraint_residual):.2e}")
    sol = specfun.p6_integrate(p, 0.5, 0.25, 0.5, np.linspace(0.05, 0.95, 181))
    print(f"P6 on [{sol.xs[0]:.2f}, {sol.xs[-1]:.2f}], truncated={sol.truncated}, "
          f"ODE residual {np.max(np.abs(sol.residual())):.2e}")
    inner = sol.xs[(sol.xs > 0.1) & (sol.xs < 0.9)]
    print(f"Backlund d/dx W vs W': {np.max(specfun.backlund_consistency(p, sol, inner)):.2e}")
    rng = np.random.default_rng(0)
    for branch in (1, -1):
        m = catalog.make_p6_potential(p, sol, branch=branch, hbar=1.0, beta2=0.1)
        lo, hi = m.meta["theta_window"]
        pad = 0.05 * (hi - lo)
        rep = catalog.p6_integral_residuals(m, np.linspace(lo + pad, hi - pad, 41), tol=1e-6)
        pts = Q.sample_domain_points(m, 20, rng, theta_window=(lo + pad, hi - pad))
        tests = Q.random_test_functions(rng, pts, 3)
        com = Q.commutator_residual(Q.build_H_op(m), Q.build_integral_ops(m)[0], tests, pts)
        print(f"branch {branch:+d}: theta in [{lo:.3f}, {hi:.3f}], T equations {rep.sup:.2e}, "
              f"commutator sup {com.sup:.2e}")
    if out:
        sol.to_csv(out)
        print(f"wrote {out}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else None)
