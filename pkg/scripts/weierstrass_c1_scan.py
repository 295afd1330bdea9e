"""How the Weierstrass C1 potential fails away from b = c = 0.

Prints the angular C1/D0 residual and the Y2 commutator as (b, c) leave zero.

Usage: python3 scripts/weierstrass_c1_scan.py
"""
import numpy as np

from polarsuper import catalog, detsys
from polarsuper import quantumop as Q


def main():
    hbar, xi0 = 1.0, -2.0
    th = np.linspace(0.3, 1.0, 15)
    rng = np.random.default_rng(0)
    print(f"{'b':>6} {'c':>6} {'angular':>10} {'commutator':>11}")
    for b, c in [(0.0, 0.0), (1e-4, 0.0), (1e-2, 0.0), (0.1, 0.0), (0.0, 0.1), (0.3, 0.1)]:
        m = catalog.make_weierstrass_c1(None, hbar, xi0, b, c)
        ang = detsys.residual_angular_c1d0(m.angular.S, m.angular.beta, xi0, 1.0, 1.0, hbar, th).sup
        pts = Q.sample_domain_points(m, 15, rng, theta_window=(0.3, 1.0))
        tests = Q.random_test_functions(rng, pts, 2)
        com = Q.commutator_residual(Q.build_H_op(m), Q.build_integral_ops(m)[0], tests, pts).sup
        print(f"{b:6g} {c:6g} {ang:10.2e} {com:11.2e}")


if __name__ == "__main__":
    main()
