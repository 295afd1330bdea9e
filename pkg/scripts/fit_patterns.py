"""Recover the third-order coefficient pattern of the quadratic cases by least squares.

Usage: python3 scripts/fit_patterns.py
"""
import math

from polarsuper import catalog, detsys


def main():
    for m in (catalog.make_smoro2(-1.0, 0.1, 0.05), catalog.make_smoro1(0.5, 0.1, 0.2)):
        intervals = m.angular.domain_intervals(0.0, math.pi, guard=0.05)
        fit_th = detsys._spread(intervals, 60)
        ref_th = detsys._spread(intervals, 121)
        if m.name == "smoro2":
            fit = detsys.fit_coulomb_pattern(m.angular.S, m.radial.a, m.hbar, fit_th)
            rep = detsys.residual_angular_coulomb(m.angular.S, fit.beta, fit.coeffs, m.radial.a,
                                                  m.hbar, ref_th, xi0=fit.xi0)
        else:
            fit = detsys.fit_oscillator_pattern(m.angular.S, m.hbar, fit_th)
            rep = detsys.residual_angular_oscillator(m.angular.S, fit.coeffs, m.radial.a, m.hbar,
                                                     ref_th, xi0=fit.xi0)
        nz = {k: round(v, 10) for k, v in fit.coeffs.as_dict().items() if abs(v) > 1e-9}
        print(f"{m.name}: coefficients {nz}, xi0 {fit.xi0:.6g}, spectral gap {fit.gap:.2e}, "
              f"refined-grid residual {rep.sup:.2e}")


if __name__ == "__main__":
    main()
