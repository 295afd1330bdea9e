"""Time-reversal round trip error / tol over a grid of tolerances and horizons.

Usage: python3 scripts/time_reversal_scan.py
"""
from polarsuper import catalog, dynamics
from polarsuper.phasecore import PhasePoint


def main():
    m = catalog.make_smoro2(-1.0, 0.1, 0.05)
    p0 = PhasePoint(1.0, 0.1, 0.1, 0.8)
    horizons = (5.0, 10.0, 20.0, 50.0, 100.0)
    tols = (1e-6, 1e-8, 1e-10, 1e-12, 1e-13)
    print("tol      " + "".join(f"  tmax={t:<6g}" for t in horizons))
    for tol in tols:
        row = [dynamics.time_reversal_error(m, p0, t, tol) / tol for t in horizons]
        print(f"{tol:<9.0e}" + "".join(f"  {v:11.3f}" for v in row))
    print("entries are error / tol; the contract is < 10")


if __name__ == "__main__":
    main()
