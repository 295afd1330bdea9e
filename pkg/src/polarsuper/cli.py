"""Command line: ``polarsuper {verify,orbit,specfun,scan} --config run.json``.

Exit codes: 0 all checks pass, 1 a check failed, 2 configuration or domain error.
Reports are JSON with sorted keys and no timestamps, so a fixed config and
seed give byte-identical output.  See ``docs/report_schema.md``.
"""
from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import json
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import Callable

import numpy as np

from . import catalog, detsys, dynamics, quantumop, specfun
from .errors import ConfigurationError, DomainError
from .expr import Expression
from .phasecore import (AngularProfile, Coulomb, CustomRadial, ExplicitIntegral, Oscillator,
                        PhasePoint, PotentialModel, UFunc)
from .ybuilder import YCoeffs

SCHEMA = "polarsuper.report/1"

DEFAULT_TOLS = {"residual": 1e-8, "commutator": 1e-6, "drift": 1e-7, "closure": 1e-6,
                "relation": 1e-10, "chain": 1e-6}

# bounded (or, for R = 0, periapsis-crossing) initial data used when the config gives none
DEFAULT_ORBITS = {
    "smoro2": {"p0": [1.0, 0.1, 0.1, 0.8], "tmax": 200.0},
    "smoro1": {"p0": [1.0, 0.7, 0.3, 0.2], "tmax": 60.0},
    "calogero": {"p0": [math.cos(0.4), math.sin(0.4), 0.2, 0.5], "tmax": 5.0},
    "classical-T1": {"p0": [math.cos(0.7), math.sin(0.7), 0.1, 0.4], "tmax": 3.0},
    "classical-T2": {"p0": [math.cos(0.7), math.sin(0.7), 0.1, 0.4], "tmax": 3.0},
}

DEFAULT_PARAMS = {
    "smoro2": {"a": -1.0, "alpha1": 0.1, "alpha2": 0.05},
    "smoro1": {"a": 0.5, "b": 0.1, "c": 0.2},
    "calogero": {"alpha": 0.7, "hbar": 1.0},
    "weierstrass": {"t2": 4.0, "t3": 1.0, "hbar": 1.0},
    "weierstrass-c1": {"hbar": 1.0, "xi0": -2.0, "b": 0.0, "c": 0.0},
    "p6": {"gammas": [0.5, -0.2, 0.2, 0.3], "branch": 1, "hbar": 1.0, "beta2": 0.1},
    "classical-T1": {"alpha": 0.7, "beta2": 0.3},
    "classical-T2": {"alpha": -0.7, "beta2": 0.3},
}


# -- config --------------------------------------------------------------------------

def load_config(path: str | None) -> dict:
    if path is None:
        raise ConfigurationError("--config is required")
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"cannot read config {path}: {e}") from None
    if not isinstance(cfg, dict):
        raise ConfigurationError("config must be a JSON object")
    return cfg


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def tolerances(cfg: dict, override: float | None) -> dict:
    tols = dict(DEFAULT_TOLS)
    tols.update(cfg.get("tol", {}))
    if override is not None:
        tols = {k: override for k in tols}
    for k, v in tols.items():
        if not (isinstance(v, (int, float)) and v > 0):
            raise ConfigurationError(f"tolerance {k} must be positive")
    return tols


def _custom_model(spec: dict) -> PotentialModel:
    hbar = float(spec.get("hbar", 0.0))
    R = Expression.parse(spec.get("radial", "0"), ("r",)).function()
    S = Expression.parse(spec.get("angular", "0"), ("theta",)).function()
    ang = AngularProfile(UFunc(S, name="custom"), singular=tuple(spec.get("singular", ())),
                         period=float(spec.get("period", 2 * math.pi)),
                         guard=float(spec.get("guard", 1e-6)), name="custom")
    integral = None
    if "integral" in spec:
        I = spec["integral"]
        try:
            coeffs = YCoeffs(**I.get("coeffs", {}))
        except TypeError as e:
            raise ConfigurationError(f"bad integral coefficients: {e}") from None
        g1 = Expression.parse(I.get("g1", "0"), ("x", "y")).function()
        g2 = Expression.parse(I.get("g2", "0"), ("x", "y")).function()
        integral = ExplicitIntegral(coeffs, g1, g2, label="Y")
    return PotentialModel(CustomRadial(R, name="custom"), ang, hbar=hbar, integral=integral,
                          name="custom")


def _perturb(m: PotentialModel, pert: dict) -> PotentialModel:
    """Scale the attached integral's g1/g2 (negative controls)."""
    if not pert:
        return m
    if m.integral is None:
        raise ConfigurationError("perturb needs a model with an attached integral")
    s1, s2 = float(pert.get("g1_scale", 1.0)), float(pert.get("g2_scale", 1.0))
    I = m.integral
    g1, g2 = I.g1, I.g2
    new = replace(I, g1=lambda x, y: s1 * g1(x, y), g2=lambda x, y: s2 * g2(x, y))
    return m.with_integral(new)


def build_model(cfg: dict) -> PotentialModel:
    pot = cfg.get("potential")
    if not isinstance(pot, dict) or "name" not in pot:
        raise ConfigurationError("config needs potential.name")
    name = pot["name"]
    if name == "custom":
        m = _custom_model(pot)
    elif name in catalog.NAMES:
        params = dict(DEFAULT_PARAMS.get(name, {}))
        params.update(pot.get("params", {}))
        try:
            m = catalog.build(name, params)
        except TypeError as e:
            raise ConfigurationError(f"bad parameters for {name}: {e}") from None
    else:
        raise ConfigurationError(f"unknown catalog name {name!r}; known: {', '.join(catalog.NAMES)}")
    return _perturb(m, cfg.get("perturb", {}))


def model_summary(m: PotentialModel, cfg: dict) -> dict:
    pot = cfg["potential"]
    params = dict(DEFAULT_PARAMS.get(pot["name"], {}))
    params.update(pot.get("params", {}))
    return {"name": m.name, "hbar": m.hbar, "params": params,
            "integrals": [I.label for I in m.integrals], "classical_limit": m.classical_limit}


# -- checks ---------------------------------------------------------------------------

def _check(name: str, value: float, tol: float, details: dict | None = None, passed=None) -> dict:
    ok = bool(value < tol) if passed is None else bool(passed)
    v = float(value) if math.isfinite(value) else str(value)
    return {"name": name, "value": v, "tol": tol, "passed": ok, "details": details or {}}


def _grid_for(m: PotentialModel, cfg: dict) -> detsys.EvalGrid:
    g = cfg.get("grid", {})
    win = m.meta.get("theta_window")
    if win is not None:
        lo, hi = win
        pad = 0.05 * (hi - lo)
        return detsys.EvalGrid(np.geomspace(0.3, 4.0, int(g.get("nr", 8))),
                               np.linspace(lo + pad, hi - pad, int(g.get("ntheta", 16))))
    return detsys.EvalGrid.default(m.angular, nr=int(g.get("nr", 8)), nth=int(g.get("ntheta", 24)))


def check_determining(m, cfg, tols, rng) -> list[dict]:
    if not m.integrals:
        raise ConfigurationError(f"{m.name} has no attached integral; use the 'fit' check")
    grid = _grid_for(m, cfg)
    out = []
    for I in m.integrals:
        G1, G2 = detsys.G_from_g(I.g1, I.g2)
        if m.classical_limit:
            rep = detsys.residual_det_linear(m, I.coeffs, G1, G2, grid, tol=tols["residual"])
            out.append(_check(f"determining[{I.label}]", rep.sup, tols["residual"], rep.as_dict()))
        if m.hbar > 0:
            rep = detsys.residual_det_quantum(m, I.coeffs, G1, G2, grid, tol=tols["residual"])
            out.append(_check(f"determining_quantum[{I.label}]", rep.sup, tols["residual"], rep.as_dict()))
        rep = detsys.residual_compatibility(m, I.coeffs, grid, tol=tols["residual"])
        out.append(_check(f"compatibility[{I.label}]", rep.sup, tols["residual"], rep.as_dict()))
    return out


def check_commutator(m, cfg, tols, rng) -> list[dict]:
    if m.hbar <= 0:
        raise ConfigurationError("commutator check needs hbar > 0")
    c = cfg.get("commutator", {})
    win = m.meta.get("theta_window")
    tw = None
    if win is not None:
        pad = 0.05 * (win[1] - win[0])
        tw = (win[0] + pad, win[1] - pad)
    pts = quantumop.sample_domain_points(m, int(c.get("points", 40)), rng, theta_window=tw)
    tests = quantumop.random_test_functions(rng, pts, int(c.get("tests", 6)))
    H = quantumop.build_H_op(m)
    out = []
    for I, Yop in zip(m.integrals, quantumop.build_integral_ops(m)):
        st = quantumop.commutator_residual(H, Yop, tests, pts)
        out.append(_check(f"commutator[{I.label}]", st.sup, tols["commutator"], st.as_dict()))
    if c.get("include_X", False):
        st = quantumop.commutator_residual(H, quantumop.build_X_op(m), tests, pts)
        out.append(_check("commutator[X]", st.sup, tols["commutator"], st.as_dict()))
    return out


def _orbit_spec(m, cfg) -> dict:
    spec = dict(DEFAULT_ORBITS.get(cfg["potential"]["name"], {}))
    spec.update(cfg.get("orbit", {}))
    if "p0" not in spec or "tmax" not in spec:
        raise ConfigurationError("orbit needs p0 and tmax")
    if len(spec["p0"]) != 4:
        raise ConfigurationError("orbit.p0 must be [x, y, px, py]")
    return spec


def _run_orbit(m, cfg):
    spec = _orbit_spec(m, cfg)
    tr = dynamics.integrate(m, PhasePoint(*map(float, spec["p0"])), float(spec["tmax"]),
                            float(spec.get("tol", 1e-12)), int(spec.get("n_samples", 2001)))
    return tr, spec


def _drifts(m, tr) -> dict:
    out = {k: dynamics.drift(tr, k) for k in tr.observables}
    for k in ("K", "X1"):
        if k in m.meta:
            out[k] = dynamics.drift(tr, m.meta[k])
    return out


def check_drift(m, cfg, tols, rng) -> list[dict]:
    tr, spec = _run_orbit(m, cfg)
    d = _drifts(m, tr)
    info = {"truncated": tr.truncated, "tmax": spec["tmax"], "samples": len(tr)}
    return [_check(f"drift[{k}]", v, tols["drift"], info) for k, v in sorted(d.items())]


def check_closure(m, cfg, tols, rng) -> list[dict]:
    tr, spec = _run_orbit(m, cfg)
    cl = dynamics.detect_closure(tr, tols["closure"])
    return [_check("closure", cl.mismatch, tols["closure"],
                   {"period": cl.period, "bounded": cl.bounded, "crossings": cl.n_crossings},
                   passed=cl.period is not None)]


def check_fit(m, cfg, tols, rng) -> list[dict]:
    g = cfg.get("grid", {})
    n = int(g.get("ntheta", 60))
    intervals = m.angular.domain_intervals(0.0, math.pi, guard=0.05)
    fit_th = detsys._spread(intervals, n)
    ref_th = detsys._spread(intervals, 2 * n + 1)
    ref_th = ref_th[~np.isin(ref_th, fit_th)]
    if isinstance(m.radial, Coulomb):
        a = m.radial.a
        fit = detsys.fit_coulomb_pattern(m.angular.S, a, m.hbar, fit_th)
        rep = detsys.residual_angular_coulomb(m.angular.S, fit.beta, fit.coeffs, a, m.hbar, ref_th,
                                              xi0=fit.xi0, tol=tols["residual"])
    elif isinstance(m.radial, Oscillator):
        fit = detsys.fit_oscillator_pattern(m.angular.S, m.hbar, fit_th)
        rep = detsys.residual_angular_oscillator(m.angular.S, fit.coeffs, m.radial.a, m.hbar, ref_th,
                                                 xi0=fit.xi0, tol=tols["residual"])
    else:
        raise ConfigurationError("fit check supports Coulomb and oscillator radial parts")
    nz = {k: v for k, v in fit.coeffs.as_dict().items() if abs(v) > 1e-9}
    return [_check("fit", rep.sup, tols["residual"],
                   {"coeffs": nz, "xi0": fit.xi0, "gap": fit.gap, "report": rep.as_dict()})]


def check_algebraic(m, cfg, tols, rng) -> list[dict]:
    if m.name != "weierstrass":
        raise ConfigurationError("algebraic check applies to the weierstrass model")
    w = m.meta["w"]
    n = int(cfg.get("algebraic", {}).get("points", 100))
    worst = 0.0
    for _ in range(n):
        th = rng.uniform(0.2, 1.2)
        ell = rng.normal()
        X = ell * ell + 2 * m.hbar ** 2 * specfun.wp_eval(w, th)[0]
        res = catalog.algebraic_relation_residual(w, m.hbar, th, ell)
        worst = max(worst, res / max(1.0, abs(X) ** 3))
    return [_check("algebraic_relation", worst, tols["relation"], {"points": n})]


def check_class1(m, cfg, tols, rng) -> list[dict]:
    t = m.meta.get("params")
    if not isinstance(t, catalog.TFamilyParams):
        raise ConfigurationError("class1 check applies to classical-T models")
    z = np.linspace(0.1, 5.0, 50)
    rep = catalog.residual_class1(t.T_of_z(), z, t.beta1, t.beta2, t.K1, tol=tols["residual"])
    det = float(np.max(np.abs(catalog.condition_det(t.beta1, t.beta2, t.K1, z))))
    return [_check("class1", rep.sup, tols["residual"], rep.as_dict()),
            _check("condition_det", det, tols["residual"], {"nz": 50})]


def check_c1d0(m, cfg, tols, rng) -> list[dict]:
    if m.angular.beta is None:
        raise ConfigurationError("c1d0 check needs a model with beta")
    grid = _grid_for(m, cfg)
    th = np.unique(grid.theta)
    # the C1 Weierstrass potential carries the D0 = 1 integral as well, with its xi0
    wc1 = m.name == "weierstrass-c1"
    xi0, D0 = (m.meta["xi0"], 1.0) if wc1 else (0.0, 0.0)
    rep = detsys.residual_angular_c1d0(m.angular.S, m.angular.beta, xi0, 1.0, D0, m.hbar, th,
                                       tol=tols["residual"])
    return [_check("c1d0", rep.sup, tols["residual"], rep.as_dict())]


def check_p6_chain(m, cfg, tols, rng) -> list[dict]:
    if m.name != "p6":
        raise ConfigurationError("p6_chain applies to the p6 model")
    sol = m.meta["sol"]
    lo, hi = sol.window
    xs = np.linspace(lo + 0.01, hi - 0.01, 41)
    ode = float(np.max(np.abs(sol.residual())))
    bk = float(np.max(specfun.backlund_consistency(sol.params, sol, xs)))
    tlo, thi = m.meta["theta_window"]
    pad = 0.05 * (thi - tlo)
    rep = catalog.p6_integral_residuals(m, np.linspace(tlo + pad, thi - pad, 41), tol=tols["chain"])
    return [_check("p6_ode", ode, tols["chain"]), _check("backlund", bk, tols["chain"]),
            _check("T_integrals", rep.sup, tols["chain"], rep.as_dict())]


CHECKS: dict[str, Callable] = {
    "determining": check_determining, "commutator": check_commutator, "drift": check_drift,
    "closure": check_closure, "fit": check_fit, "algebraic": check_algebraic,
    "class1": check_class1, "c1d0": check_c1d0, "p6_chain": check_p6_chain,
}


def default_checks(name: str, m: PotentialModel) -> list[str]:
    quantum = ["commutator"] if m.hbar > 0 else []
    table = {
        "smoro2": ["fit", "drift", "closure"],
        "smoro1": ["fit", "drift", "closure"],
        "calogero": ["determining", "drift"] + quantum,
        "weierstrass": ["algebraic"] + quantum,
        "weierstrass-c1": ["c1d0", "determining", "commutator"],
        "p6": ["p6_chain", "determining", "commutator"],
        "classical-T1": ["class1", "c1d0", "determining", "drift"],
        "classical-T2": ["class1", "c1d0", "determining", "drift"],
    }
    if name in table:
        return table[name]
    return (["determining"] if m.integral is not None else []) + quantum


def run_checks(m, cfg, tols, seed: int) -> list[dict]:
    names = cfg.get("checks") or default_checks(cfg["potential"]["name"], m)
    unknown = [c for c in names if c not in CHECKS]
    if unknown:
        raise ConfigurationError(f"unknown checks {unknown}; known: {sorted(CHECKS)}")
    results = []
    for k, c in enumerate(names):
        rng = np.random.default_rng([seed, k])
        results += CHECKS[c](m, cfg, tols, rng)
    return results


# -- output ------------------------------------------------------------------------------

def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def write_json(path: Path, data: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_clean(data), sort_keys=True, indent=2) + "\n")


def _report(command, cfg, tols, seed, body) -> dict:
    return {"schema": SCHEMA, "command": command, "config_hash": config_hash(cfg), "seed": seed,
            "tolerances": tols, **body}


# -- commands ----------------------------------------------------------------------------

def cmd_verify(cfg: dict, out: Path, seed: int, tol: float | None) -> int:
    tols = tolerances(cfg, tol)
    m = build_model(cfg)
    checks = run_checks(m, cfg, tols, seed)
    passed = all(c["passed"] for c in checks)
    write_json(out / "report.json", _report("verify", cfg, tols, seed,
                                            {"model": model_summary(m, cfg), "checks": checks,
                                             "passed": passed}))
    for c in checks:
        print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}: {c['value']} (tol {c['tol']:g})")
    return 0 if passed else 1


def cmd_orbit(cfg: dict, out: Path, seed: int, tol: float | None) -> int:
    tols = tolerances(cfg, tol)
    m = build_model(cfg)
    if m.hbar > 0 and not m.classical_limit:
        raise ConfigurationError(f"{m.name} with hbar > 0 has no classical limit")
    tr, spec = _run_orbit(m, cfg)
    cl = dynamics.detect_closure(tr, tols["closure"])
    out.mkdir(parents=True, exist_ok=True)
    tr.to_csv(out / "trajectory.csv", period=cl.period)
    d = _drifts(m, tr)
    checks = [_check(f"drift[{k}]", v, tols["drift"]) for k, v in sorted(d.items())]
    write_json(out / "report.json", _report("orbit", cfg, tols, seed, {
        "model": model_summary(m, cfg), "orbit": spec, "truncated": tr.truncated, "reason": tr.reason,
        "closure": {"period": cl.period, "mismatch": cl.mismatch, "bounded": cl.bounded,
                    "crossings": cl.n_crossings},
        "checks": checks, "passed": all(c["passed"] for c in checks), "stats": tr.stats}))
    return 0 if all(c["passed"] for c in checks) else 1


def _grid(spec: dict, key: str) -> np.ndarray:
    rng_ = spec.get(key)
    n = int(spec.get("n", 0))
    if not rng_ or len(rng_) != 2 or n < 1 or not rng_[0] < rng_[1]:
        raise ConfigurationError(f"specfun.{key} must be [lo, hi] with lo < hi and n >= 1")
    return np.linspace(float(rng_[0]), float(rng_[1]), n)


def cmd_specfun(cfg: dict, out: Path, seed: int, tol: float | None) -> int:
    tols = tolerances(cfg, tol)
    spec = cfg.get("specfun")
    if not isinstance(spec, dict):
        raise ConfigurationError("config needs a specfun section")
    kind = spec.get("kind")
    out.mkdir(parents=True, exist_ok=True)
    rows, worst = [], 0.0
    if kind == "wp":
        w = specfun.WeierstrassParams(float(spec["t2"]), float(spec["t3"]))
        th = _grid(spec, "theta")
        p, dp = specfun.wp_eval(w, th)
        res = np.abs(specfun.wp_ode_residual(w, p, dp)) / np.maximum(1.0, np.abs(dp) ** 2)
        worst = float(res.max())
        header = ["theta", "p", "dp", "residual"]
        rows = zip(th, p, dp, res)
        limit = tols["relation"]
    elif kind == "p6":
        pp = specfun.P6Params(*map(float, spec["gammas"]), sqrt_sign=int(spec.get("sqrt_sign", 1)))
        xs = _grid(spec, "x")
        sol = specfun.p6_integrate(pp, float(spec.get("x0", 0.5)), float(spec.get("y0", 0.25)),
                                   float(spec.get("yp0", 0.5)), xs)
        kept = set(np.round(sol.xs, 15))
        res = np.abs(sol.residual()) if len(sol.xs) > 4 else np.zeros(len(sol.xs))
        W = specfun.backlund_W(pp, sol.xs, sol.y, sol.yp)
        Wp = specfun.backlund_Wprime(pp, sol.xs, sol.y, sol.yp)
        worst = float(res.max(initial=0.0))
        header = ["x", "P6", "P6prime", "W", "Wprime", "residual", "pole_flag"]
        rows = [(x, y, yp, a, b, r, 0) for x, y, yp, a, b, r in zip(sol.xs, sol.y, sol.yp, W, Wp, res)]
        rows += [(x, math.nan, math.nan, math.nan, math.nan, math.nan, 1)
                 for x in xs if round(float(x), 15) not in kept]
        rows.sort(key=lambda r: r[0])
        limit = tols["chain"]
    else:
        raise ConfigurationError("specfun.kind must be 'wp' or 'p6'")
    with open(out / "specfun.csv", "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for r in rows:
            wr.writerow([repr(float(v)) if not isinstance(v, int) else str(v) for v in r])
    chk = _check(f"{kind}_residual", worst, limit)
    write_json(out / "report.json", _report("specfun", cfg, tols, seed,
                                            {"checks": [chk], "passed": chk["passed"]}))
    return 0 if chk["passed"] else 1


def cmd_scan(cfg: dict, out: Path, seed: int, tol: float | None) -> int:
    """Repeat ``verify`` over ``scan.values`` of the parameter ``scan.param``."""
    tols = tolerances(cfg, tol)
    sc = cfg.get("scan")
    if not isinstance(sc, dict) or "param" not in sc or not sc.get("values"):
        raise ConfigurationError("scan needs param and a non-empty values list")
    rows, runs = [], []
    for v in sc["values"]:
        sub = copy.deepcopy(cfg)
        sub.setdefault("potential", {}).setdefault("params", {})[sc["param"]] = v
        m = build_model(sub)
        checks = run_checks(m, sub, tols, seed)
        runs.append({"value": v, "checks": checks, "passed": all(c["passed"] for c in checks)})
        rows += [(v, c["name"], c["value"], c["passed"]) for c in checks]
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "scan.csv", "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow([sc["param"], "check", "value", "passed"])
        for v, n, val, ok in rows:
            wr.writerow([repr(float(v)), n, repr(float(val)) if not isinstance(val, str) else val, int(ok)])
    passed = all(r["passed"] for r in runs)
    write_json(out / "report.json", _report("scan", cfg, tols, seed, {"runs": runs, "passed": passed}))
    return 0 if passed else 1


COMMANDS = {"verify": cmd_verify, "orbit": cmd_orbit, "specfun": cmd_specfun, "scan": cmd_scan}


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="polarsuper", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True)
    ap.add_argument("--out", default="out")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tol", type=float, default=None)
    args = ap.parse_args(argv)
    if args.seed < 0 or args.seed >= 2 ** 64:
        print("error: seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, Path(args.out), args.seed, args.tol)
    except (ConfigurationError, DomainError, KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
